import csv
import io

import pytest

from treecongruence.cli import CONCORDANCE_METRICS, main
from treecongruence.metrics import CSV_FIELDS
from treecongruence.simulate import perturb, random_binary_tree
from treecongruence.tree import write_newick_file


def rows_of(text):
    return list(csv.reader(io.StringIO(text)))


@pytest.fixture
def files(tmp_path):
    a = tmp_path / "a.nwk"
    b = tmp_path / "b.nwk"
    far = tmp_path / "far.nwk"
    bad = tmp_path / "bad.nwk"
    a.write_text("(((a,b),c),d);\n")
    b.write_text("(((a,c),b),d);\n((a,b),(c,d));\n")
    far.write_text("((x,y),z);\n")
    bad.write_text("((a,b),c;\n")
    return tmp_path


class TestCompare:
    def test_identical(self, files, capsys):
        assert main(["compare", str(files / "a.nwk"), str(files / "a.nwk")]) == 0
        out = capsys.readouterr().out
        for name in ("cri", "cf", "ci_1", "rf_similarity", "spr_similarity", "distortion_ab"):
            assert any(line.split() == [name, "1.000"] for line in out.splitlines()), name

    def test_csv(self, files, capsys):
        assert main(["compare", str(files / "a.nwk"), str(files / "b.nwk"), "--csv"]) == 0
        rows = rows_of(capsys.readouterr().out)
        assert rows[0] == list(CSV_FIELDS)
        row = dict(zip(rows[0], rows[1]))
        assert row["pair_id"] == "a~b"
        assert (row["T"], row["mT"], row["cri"], row["cf"], row["mast_x_cf"]) == ("4", "3", "0.333", "0.500", "0.375")
        assert (row["rf_distance"], row["spr_distance"], row["spr_similarity"]) == ("2", "1", "0.500")

    def test_index(self, files, capsys):
        assert main(["compare", str(files / "a.nwk"), str(files / "b.nwk"), "--index-b", "2", "--csv"]) == 0
        row = dict(zip(*rows_of(capsys.readouterr().out)))
        assert row["rf_distance"] == "2"
        assert main(["compare", str(files / "a.nwk"), str(files / "b.nwk"), "--index", "3"]) == 2

    def test_disjoint_exit_3(self, files, capsys):
        assert main(["compare", str(files / "a.nwk"), str(files / "far.nwk")]) == 3
        assert "error" in capsys.readouterr().err

    def test_parse_error_exit_2(self, files, capsys):
        assert main(["compare", str(files / "a.nwk"), str(files / "bad.nwk")]) == 2
        assert "offset" in capsys.readouterr().err

    def test_missing_file(self, files):
        assert main(["compare", str(files / "a.nwk"), str(files / "nope.nwk")]) == 2


class TestBatch:
    def test_ten_trees(self, tmp_path, capsys):
        base = random_binary_tree(12, 1)
        trees = [base] + [perturb(base, k % 3 + 1, k) for k in range(9)]
        path = tmp_path / "ten.nwk"
        write_newick_file(path, trees)
        cons = tmp_path / "cons"
        pac = tmp_path / "pac"
        out = tmp_path / "out.csv"
        argv = ["batch", str(path), "-o", str(out), "--consensus-dir", str(cons), "--pacman-dir", str(pac)]
        assert main(argv) == 0
        rows = rows_of(out.read_text())
        assert len(rows) == 46
        assert rows[1][0] == "1_2" and rows[-1][0] == "9_10"
        names = sorted(p.name for p in cons.iterdir())
        assert len(names) == 45 and "pair_1_2.nwk" in names and "pair_9_10.nwk" in names
        assert sorted(p.name for p in pac.iterdir()) == sorted(f"pacman_{m}.svg" for m in CONCORDANCE_METRICS)

    def test_two_identical(self, tmp_path, capsys):
        path = tmp_path / "two.nwk"
        path.write_text("((a,b),(c,d));\n((b,a),(d,c));\n")
        assert main(["batch", str(path)]) == 0
        rows = rows_of(capsys.readouterr().out)
        assert len(rows) == 2
        row = dict(zip(*rows))
        for f in ("cri", "cf", "ci_1", "mast_x_cf", "rf_similarity", "spr_similarity", "distortion_ab"):
            assert row[f] == "1.000"

    def test_single_tree(self, tmp_path):
        path = tmp_path / "one.nwk"
        path.write_text("((a,b),c);\n")
        assert main(["batch", str(path)]) == 2


class TestSimulate:
    def test_per_size_three(self, tmp_path):
        out = tmp_path / "sim"
        assert main(["simulate", "--per-size", "3", "--out-dir", str(out)]) == 0
        files = sorted(p.name for p in out.iterdir())
        assert [f for f in files if f.endswith(".nwk")] == [f"trees_T{T}.nwk" for T in (11, 21, 31, 41)]
        assert sum(len((out / f).read_text().split()) for f in files if f.endswith(".nwk")) == 12
        assert len(rows_of((out / "battery.csv").read_text())) == 13
        assert len([f for f in files if f.endswith(".svg")]) == 36

    def test_deterministic(self, tmp_path):
        argv = ["simulate", "--sizes", "7,9", "--per-size", "4", "--seed", "3"]
        assert main(argv + ["--out-dir", str(tmp_path / "x")]) == 0
        assert main(argv + ["--out-dir", str(tmp_path / "y")]) == 0
        for p in (tmp_path / "x").iterdir():
            assert p.read_bytes() == (tmp_path / "y" / p.name).read_bytes()

    @pytest.mark.parametrize(
        "flags", [["--sizes", "2"], ["--per-size", "1"], ["--moves-min", "4", "--moves-max", "2"]]
    )
    def test_invalid_values(self, tmp_path, flags):
        assert main(["simulate", "--out-dir", str(tmp_path)] + flags) == 2

    def test_unparseable_sizes(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["simulate", "--out-dir", str(tmp_path), "--sizes", "a,b"])
        assert exc.value.code == 2


class TestConcord:
    def test_battery_matrix(self, tmp_path, capsys):
        out = tmp_path / "sim"
        assert main(["simulate", "--sizes", "11,21", "--per-size", "5", "--out-dir", str(out)]) == 0
        assert main(["concord", str(out / "battery.csv")]) == 0
        rows = rows_of(capsys.readouterr().out)
        assert rows[0] == ["metric", *CONCORDANCE_METRICS]
        assert len(rows) == 10 and all(len(r) == 10 for r in rows)
        assert all(rows[i][i] == "" for i in range(1, 10))

    def test_identical_columns(self, tmp_path, capsys):
        path = tmp_path / "s.csv"
        path.write_text("pair_id,cf,cri\n1,0.1,0.1\n2,0.5,0.5\n3,0.3,0.3\n")
        assert main(["concord", str(path)]) == 0
        rows = rows_of(capsys.readouterr().out)
        assert rows[1][2] == rows[2][1] == "1.000"

    def test_single_row(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("pair_id,cf,cri\n1,0.1,0.2\n")
        assert main(["concord", str(path)]) == 2

    def test_malformed(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("pair_id,cf,cri\n1,0.1\n2,0.3,0.4\n")
        assert main(["concord", str(path)]) == 2
        path.write_text("pair_id,cf,cri\n1,x,0.2\n2,0.3,0.4\n")
        assert main(["concord", str(path)]) == 2
        assert main(["concord", str(path), "--metrics", "cf,nope"]) == 2
