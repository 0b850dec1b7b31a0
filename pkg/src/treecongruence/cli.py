"""Command-line interface.

Exit codes: 0 success, 2 bad input (parse errors, malformed CSV, invalid
flags), 3 fewer than three leaves shared by the compared trees.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import logging
import sys
from pathlib import Path

from .consensus import strict_consensus
from .errors import InsufficientOverlap, TooFewLeaves, TreeCongruenceError
from .metrics import CSV_FIELDS, full_report
from .render import PacmanMatrixSpec, render_pacman
from .simulate import BatterySpec, run_battery, simulate_trees
from .stats import concordance_matrix
from .tree import common_leaf_reduction, read_newick_file, write_newick_file

log = logging.getLogger("treecongruence")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_OVERLAP = 3

INT_FIELDS = {"T", "N", "P", "mT", "rf_distance", "spr_distance"}

# Concordance column order; the directional distortion coefficient sits
# between RF and CRI.
CONCORDANCE_METRICS = (
    "cf",
    "ci_m",
    "wcf",
    "ci_1",
    "mast_x_cf",
    "rf_similarity",
    "distortion_ab",
    "cri",
    "spr_similarity",
)


class CliError(Exception):
    def __init__(self, message, code=EXIT_INPUT):
        super().__init__(message)
        self.code = code


# -- CSV ---------------------------------------------------------------------


def _cell(name, value):
    if value is None:
        return ""
    if name in INT_FIELDS:
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.3f}"
    return str(value)


def report_row(report) -> list:
    return [_cell(f, getattr(report, f)) for f in CSV_FIELDS]


def reports_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in reports:
        writer.writerow(report_row(r))
        if r.spr_exact is False:
            log.warning("%s: SPR search budget exhausted; spr_distance is an upper bound", r.pair_id)
    return buf.getvalue()


def read_score_columns(path, metrics=None) -> dict:
    """Metric columns of a battery CSV as float lists.

    Rows with a blank cell in any selected column are dropped.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise CliError(f"{path}: empty CSV")
    header, body = rows[0], rows[1:]
    if metrics is None:
        metrics = [m for m in CONCORDANCE_METRICS if m in header]
    missing = [m for m in metrics if m not in header]
    if missing:
        raise CliError(f"{path}: missing columns {missing}")
    if len(metrics) < 2:
        raise CliError(f"{path}: need at least two metric columns")
    idx = [header.index(m) for m in metrics]
    columns = {m: [] for m in metrics}
    dropped = 0
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise CliError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        cells = [row[i] for i in idx]
        if any(c == "" for c in cells):
            dropped += 1
            continue
        try:
            values = [float(c) for c in cells]
        except ValueError:
            raise CliError(f"{path}:{lineno}: non-numeric score") from None
        for m, v in zip(metrics, values):
            columns[m].append(v)
    if dropped:
        log.warning("%s: skipped %d rows with missing scores", path, dropped)
    if len(columns[metrics[0]]) < 2:
        raise CliError(f"{path}: need at least two complete rows")
    return columns


def _write(path, text):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# -- pac-man output -------------------------------------------------------------


def write_pacman_set(out_dir, reports, n_trees, suffix="", metrics=CONCORDANCE_METRICS):
    """One SVG per metric for a set of C(n, 2) reports in pair order."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    labels = [str(i + 1) for i in range(n_trees)]
    for metric in metrics:
        spec = PacmanMatrixSpec(
            labels=labels,
            values=[getattr(r, metric) for r in reports],
            title=f"{metric}{suffix.replace('_', ' ')}",
        )
        (out_dir / f"pacman_{metric}{suffix}.svg").write_text(render_pacman(spec), encoding="utf-8")


# -- commands ----------------------------------------------------------------------


def _load(path, index):
    try:
        trees = read_newick_file(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None
    except TreeCongruenceError as exc:
        raise CliError(f"{path}: {exc}") from None
    if not trees:
        raise CliError(f"{path}: no trees found")
    if not 1 <= index <= len(trees):
        raise CliError(f"{path}: tree index {index} out of range 1..{len(trees)}")
    return trees[index - 1]


def _pair_report(a, b, budget, pair_id):
    try:
        return full_report(a, b, spr_budget=budget, pair_id=pair_id)
    except (InsufficientOverlap, TooFewLeaves) as exc:
        raise CliError(str(exc), EXIT_OVERLAP) from None


def cmd_compare(args):
    a = _load(args.tree_a, args.index_a or args.index)
    b = _load(args.tree_b, args.index_b or args.index)
    pair_id = f"{Path(args.tree_a).stem}~{Path(args.tree_b).stem}"
    report = _pair_report(a, b, args.spr_budget, pair_id)
    if args.csv:
        _write(None, reports_csv([report]))
        return EXIT_OK
    width = max(len(f) for f in CSV_FIELDS)
    lines = []
    for field, cell in zip(CSV_FIELDS[1:], report_row(report)[1:]):
        lines.append(f"{field:<{width}}  {cell or 'NA'}")
    if report.distortion_mean is not None:
        lines.append(f"{'distortion_mean':<{width}}  {report.distortion_mean:.3f}")
    if report.spr_exact is False:
        lines.append("(spr_distance is an upper bound: search budget exhausted)")
    print("\n".join(lines))
    return EXIT_OK


def cmd_batch(args):
    try:
        trees = read_newick_file(args.trees)
    except OSError as exc:
        raise CliError(f"cannot read {args.trees}: {exc}") from None
    except TreeCongruenceError as exc:
        raise CliError(f"{args.trees}: {exc}") from None
    if len(trees) < 2:
        raise CliError(f"{args.trees}: need at least two trees, found {len(trees)}")
    pairs = list(itertools.combinations(range(len(trees)), 2))
    reports = [_pair_report(trees[i], trees[j], args.spr_budget, f"{i + 1}_{j + 1}") for i, j in pairs]
    if args.consensus_dir:
        out = Path(args.consensus_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, j in pairs:
            a, b = trees[i], trees[j]
            if a.taxa != b.taxa:
                a, b = common_leaf_reduction(a, b)
            write_newick_file(out / f"pair_{i + 1}_{j + 1}.nwk", [strict_consensus(a, b)])
    if args.pacman_dir:
        write_pacman_set(args.pacman_dir, reports, len(trees))
    _write(args.out, reports_csv(reports))
    return EXIT_OK


def _parse_sizes(text):
    try:
        sizes = tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid size list {text!r}") from None
    if not sizes:
        raise argparse.ArgumentTypeError("empty size list")
    return sizes


def cmd_simulate(args):
    try:
        spec = BatterySpec(
            sizes=args.sizes,
            trees_per_size=args.per_size,
            moves_min=args.moves_min,
            moves_max=args.moves_max,
            seed=args.seed,
            spr_budget=args.spr_budget,
        )
    except (ValueError, TreeCongruenceError) as exc:
        raise CliError(f"invalid settings: {exc}") from None
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trees = simulate_trees(spec)
    for T, ts in trees.items():
        write_newick_file(out / f"trees_T{T}.nwk", ts)
    reports = run_battery(spec, trees)
    (out / "battery.csv").write_text(reports_csv(reports), encoding="utf-8")
    n_pairs = len(reports) // len(spec.sizes)
    for k, T in enumerate(spec.sizes):
        write_pacman_set(out, reports[k * n_pairs:(k + 1) * n_pairs], spec.trees_per_size, f"_T{T}")
    log.info("wrote %d trees and %d comparisons to %s", sum(map(len, trees.values())), len(reports), out)
    return EXIT_OK


def cmd_concord(args):
    metrics = args.metrics.split(",") if args.metrics else None
    columns = read_score_columns(args.battery, metrics)
    try:
        matrix = concordance_matrix(columns)
    except TreeCongruenceError as exc:
        raise CliError(f"{args.battery}: {exc}") from None
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(matrix.to_rows())
    _write(args.out, buf.getvalue())
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="treecongruence",
        description="Topological congruence metrics for rooted dendrograms.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    budget = dict(type=int, default=10**6, help="rSPR search budget in expanded states")

    p = sub.add_parser("compare", help="compare two trees")
    p.add_argument("tree_a")
    p.add_argument("tree_b")
    p.add_argument("--index", type=int, default=1, help="1-based tree index used in both files")
    p.add_argument("--index-a", type=int)
    p.add_argument("--index-b", type=int)
    p.add_argument("--csv", action="store_true", help="print a CSV header and row")
    p.add_argument("--spr-budget", **budget)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("batch", help="all pairwise comparisons of the trees in a file")
    p.add_argument("trees")
    p.add_argument("-o", "--out", help="CSV output path (default: stdout)")
    p.add_argument("--consensus-dir", help="write each pair's strict consensus here")
    p.add_argument("--pacman-dir", help="write Pac-man SVG matrices here")
    p.add_argument("--spr-budget", **budget)
    p.set_defaults(func=cmd_batch)

    defaults = BatterySpec()
    p = sub.add_parser("simulate", help="simulate trees and run the comparison battery")
    p.add_argument("--sizes", type=_parse_sizes, default=defaults.sizes)
    p.add_argument("--per-size", type=int, default=defaults.trees_per_size)
    p.add_argument("--moves-min", type=int, default=defaults.moves_min)
    p.add_argument("--moves-max", type=int, default=defaults.moves_max)
    p.add_argument("--seed", type=int, default=defaults.seed)
    p.add_argument("--out-dir", default="simulation")
    p.add_argument("--spr-budget", **budget)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("concord", help="tau-b / rho matrix from a battery CSV")
    p.add_argument("battery")
    p.add_argument("--metrics", help="comma-separated metric columns")
    p.add_argument("-o", "--out", help="CSV output path (default: stdout)")
    p.set_defaults(func=cmd_concord)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
