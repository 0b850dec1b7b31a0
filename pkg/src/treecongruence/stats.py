"""Kendall's tau-b, Spearman's rho and metric-by-metric concordance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as _sps

from .errors import DegenerateAllTies, LengthMismatch


def _check(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise LengthMismatch(f"score vectors differ in shape: {x.shape} vs {y.shape}")
    if x.size < 2:
        raise LengthMismatch("need at least two observations")
    for v in (x, y):
        if np.all(v == v[0]):
            raise DegenerateAllTies("a score vector is constant; rank correlation is undefined")
    return x, y


def kendall_tau_b(x, y) -> float:
    """Kendall's tau-b: (C - D) / sqrt((n0 - n1)(n0 - n2))."""
    x, y = _check(x, y)
    return float(_sps.kendalltau(x, y, variant="b").statistic)


def spearman_rho(x, y) -> float:
    """Pearson correlation of mid-ranks."""
    x, y = _check(x, y)
    return float(_sps.spearmanr(x, y).statistic)


@dataclass(frozen=True)
class ConcordanceMatrix:
    """tau-b above the diagonal, rho below it; the diagonal is 1."""

    names: tuple
    values: np.ndarray

    def tau_b(self, a: str, b: str) -> float:
        i, j = sorted((self.names.index(a), self.names.index(b)))
        return float(self.values[i, j])

    def rho(self, a: str, b: str) -> float:
        i, j = sorted((self.names.index(a), self.names.index(b)))
        return float(self.values[j, i])

    def mean_abs_tau_b(self, name: str) -> float:
        others = [n for n in self.names if n != name]
        return sum(abs(self.tau_b(name, o)) for o in others) / len(others)

    def to_rows(self, decimals: int = 3):
        """Header row then one row per metric; diagonal cells are blank."""
        rows = [["metric", *self.names]]
        for i, name in enumerate(self.names):
            row = [name]
            for j in range(len(self.names)):
                row.append("" if i == j else f"{self.values[i, j]:.{decimals}f}")
            rows.append(row)
        return rows


def concordance_matrix(vectors: dict) -> ConcordanceMatrix:
    """Pairwise tau-b (upper triangle) and rho (lower triangle)."""
    names = tuple(vectors)
    if len(names) < 2:
        raise LengthMismatch("need at least two score vectors")
    k = len(names)
    out = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            x, y = vectors[names[i]], vectors[names[j]]
            out[i, j] = kendall_tau_b(x, y)
            out[j, i] = spearman_rho(x, y)
    return ConcordanceMatrix(names, out)
