"""Revealed comparative advantage, its log transform, and the Economic Complexity Index."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllZeroMatrix, DegenerateMembership, ZeroCountryTotal, ZeroVariance
from .ingest import AnalysisPanel, ExportTable

# eigenvalues closer than this are treated as equal
EIGEN_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class RcaMatrix:
    countries: tuple[str, ...]
    products: tuple[str, ...]
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class LogRcaMatrix:
    countries: tuple[str, ...]
    products: tuple[str, ...]
    values: np.ndarray
    delta: float


@dataclass(frozen=True, eq=False)
class EciVector:
    countries: tuple[str, ...]
    score: np.ndarray
    diversity: np.ndarray
    eigenvalue: float
    pruned: tuple[str, ...] = ()
    pruned_products: tuple[str, ...] = ()

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.countries, map(float, self.score)))


def rca_matrix(values, countries=None, products=None) -> RcaMatrix:
    """RCA of a dense country x product export matrix.

    ``R[c, p] = (X[c, p] / sum_p X[c, p]) / (sum_c X[c, p] / sum X)``.
    Products with zero world exports get RCA 0.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 2:
        raise ValueError("export matrix must be two-dimensional")
    n_c, n_p = x.shape
    countries = tuple(countries) if countries is not None else tuple(str(i) for i in range(n_c))
    products = tuple(products) if products is not None else tuple(str(j) for j in range(n_p))
    row = x.sum(axis=1)
    if np.any(row <= 0):
        bad = [c for c, t in zip(countries, row) if t <= 0]
        raise ZeroCountryTotal(f"countries with zero total exports: {', '.join(bad)}")
    col = x.sum(axis=0)
    world = col / x.sum()
    share = x / row[:, None]
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(world > 0, share / np.where(world > 0, world, 1.0), 0.0)
    return RcaMatrix(countries, products, r)


def compute_rca(exports: ExportTable | AnalysisPanel) -> RcaMatrix:
    if isinstance(exports, AnalysisPanel):
        return rca_matrix(exports.exports, exports.countries, exports.products)
    return rca_matrix(exports.matrix(), exports.countries, exports.products)


def log_rca(rca: RcaMatrix) -> LogRcaMatrix:
    """``log10(R + delta)`` with delta the smallest positive RCA in the whole matrix."""
    positive = rca.values[rca.values > 0]
    if positive.size == 0:
        raise AllZeroMatrix("RCA matrix has no positive entry")
    delta = float(positive.min())
    return LogRcaMatrix(rca.countries, rca.products, np.log10(rca.values + delta), delta)


def membership(rca: RcaMatrix, threshold: float = 1.0) -> np.ndarray:
    return (rca.values >= threshold).astype(float)


def eci_from_membership(m: np.ndarray) -> tuple[np.ndarray, float]:
    """Second eigenvector of the country-country matrix of a pruned membership matrix.

    ``Mcc[c, c'] = sum_p M[c, p] M[c', p] / (k_c k_p)`` is similar to the
    symmetric ``D^-1/2 M D_p^-1 M^T D^-1/2``, which is what gets diagonalized.
    Returns the raw (unstandardized, unoriented) eigenvector and its eigenvalue.
    """
    kc = m.sum(axis=1)
    kp = m.sum(axis=0)
    a = m / np.sqrt(kc)[:, None] / np.sqrt(kp)[None, :]
    s = a @ a.T
    s = (s + s.T) / 2
    evals, evecs = np.linalg.eigh(s)
    lam1, lam2 = evals[-1], evals[-2]
    lam3 = evals[-3] if len(evals) > 2 else -np.inf
    if lam1 - lam2 < EIGEN_TOL:
        raise DegenerateMembership(
            "membership matrix splits into disconnected blocks (leading eigenvalue not simple)"
        )
    if lam2 < EIGEN_TOL:
        raise ZeroVariance("no structure beyond the leading eigenvector (identical membership rows)")
    if lam2 - lam3 < EIGEN_TOL:
        raise DegenerateMembership("second eigenvalue is not simple; complexity ranking undefined")
    return evecs[:, -2] / np.sqrt(kc), float(lam2)


def compute_eci(rca: RcaMatrix, threshold: float = 1.0) -> EciVector:
    """Economic Complexity Index by the eigenvector method.

    Countries without any RCA >= 1 and products nobody exports with RCA >= 1 are
    pruned first; pruned countries get no score and are listed in ``pruned``.
    The score is standardized (population std) and oriented so that it
    correlates non-negatively with diversity.
    """
    m = membership(rca, threshold)
    rows = m.sum(axis=1) > 0
    cols = m.sum(axis=0) > 0
    m = m[rows][:, cols]
    countries = tuple(c for c, ok in zip(rca.countries, rows) if ok)
    if len(countries) < 3 or m.shape[1] == 0:
        raise DegenerateMembership(
            f"{len(countries)} countries and {m.shape[1]} products left after pruning"
        )
    vec, lam = eci_from_membership(m)
    sd = vec.std()
    if sd < 1e-12 * max(1.0, np.abs(vec).max()):
        raise ZeroVariance("complexity eigenvector is constant")
    score = (vec - vec.mean()) / sd
    diversity = m.sum(axis=1)
    if diversity.std() > 0 and np.corrcoef(score, diversity)[0, 1] < 0:
        score = -score
    elif diversity.std() == 0 and score[np.flatnonzero(np.abs(score) > 1e-12)[0]] < 0:
        score = -score
    return EciVector(
        countries=countries,
        score=score,
        diversity=diversity,
        eigenvalue=lam,
        pruned=tuple(c for c, ok in zip(rca.countries, rows) if not ok),
        pruned_products=tuple(p for p, ok in zip(rca.products, cols) if not ok),
    )
