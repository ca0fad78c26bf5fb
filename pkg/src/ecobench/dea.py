"""Input-oriented variable-returns-to-scale DEA and the eco-efficiency ranking.

Each country's score comes from the multiplier program::

    max  sum_i u_i y_i0 + w
    s.t. sum_j v_j x_j0 = 1
         sum_i u_i y_ik - sum_j v_j x_jk + w <= 0   for every unit k
         u, v >= 0, w free

with pollution indicators as inputs ``x`` and (translated) economic
complexity as output ``y``. The envelopment dual is kept as an independent
cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EcobenchError, NonFiniteValue, ValidationError
from .lp import INF, LpProblem, LpSolution, solve_lp

# scores closer than this share a rank position and fall back to code order
TIE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DeaInstance:
    """``inputs`` is n x K, ``outputs`` m x K; columns are units."""

    units: tuple[str, ...]
    inputs: np.ndarray
    outputs: np.ndarray

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        y = np.atleast_2d(np.asarray(self.outputs, dtype=float))
        k = len(self.units)
        if k < 1:
            raise ValidationError("DEA needs at least one unit")
        if x.shape[1] != k or y.shape[1] != k:
            raise ValidationError(f"data has {x.shape[1]}/{y.shape[1]} columns for {k} units")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise NonFiniteValue("DEA data must be finite")
        if np.any(x <= 0):
            raise ValidationError("DEA inputs must be strictly positive")
        if np.any(y <= 0):
            raise ValidationError("DEA outputs must be strictly positive (translate them first)")
        object.__setattr__(self, "inputs", x)
        object.__setattr__(self, "outputs", y)
        object.__setattr__(self, "units", tuple(self.units))

    @property
    def n_units(self) -> int:
        return len(self.units)


@dataclass(frozen=True)
class ReprResult:
    country: str
    theta: float
    rank: int


@dataclass(frozen=True)
class LpStats:
    country: str
    theta: float
    iterations: int
    residual: float


def translate_outputs(raw) -> np.ndarray:
    """Shift each output row so its minimum is 1: ``y - min(y) + 1``."""
    y = np.asarray(raw, dtype=float)
    if y.size == 0:
        raise ValidationError("cannot translate an empty vector")
    if not np.all(np.isfinite(y)):
        raise NonFiniteValue("outputs contain NaN or infinite values")
    if y.ndim == 1:
        return y - y.min() + 1.0
    return y - y.min(axis=1, keepdims=True) + 1.0


def build_multiplier_lp(instance: DeaInstance, k0: int) -> LpProblem:
    """Variables ordered ``u_1..u_m, v_1..v_n, w``."""
    x, y = instance.inputs, instance.outputs
    n, m, k = x.shape[0], y.shape[0], instance.n_units
    if not 0 <= k0 < k:
        raise IndexError(f"unit index {k0} out of range for {k} units")
    c = np.concatenate([y[:, k0], np.zeros(n), [1.0]])
    rows = [np.concatenate([np.zeros(m), x[:, k0], [0.0]])]
    rows += [np.concatenate([y[:, j], -x[:, j], [1.0]]) for j in range(k)]
    rel = ("=",) + ("<=",) * k
    rhs = np.concatenate([[1.0], np.zeros(k)])
    lower = np.concatenate([np.zeros(m + n), [-INF]])
    names = tuple(f"u{i}" for i in range(m)) + tuple(f"v{j}" for j in range(n)) + ("w",)
    return LpProblem(c, np.array(rows), rel, rhs, lower, None, names)


def build_envelopment_lp(instance: DeaInstance, k0: int) -> LpProblem:
    """Variables ``theta, lambda_1..lambda_K``; objective is ``-theta`` (maximized)."""
    x, y = instance.inputs, instance.outputs
    n, m, k = x.shape[0], y.shape[0], instance.n_units
    if not 0 <= k0 < k:
        raise IndexError(f"unit index {k0} out of range for {k} units")
    c = np.concatenate([[-1.0], np.zeros(k)])
    rows, rel, rhs = [], [], []
    for i in range(m):
        rows.append(np.concatenate([[0.0], y[i]]))
        rel.append(">=")
        rhs.append(y[i, k0])
    for j in range(n):
        rows.append(np.concatenate([[-x[j, k0]], x[j]]))
        rel.append("<=")
        rhs.append(0.0)
    rows.append(np.concatenate([[0.0], np.ones(k)]))
    rel.append("=")
    rhs.append(1.0)
    lower = np.concatenate([[-INF], np.zeros(k)])
    names = ("theta",) + tuple(f"lambda{j}" for j in range(k))
    return LpProblem(c, np.array(rows), tuple(rel), np.array(rhs), lower, None, names)


def multiplier_score(instance: DeaInstance, k0: int) -> tuple[float, LpSolution]:
    sol = solve_lp(build_multiplier_lp(instance, k0))
    if not sol.optimal:
        raise EcobenchError(f"multiplier LP for {instance.units[k0]} is {sol.status}")
    return sol.objective, sol


def envelopment_score(instance: DeaInstance, k0: int) -> float:
    sol = solve_lp(build_envelopment_lp(instance, k0))
    if not sol.optimal:
        raise EcobenchError(f"envelopment LP for {instance.units[k0]} is {sol.status}")
    return -sol.objective


def rank_scores(units, thetas) -> list[ReprResult]:
    """Sort by score (descending), ties within ``TIE_TOL`` by unit code."""
    key = [(-math.floor(t / TIE_TOL + 0.5), u) for u, t in zip(units, thetas)]
    order = sorted(range(len(units)), key=lambda i: key[i])
    return [ReprResult(units[i], float(thetas[i]), r + 1) for r, i in enumerate(order)]


def score_units(instance: DeaInstance) -> tuple[list[ReprResult], list[LpStats]]:
    thetas, stats = [], []
    for k0, unit in enumerate(instance.units):
        try:
            theta, sol = multiplier_score(instance, k0)
        except EcobenchError as exc:
            raise type(exc)(f"{unit}: {exc}") from exc
        thetas.append(theta)
        stats.append(LpStats(unit, theta, sol.iterations, sol.residual))
    return rank_scores(instance.units, thetas), stats


def score_all(instance: DeaInstance) -> list[ReprResult]:
    """One multiplier LP per unit; results sorted best first."""
    return score_units(instance)[0]


def minmax_normalize(results: list[ReprResult]) -> list[ReprResult]:
    """Rescale scores to [0, 1] by min-max. Not used by default."""
    t = np.array([r.theta for r in results])
    lo, hi = t.min(), t.max()
    scaled = (t - lo) / (hi - lo) if hi > lo else np.ones_like(t)
    return rank_scores([r.country for r in results], scaled)
