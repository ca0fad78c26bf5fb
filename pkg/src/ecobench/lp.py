"""Small dense linear programming solver (two-phase tableau simplex).

Problems are stated as *maximize* ``c @ x`` subject to rows ``a_i @ x (<=, >=, =) b_i``
and bounds ``lower <= x <= upper`` (infinite bounds allowed). The solver is
written for the few-hundred-column programs DEA produces; it favours
reproducibility over speed: Dantzig pricing, switching permanently to Bland's
smallest-index rule after a run of degenerate pivots.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalBreakdown

INF = float("inf")
RELATIONS = ("<=", ">=", "=")

PIVOT_TOL = 1e-11
OPT_TOL = 1e-9
FEAS_TOL = 1e-8
DEGENERATE_RUN = 50


@dataclass(frozen=True, eq=False)
class LpProblem:
    objective: np.ndarray
    a: np.ndarray
    relations: tuple[str, ...]
    rhs: np.ndarray
    lower: np.ndarray = None
    upper: np.ndarray = None
    names: tuple[str, ...] = ()

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).ravel()
        n = c.size
        a = np.asarray(self.a, dtype=float).reshape(-1, n) if n else np.zeros((0, 0))
        b = np.asarray(self.rhs, dtype=float).ravel()
        lo = np.zeros(n) if self.lower is None else np.asarray(self.lower, dtype=float).ravel()
        hi = np.full(n, INF) if self.upper is None else np.asarray(self.upper, dtype=float).ravel()
        rel = tuple(self.relations)
        if a.shape[0] != b.size or len(rel) != b.size:
            raise ValueError("row count differs between coefficients, relations and rhs")
        if lo.size != n or hi.size != n:
            raise ValueError("bounds do not match the number of variables")
        if any(r not in RELATIONS for r in rel):
            raise ValueError(f"relations must be drawn from {RELATIONS}")
        if np.any(lo > hi) or np.any(lo == INF) or np.any(hi == -INF):
            raise ValueError("empty bound interval")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("objective, coefficients and rhs must be finite")
        for name, val in (("objective", c), ("a", a), ("rhs", b), ("lower", lo), ("upper", hi)):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "relations", rel)

    @property
    def n_vars(self) -> int:
        return self.objective.size

    @property
    def n_rows(self) -> int:
        return self.rhs.size

    def residual(self, x: np.ndarray) -> float:
        """Largest constraint or bound violation, rows scaled by their largest coefficient."""
        worst = 0.0
        if self.n_rows:
            lhs = self.a @ x
            scale = np.maximum(1.0, np.abs(self.a).max(axis=1))
            for i, rel in enumerate(self.relations):
                d = lhs[i] - self.rhs[i]
                v = max(d, 0.0) if rel == "<=" else max(-d, 0.0) if rel == ">=" else abs(d)
                worst = max(worst, v / scale[i])
        worst = max(worst, float(np.max(np.maximum(self.lower - x, 0.0), initial=0.0)))
        worst = max(worst, float(np.max(np.maximum(x - self.upper, 0.0), initial=0.0)))
        return worst


@dataclass(eq=False)
class LpSolution:
    status: str
    objective: float = float("nan")
    x: np.ndarray = None
    duals: np.ndarray = None
    iterations: int = 0
    residual: float = float("nan")
    info: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class _Tableau:
    def __init__(self, tab: np.ndarray, basis: list[int]):
        self.tab = tab
        self.basis = basis
        self.iterations = 0

    def reduced(self, cost: np.ndarray) -> np.ndarray:
        """Row ``[c - c_B B^-1 A | -c_B B^-1 b]``."""
        cb = cost[self.basis]
        row = np.empty(self.tab.shape[1])
        row[:-1] = cost - cb @ self.tab[:, :-1]
        row[-1] = -cb @ self.tab[:, -1]
        return row

    def pivot(self, i: int, j: int, obj: np.ndarray) -> None:
        t = self.tab
        t[i] /= t[i, j]
        col = t[:, j].copy()
        col[i] = 0.0
        t -= np.outer(col, t[i])
        obj -= obj[j] * t[i]
        self.basis[i] = j
        self.iterations += 1

    def run(self, cost: np.ndarray, allowed: np.ndarray, max_iter: int) -> str:
        obj = self.reduced(cost)
        bland = False
        run = 0
        while True:
            if self.iterations >= max_iter:
                raise NumericalBreakdown(f"simplex exceeded {max_iter} iterations")
            cand = np.flatnonzero(allowed & (obj[:-1] > OPT_TOL))
            if cand.size == 0:
                return "optimal"
            j = int(cand[0]) if bland else int(cand[np.argmax(obj[cand])])
            col = self.tab[:, j]
            rows = np.flatnonzero(col > PIVOT_TOL)
            if rows.size == 0:
                return "unbounded"
            ratios = self.tab[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            if bland:
                i = int(min(ties, key=lambda r: self.basis[r]))
            else:
                i = int(ties[np.argmax(col[ties])])
            run = run + 1 if best <= 1e-12 else 0
            if run > DEGENERATE_RUN:
                bland = True
            self.pivot(i, j, obj)


def _standardize(p: LpProblem):
    """Rewrite as ``max c'z, A'z (rel) b', z >= 0`` with ``x = offset + T z``."""
    n = p.n_vars
    cols = []  # (var index, sign)
    offset = np.zeros(n)
    extra_rows = []  # (z column, upper value)
    for j in range(n):
        lo, hi = p.lower[j], p.upper[j]
        if np.isfinite(lo):
            offset[j] = lo
            cols.append((j, 1.0))
            if np.isfinite(hi):
                extra_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            offset[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    t = np.zeros((n, len(cols)))
    for k, (j, s) in enumerate(cols):
        t[j, k] = s
    a = p.a @ t
    b = p.rhs - p.a @ offset
    rel = list(p.relations)
    origin = list(range(p.n_rows))
    for k, ub in extra_rows:
        row = np.zeros(len(cols))
        row[k] = 1.0
        a = np.vstack([a, row])
        b = np.append(b, ub)
        rel.append("<=")
        origin.append(-1)
    return a, b, rel, origin, t, offset


def solve_lp(problem: LpProblem, max_iter: int = 10_000) -> LpSolution:
    """Solve ``problem``; status is ``optimal``, ``infeasible`` or ``unbounded``.

    Optimal solutions are certified: the primal residual (on rows scaled by
    their largest coefficient) must not exceed 1e-8, otherwise
    ``NumericalBreakdown`` is raised.
    """
    a, b, rel, origin, t, offset = _standardize(problem)
    c = t.T @ problem.objective
    nz = a.shape[1]

    # scale rows, drop empty ones, make rhs non-negative
    scale = np.ones(len(b))
    keep = []
    for i in range(len(b)):
        m = np.abs(a[i]).max() if nz else 0.0
        if m == 0.0:
            ok = (b[i] >= -FEAS_TOL if rel[i] == "<=" else
                  b[i] <= FEAS_TOL if rel[i] == ">=" else abs(b[i]) <= FEAS_TOL)
            if not ok:
                return LpSolution("infeasible")
            continue
        scale[i] = 1.0 / m
        keep.append(i)
    for i in keep:
        if b[i] * scale[i] < 0:
            scale[i] = -scale[i]
    a = a[keep] * scale[keep, None]
    b = b[keep] * scale[keep]
    rel = [rel[i] if scale[i] > 0 else {"<=": ">=", ">=": "<=", "=": "="}[rel[i]] for i in keep]
    origin = [origin[i] for i in keep]
    row_scale = scale[keep]
    m = len(b)

    if m == 0:
        if np.any(c > OPT_TOL):
            return LpSolution("unbounded")
        x = offset.copy()
        return LpSolution("optimal", float(problem.objective @ x), x,
                          np.zeros(problem.n_rows), 0, problem.residual(x))

    n_slack = sum(r != "=" for r in rel)
    n_art = sum(r != "<=" for r in rel)
    width = nz + n_slack + n_art
    tab = np.zeros((m, width + 1))
    tab[:, :nz] = a
    tab[:, -1] = b
    basis = [0] * m
    s = nz
    art_cols = []
    k = nz + n_slack
    for i, r in enumerate(rel):
        if r == "<=":
            tab[i, s] = 1.0
            basis[i] = s
            s += 1
        else:
            if r == ">=":
                tab[i, s] = -1.0
                s += 1
            tab[i, k] = 1.0
            basis[i] = k
            art_cols.append(k)
            k += 1
    std_a = tab[:, :-1].copy()
    is_art = np.zeros(width, dtype=bool)
    is_art[art_cols] = True

    tb = _Tableau(tab, basis)
    if art_cols:
        cost1 = np.where(is_art, -1.0, 0.0)
        tb.run(cost1, np.ones(width, dtype=bool), max_iter)
        infeas = -float(cost1[tb.basis] @ tb.tab[:, -1])
        if infeas > FEAS_TOL:
            return LpSolution("infeasible", iterations=tb.iterations, info={"phase1": infeas})
        # drive remaining artificials out of the basis, dropping redundant rows
        drop = []
        dummy = np.zeros(width + 1)
        for i in range(m):
            if is_art[tb.basis[i]]:
                row = tb.tab[i, :-1]
                cand = np.flatnonzero(~is_art & (np.abs(row) > 1e-9))
                if cand.size:
                    tb.pivot(i, int(cand[np.argmax(np.abs(row[cand]))]), dummy)
                else:
                    drop.append(i)
        if drop:
            live = [i for i in range(m) if i not in drop]
            tb.tab = tb.tab[live]
            tb.basis = [tb.basis[i] for i in live]
            std_a = std_a[live]
            origin = [origin[i] for i in live]
            row_scale = row_scale[live]

    cost2 = np.zeros(width)
    cost2[:nz] = c
    status = tb.run(cost2, ~is_art, max_iter)
    if status == "unbounded":
        return LpSolution("unbounded", iterations=tb.iterations)

    zfull = np.zeros(width)
    zfull[tb.basis] = tb.tab[:, -1]
    x = offset + t @ zfull[:nz]
    residual = problem.residual(x)
    if residual > FEAS_TOL:
        raise NumericalBreakdown(f"primal residual {residual:.3e} exceeds {FEAS_TOL:g}")

    duals = np.zeros(problem.n_rows)
    bmat = std_a[:, tb.basis]
    try:
        y = np.linalg.solve(bmat.T, cost2[tb.basis])
    except np.linalg.LinAlgError:
        y = np.linalg.lstsq(bmat.T, cost2[tb.basis], rcond=None)[0]
    for yi, o, sc in zip(y, origin, row_scale):
        if o >= 0:
            duals[o] = yi * sc
    return LpSolution("optimal", float(problem.objective @ x), x, duals, tb.iterations, residual)
