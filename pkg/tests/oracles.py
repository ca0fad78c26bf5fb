"""Independent brute-force reference implementations used by the tests.

None of these share code with the package under test beyond plain numpy.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


# --- linear programming: vertex enumeration ------------------------------------

def _constraint_rows(c, a, rel, b, lo, hi):
    """All constraints as (G, kinds, h) with kinds '<=' or '='."""
    g, h, kinds = [], [], []
    n = len(c)
    for row, r, v in zip(a, rel, b):
        if r == "<=":
            g.append(row); h.append(v); kinds.append("<=")
        elif r == ">=":
            g.append(-np.asarray(row)); h.append(-v); kinds.append("<=")
        else:
            g.append(row); h.append(v); kinds.append("=")
    for j in range(n):
        e = np.zeros(n); e[j] = 1.0
        if np.isfinite(lo[j]):
            g.append(-e); h.append(-lo[j]); kinds.append("<=")
        if np.isfinite(hi[j]):
            g.append(e); h.append(hi[j]); kinds.append("<=")
    return np.array(g, dtype=float).reshape(-1, n), kinds, np.array(h, dtype=float)


def _vertices(g, kinds, h, tol=1e-9):
    """Basic feasible solutions of {G x (<=|=) h}; assumes the set is pointed."""
    m, n = g.shape
    eq = [i for i, k in enumerate(kinds) if k == "="]
    ineq = [i for i, k in enumerate(kinds) if k == "<="]
    need = n - len(eq)
    if need < 0:
        # more equalities than variables: use every n-subset containing only equalities
        subsets = [list(s) for s in itertools.combinations(eq, n)]
    else:
        subsets = [eq + list(s) for s in itertools.combinations(ineq, need)]
    if not subsets:
        return np.zeros((0, n))
    idx = np.array(subsets)
    mats = g[idx]
    rhs = h[idx]
    dets = np.linalg.det(mats)
    ok = np.abs(dets) > 1e-9
    if not ok.any():
        return np.zeros((0, n))
    xs = np.linalg.solve(mats[ok], rhs[ok][..., None])[..., 0]
    lhs = xs @ g.T
    feas = np.ones(len(xs), dtype=bool)
    for i, k in enumerate(kinds):
        if k == "<=":
            feas &= lhs[:, i] <= h[i] + tol * max(1.0, abs(h[i]))
        else:
            feas &= np.abs(lhs[:, i] - h[i]) <= tol * max(1.0, abs(h[i]))
    return xs[feas]


def brute_force_lp(c, a, rel, b, lo, hi):
    """Return (status, objective) for max c@x by enumerating basic solutions.

    Lineality directions are split off with extra equalities so the remaining
    polyhedron is pointed; unboundedness is decided by maximizing c@d over the
    recession cone intersected with the unit box (a polytope, so enumeration
    applies there as well).
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    g, kinds, h = _constraint_rows(c, a, rel, b, lo, hi)
    # lineality space = null space of all constraint rows
    if g.shape[0]:
        _, sv, vt = np.linalg.svd(g)
        rank = int((sv > 1e-10).sum())
        null = vt[rank:]
    else:
        null = np.eye(n)
    lineal_gain = bool(null.size and np.any(np.abs(null @ c) > 1e-9))
    g2, kinds2, h2 = g, list(kinds), h
    if null.size:
        g2 = np.vstack([g, null])
        kinds2 = kinds2 + ["="] * null.shape[0]
        h2 = np.concatenate([h, np.zeros(null.shape[0])])
    verts = _vertices(g2, kinds2, h2)
    if len(verts) == 0:
        return "infeasible", math.nan
    if lineal_gain:
        return "unbounded", math.inf
    # recession cone: homogeneous constraints plus |d_j| <= 1
    gh = [g[i] for i in range(len(kinds))]
    kh = list(kinds)
    hh = [0.0] * len(kinds)
    for j in range(n):
        e = np.zeros(n); e[j] = 1.0
        gh += [e, -e]; kh += ["<=", "<="]; hh += [1.0, 1.0]
    dirs = _vertices(np.array(gh), kh, np.array(hh))
    if len(dirs) and (dirs @ c).max() > 1e-9:
        return "unbounded", math.inf
    return "optimal", float((verts @ c).max())


def random_lp(rng, max_vars=6, max_rows=6):
    n = int(rng.integers(1, max_vars + 1))
    m = int(rng.integers(1, max_rows + 1))
    c = rng.integers(-5, 6, n).astype(float)
    a = rng.integers(-5, 6, (m, n)).astype(float)
    b = rng.integers(-5, 11, m).astype(float)
    rel = [("<=", ">=", "=")[k] for k in rng.choice(3, m, p=[0.6, 0.25, 0.15])]
    lo = np.zeros(n)
    hi = np.full(n, np.inf)
    for j in range(n):
        kind = rng.integers(0, 5)
        if kind == 0:
            lo[j] = -np.inf  # free
        elif kind == 1:
            hi[j] = float(rng.integers(1, 8))
        elif kind == 2:
            lo[j] = float(rng.integers(-3, 1))
    return c, a, rel, b, lo, hi


# --- economic complexity: deflated power iteration -----------------------------

def eci_power_iteration(m, tol=1e-12, max_iter=200_000):
    """Second eigenvector of Mcc by power iteration with the leading pair deflated.

    Mcc is row-stochastic with right eigenvector 1 and left eigenvector k_c,
    so projecting out 1 along k_c removes the leading eigenvalue.
    """
    m = np.asarray(m, dtype=float)
    kc = m.sum(axis=1)
    kp = m.sum(axis=0)
    n = m.shape[0]
    mcc = np.zeros((n, n))
    for c in range(n):
        for c2 in range(n):
            mcc[c, c2] = sum(m[c, p] * m[c2, p] / (kc[c] * kp[p]) for p in range(m.shape[1]))
    x = np.arange(1, n + 1, dtype=float)
    x = x - (kc @ x) / kc.sum()
    x /= np.linalg.norm(x)
    for _ in range(max_iter):
        y = mcc @ x
        y = y - (kc @ y) / kc.sum()
        y /= np.linalg.norm(y)
        if y @ x < 0:
            y = -y
        if np.linalg.norm(y - x) < tol:
            x = y
            break
        x = y
    return x


# --- RCA / log / correlation --------------------------------------------------

def rca_loops(x):
    x = np.asarray(x, dtype=float)
    nc, np_ = x.shape
    total = sum(x[c, p] for c in range(nc) for p in range(np_))
    out = np.zeros_like(x)
    for c in range(nc):
        row = sum(x[c, p] for p in range(np_))
        for p in range(np_):
            col = sum(x[c2, p] for c2 in range(nc))
            out[c, p] = (x[c, p] / row) / (col / total) if col > 0 else 0.0
    return out


def log_rca_loops(r):
    delta = min(v for v in np.ravel(r) if v > 0)
    out = np.zeros_like(r, dtype=float)
    for idx, v in np.ndenumerate(r):
        out[idx] = math.log10(v + delta)
    return out, delta


def pearson_two_pass(u, v):
    n = len(u)
    mu = math.fsum(u) / n
    mv = math.fsum(v) / n
    num = math.fsum((u[i] - mu) * (v[i] - mv) for i in range(n))
    du = math.sqrt(math.fsum((u[i] - mu) ** 2 for i in range(n)))
    dv = math.sqrt(math.fsum((v[i] - mv) ** 2 for i in range(n)))
    return num / (du * dv)


# --- maximum spanning tree: Cayley enumeration ---------------------------------

def _prufer_to_edges(seq, n):
    degree = [1] * n
    for s in seq:
        degree[s] += 1
    edges = []
    for s in seq:
        leaf = min(i for i in range(n) if degree[i] == 1)
        edges.append((leaf, s))
        degree[leaf] -= 1
        degree[s] -= 1
    u, v = [i for i in range(n) if degree[i] == 1]
    edges.append((u, v))
    return edges


def max_spanning_tree_weight(w):
    """Exhaustive maximum over all n^(n-2) labelled spanning trees."""
    n = len(w)
    if n == 2:
        return w[0][1]
    best = -math.inf
    for seq in itertools.product(range(n), repeat=n - 2):
        total = sum(w[a][b] for a, b in _prufer_to_edges(seq, n))
        best = max(best, total)
    return best


def count_spanning_trees(n):
    return sum(1 for _ in itertools.product(range(n), repeat=n - 2)) if n > 2 else 1
