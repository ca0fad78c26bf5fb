"""Similarity and benchmark-partner networks, plus their summary statistics."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .dea import TIE_TOL, ReprResult
from .errors import NoPartners, TargetUnreachable, ValidationError
from .ingest import INCOME_GROUPS, AnalysisPanel
from .similarity import CorrelationMatrix

TREE = "tree"
THRESHOLD = "threshold"
BENCHMARK = "benchmark"
PARTNER_RULES = ("gain", "similarity")


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    rho: float
    kind: str
    delta_repr: float = float("nan")


@dataclass(frozen=True, eq=False)
class SimilarityNetwork:
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    tau: float
    target_degree: float | None = None

    @property
    def average_degree(self) -> float:
        return 2 * len(self.edges) / len(self.nodes)

    def tree_edges(self) -> list[Edge]:
        return [e for e in self.edges if e.kind == TREE]


@dataclass(frozen=True, eq=False)
class BenchmarkNetwork:
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    rule: str = "gain"
    min_rho: float = 0.0

    def out_edges(self, focal: str) -> list[Edge]:
        return [e for e in self.edges if e.source == focal]


@dataclass(frozen=True)
class ImprovementSummary:
    countries: int
    mean_absolute_gain: float
    mean_relative_gain: float


@dataclass(frozen=True)
class GroupSummary:
    group: str
    count: int
    mean_eci: float
    mean_co2_pc: float
    mean_ef_pc: float
    mean_repr: float


@dataclass(frozen=True, eq=False)
class GroupStats:
    groups: tuple[GroupSummary, ...]
    unlabeled: tuple[str, ...] = ()
    overall: GroupSummary | None = None

    def get(self, group: str) -> GroupSummary:
        for g in self.groups:
            if g.group == group:
                return g
        raise KeyError(group)


class _DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def _pairs(corr: CorrelationMatrix):
    """Off-diagonal pairs as (weight, a, b) with a < b by code."""
    names = corr.countries
    w = corr.values
    out = []
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            a, b = sorted((names[i], names[j]))
            out.append((float(w[i, j]), a, b))
    return out


def max_spanning_tree(corr: CorrelationMatrix) -> list[Edge]:
    """Kruskal on descending weight; equal weights resolved by endpoint codes."""
    n = len(corr.countries)
    if n < 2:
        raise ValidationError("a spanning tree needs at least two nodes")
    idx = corr.index()
    ds = _DisjointSet(n)
    tree = []
    for w, a, b in sorted(_pairs(corr), key=lambda t: (-t[0], t[1], t[2])):
        if ds.union(idx[a], idx[b]):
            tree.append(Edge(a, b, w, TREE))
            if len(tree) == n - 1:
                break
    return tree


def threshold_network(corr: CorrelationMatrix, tau: float | None = None,
                      target_degree: float | None = 4.0, tolerance: float = 0.5) -> SimilarityNetwork:
    """Maximum spanning tree plus every other pair with correlation >= tau.

    Give either a fixed ``tau`` or a ``target_degree``; in the latter case tau
    is the largest candidate weight whose network has an average degree within
    ``target_degree +- tolerance`` (found by bisection, the degree being
    monotone in tau).
    """
    n = len(corr.countries)
    tree = max_spanning_tree(corr)
    tree_keys = {(e.source, e.target) for e in tree}
    rest = sorted((w, a, b) for w, a, b in _pairs(corr) if (a, b) not in tree_keys)
    weights = [w for w, _, _ in rest]

    def degree(t: float) -> float:
        extra = len(weights) - bisect.bisect_left(weights, t)
        return 2 * (n - 1 + extra) / n

    if tau is None:
        if target_degree is None:
            raise ValidationError("give either a fixed threshold or a target degree")
        lo_ok = target_degree - tolerance
        hi_ok = target_degree + tolerance
        candidates = sorted(set(weights)) + [math.inf]
        if degree(math.inf) > hi_ok:
            raise TargetUnreachable(
                f"spanning tree alone has average degree {degree(math.inf):.3f} > {hi_ok}"
            )
        if degree(candidates[0]) < lo_ok:
            raise TargetUnreachable(
                f"complete network has average degree {degree(candidates[0]):.3f} < {lo_ok}"
            )
        # largest candidate whose degree still reaches the lower bound
        lo, hi = 0, len(candidates) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if degree(candidates[mid]) >= lo_ok:
                lo = mid
            else:
                hi = mid - 1
        tau = candidates[lo]
        if degree(tau) > hi_ok:
            raise TargetUnreachable(
                f"no threshold gives average degree in [{lo_ok}, {hi_ok}] "
                f"(jumps to {degree(tau):.3f} at tau={tau:.6g})"
            )
    extra = [Edge(a, b, w, THRESHOLD) for w, a, b in rest if w >= tau]
    edges = sorted(tree + extra, key=lambda e: (e.source, e.target))
    return SimilarityNetwork(tuple(corr.countries), tuple(edges), float(tau), target_degree)


def _repr_map(results) -> dict[str, float]:
    if isinstance(results, dict):
        return {k: float(v) for k, v in results.items()}
    return {r.country: r.theta for r in results}


def benchmark_network(corr: CorrelationMatrix, results: list[ReprResult] | dict,
                      rule: str = "gain", min_rho: float = 0.0,
                      partners: int = 2) -> BenchmarkNetwork:
    """For each focal country pick up to ``partners`` similar, better-scoring countries.

    Candidates have ``rho > 0``, ``rho >= min_rho`` and a score higher by more than the ranking tie
    tolerance, so countries tied on the frontier do not benchmark each other. The
    ``gain`` rule ranks them by score gain, then correlation, then code; the
    ``similarity`` rule by correlation, then gain, then code.
    """
    if rule not in PARTNER_RULES:
        raise ValidationError(f"partner rule must be one of {PARTNER_RULES}, not {rule!r}")
    scores = _repr_map(results)
    missing = [c for c in corr.countries if c not in scores]
    if missing:
        raise ValidationError(f"no score for {', '.join(missing)}")
    names = corr.countries
    edges = []
    for i, focal in enumerate(names):
        cands = []
        for j, other in enumerate(names):
            rho = float(corr.values[i, j])
            gain = scores[other] - scores[focal]
            if i != j and rho > 0 and rho >= min_rho and gain > TIE_TOL:
                cands.append((gain, rho, other))
        if rule == "gain":
            cands.sort(key=lambda t: (-t[0], -t[1], t[2]))
        else:
            cands.sort(key=lambda t: (-t[1], -t[0], t[2]))
        edges += [Edge(focal, other, rho, BENCHMARK, gain) for gain, rho, other in cands[:partners]]
    return BenchmarkNetwork(tuple(names), tuple(edges), rule, min_rho)


def improvement_potential(bench: BenchmarkNetwork, results: list[ReprResult] | dict,
                          floor: float = 1e-4) -> ImprovementSummary:
    """Mean gain if each country matched its best partner.

    Reports the absolute gain ``best - own`` and the relative gain
    ``(best - own) / max(own, floor)``, both averaged over countries that have
    at least one partner.
    """
    scores = _repr_map(results)
    best: dict[str, float] = {}
    for e in bench.edges:
        best[e.source] = max(best.get(e.source, -math.inf), scores[e.target])
    if not best:
        raise NoPartners("benchmark network has no edges")
    focal = sorted(best)
    gains = [best[c] - scores[c] for c in focal]
    rel = [g / max(scores[c], floor) for g, c in zip(gains, focal)]
    return ImprovementSummary(len(focal), math.fsum(gains) / len(focal), math.fsum(rel) / len(focal))


def _summary(name, rows) -> GroupSummary:
    arr = np.array([r[1:] for r in rows], dtype=float)
    means = [math.fsum(arr[:, k]) / len(rows) for k in range(4)]
    return GroupSummary(name, len(rows), *means)


def group_stats(panel: AnalysisPanel, results: list[ReprResult] | dict,
                eci: dict[str, float]) -> GroupStats:
    """Per income group means of complexity, CO2, footprint and score.

    Only scored countries count. Countries without an income label are listed
    in ``unlabeled``.
    """
    scores = _repr_map(results)
    by_group: dict[str, list] = {}
    everyone, unlabeled = [], []
    for c, g, co2, ef in zip(panel.countries, panel.income, panel.co2_pc, panel.ef_pc):
        if c not in scores:
            continue
        row = (c, eci[c], co2, ef, scores[c])
        everyone.append(row)
        if g is None:
            unlabeled.append(c)
        else:
            by_group.setdefault(g, []).append(row)
    groups = tuple(_summary(g, by_group[g]) for g in INCOME_GROUPS if g in by_group)
    overall = _summary("all", everyone) if everyone else None
    return GroupStats(groups, tuple(unlabeled), overall)
