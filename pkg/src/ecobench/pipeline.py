"""Run configuration, stage orchestration and report emission."""

from __future__ import annotations

import configparser
import hashlib
import logging
import math
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .complexity import EciVector, LogRcaMatrix, RcaMatrix, compute_eci, compute_rca, log_rca
from .dea import DeaInstance, LpStats, ReprResult, score_units, translate_outputs
from .errors import (
    DuplicateCountry,
    EcobenchError,
    EmptyPanel,
    NoPartners,
    NonFiniteValue,
    StageError,
    UnwritableDirectory,
    ValidationError,
)
from .export import (
    benchmark_pairs,
    full,
    similarity_pairs,
    write_csv,
    write_dot,
    write_graphml,
    write_json,
    write_long,
    write_pairs,
    write_ranking,
)
from .ingest import (
    AnalysisPanel,
    _rows,
    build_panel,
    default_product_classes,
    load_environment,
    load_exports,
    load_metadata,
    normalize_country,
    write_drop_report,
    write_panel,
)
from .networks import (
    PARTNER_RULES,
    BenchmarkNetwork,
    GroupStats,
    ImprovementSummary,
    SimilarityNetwork,
    benchmark_network,
    group_stats,
    improvement_potential,
    threshold_network,
)
from .similarity import CorrelationMatrix, SimilarityVectors, build_similarity_vectors, correlation_matrix

log = logging.getLogger(__name__)

STAGES = ("ingest", "eci", "repr", "similarity", "network", "benchmark", "report")
ECI_MODES = ("compute", "external")
PATH_KEYS = ("exports", "environment", "income_groups", "product_classes", "eci_file")
RELATIVE_FLOOR = 1e-4


@dataclass(frozen=True)
class RunConfig:
    exports: Path
    environment: Path
    income_groups: Path | None = None
    product_classes: Path | None = None
    eci_mode: str = "compute"
    eci_file: Path | None = None
    threshold: float | None = None
    target_degree: float | None = 4.0
    partner_rule: str = "gain"
    min_rho: float = 0.0
    output: Path = Path("out")

    def validate(self) -> "RunConfig":
        for key in PATH_KEYS:
            p = getattr(self, key)
            if p is not None and not Path(p).is_file():
                err = ValidationError(f"{key} file not found: {p}")
                err.entity = str(p)
                raise err
        if self.eci_mode not in ECI_MODES:
            raise ValidationError(f"eci_mode must be one of {ECI_MODES}, not {self.eci_mode!r}")
        if self.eci_mode == "external" and self.eci_file is None:
            raise ValidationError("eci_mode=external needs eci_file")
        if self.eci_mode == "compute" and self.eci_file is not None:
            raise ValidationError("eci_file given but eci_mode=compute; pick one ECI source")
        if self.threshold is None and self.target_degree is None:
            raise ValidationError("give either threshold or target_degree")
        if self.threshold is not None and not -1.0 <= self.threshold <= 1.0:
            raise ValidationError(f"threshold must lie in [-1, 1], got {self.threshold}")
        if self.target_degree is not None and self.target_degree <= 0:
            raise ValidationError(f"target_degree must be positive, got {self.target_degree}")
        if self.partner_rule not in PARTNER_RULES:
            raise ValidationError(f"partner_rule must be one of {PARTNER_RULES}")
        return self

    def echo(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = str(v) if isinstance(v, Path) else v
        return out


def _parse_value(key: str, raw: str, base: Path):
    raw = raw.strip()
    if raw.lower() in ("", "none"):
        return None
    if key in PATH_KEYS or key == "output":
        p = Path(raw).expanduser()
        return p if p.is_absolute() else base / p
    if key in ("threshold", "target_degree", "min_rho"):
        try:
            return float(raw)
        except ValueError:
            raise ValidationError(f"{key} must be a number, got {raw!r}") from None
    return raw


def load_config(path=None, validate: bool = True, **overrides) -> RunConfig:
    """Read a ``key = value`` file; relative paths are taken from the file's directory.

    Keyword overrides (e.g. from the command line) win over the file. Giving
    ``threshold`` switches off ``target_degree`` and vice versa, unless both
    are given explicitly.
    """
    values: dict = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ValidationError(f"config file not found: {path}")
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
        try:
            parser.read_string("[run]\n" + path.read_text(encoding="utf-8"), source=str(path))
        except configparser.Error as exc:
            raise ValidationError(f"{path}: {exc}") from None
        known = {f.name for f in fields(RunConfig)}
        base = path.resolve().parent
        for key, raw in parser["run"].items():
            if key not in known:
                raise ValidationError(f"{path}: unknown key {key!r}")
            values[key] = _parse_value(key, raw, base)
        if "threshold" in values and values["threshold"] is not None and "target_degree" not in values:
            values["target_degree"] = None
    given = {k: v for k, v in overrides.items() if v is not None}
    if "threshold" in given and "target_degree" not in given:
        values["target_degree"] = None
    if "target_degree" in given and "threshold" not in given:
        values["threshold"] = None
    if "eci_file" in given and "eci_mode" not in given:
        values["eci_mode"] = "external"
    values.update({k: Path(v) if k in PATH_KEYS + ("output",) else v for k, v in given.items()})
    for key in ("exports", "environment"):
        if values.get(key) is None:
            raise ValidationError(f"no {key} file configured")
    values = {k: v for k, v in values.items() if v is not None or k in ("threshold", "target_degree")}
    cfg = RunConfig(**values)
    return cfg.validate() if validate else cfg


def load_eci_table(source) -> dict[str, float]:
    """External ECI values, columns ``country,eci``."""
    out: dict[str, float] = {}
    for line, row in _rows(source, ("country", "eci")):
        c = normalize_country(row["country"])
        if c in out:
            raise DuplicateCountry(f"line {line}: {c} listed twice in ECI file")
        try:
            v = float(row["eci"])
        except ValueError:
            raise ValidationError(f"line {line}: eci is not a number: {row['eci']!r}") from None
        if not math.isfinite(v):
            raise NonFiniteValue(f"line {line}: eci for {c} is not finite")
        out[c] = v
    return out


@dataclass
class PipelineResults:
    config: RunConfig
    stage: str = "ingest"
    n_exporters: int = 0
    n_environment: int = 0
    panel: AnalysisPanel | None = None
    rca: RcaMatrix | None = None
    logrca: LogRcaMatrix | None = None
    eci_vector: EciVector | None = None
    eci: dict[str, float] = field(default_factory=dict)
    dropped: list[tuple[str, str]] = field(default_factory=list)
    ranking: list[ReprResult] = field(default_factory=list)
    lp_stats: list[LpStats] = field(default_factory=list)
    vectors: SimilarityVectors | None = None
    corr: CorrelationMatrix | None = None
    similarity: SimilarityNetwork | None = None
    benchmark: BenchmarkNetwork | None = None
    improvement: ImprovementSummary | None = None
    groups: GroupStats | None = None
    timing: dict[str, float] = field(default_factory=dict)

    @property
    def scores(self) -> dict[str, float]:
        return {r.country: r.theta for r in self.ranking}

    def income(self) -> dict[str, str | None]:
        return dict(zip(self.panel.countries, self.panel.income)) if self.panel else {}


@dataclass(frozen=True)
class RunManifest:
    config: dict
    inputs: dict
    counts: dict
    outputs: dict
    timing: dict
    version: str = __version__

    def as_dict(self) -> dict:
        return {"tool": "ecobench", "version": self.version, "config": self.config,
                "inputs": self.inputs, "counts": self.counts, "outputs": self.outputs,
                "timing": self.timing}


def _stage(name: str):
    def wrap(fn):
        def run(res: PipelineResults):
            t0 = time.perf_counter()
            try:
                fn(res)
            except StageError:
                raise
            except EcobenchError as exc:
                raise StageError(name, exc, getattr(exc, "entity", None)) from exc
            res.timing[name] = time.perf_counter() - t0
            res.stage = name
            log.info("stage %s done in %.3f s", name, res.timing[name])
        return run
    return wrap


@_stage("ingest")
def _ingest(res: PipelineResults) -> None:
    cfg = res.config
    exports = load_exports(cfg.exports)
    env = load_environment(cfg.environment, on_invalid="drop")
    meta = load_metadata(cfg.income_groups, cfg.product_classes)
    res.n_exporters = len(exports.countries)
    res.n_environment = len(env.values) + len(env.dropped)
    res.panel = build_panel(exports, env, meta)
    res.dropped = [(c, f"ingest: {r}") for c, r in res.panel.dropped]


@_stage("eci")
def _eci(res: PipelineResults) -> None:
    cfg, panel = res.config, res.panel
    res.rca = compute_rca(panel)
    res.logrca = log_rca(res.rca)
    if cfg.eci_mode == "compute":
        res.eci_vector = compute_eci(res.rca)
        res.eci = res.eci_vector.as_dict()
        res.dropped += [(c, "eci: no product with RCA >= 1") for c in res.eci_vector.pruned]
    else:
        table = load_eci_table(cfg.eci_file)
        res.eci = {c: table[c] for c in panel.countries if c in table}
        res.dropped += [(c, "eci: no value in external ECI file")
                        for c in panel.countries if c not in table]
    if not res.eci:
        raise EmptyPanel("no country has an ECI value")


@_stage("repr")
def _repr(res: PipelineResults) -> None:
    panel = res.panel
    idx = {c: i for i, c in enumerate(panel.countries)}
    units = [c for c in panel.countries if c in res.eci]
    rows = [idx[c] for c in units]
    inst = DeaInstance(
        tuple(units),
        np.vstack([panel.co2_pc[rows], panel.ef_pc[rows]]),
        translate_outputs(np.array([[res.eci[c] for c in units]])),
    )
    res.ranking, stats = score_units(inst)
    res.lp_stats = sorted(stats, key=lambda s: s.country)


@_stage("similarity")
def _similarity(res: PipelineResults) -> None:
    classes = res.panel.product_classes or default_product_classes(res.panel.products)
    units = sorted(res.scores)
    res.vectors = build_similarity_vectors(res.logrca, classes, units)
    res.corr = correlation_matrix(res.vectors)


@_stage("network")
def _network(res: PipelineResults) -> None:
    cfg = res.config
    res.similarity = threshold_network(res.corr, cfg.threshold, cfg.target_degree)


@_stage("benchmark")
def _benchmark(res: PipelineResults) -> None:
    cfg = res.config
    res.benchmark = benchmark_network(res.corr, res.scores, cfg.partner_rule, cfg.min_rho)


@_stage("report")
def _report(res: PipelineResults) -> None:
    try:
        res.improvement = improvement_potential(res.benchmark, res.scores, RELATIVE_FLOOR)
    except NoPartners:
        res.improvement = None
    res.groups = group_stats(res.panel, res.scores, res.eci)


_RUNNERS = dict(zip(STAGES, (_ingest, _eci, _repr, _similarity, _network, _benchmark, _report)))


def run_stages(config: RunConfig, until: str = "report") -> PipelineResults:
    """Run the stages in order up to and including ``until``; nothing is written."""
    if until not in STAGES:
        raise ValueError(f"unknown stage {until!r}")
    res = PipelineResults(config)
    for name in STAGES[: STAGES.index(until) + 1]:
        _RUNNERS[name](res)
    return res


# --- emission -------------------------------------------------------------------

def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _rounded(obj):
    if isinstance(obj, float):
        return round(obj, 4)
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_rounded(v) for v in obj]
    return obj


def _json_pair(directory: Path, stem: str, obj) -> list[Path]:
    return [write_json(directory / f"{stem}.json", _rounded(obj)),
            write_json(directory / f"{stem}_full.json", obj)]


def _group_dict(g) -> dict:
    return {"group": g.group, "count": g.count, "mean_eci": g.mean_eci,
            "mean_co2_pc": g.mean_co2_pc, "mean_ef_pc": g.mean_ef_pc, "mean_repr": g.mean_repr}


def improvement_table(res: PipelineResults) -> list[dict]:
    scores = res.scores
    out = []
    for c in sorted({e.source for e in res.benchmark.edges}):
        best = max(scores[e.target] for e in res.benchmark.out_edges(c))
        gain = best - scores[c]
        out.append({"country": c, "repr": scores[c], "best_partner_repr": best,
                    "absolute_gain": gain, "relative_gain": gain / max(scores[c], RELATIVE_FLOOR)})
    return out


def _prepare(directory) -> Path:
    d = Path(directory)
    try:
        d.mkdir(parents=True, exist_ok=True)
        probe = d / ".write_probe"
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        raise UnwritableDirectory(f"cannot write to {d}: {exc.strerror or exc}") from None
    return d


def emit_outputs(res: PipelineResults, directory) -> list[Path]:
    """Write every artifact the completed stages support; returns the paths written."""
    d = _prepare(directory)
    done = STAGES[: STAGES.index(res.stage) + 1]
    written: list[Path] = []
    try:
        write_drop_report(d / "drop_report.csv", [(c, r) for c, r in res.dropped])
        written.append(d / "drop_report.csv")
        if res.stage == "ingest":
            write_panel(res.panel, d)
            written += [d / f"panel_{n}.csv" for n in
                        ("exports", "environment", "income_groups", "product_classes")]
        if "eci" in done:
            rows = [(c, full(res.eci[c])) for c in sorted(res.eci)]
            written.append(write_csv(d / "eci.csv", ("country", "eci"), rows))
        if res.stage == "eci":
            rca = res.rca
            rows = [(c, p, full(rca.values[i, j]))
                    for i, c in enumerate(rca.countries)
                    for j, p in enumerate(rca.products) if rca.values[i, j] > 0]
            written.append(write_csv(d / "rca.csv", ("country", "product", "rca"), rows))
        if "repr" in done:
            panel = res.panel
            co2 = dict(zip(panel.countries, map(float, panel.co2_pc)))
            ef = dict(zip(panel.countries, map(float, panel.ef_pc)))
            written += write_ranking(d, res.ranking, res.eci, co2, ef)
            written.append(write_csv(
                d / "lp_stats.csv", ("country", "theta", "iterations", "residual"),
                [(s.country, full(s.theta), s.iterations, full(s.residual)) for s in res.lp_stats],
            ))
        if "similarity" in done:
            written.append(write_csv(d / "similarity_excluded.csv", ("country", "reason"),
                                     list(res.vectors.excluded)))
            written.append(write_long(d / "correlation.csv", res.corr.countries, res.corr.values))
        scores, income = res.scores, res.income()
        if "network" in done:
            net = res.similarity
            written += write_pairs(d, "pairs_similarity", similarity_pairs(net, scores))
            written.append(write_graphml(d / "similarity.graphml", net, scores, res.eci, income))
            written.append(write_dot(d / "similarity.dot", net, scores, res.eci, income, "similarity"))
        if "benchmark" in done:
            net = res.benchmark
            written += write_pairs(d, "pairs_benchmark", benchmark_pairs(net, scores))
            written.append(write_graphml(d / "benchmark.graphml", net, scores, res.eci, income))
            written.append(write_dot(d / "benchmark.dot", net, scores, res.eci, income, "benchmark"))
        if "report" in done:
            g = res.groups
            written += _json_pair(d, "group_stats", {
                "groups": [_group_dict(x) for x in g.groups],
                "overall": _group_dict(g.overall) if g.overall else None,
                "unlabeled": list(g.unlabeled),
            })
            imp = res.improvement
            written += _json_pair(d, "improvement", {
                "countries_with_partners": imp.countries if imp else 0,
                "mean_absolute_gain": imp.mean_absolute_gain if imp else None,
                "mean_relative_gain": imp.mean_relative_gain if imp else None,
                "relative_floor": RELATIVE_FLOOR,
                "per_country": improvement_table(res),
            })
    except OSError as exc:
        raise UnwritableDirectory(f"cannot write to {d}: {exc.strerror or exc}") from None
    return written


def _counts(res: PipelineResults) -> dict:
    out = {"exporters": res.n_exporters, "environment": res.n_environment}
    if res.panel is not None:
        out["panel"] = len(res.panel.countries)
        out["products"] = len(res.panel.products)
        out["dropped"] = len(res.dropped)
    if res.eci:
        out["eci"] = len(res.eci)
    if res.ranking:
        out["ranked"] = len(res.ranking)
    if res.vectors is not None:
        out["similarity"] = len(res.vectors.countries)
        out["non_primary_products"] = len(res.vectors.products)
    if res.similarity is not None:
        out["similarity_edges"] = len(res.similarity.edges)
        out["tau"] = res.similarity.tau
        out["average_degree"] = res.similarity.average_degree
    if res.benchmark is not None:
        out["benchmark_edges"] = len(res.benchmark.edges)
    return out


def run_pipeline(config: RunConfig, until: str = "report", out=None) -> RunManifest:
    """Run the stages up to ``until``, write their outputs and a ``manifest.json``."""
    t0 = time.perf_counter()
    try:
        config.validate()
    except ValidationError as exc:
        raise StageError("config", exc, getattr(exc, "entity", None)) from exc
    directory = Path(out) if out is not None else config.output
    res = run_stages(config, until)
    try:
        written = emit_outputs(res, directory)
    except EcobenchError as exc:
        raise StageError("emit", exc, str(directory)) from exc
    inputs = {}
    for key in PATH_KEYS:
        p = getattr(config, key)
        if p is not None:
            inputs[key] = {"path": str(p), "sha256": _sha256(p)}
    timing = {k: round(v, 6) for k, v in res.timing.items()}
    timing["total"] = round(time.perf_counter() - t0, 6)
    manifest = RunManifest(
        config=replace(config, output=directory).echo(),
        inputs=inputs,
        counts=_counts(res),
        outputs={p.name: _sha256(p) for p in sorted(written)},
        timing=timing,
    )
    try:
        write_json(directory / "manifest.json", manifest.as_dict())
    except OSError as exc:
        raise StageError("emit", UnwritableDirectory(str(exc)), str(directory)) from exc
    return manifest
