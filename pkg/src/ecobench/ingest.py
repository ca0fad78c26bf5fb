"""Loading and aligning the export, environment and metadata tables."""

from __future__ import annotations

import contextlib
import csv
import io
import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterator, Union

import numpy as np

from .errors import (
    DuplicateCountry,
    EmptyPanel,
    EmptyTable,
    MalformedRow,
    NegativeValue,
    NonPositiveIndicator,
    UnknownClassLabel,
    UnknownGroupLabel,
)

log = logging.getLogger(__name__)

Source = Union[str, os.PathLike, IO[str], IO[bytes], bytes]

INCOME_GROUPS = ("low", "lower-middle", "upper-middle", "high")
PRODUCT_CLASSES = ("primary", "non-primary")
# SITC sections 5-8: chemicals, manufactured goods, machinery, misc. manufactures
NON_PRIMARY_SECTIONS = frozenset("5678")


@dataclass(frozen=True)
class CsvFormat:
    """Column names and delimiter of an export file."""

    country: str = "country"
    product: str = "product"
    value: str = "value"
    delimiter: str = ","


@dataclass(frozen=True, eq=False)
class ExportTable:
    records: tuple[tuple[str, str, float], ...]
    aggregated: tuple[tuple[str, str, int], ...] = ()

    @property
    def countries(self) -> tuple[str, ...]:
        return tuple(sorted({c for c, _, _ in self.records}))

    @property
    def products(self) -> tuple[str, ...]:
        return tuple(sorted({p for _, p, _ in self.records}))

    def matrix(self, countries=None, products=None) -> np.ndarray:
        """Dense country x product value matrix (missing pairs are zero)."""
        countries = self.countries if countries is None else tuple(countries)
        products = self.products if products is None else tuple(products)
        ci = {c: i for i, c in enumerate(countries)}
        pi = {p: j for j, p in enumerate(products)}
        out = np.zeros((len(countries), len(products)))
        for c, p, v in self.records:
            if c in ci and p in pi:
                out[ci[c], pi[p]] = v
        return out


@dataclass(frozen=True, eq=False)
class EnvTable:
    values: dict[str, tuple[float, float]]
    dropped: tuple[tuple[str, str], ...] = ()

    @property
    def countries(self) -> tuple[str, ...]:
        return tuple(sorted(self.values))


@dataclass(frozen=True, eq=False)
class MetadataTable:
    income_groups: dict[str, str] = field(default_factory=dict)
    product_classes: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class AnalysisPanel:
    countries: tuple[str, ...]
    products: tuple[str, ...]
    exports: np.ndarray
    co2_pc: np.ndarray
    ef_pc: np.ndarray
    income: tuple[str | None, ...]
    product_classes: dict[str, str]
    dropped: tuple[tuple[str, str], ...] = ()
    dropped_products: tuple[str, ...] = ()

    def __post_init__(self):
        for arr in (self.exports, self.co2_pc, self.ef_pc):
            arr.setflags(write=False)


def normalize_country(code: str) -> str:
    return code.strip().upper()


@contextlib.contextmanager
def _text(source: Source) -> Iterator[IO[str]]:
    if isinstance(source, bytes):
        yield io.StringIO(source.decode("utf-8-sig"))
    elif isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8-sig", newline="") as fh:
            yield fh
    elif isinstance(source, io.TextIOBase):
        yield source
    else:
        yield io.TextIOWrapper(source, encoding="utf-8-sig", newline="")


def _rows(source: Source, required: tuple[str, ...], delimiter: str = ","):
    """Yield (line_number, {column: raw string}) for each data row."""
    with _text(source) as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise EmptyTable("file has no header row") from None
        missing = [c for c in required if c not in header]
        if missing:
            raise MalformedRow(f"line 1: header lacks column(s) {', '.join(missing)}")
        idx = {c: header.index(c) for c in required}
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise MalformedRow(f"line {line}: expected {len(header)} fields, got {len(row)}")
            yield line, {c: row[i].strip() for c, i in idx.items()}


def _number(raw: str, line: int, column: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise MalformedRow(f"line {line}: {column}={raw!r} is not a number") from None
    if not math.isfinite(value):
        raise MalformedRow(f"line {line}: {column}={raw!r} is not finite")
    return value


def load_exports(source: Source, fmt: CsvFormat = CsvFormat()) -> ExportTable:
    """Read a long-format export file.

    Duplicate (country, product) rows are summed with a logged warning. The
    sum uses ``math.fsum`` so the result does not depend on row order.
    """
    cols = (fmt.country, fmt.product, fmt.value)
    parts: dict[tuple[str, str], list[float]] = {}
    for line, row in _rows(source, cols, fmt.delimiter):
        country = normalize_country(row[fmt.country])
        product = row[fmt.product].strip()
        if not country or not product:
            raise MalformedRow(f"line {line}: empty country or product code")
        value = _number(row[fmt.value], line, fmt.value)
        if value < 0:
            raise NegativeValue(f"line {line}: negative export value {value} for {country}/{product}")
        parts.setdefault((country, product), []).append(value)
    if not parts:
        raise EmptyTable("export table has no records")

    aggregated = []
    records = []
    for key in sorted(parts):
        vals = parts[key]
        if len(vals) > 1:
            aggregated.append((key[0], key[1], len(vals)))
            log.warning("summed %d rows for %s/%s", len(vals), *key)
        records.append((key[0], key[1], math.fsum(vals)))
    table = ExportTable(tuple(records), tuple(aggregated))
    if len(table.countries) < 2 or len(table.products) < 2:
        raise EmptyTable(
            f"need at least 2 countries and 2 products, got "
            f"{len(table.countries)} and {len(table.products)}"
        )
    return table


def load_environment(source: Source, on_invalid: str = "raise") -> EnvTable:
    """Read per-capita CO2 and ecological footprint.

    With ``on_invalid="drop"`` a country with a non-positive indicator is left
    out and listed in ``EnvTable.dropped`` instead of raising.
    """
    if on_invalid not in ("raise", "drop"):
        raise ValueError(f"on_invalid must be 'raise' or 'drop', not {on_invalid!r}")
    values: dict[str, tuple[float, float]] = {}
    seen: set[str] = set()
    dropped = []
    for line, row in _rows(source, ("country", "co2_pc", "ef_pc")):
        country = normalize_country(row["country"])
        if not country:
            raise MalformedRow(f"line {line}: empty country code")
        if country in seen:
            raise DuplicateCountry(f"line {line}: {country} appears more than once")
        seen.add(country)
        co2 = _number(row["co2_pc"], line, "co2_pc")
        ef = _number(row["ef_pc"], line, "ef_pc")
        if co2 <= 0 or ef <= 0:
            msg = f"non-positive environmental indicator (co2_pc={co2}, ef_pc={ef})"
            if on_invalid == "raise":
                raise NonPositiveIndicator(f"line {line}: {country}: {msg}")
            dropped.append((country, msg))
            continue
        values[country] = (co2, ef)
    if not values and not dropped:
        raise EmptyTable("environment table has no records")
    return EnvTable(values, tuple(sorted(dropped)))


def normalize_group(label: str) -> str:
    key = label.strip().lower().replace("_", " ")
    if key.endswith(" income"):
        key = key[: -len(" income")]
    key = "-".join(key.split())
    if key not in INCOME_GROUPS:
        raise UnknownGroupLabel(f"unknown income group {label!r}; expected one of {INCOME_GROUPS}")
    return key


def normalize_class(label: str) -> str:
    key = "-".join(label.strip().lower().replace("_", " ").split())
    if key == "nonprimary":
        key = "non-primary"
    if key not in PRODUCT_CLASSES:
        raise UnknownClassLabel(f"unknown product class {label!r}; expected one of {PRODUCT_CLASSES}")
    return key


def default_product_classes(products) -> dict[str, str]:
    """Classify SITC codes by section: 5-8 non-primary, everything else primary."""
    return {
        p: "non-primary" if p[:1] in NON_PRIMARY_SECTIONS else "primary" for p in products
    }


def load_metadata(income_source: Source | None = None,
                  classification_source: Source | None = None) -> MetadataTable:
    groups: dict[str, str] = {}
    if income_source is not None:
        for line, row in _rows(income_source, ("country", "group")):
            country = normalize_country(row["country"])
            if country in groups:
                raise DuplicateCountry(f"line {line}: {country} listed twice in income groups")
            try:
                groups[country] = normalize_group(row["group"])
            except UnknownGroupLabel as exc:
                raise UnknownGroupLabel(f"line {line}: {exc}") from None
    classes: dict[str, str] = {}
    if classification_source is not None:
        for line, row in _rows(classification_source, ("product", "class")):
            try:
                classes[row["product"].strip()] = normalize_class(row["class"])
            except UnknownClassLabel as exc:
                raise UnknownClassLabel(f"line {line}: {exc}") from None
    return MetadataTable(groups, classes)


def build_panel(exports: ExportTable, env: EnvTable, meta: MetadataTable) -> AnalysisPanel:
    """Align the three tables over the countries they share.

    Countries present on only one side, with invalid environmental values or
    with zero total exports are listed in ``dropped`` as (country, reason).
    Products nobody in the panel exports are removed.
    """
    export_countries = set(exports.countries)
    env_countries = set(env.values)
    dropped = [(c, "no environmental indicators") for c in export_countries - env_countries
               if c not in {d for d, _ in env.dropped}]
    dropped += [(c, "no export records") for c in env_countries - export_countries]
    dropped += [(c, r) for c, r in env.dropped if c in export_countries]

    candidates = sorted(export_countries & env_countries)
    products = exports.products
    matrix = exports.matrix(candidates, products)
    totals = matrix.sum(axis=1)
    keep = []
    for i, c in enumerate(candidates):
        if totals[i] > 0:
            keep.append(i)
        else:
            dropped.append((c, "zero total exports"))
    if len(keep) < 2:
        raise EmptyPanel(
            f"only {len(keep)} country(ies) shared by export and environment tables"
        )
    countries = tuple(candidates[i] for i in keep)
    matrix = matrix[keep]
    live = matrix.sum(axis=0) > 0
    dropped_products = tuple(p for p, ok in zip(products, live) if not ok)
    products = tuple(p for p, ok in zip(products, live) if ok)
    matrix = matrix[:, live]

    return AnalysisPanel(
        countries=countries,
        products=products,
        exports=np.ascontiguousarray(matrix),
        co2_pc=np.array([env.values[c][0] for c in countries]),
        ef_pc=np.array([env.values[c][1] for c in countries]),
        income=tuple(meta.income_groups.get(c) for c in countries),
        product_classes=dict(meta.product_classes),
        dropped=tuple(sorted(dropped)),
        dropped_products=dropped_products,
    )


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_drop_report(path, dropped) -> None:
    _write_csv(Path(path), ("country", "reason"), sorted(dropped))


def read_drop_report(path) -> tuple[tuple[str, str], ...]:
    return tuple(sorted((row["country"], row["reason"])
                        for _, row in _rows(path, ("country", "reason"))))


def write_panel(panel: AnalysisPanel, directory) -> None:
    """Write the panel as plain CSV files that ``read_panel`` loads back."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    rows = [
        (c, p, repr(float(panel.exports[i, j])))
        for i, c in enumerate(panel.countries)
        for j, p in enumerate(panel.products)
        if panel.exports[i, j] > 0
    ]
    _write_csv(d / "panel_exports.csv", ("country", "product", "value"), rows)
    _write_csv(d / "panel_environment.csv", ("country", "co2_pc", "ef_pc"),
               [(c, repr(float(a)), repr(float(b)))
                for c, a, b in zip(panel.countries, panel.co2_pc, panel.ef_pc)])
    _write_csv(d / "panel_income_groups.csv", ("country", "group"),
               [(c, g) for c, g in zip(panel.countries, panel.income) if g is not None])
    _write_csv(d / "panel_product_classes.csv", ("product", "class"),
               sorted(panel.product_classes.items()))
    write_drop_report(d / "drop_report.csv", panel.dropped)


def read_panel(directory) -> AnalysisPanel:
    d = Path(directory)
    panel = build_panel(
        load_exports(d / "panel_exports.csv"),
        load_environment(d / "panel_environment.csv"),
        load_metadata(d / "panel_income_groups.csv", d / "panel_product_classes.csv"),
    )
    prior = read_drop_report(d / "drop_report.csv")
    merged = tuple(sorted(set(prior) | set(panel.dropped)))
    return AnalysisPanel(panel.countries, panel.products, np.array(panel.exports),
                         np.array(panel.co2_pc), np.array(panel.ef_pc), panel.income,
                         panel.product_classes, merged, panel.dropped_products)
