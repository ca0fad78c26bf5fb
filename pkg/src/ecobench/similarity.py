"""Export-portfolio similarity: log-RCA vectors and their Pearson correlations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexity import LogRcaMatrix
from .errors import EmptySelection, UnclassifiedProduct, ValidationError, ZeroVariance
from .ingest import MetadataTable


@dataclass(frozen=True, eq=False)
class SimilarityVectors:
    countries: tuple[str, ...]
    products: tuple[str, ...]
    values: np.ndarray
    excluded: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    countries: tuple[str, ...]
    values: np.ndarray

    def index(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.countries)}

    def rho(self, a: str, b: str) -> float:
        idx = self.index()
        return float(self.values[idx[a], idx[b]])

    def subset(self, countries) -> "CorrelationMatrix":
        idx = self.index()
        keep = [idx[c] for c in countries]
        return CorrelationMatrix(tuple(countries), self.values[np.ix_(keep, keep)])


def build_similarity_vectors(logrca: LogRcaMatrix, meta: MetadataTable | dict,
                             countries=None) -> SimilarityVectors:
    """Restrict log-RCA rows to non-primary products.

    Countries whose restricted vector is constant cannot be correlated; they
    are left out and listed in ``excluded``. ``countries`` optionally limits
    the rows kept (in the given order).
    """
    classes = meta.product_classes if isinstance(meta, MetadataTable) else dict(meta)
    missing = [p for p in logrca.products if p not in classes]
    if missing:
        shown = ", ".join(missing[:5]) + (" ..." if len(missing) > 5 else "")
        raise UnclassifiedProduct(f"{len(missing)} product(s) lack a class: {shown}")
    cols = [j for j, p in enumerate(logrca.products) if classes[p] == "non-primary"]
    if not cols:
        raise EmptySelection("no product is classified non-primary")
    if len(cols) < 2:
        raise EmptySelection("similarity vectors need at least two non-primary products")
    rows = range(len(logrca.countries))
    if countries is not None:
        idx = {c: i for i, c in enumerate(logrca.countries)}
        rows = [idx[c] for c in countries]
    values = logrca.values[np.ix_(list(rows), cols)]
    keep, excluded = [], []
    for r, i in enumerate(rows):
        v = values[r]
        if np.all(v == v[0]):
            excluded.append((logrca.countries[i], "constant non-primary log-RCA vector"))
        else:
            keep.append(r)
    rows = list(rows)
    return SimilarityVectors(
        countries=tuple(logrca.countries[rows[r]] for r in keep),
        products=tuple(logrca.products[j] for j in cols),
        values=values[keep],
        excluded=tuple(excluded),
    )


def correlation_matrix(vectors: SimilarityVectors) -> CorrelationMatrix:
    """Pearson correlations computed two-pass: centre each vector, then take dot products."""
    v = np.asarray(vectors.values, dtype=float)
    if v.shape[0] < 2:
        raise ValidationError("need at least two countries to correlate")
    if v.shape[1] < 2:
        raise ValidationError("need vectors of length at least two")
    centred = v - v.mean(axis=1, keepdims=True)
    norms = np.sqrt(np.einsum("ij,ij->i", centred, centred))
    if np.any(norms == 0):
        bad = [c for c, n in zip(vectors.countries, norms) if n == 0]
        raise ZeroVariance(f"zero-variance vectors for {', '.join(bad)}")
    unit = centred / norms[:, None]
    rho = unit @ unit.T
    rho = (rho + rho.T) / 2
    np.fill_diagonal(rho, 1.0)
    np.clip(rho, -1.0, 1.0, out=rho)
    return CorrelationMatrix(tuple(vectors.countries), rho)

