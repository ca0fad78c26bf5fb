import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecobench.complexity import LogRcaMatrix
from ecobench.errors import EmptySelection, UnclassifiedProduct, ValidationError, ZeroVariance
from ecobench.ingest import MetadataTable
from ecobench.similarity import SimilarityVectors, build_similarity_vectors, correlation_matrix

from oracles import pearson_two_pass


def _logrca(values, products=None):
    v = np.asarray(values, float)
    countries = tuple(f"c{i}" for i in range(v.shape[0]))
    products = products or tuple(f"{5 + j % 4}{j:03d}" for j in range(v.shape[1]))
    return LogRcaMatrix(countries, products, v, 0.1)


def _vectors(v):
    v = np.asarray(v, float)
    return SimilarityVectors(tuple(f"c{i}" for i in range(len(v))), tuple(map(str, range(v.shape[1]))), v)


def test_all_non_primary_is_identity():
    lr = _logrca(np.random.default_rng(0).normal(size=(3, 5)))
    meta = MetadataTable({}, {p: "non-primary" for p in lr.products})
    vec = build_similarity_vectors(lr, meta)
    assert np.array_equal(vec.values, lr.values)
    assert vec.products == lr.products


def test_all_primary_is_empty():
    lr = _logrca(np.ones((2, 3)))
    with pytest.raises(EmptySelection):
        build_similarity_vectors(lr, {p: "primary" for p in lr.products})


def test_single_non_primary_product_is_too_few():
    lr = _logrca(np.arange(6.0).reshape(2, 3), ("0001", "0002", "5001"))
    with pytest.raises(EmptySelection):
        build_similarity_vectors(lr, {"0001": "primary", "0002": "primary", "5001": "non-primary"})


def test_missing_class_rejected():
    lr = _logrca(np.ones((2, 3)))
    with pytest.raises(UnclassifiedProduct):
        build_similarity_vectors(lr, {lr.products[0]: "primary"})


def test_filter_keeps_product_order():
    products = ("0001", "5002", "1003", "7004", "8005")
    lr = _logrca(np.arange(10.0).reshape(2, 5), products)
    classes = {p: "non-primary" if p[0] in "5678" else "primary" for p in products}
    vec = build_similarity_vectors(lr, classes)
    assert vec.products == ("5002", "7004", "8005")
    assert vec.values.tolist() == [[1, 3, 4], [6, 8, 9]]


def test_constant_vectors_excluded():
    lr = _logrca([[1.0, 2.0, 3.0], [2.0, 2.0, 2.0], [0.0, 1.0, 0.0]])
    vec = build_similarity_vectors(lr, {p: "non-primary" for p in lr.products})
    assert vec.countries == ("c0", "c2")
    assert vec.excluded == (("c1", "constant non-primary log-RCA vector"),)


def test_country_subset_order():
    lr = _logrca(np.random.default_rng(1).normal(size=(4, 3)))
    vec = build_similarity_vectors(lr, {p: "non-primary" for p in lr.products}, ["c3", "c0"])
    assert vec.countries == ("c3", "c0")
    assert np.array_equal(vec.values[0], lr.values[3])


def test_self_correlation_and_anticorrelation():
    v = np.array([0.3, 1.2, -0.4, 2.5])
    corr = correlation_matrix(_vectors([v, -v + 7.0]))
    assert corr.values[0, 0] == 1.0
    assert corr.rho("c0", "c1") == pytest.approx(-1.0, abs=1e-15)


def test_matches_two_pass_oracle():
    rng = np.random.default_rng(21)
    for _ in range(50):
        u, w = rng.normal(size=(2, 40)) * rng.uniform(0.1, 10, 2)[:, None] + rng.normal(size=(2, 1)) * 5
        corr = correlation_matrix(_vectors([u, w]))
        assert corr.values[0, 1] == pytest.approx(pearson_two_pass(u, w), abs=1e-12)


def test_matrix_properties():
    v = np.random.default_rng(2).normal(size=(12, 30))
    r = correlation_matrix(_vectors(v)).values
    assert np.array_equal(r, r.T)
    assert np.all(np.diag(r) == 1.0)
    assert np.all(np.abs(r) <= 1.0)
    np.testing.assert_allclose(r, np.corrcoef(v), atol=1e-12)


def test_large_offset_stays_accurate():
    rng = np.random.default_rng(3)
    u, w = rng.normal(size=(2, 200))
    base = correlation_matrix(_vectors([u, w])).values[0, 1]
    shifted = correlation_matrix(_vectors([u + 1e8, w + 1e8])).values[0, 1]
    assert shifted == pytest.approx(base, abs=1e-7)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100), st.floats(-100, 100))
def test_affine_invariance(seed, a, b):
    v = np.random.default_rng(seed).normal(size=(4, 10))
    r1 = correlation_matrix(_vectors(v)).values
    v2 = v.copy()
    v2[1] = a * v2[1] + b
    r2 = correlation_matrix(_vectors(v2)).values
    np.testing.assert_allclose(r1, r2, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_product_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(5, 12))
    perm = rng.permutation(12)
    np.testing.assert_allclose(correlation_matrix(_vectors(v)).values,
                               correlation_matrix(_vectors(v[:, perm])).values, atol=1e-12)


def test_zero_variance_defensive():
    with pytest.raises(ZeroVariance):
        correlation_matrix(_vectors([[1.0, 1.0, 1.0], [1.0, 2.0, 3.0]]))


def test_too_small_inputs():
    with pytest.raises(ValidationError):
        correlation_matrix(_vectors([[1.0, 2.0]]))
    with pytest.raises(ValidationError):
        correlation_matrix(_vectors([[1.0], [2.0]]))


def test_subset():
    corr = correlation_matrix(_vectors(np.random.default_rng(4).normal(size=(4, 6))))
    sub = corr.subset(["c2", "c0"])
    assert sub.values[0, 1] == corr.rho("c2", "c0")
