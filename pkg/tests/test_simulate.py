"""Generators and contamination mechanisms."""

import numpy as np
import pytest

from densiscope.curves import NORM_TOL, integrate
from densiscope.simulate import (
    RandomStream,
    beta_density,
    exchange_contaminate,
    gen_beta_sorted,
    gen_pairs,
    gen_scenario_pdfs,
    gen_sinusoid_dataset,
    insert_contaminate,
    insert_outliers,
    tgpd_density,
)


def _assert_valid(f):
    assert np.all(f.values >= 0.0)
    assert abs(integrate(f) - 1.0) <= NORM_TOL


def test_stream_determinism_and_split():
    a = RandomStream(99).uniform(0.0, 1.0, 5)
    b = RandomStream(99).uniform(0.0, 1.0, 5)
    assert np.array_equal(a, b)
    kids = RandomStream(99).split(3)
    draws = [k.uniform(0.0, 1.0) for k in kids]
    assert len(set(draws)) == 3


def test_basic_densities_are_valid():
    _assert_valid(beta_density(3.0, 8.0))
    _assert_valid(tgpd_density(2.0, 4.0))
    _assert_valid(tgpd_density(0.5, 0.5))


def test_gen_scenario_pdfs(stream):
    pdfs = gen_scenario_pdfs(10, "I", 0.3, stream)
    assert len(pdfs) == 10
    for f in pdfs:
        _assert_valid(f)
    with pytest.raises(ValueError):
        gen_scenario_pdfs(5, "I", 1.5, stream)
    same1 = gen_scenario_pdfs(3, "II", 0.15, RandomStream(5))
    same2 = gen_scenario_pdfs(3, "II", 0.15, RandomStream(5))
    for f, g in zip(same1, same2):
        assert np.array_equal(f.values, g.values)


def test_gen_beta_sorted(stream):
    pdfs = gen_beta_sorted(8, 6.0, 13.0, stream)
    assert len(pdfs) == 8
    for f in pdfs:
        _assert_valid(f)
    with pytest.raises(ValueError):
        gen_beta_sorted(8, 13.0, 6.0, stream)


def test_insert_outliers_bookkeeping(stream):
    pdfs = gen_scenario_pdfs(30, "I", 0.0, stream)
    originals = [f.values.copy() for f in pdfs]
    replaced, idx = insert_outliers(pdfs, 5, 0.5, 0.2, stream)
    assert len(idx) == 5
    assert idx <= set(range(30))
    for i in range(30):
        changed = not np.array_equal(replaced[i].values, originals[i])
        assert changed == (i in idx)
    for f in replaced:
        _assert_valid(f)


def test_insert_outliers_validation(stream):
    pdfs = gen_scenario_pdfs(5, "I", 0.0, stream)
    with pytest.raises(ValueError):
        insert_outliers(pdfs, 5, 0.0, 0.2, stream)
    with pytest.raises(ValueError):
        insert_outliers(pdfs, 2, 0.0, 0.7, stream)


def test_gen_pairs_variants(stream):
    for variant in ("mixture_beta", "simple_beta"):
        pairs = gen_pairs(6, variant, stream)
        assert len(pairs) == 6
        for g, f in pairs:
            _assert_valid(g)
            _assert_valid(f)
    with pytest.raises(ValueError):
        gen_pairs(1, "simple_beta", stream)
    with pytest.raises(ValueError):
        gen_pairs(4, "bogus", stream)


def test_exchange_contaminate(stream):
    pairs = gen_pairs(25, "mixture_beta", stream)
    g_before = sorted(float(np.max(p[0].values)) for p in pairs)
    out, idx = exchange_contaminate(pairs, 2, 1, stream)
    assert len(idx) == 2 * (2 + 1)
    # swaps only permute the g-curves, never alter them
    g_after = sorted(float(np.max(p[0].values)) for p in out)
    assert np.allclose(g_before, g_after)
    with pytest.raises(ValueError):
        exchange_contaminate(pairs, 0, 0, stream)


def test_insert_contaminate_disjoint_sides(stream):
    pairs = gen_pairs(30, "mixture_beta", stream)
    out, idx = insert_contaminate(pairs, 3, 4, 0.0, 0.2, stream)
    assert len(idx) == 7
    assert len(out) == 30
    out2, idx2 = insert_contaminate(pairs, 0, 0, 0.0, 0.2, stream)
    assert idx2 == set()


def test_gen_sinusoid_dataset(stream):
    pdfs, idx = gen_sinusoid_dataset(20, 4, stream)
    assert len(pdfs) == 20
    assert len(idx) == 4
    for f in pdfs:
        _assert_valid(f)
    with pytest.raises(ValueError):
        gen_sinusoid_dataset(4, 4, stream)
