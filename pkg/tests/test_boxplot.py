"""Scalar quantiles, MAD, and the boxplot detectors."""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from densiscope.boxplot import BoxplotParams, boxplot_detect, mad, percentile


def test_percentile_examples():
    assert percentile([1, 2, 3, 4, 5], 0.5) == 3.0
    assert percentile([1, 2, 3, 4], 0.25) == pytest.approx(1.75)
    assert percentile([7.0], 0.9) == 7.0
    with pytest.raises(ValueError):
        percentile([], 0.5)


def test_mad_examples():
    assert mad([1, 2, 3]) == pytest.approx(1.4826)
    assert mad([5, 5, 5, 5]) == 0.0
    assert mad([0, 0, 10]) == 0.0
    with pytest.raises(ValueError):
        mad([])


def test_boxplot_params_validation():
    with pytest.raises(ValueError):
        BoxplotParams(0.0)
    with pytest.raises(ValueError):
        BoxplotParams(1.5, "sideways")


def test_one_sided_flags_the_large_value():
    xs = list(range(1, 11)) + [100]
    # q75 = 8.5, IQR = 5.5, fence = 16.75
    out = boxplot_detect(xs, BoxplotParams(1.5, "one_sided_upper"))
    assert out == {10}


def test_two_sided_flags_both_extremes():
    xs = [-100.0] + list(range(1, 9)) + [100.0]
    # q25 = 2.25, q75 = 6.75, fences at -4.5 and 13.5
    out = boxplot_detect(xs, BoxplotParams(1.5, "two_sided"))
    assert out == {0, 9}


def test_zero_iqr_guard():
    assert boxplot_detect([3.0] * 10, BoxplotParams(1.5, "two_sided")) == set()
    assert boxplot_detect([3.0] * 10, BoxplotParams(1.5, "one_sided_upper")) == set()


def test_too_few_points_warns_and_returns_empty():
    with pytest.warns(UserWarning):
        out = boxplot_detect([1.0, 2.0, 100.0], BoxplotParams(1.5, "one_sided_upper"))
    assert out == set()


@given(st.lists(st.floats(-1e6, 1e6), min_size=4, max_size=40),
       st.sampled_from(["two_sided", "one_sided_upper"]))
@settings(max_examples=100, deadline=None)
def test_wider_whisker_flags_a_subset(xs, side):
    narrow = boxplot_detect(xs, BoxplotParams(1.5, side))
    wide = boxplot_detect(xs, BoxplotParams(2.5, side))
    assert wide <= narrow


@given(st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=40),
       st.floats(0.1, 50.0), st.floats(-1e3, 1e3))
@settings(max_examples=100, deadline=None)
def test_affine_equivariance(xs, a, b):
    q25, q75 = np.percentile(xs, [25, 75])
    # stay clear of the degenerate-spread guard, which is an absolute cutoff
    assume(q75 - q25 > 1e-6 * max(1.0, abs(q75)))
    params = BoxplotParams(1.5, "two_sided")
    before = boxplot_detect(xs, params)
    after = boxplot_detect([a * x + b for x in xs], params)
    assert before == after


@given(st.lists(st.floats(-1e6, 1e6), min_size=4, max_size=40))
@settings(max_examples=100, deadline=None)
def test_one_sided_never_flags_below_median(xs):
    flagged = boxplot_detect(xs, BoxplotParams(1.5, "one_sided_upper"))
    med = np.median(xs)
    for i in flagged:
        assert xs[i] > med
