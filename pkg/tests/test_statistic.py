import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gcovsel import statistic
from gcovsel.errors import AccuracyError, DegenerateInputError, InvalidInputError
from gcovsel.statistic import INF_F, compute_B, compute_B_many, compute_stat


def projector_B(r, s):
    """B from the quadratic forms with an explicit rank-one projector."""
    J = np.outer(s, s) / (s @ s)
    return r @ (np.eye(len(r)) - J) @ r / (r @ r)


def test_orthogonal_gives_one():
    assert compute_B([1.0, 0.0, 0.0], [0.0, 2.0, -1.0]) == 1.0


def test_parallel_gives_zero():
    r = np.array([0.3, -1.2, 2.0, 0.7])
    assert compute_B(r, 3.0 * r) == pytest.approx(0.0, abs=1e-15)


def test_worked_example():
    r, s = np.array([1.0, 2.0, 2.0]), np.array([1.0, 0.0, 0.0])
    assert compute_B(r, s) == pytest.approx(8 / 9, abs=1e-15)
    assert projector_B(r, s) == pytest.approx(8 / 9, abs=1e-15)
    res = compute_stat(r, s, 1)
    assert res.F == pytest.approx(0.125, rel=1e-14)
    assert res.dendf == 1


def test_stat_boundaries():
    assert compute_stat([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 5).F == 0.0
    res = compute_stat([1.0, 2.0, 3.0], [2.0, 4.0, 6.0], 5)
    assert res.B == 0.0 and res.F == INF_F


def test_degenerate_and_shape_errors():
    with pytest.raises(DegenerateInputError):
        compute_B([0.0, 0.0, 0.0], [1.0, 2.0, 3.0])
    with pytest.raises(DegenerateInputError):
        compute_B([1.0, 2.0, 3.0], [0.0, 0.0, 0.0])
    with pytest.raises(InvalidInputError):
        compute_B([1.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(InvalidInputError):
        compute_stat([1.0, 2.0, 3.0], [1.0, 0.0, 0.0], 0)


def test_clamping():
    assert statistic._clamp(-5e-13) == 0.0
    assert statistic._clamp(1.0 + 5e-13) == 1.0
    with pytest.raises(AccuracyError):
        statistic._clamp(-1e-9)
    with pytest.raises(AccuracyError):
        statistic._clamp(1.0 + 1e-9)


def test_symmetry_and_scale_invariance_random(rng):
    for _ in range(1000):
        n = int(rng.integers(3, 60))
        r, s = rng.standard_normal(n), rng.standard_normal(n)
        b = compute_B(r, s)
        assert abs(b - compute_B(s, r)) <= 1e-12
        a1, a2 = np.exp(rng.uniform(-8, 8, 2))
        assert abs(compute_B(a1 * r, a2 * s) - b) <= 1e-12
        # the printed combined identity B(a r, b s) = B(a s, b r)
        assert abs(compute_B(a1 * r, a2 * s) - compute_B(a1 * s, a2 * r)) <= 1e-12


vec = arrays(np.float64, 12, elements=st.floats(-1e3, 1e3, allow_nan=False))


@settings(max_examples=300, deadline=None)
@given(vec, vec, st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_symmetry_scale_property(r, s, a, b):
    if r @ r < 1e-6 or s @ s < 1e-6:
        return
    base = compute_B(r, s)
    assert compute_B(s, r) == base
    assert abs(compute_B(a * r, b * s) - base) <= 1e-12


@pytest.mark.parametrize("n", [3, 10, 100, 1000])
def test_correlation_form_matches_projector_form(n, rng):
    for _ in range(5 if n == 1000 else 30):
        r = rng.standard_normal(n)
        s = rng.standard_normal(n) + 0.3 * r
        assert abs(compute_B(r, s) - projector_B(r, s)) <= 1e-10
        J = np.outer(s, s) / (s @ s)
        assert r @ J @ r == pytest.approx((r @ s) ** 2 / (s @ s), rel=1e-10)


def test_many_matches_single(rng):
    r = rng.standard_normal(25)
    S = rng.standard_normal((25, 7))
    np.testing.assert_array_equal(compute_B_many(r, S), [compute_B(r, S[:, j]) for j in range(7)])
