import numpy as np
import pytest

from solvheat.algebra import regime_from_params
from solvheat.representation import (
    GroupPoint,
    apply_operator,
    build_rep,
    embed,
    exp2x2,
    exp2x2_generic,
    field_coeffs,
    group_inv,
    group_mul,
    left_haar_weight,
    rep_from_params,
)


def random_params_for(tag, rng):
    if tag == "Rank1Heisenberg":
        return (0.0, 0.0)
    if tag == "Rank1BetaPos":
        return (0.0, float(rng.uniform(0.2, 2.0)))
    if tag == "DeltaPos":
        b = float(rng.uniform(0.0, 1.5))
        a = float(rng.uniform(0.1, 2.0))  # delta = b^2 + 4a > 0
        return (a, b)
    if tag == "DeltaNeg":
        b = float(rng.uniform(0.0, 1.5))
        a = float(-rng.uniform(b * b / 4 + 0.1, b * b / 4 + 2.0))
        return (a, b)
    if tag == "DeltaZero":
        lam = float(rng.uniform(0.2, 1.5))
        return (-lam * lam, 2 * lam)
    raise ValueError(tag)


ALL_TAGS = ["Rank1Heisenberg", "Rank1BetaPos", "DeltaPos", "DeltaNeg", "DeltaZero"]


def test_heisenberg_matrices_are_elementary():
    rep = rep_from_params(0.0, 0.0)
    e12 = np.zeros((3, 3)); e12[0, 1] = 1.0
    e23 = np.zeros((3, 3)); e23[1, 2] = 1.0
    e13 = np.zeros((3, 3)); e13[0, 2] = 1.0
    assert np.array_equal(rep.matX, e12)
    assert np.array_equal(rep.matY, e23)
    assert np.array_equal(rep.matR, e13)


def test_se2_blocks():
    rep = rep_from_params(-1.0, 0.0)
    assert np.allclose(rep.A, [[0.0, -1.0], [1.0, 0.0]])
    assert np.allclose(rep.ybar, [-1.0, 0.0])
    assert np.allclose(rep.rbar, [0.0, -1.0])


def test_solv_minus_blocks():
    rep = rep_from_params(1.0, 0.0)
    assert np.allclose(rep.A, np.diag([1.0, -1.0]))
    assert np.allclose(rep.ybar, [-1.0, -1.0])
    assert np.allclose(rep.rbar, [-1.0, 1.0])


@pytest.mark.parametrize("tag", ALL_TAGS)
def test_commutation_relations_randomized(tag, rng):
    for _ in range(20):
        a, b = random_params_for(tag, rng)
        rep = rep_from_params(a, b)
        assert rep.regime.tag == tag
        assert rep.commutation_residual() <= 1e-12
        # partitioned form: zero 2x2 block and zero last row for Y and R
        for m in (rep.matY, rep.matR):
            assert np.all(m[:2, :2] == 0.0) and np.all(m[2, :] == 0.0)


@pytest.mark.parametrize("tag", ALL_TAGS)
def test_exp2x2_matches_generic(tag, rng):
    for _ in range(10):
        a, b = random_params_for(tag, rng)
        rep = rep_from_params(a, b)
        for theta in rng.uniform(-10, 10, size=5):
            closed = exp2x2(rep.regime, theta)
            generic = exp2x2_generic(rep, theta)
            scale = max(1.0, np.max(np.abs(generic)))
            assert np.max(np.abs(closed - generic)) <= 1e-12 * scale


def test_exp2x2_special_values():
    for tag in ALL_TAGS:
        rng = np.random.default_rng(7)
        rep = rep_from_params(*random_params_for(tag, rng))
        assert np.allclose(exp2x2(rep.regime, 0.0), np.eye(2))
    se2 = regime_from_params(-1.0, 0.0)
    assert np.allclose(exp2x2(se2, np.pi / 2), [[0.0, -1.0], [1.0, 0.0]], atol=1e-15)
    dz = regime_from_params(-1.0, 2.0)  # lam = 1
    assert np.allclose(exp2x2(dz, 1.0), np.e * np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_group_identity_and_inverse(rng):
    for tag in ALL_TAGS:
        rep = rep_from_params(*random_params_for(tag, rng))
        p = GroupPoint(*rng.uniform(-1.5, 1.5, size=3))
        e = GroupPoint(0.0, 0.0, 0.0)
        assert group_mul(rep, p, e) == p
        q = group_mul(rep, p, group_inv(rep, p))
        assert np.allclose(q, (0.0, 0.0, 0.0), atol=1e-14)


def test_heisenberg_group_law_closed_form(rng):
    # multiplying the upper-triangular matrices by hand gives
    # (t1, x1, y1) . (t2, x2, y2) = (t1 + t2, x1 + x2 + t1 y2, y1 + y2)
    rep = rep_from_params(0.0, 0.0)
    for _ in range(10):
        t1, x1, y1, t2, x2, y2 = rng.uniform(-2, 2, size=6)
        p = group_mul(rep, GroupPoint(t1, x1, y1), GroupPoint(t2, x2, y2))
        assert np.allclose(p, (t1 + t2, x1 + x2 + t1 * y2, y1 + y2))


@pytest.mark.parametrize("tag", ALL_TAGS)
def test_group_law_matches_matrix_multiplication(tag, rng):
    rep = rep_from_params(*random_params_for(tag, rng))
    for _ in range(10):
        p = GroupPoint(*rng.uniform(-1.5, 1.5, size=3))
        q = GroupPoint(*rng.uniform(-1.5, 1.5, size=3))
        m = embed(rep, p) @ embed(rep, q)
        r = group_mul(rep, p, q)
        assert np.max(np.abs(embed(rep, r) - m)) <= 1e-12 * max(1.0, np.max(np.abs(m)))


@pytest.mark.parametrize("tag", ALL_TAGS)
def test_group_mul_associative(tag, rng):
    rep = rep_from_params(*random_params_for(tag, rng))
    for _ in range(10):
        p, q, r = (GroupPoint(*rng.uniform(-1, 1, size=3)) for _ in range(3))
        left = group_mul(rep, group_mul(rep, p, q), r)
        right = group_mul(rep, p, group_mul(rep, q, r))
        assert np.allclose(left, right, atol=1e-10)


def test_field_coeffs_heisenberg():
    rep = rep_from_params(0.0, 0.0)
    for theta in (-1.3, 0.0, 0.7):
        fc = field_coeffs(rep, theta)
        assert np.allclose(fc.yY, [theta, 1.0])
        assert np.allclose(fc.yR, [1.0, 0.0])


def test_field_coeffs_se2():
    rep = rep_from_params(-1.0, 0.0)
    for theta in (-0.4, 0.9):
        fc = field_coeffs(rep, theta)
        assert np.allclose(fc.yY, [-np.cos(theta), -np.sin(theta)])
        assert np.allclose(fc.yR, [np.sin(theta), -np.cos(theta)])


def test_field_coeffs_at_zero(rng):
    for tag in ALL_TAGS:
        rep = rep_from_params(*random_params_for(tag, rng))
        fc = field_coeffs(rep, 0.0)
        assert np.allclose(fc.yY, rep.ybar)
        assert np.allclose(fc.yR, rep.rbar)


def test_apply_operator_coordinates():
    rep = rep_from_params(0.0, 0.0)
    p = GroupPoint(0.7, -0.3, 0.2)
    assert apply_operator(rep, ["X"], lambda g: g.theta, p) == pytest.approx(1.0, abs=1e-9)
    assert apply_operator(rep, ["Y"], lambda g: g.x, p) == pytest.approx(p.theta, abs=1e-9)
    assert apply_operator(rep, ["Y"], lambda g: g.y, p) == pytest.approx(1.0, abs=1e-9)
    assert apply_operator(rep, ["R"], lambda g: g.x, p) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("tag", ALL_TAGS)
def test_nested_derivatives_reproduce_commutators(tag, rng):
    """(XY - YX)f = (beta Y + R)f and (XR - RX)f = alpha Y f on coordinates."""
    a, b = random_params_for(tag, rng)
    rep = rep_from_params(a, b)
    coords = [lambda g: g.theta, lambda g: g.x, lambda g: g.y]
    for _ in range(3):
        p = GroupPoint(*rng.uniform(-1, 1, size=3))
        for f in coords:
            xy = apply_operator(rep, ["X", "Y"], f, p) - apply_operator(rep, ["Y", "X"], f, p)
            target = b * apply_operator(rep, ["Y"], f, p) + apply_operator(rep, ["R"], f, p)
            assert xy == pytest.approx(target, abs=1e-6)
            xr = apply_operator(rep, ["X", "R"], f, p) - apply_operator(rep, ["R", "X"], f, p)
            assert xr == pytest.approx(a * apply_operator(rep, ["Y"], f, p), abs=1e-6)
            yr = apply_operator(rep, ["Y", "R"], f, p) - apply_operator(rep, ["R", "Y"], f, p)
            assert yr == pytest.approx(0.0, abs=1e-6)


def test_left_haar_weight():
    rep = rep_from_params(0.0, 1.0)
    assert left_haar_weight(rep, GroupPoint(0.0, 5.0, -2.0)) == 1.0
    assert left_haar_weight(rep, GroupPoint(2.0, 0.0, 0.0)) == pytest.approx(np.exp(-2.0))
    unimodular = rep_from_params(-1.0, 0.0)
    assert left_haar_weight(unimodular, GroupPoint(2.0, 0.0, 0.0)) == 1.0
