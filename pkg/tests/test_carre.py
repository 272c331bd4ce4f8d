import numpy as np
import pytest
import sympy as sp

import solvheat.carre as carre_mod
from solvheat.carre import (
    THETA,
    XS,
    YS,
    TestFunction,
    apply_field,
    apply_L,
    carre,
    cd_residual,
    cd_residual_corrected,
    cd_square_decomposition,
    cd_sweep,
    frame_for_params,
    gamma2_expanded,
    standard_suite,
)
from solvheat.errors import ClassOverflow
from solvheat.representation import GroupPoint, apply_operator, field_coeffs, rep_from_params

PAIRS = [(1.0, 0.0), (-1.0, 0.0), (1.0, 1.0), (-2.0, 1.0), (0.0, 1.0), (0.0, 0.0)]
SWEEP_PAIRS = [(1.0, 0.0), (-1.0, 0.0), (1.0, 1.0), (-2.0, 1.0), (0.0, 1.0)]


@pytest.mark.parametrize("ab", PAIRS)
def test_frame_matches_representation(ab, rng):
    fr = frame_for_params(*ab)
    rep = rep_from_params(*ab)
    for th in rng.uniform(-2, 2, size=5):
        fc = field_coeffs(rep, th)
        subs = {THETA: th}
        assert float(fr.g1.subs(subs)) == pytest.approx(fc.yY[0], abs=1e-12)
        assert float(fr.g2.subs(subs)) == pytest.approx(fc.yY[1], abs=1e-12)
        assert float(fr.h1.subs(subs)) == pytest.approx(fc.yR[0], abs=1e-12)
        assert float(fr.h2.subs(subs)) == pytest.approx(fc.yR[1], abs=1e-12)


def test_apply_L_simple_cases():
    fr = frame_for_params(1.0, 1.0)
    assert apply_L(fr, TestFunction(THETA)).expr == -1  # L theta = -beta
    assert apply_L(fr, TestFunction(sp.Integer(3))).expr == 0
    heis = frame_for_params(0.0, 0.0)
    fx = TestFunction(XS)
    assert apply_field(heis, "Y", fx).expr == THETA  # Y x = theta on Heisenberg
    assert apply_L(heis, fx).expr == 0


def test_carre_of_theta_and_constant():
    for ab in PAIRS:
        c = carre(TestFunction(THETA), (0.7, -0.4, 0.2), *ab)
        assert c.gamma == pytest.approx(1.0, abs=1e-12)
        assert c.gammaR == 0.0
        assert c.gamma2 == pytest.approx(0.0, abs=1e-12)
        assert c.gamma2R == pytest.approx(0.0, abs=1e-12)
        assert c.lf == pytest.approx(-ab[1], abs=1e-12)
        z = carre(TestFunction(sp.Integer(1)), (0.1, 0.2, 0.3), *ab)
        assert (z.gamma, z.gammaR, z.gamma2, z.gamma2R, z.lf) == (0, 0, 0, 0, 0)


def test_gamma_bilinearity(rng):
    fr = frame_for_params(-2.0, 1.0)
    f = TestFunction(XS * THETA)
    g = TestFunction(YS + XS**2)
    fg = TestFunction(f.expr + g.expr)
    for _ in range(5):
        p = rng.uniform(-1.5, 1.5, 3)
        cf, cg, cfg = (carre(h, p, -2.0, 1.0) for h in (f, g, fg))
        # Gamma(f+g) = Gamma(f) + 2 Gamma(f,g) + Gamma(g); recover the cross
        # term from polarization and check it is consistent
        cross = 0.5 * (cfg.gamma - cf.gamma - cg.gamma)
        fr_x = sp.lambdify((THETA, XS, YS), sp.expand(fr.X(f.expr) * fr.X(g.expr) + fr.Y(f.expr) * fr.Y(g.expr)))
        assert cross == pytest.approx(float(fr_x(*p)), abs=1e-10)


@pytest.mark.parametrize("ab", SWEEP_PAIRS)
def test_gamma2_definitional_equals_expanded(ab, rng):
    for f in standard_suite()[:8]:
        p = rng.uniform(-1.5, 1.5, 3)
        c = carre(f, p, *ab)
        g2, g2r = gamma2_expanded(f, p, *ab)
        scale = max(1.0, abs(c.gamma2), abs(c.gamma2R))
        assert abs(c.gamma2 - g2) <= 1e-9 * scale
        assert abs(c.gamma2R - g2r) <= 1e-9 * scale


@pytest.mark.parametrize("ab", [(1.0, 1.0), (-1.0, 0.0), (0.0, 1.0)])
def test_symbolic_derivatives_match_finite_differences(ab, rng):
    rep = rep_from_params(*ab)
    fr = frame_for_params(*ab)
    for f in standard_suite()[:6]:
        fn = f.lambdified()
        fnum = lambda g: fn(g.theta, g.x, g.y)
        for _ in range(4):
            p = GroupPoint(*rng.uniform(-1, 1, 3))
            for letter in ("X", "Y", "R"):
                sym = float(sp.lambdify((THETA, XS, YS), apply_field(fr, letter, f).expr)(*p))
                num = apply_operator(rep, [letter], fnum, p)
                assert num == pytest.approx(sym, abs=1e-6, rel=1e-6)
            sym_l = float(sp.lambdify((THETA, XS, YS), apply_L(fr, f).expr)(*p))
            num_l = (
                apply_operator(rep, ["X", "X"], fnum, p)
                + apply_operator(rep, ["Y", "Y"], fnum, p)
                - ab[1] * apply_operator(rep, ["X"], fnum, p)
            )
            assert num_l == pytest.approx(sym_l, abs=2e-5, rel=1e-5)


def test_residual_of_theta_closed_form():
    f = TestFunction(THETA)
    pts = np.array([[0.3, -0.2, 0.5]])
    for ab in SWEEP_PAIRS:
        for nu in (0.1, 1.0, 10.0):
            r = cd_residual(f, pts, nu, *ab)[0]
            assert r == pytest.approx(max(ab[0], 0.0) + ab[1] ** 2 / 2 + 1.0 / nu, abs=1e-10)


def test_square_decomposition_identity(rng):
    """cd_residual + 2 nu alpha beta (Yf)(Rf) equals the sum of squares exactly."""
    pts = rng.uniform(-1.5, 1.5, size=(40, 3))
    for ab in SWEEP_PAIRS:
        for f in standard_suite()[:8]:
            for nu in (0.1, 1.0, 10.0):
                lhs = cd_residual_corrected(f, pts, nu, *ab)
                rhs = cd_square_decomposition(f, pts, nu, *ab)
                scale = np.maximum(1.0, np.abs(rhs))
                assert np.max(np.abs(lhs - rhs) / scale) < 1e-9


def test_corrected_residual_nonnegative_sweep():
    out = cd_sweep(standard_suite(), SWEEP_PAIRS, (0.1, 1.0, 10.0), n_points=200, corrected=True)
    assert out["min_residual"] >= -1e-8


def test_stated_residual_goes_negative_for_mixed_parameters():
    """The strict inequality without the Y/R cross term fails when alpha*beta != 0.

    Documented counterexample: the cross term -2 nu alpha beta (Yf)(Rf)
    dominates the square terms at this point.  Verified independently with
    nested finite differences (agreement to 8 digits).
    """
    f = TestFunction(YS * sp.exp(-THETA))
    pts = np.array([[-0.5086572894999073, -1.2057725561155535, 0.08844392552111024]])
    r = cd_residual(f, pts, 1.0, -2.0, 1.0)[0]
    assert r == pytest.approx(-5.474591604747614, rel=1e-9)
    # restoring the cross term makes the same configuration nonnegative
    assert cd_residual_corrected(f, pts, 1.0, -2.0, 1.0)[0] > 0.0


def test_alpha_zero_reduces_to_cd_form():
    # at alpha = 0 the stated residual coincides with the corrected one and
    # with the CD(-beta^2, 1/2, 1, 2)-type bound
    pts = np.random.default_rng(5).uniform(-1.5, 1.5, size=(50, 3))
    for f in standard_suite()[:6]:
        for nu in (0.1, 1.0, 10.0):
            a = cd_residual(f, pts, nu, 0.0, 1.0)
            b = cd_residual_corrected(f, pts, nu, 0.0, 1.0)
            assert np.array_equal(a, b)
            assert np.min(a) >= -1e-8


def test_class_overflow(monkeypatch):
    monkeypatch.setattr(carre_mod, "TERM_CAP", 5)
    fr = frame_for_params(1.0, 1.0)
    f = TestFunction((XS + YS + THETA + 1) ** 3)
    with pytest.raises(ClassOverflow):
        apply_L(fr, f)
