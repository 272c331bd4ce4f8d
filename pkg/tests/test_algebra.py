import numpy as np
import pytest

from solvheat.algebra import (
    LieAlgebra3,
    SubRiemannianTriple,
    almost_isomorphic,
    bracket,
    canonicalize,
    characteristic_poly,
    transform_triple,
    triple_from_json,
    triple_to_json,
    validate,
)
from solvheat.errors import SolvheatError
from solvheat.presets import canonical_triple, preset_params, preset_triple


def random_basis_change(rng, scale=1.0):
    while True:
        s = rng.normal(size=(3, 3)) * scale
        if abs(np.linalg.det(s)) > 0.3:
            return s


def random_h_mix(rng):
    while True:
        q = rng.normal(size=(2, 2))
        if abs(np.linalg.det(q)) > 0.3:
            return q


def canonical_residuals(triple, form):
    c = triple.algebra.c
    r1 = bracket(c, form.X, form.Y) - form.Z
    r2 = bracket(c, form.X, form.Z) - form.alpha * form.Y - form.beta * form.Z
    r3 = bracket(c, form.Y, form.Z)
    return max(np.max(np.abs(r)) for r in (r1, r2, r3))


def test_heisenberg_triple_is_valid():
    report = validate(preset_triple("heisenberg"))
    assert report.ok, report.violations


def test_jacobi_violation_is_flagged():
    c = np.zeros((3, 3, 3))
    c[2, 0, 1], c[2, 1, 0] = 1.0, -1.0   # [e1,e2] = e3
    c[1, 0, 2], c[1, 2, 0] = 1.0, -1.0   # [e1,e3] = e2
    c[0, 1, 2], c[0, 2, 1] = 1.0, -1.0   # [e2,e3] = e1  (so(3)-like: rank 3, Jacobi ok)
    # perturb one constant to break Jacobi
    c[1, 0, 1] += 0.3
    c[1, 1, 0] -= 0.3
    triple = SubRiemannianTriple(LieAlgebra3(c), np.eye(3)[:2], np.eye(2))
    report = validate(triple)
    assert any("jacobi" in v for v in report.violations)


def test_h_equal_derived_fails_hormander():
    # rank-2 algebra with H = g' = span{e2, e3}
    triple = canonical_triple(1.0, 0.0)
    bad = SubRiemannianTriple(
        triple.algebra, np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]), np.eye(2)
    )
    report = validate(bad)
    assert any("Hormander" in v for v in report.violations)


def test_rank3_rejected_as_not_solvable():
    c = np.zeros((3, 3, 3))
    c[2, 0, 1], c[2, 1, 0] = 1.0, -1.0
    c[1, 0, 2], c[1, 2, 0] = -1.0, 1.0
    c[0, 1, 2], c[0, 2, 1] = 1.0, -1.0   # su(2)-type relations
    triple = SubRiemannianTriple(LieAlgebra3(c), np.eye(3)[:2], np.eye(2))
    report = validate(triple)
    assert not report.ok
    with pytest.raises(SolvheatError):
        canonicalize(triple)


@pytest.mark.parametrize(
    "name,expected",
    [
        ("heisenberg", (0.0, 0.0)),
        ("se2", (-1.0, 0.0)),
        ("solv-minus", (1.0, 0.0)),
        ("rank1-beta(1)", (0.0, 1.0)),
        ("delta-zero(1)", (-1.0, 2.0)),
    ],
)
def test_presets_canonicalize_to_their_parameters(name, expected):
    triple = preset_triple(name)
    form, regime, geo = canonicalize(triple)
    assert form.alpha == pytest.approx(expected[0], abs=1e-12)
    assert form.beta == pytest.approx(expected[1], abs=1e-12)
    assert canonical_residuals(triple, form) < 1e-9


def test_regime_tags():
    cases = {
        "heisenberg": "Rank1Heisenberg",
        "rank1-beta(2)": "Rank1BetaPos",
        "solv-minus": "DeltaPos",
        "se2": "DeltaNeg",
        "delta-zero(1)": "DeltaZero",
    }
    for name, tag in cases.items():
        _, regime, _ = canonicalize(preset_triple(name))
        assert regime.tag == tag, name


def test_regime_root_identities():
    _, regime, _ = canonicalize(preset_triple("solv-minus"))
    assert regime.lam1 * regime.lam2 == pytest.approx(-regime.alpha, abs=1e-12)
    assert regime.lam1 + regime.lam2 == pytest.approx(regime.beta, abs=1e-12)
    assert regime.lam1 == pytest.approx(1.0) and regime.lam2 == pytest.approx(-1.0)

    _, regime, _ = canonicalize(canonical_triple(-2.0, 1.0))
    assert regime.tag == "DeltaNeg"
    assert regime.rho**2 + regime.omega**2 == pytest.approx(2.0, abs=1e-12)
    assert 0.0 <= regime.theta0 < np.pi / 2


def test_se2_in_rotated_basis(rng):
    triple = preset_triple("se2")
    for _ in range(10):
        moved = transform_triple(triple, random_basis_change(rng), random_h_mix(rng))
        form, regime, _ = canonicalize(moved)
        assert form.alpha == pytest.approx(-1.0, abs=1e-9)
        assert form.beta == pytest.approx(0.0, abs=1e-9)
        assert regime.tag == "DeltaNeg"
        assert canonical_residuals(moved, form) < 1e-9


@pytest.mark.parametrize("name", ["heisenberg", "se2", "solv-minus", "rank1-beta(1)", "delta-zero(1)"])
def test_basis_change_invariance(name, rng):
    triple = preset_triple(name)
    alpha, beta = preset_params(name)
    for _ in range(25):
        moved = transform_triple(triple, random_basis_change(rng), random_h_mix(rng))
        form, _, _ = canonicalize(moved)
        assert form.alpha == pytest.approx(alpha, abs=1e-9)
        assert form.beta == pytest.approx(beta, abs=1e-9)


@pytest.mark.parametrize("s", [0.25, 4.0])
@pytest.mark.parametrize("name", ["se2", "solv-minus", "rank1-beta(1)", "delta-zero(1)"])
def test_metric_scaling_law(name, s):
    triple = preset_triple(name)
    alpha, beta = preset_params(name)
    scaled = SubRiemannianTriple(triple.algebra, triple.h_basis, s * triple.metric)
    form, _, _ = canonicalize(scaled)
    assert form.alpha == pytest.approx(alpha / s, rel=1e-9, abs=1e-12)
    assert form.beta == pytest.approx(beta / np.sqrt(s), rel=1e-9, abs=1e-12)


def test_geometric_constants_closed_forms():
    triple = canonical_triple(-2.0, 1.0)
    form, _, geo = canonicalize(triple)
    a, b = form.alpha, form.beta
    assert geo.ricci_constant == pytest.approx(-(b * b + a / 2.0), abs=1e-12)
    assert geo.torsion_coeff == pytest.approx(a / 2.0, abs=1e-12)
    assert geo.chi == pytest.approx(abs(a) / 2.0, abs=1e-12)
    assert geo.kappa_ab == pytest.approx(-b * b - a / 2.0, abs=1e-12)
    # Reeb commutations in the (X, Y, R) frame: [X,Y]=beta Y+R, [X,R]=alpha Y, [Y,R]=0
    c = triple.algebra.c
    r = geo.reeb
    assert np.allclose(bracket(c, form.X, form.Y), b * form.Y + r, atol=1e-9)
    assert np.allclose(bracket(c, form.X, r), a * form.Y, atol=1e-9)
    assert np.allclose(bracket(c, form.Y, r), 0.0, atol=1e-9)


def test_characteristic_poly_values():
    ad, pi = characteristic_poly(1.0, 0.0)
    assert np.allclose(ad, [1.0, 0.0, -1.0])          # lambda^2 - 1
    assert sorted(np.roots(ad)) == pytest.approx([-1.0, 1.0])
    assert np.allclose(pi, [-1.0, 0.0, 1.0, 0.0])

    ad, pi = characteristic_poly(0.0, 0.0)
    assert np.allclose(ad, [1.0, 0.0, 0.0])
    assert np.allclose(pi, [-1.0, 0.0, 0.0, 0.0])

    ad, _ = characteristic_poly(-1.0, 0.0)
    roots = np.roots(ad)
    assert np.allclose(sorted(roots.imag), [-1.0, 1.0])


def test_characteristic_poly_invariant_under_basis_change(rng):
    triple = canonical_triple(-2.0, 1.0)
    ref_ad, ref_pi = characteristic_poly(-2.0, 1.0)
    for _ in range(5):
        moved = transform_triple(triple, random_basis_change(rng), random_h_mix(rng))
        form, _, _ = canonicalize(moved)
        ad, pi = characteristic_poly(form.alpha, form.beta)
        assert np.allclose(ad, ref_ad, atol=1e-9)
        assert np.allclose(pi, ref_pi, atol=1e-9)


def test_almost_isomorphic():
    assert almost_isomorphic((4.0, 2.0), (1.0, 1.0)) == pytest.approx(2.0)
    assert almost_isomorphic((0.0, 0.0), (0.0, 0.0)) == 1.0
    assert almost_isomorphic((1.0, 0.0), (-1.0, 0.0)) is None
    assert almost_isomorphic((1.0, 1.0), (1.0, 1.0)) == pytest.approx(1.0)
    assert almost_isomorphic((0.0, 2.0), (0.0, 1.0)) == pytest.approx(2.0)
    assert almost_isomorphic((1.0, 1.0), (0.0, 1.0)) is None
    # inconsistent pair of scales
    assert almost_isomorphic((4.0, 2.0), (1.0, 2.0)) is None


def test_metric_scaling_matches_almost_isomorphism():
    # metric scaling by s maps (alpha, beta) -> (alpha/s, beta/sqrt(s)),
    # i.e. the two triples are almost isomorphic with C = 1/sqrt(s)
    s = 4.0
    c = almost_isomorphic((1.0, 1.0), (1.0 / s, 1.0 / np.sqrt(s)))
    assert c == pytest.approx(np.sqrt(s))


def test_triple_json_roundtrip():
    triple = preset_triple("delta-zero(1)")
    again = triple_from_json(triple_to_json(triple))
    assert np.array_equal(again.algebra.c, triple.algebra.c)
    assert np.array_equal(again.h_basis, triple.h_basis)
    assert np.array_equal(again.metric, triple.metric)
