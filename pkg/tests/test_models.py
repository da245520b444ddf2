import math

import numpy as np
import pytest

from oracles import lts_from_3x3
from symspace.errors import InvalidInputError, UnsupportedError
from symspace.geometry import midpoint
from symspace.lts import lts_from_matrices, standard_embedding, verify_lts_axioms
from symspace.models import (
    MODEL_SELECTORS,
    Hyperbolic,
    SolvablePlane,
    loos_axiom_check,
    lorentz,
    space_from_selector,
)
from symspace.spectral import helgason_differential

ALL = MODEL_SELECTORS


class QuadraticPlane(SolvablePlane):
    """The plane with ``1 + t^2`` in place of ``cos t``: not a symmetric space."""

    def _f(self, t):
        return 1 + t**2


# -- symmetries ----------------------------------------------------------------


def test_closed_form_symmetries():
    E = space_from_selector("euclidean:2")
    assert np.array_equal(E.symmetry([1.0, 0.0], [0.0, 0.0]), [2.0, 0.0])
    ex6 = space_from_selector("ex6")
    assert np.allclose(ex6.symmetry([1.0, 0.0], [0.0, 1.0]), [2.0, -1.0])
    S = space_from_selector("sphere:2")
    assert np.allclose(S.symmetry([0, 0, 1.0], [1.0, 0, 0]), [-1.0, 0, 0])


def test_solvable_plane_formulas(rng):
    for kind, f in (("cosh", np.cosh), ("cos", np.cos)):
        P = SolvablePlane(kind)
        for _ in range(5):
            (a, b), (a2, b2) = rng.uniform(-2, 2, (2, 2))
            assert np.allclose(P.symmetry([a, b], [a2, b2]), [2 * a - a2, 2 * f(a - a2) * b - b2])


def test_group_space_symmetry(rng):
    G = space_from_selector("group:sl2")
    x, y = G.random_points(rng, 2, 0.5)
    X, Y = x.reshape(2, 2), y.reshape(2, 2)
    assert np.allclose(G.symmetry(x, y).reshape(2, 2), X @ np.linalg.inv(Y) @ X)


def test_off_manifold_points_rejected():
    H = Hyperbolic()
    with pytest.raises(InvalidInputError):
        H.symmetry([0.0, 0.0, 1.0], [1.0, 0.0, 1.0])
    with pytest.raises(InvalidInputError):
        H.validate([0.0, 0.0, -1.0])
    with pytest.raises(InvalidInputError):
        space_from_selector("sphere:2").validate([1.0, 1.0, 0.0])


def test_selectors():
    assert space_from_selector("euclidean:3").dim == 3
    assert space_from_selector("sphere:4").ambient_dim == 5
    with pytest.raises(InvalidInputError):
        space_from_selector("torus")
    with pytest.raises(InvalidInputError):
        space_from_selector("sphere:x")


# -- exponential and logarithm ---------------------------------------------------


@pytest.mark.parametrize("sel", ALL)
def test_exp_of_zero_is_base_point(sel):
    space = space_from_selector(sel)
    assert np.allclose(space.exp_base(np.zeros(space.dim)), space.base_point)


def test_hyperbolic_exp_along_axis():
    H = Hyperbolic()
    assert np.allclose(H.exp_base([1.0, 0.0]), [math.sinh(1), 0.0, math.cosh(1)])
    # the geodesic through o: s_{Exp(X/2)} s_o o = Exp(X)
    half = H.exp_base([0.5, 0.0])
    assert np.allclose(H.symmetry(half, H.symmetry(H.base_point, H.base_point)), H.exp_base([1.0, 0.0]))


def test_ex6_exp_on_flat_axis():
    ex6 = space_from_selector("ex6")
    for t in (-3.0, 0.7, 5.0):
        assert np.allclose(ex6.exp_base([t, 0.0]), [t, 0.0])
        assert np.allclose(ex6.act(ex6.transvection([t, 0.0]), ex6.base_point), [t, 0.0])


def test_solvable_exp_closed_forms(rng):
    for kind, ratio in (("cosh", lambda a: np.sinh(a) / a), ("cos", lambda a: np.sin(a) / a)):
        P = SolvablePlane(kind)
        for al, be in rng.uniform(-3, 3, (10, 2)):
            via_group = P.act(P.transvection([al, be]), P.base_point)
            assert np.allclose(P.exp_base([al, be]), [al, be * ratio(al)])
            assert np.allclose(via_group, [al, be * ratio(al)])


@pytest.mark.parametrize("sel", ALL)
def test_group_realization_consistency(sel, rng):
    space = space_from_selector(sel)
    o = space.base_point
    ys = space.random_points(rng, 20, space.sample_scale)
    for y in ys:
        X = rng.uniform(-1, 1, space.dim) * space.sample_scale
        lhs = space.symmetry(space.exp_base(X / 2), space.symmetry(o, y))
        rhs = space.act(space.transvection(X), y)
        assert np.abs(lhs - rhs).max() <= 1e-9 * max(1, np.abs(rhs).max())


@pytest.mark.parametrize("sel", ["euclidean:2", "hyperbolic", "ex5"])
def test_log_round_trips(sel, rng):
    space = space_from_selector(sel)
    assert np.allclose(space.log_base(space.base_point), 0)
    X = rng.standard_normal((100, space.dim))
    X *= rng.uniform(0, 5, (100, 1)) / np.linalg.norm(X, axis=1, keepdims=True)
    assert np.abs(space.log_base(space.exp_base(X)) - X).max() <= 1e-9
    pts = space.exp_base(X)
    back = space.exp_base(space.log_base(pts))
    assert np.abs(back - pts).max() <= 1e-9 * np.abs(pts).max()


def test_hyperbolic_log_on_random_points(rng):
    H = Hyperbolic()
    pts = H.random_points(rng, 100, 3.0)
    err = np.abs(H.exp_base(H.log_base(pts)) - pts).max(axis=1) / np.abs(pts).max(axis=1)
    assert err.max() <= 1e-9


@pytest.mark.parametrize("sel", ["sphere:2", "ex6", "group:sl2"])
def test_log_unavailable_on_non_exponential(sel):
    space = space_from_selector(sel)
    with pytest.raises(UnsupportedError):
        space.log_base(space.base_point)


# -- products -------------------------------------------------------------------------


def test_perp_product():
    E = space_from_selector("euclidean:2")
    x, y = np.array([1.0, 2.0]), np.array([-3.0, 0.5])
    assert np.allclose(E.perp_product(x, y), 2 * x + y)


@pytest.mark.parametrize("sel", ALL)
def test_base_point_is_left_unit(sel, rng):
    space = space_from_selector(sel)
    for y in space.random_points(rng, 5, space.sample_scale):
        assert np.allclose(space.perp_product(space.base_point, y), y)


def test_hyperbolic_perp_is_group_action(rng):
    H = Hyperbolic()
    for _ in range(10):
        X = rng.uniform(-1.5, 1.5, 2)
        y = H.random_points(rng, 1, 1.0)[0]
        assert np.allclose(H.perp_product(H.exp_base(X / 2), y), H.act(H.transvection(X), y))


# -- Loos axioms ------------------------------------------------------------------------


def test_euclidean_loos_exact():
    rep = loos_axiom_check(space_from_selector("euclidean:2"), 1000, seed=1)
    assert rep.ok and rep.max_residual <= 1e-15


def test_ex5_loos_wide_box():
    rep = loos_axiom_check(space_from_selector("ex5"), 1000, seed=2, scale=3.0)
    assert rep.ok and rep.max_residual <= 1e-9


@pytest.mark.parametrize("sel", ALL)
def test_loos_distributivity_all_spaces(sel):
    rep = loos_axiom_check(space_from_selector(sel), 500, seed=3)
    assert rep.residuals["distributivity"] <= 1e-9
    assert rep.ok


def test_broken_plane_fails_distributivity():
    rep = loos_axiom_check(QuadraticPlane("cos"), 200, seed=4)
    assert not rep.passed["distributivity"]
    assert rep.passed["involution"] and rep.passed["fixed_point"]


def test_loos_requires_samples():
    with pytest.raises(InvalidInputError):
        loos_axiom_check(space_from_selector("ex5"), 0)


# -- Lie triple systems at the base point --------------------------------------------


@pytest.mark.parametrize("sel", ALL)
def test_base_lts_passes_axioms(sel):
    lts = space_from_selector(sel).lts()
    assert verify_lts_axioms(lts).ok
    assert standard_embedding(lts).jacobi_residual() <= 1e-10


def test_euclidean_lts_is_zero():
    assert np.abs(space_from_selector("euclidean:3").lts().constants).max() == 0


@pytest.mark.parametrize("sel", ALL)
def test_closed_form_lts_matches_realization(sel):
    space = space_from_selector(sel)
    assert np.allclose(lts_from_matrices(space.m_basis).constants, space.lts().constants, atol=1e-13)


def test_solvable_lts_match_three_by_three_realizations():
    assert np.allclose(lts_from_3x3(np.diag([1.0, -1.0]), [[1.0, -1.0]]), SolvablePlane("cosh").lts().constants)
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    assert np.allclose(lts_from_3x3(J, [[1.0, -1.0]]), SolvablePlane("cos").lts().constants)


def test_sl2_lts_is_double_commutator(rng):
    G = space_from_selector("group:sl2")
    T = G.lts().constants
    B = np.array([[[1.0, 0], [0, -1]], [[0, 1.0], [0, 0]], [[0, 0], [1.0, 0]]])
    for _ in range(5):
        x, y, z = rng.standard_normal((3, 3))
        X, Y, Z = (np.tensordot(v, B, axes=1) for v in (x, y, z))
        K = X @ Y - Y @ X
        expected = K @ Z - Z @ K
        got = np.tensordot(np.einsum("i,j,k,ijkl->l", x, y, z, T), B, axes=1)
        assert np.allclose(got, expected)


def test_sphere_and_hyperbolic_lts_have_opposite_signs():
    S = space_from_selector("sphere:2").lts().constants
    H = space_from_selector("hyperbolic").lts().constants
    assert np.array_equal(S, -H)


# -- quadratic representation --------------------------------------------------------------


def test_quadratic_representation_basics(rng):
    ex5 = space_from_selector("ex5")
    assert np.allclose(ex5.quadratic_representation(np.eye(4)), np.eye(4))
    h = ex5.group_exp(0.7 * ex5.h_basis[0])  # fixed by the involution
    assert np.allclose(ex5.quadratic_representation(h), np.eye(4))
    for _ in range(10):
        a, v = rng.uniform(-2, 2), rng.uniform(-2, 2, 2)
        g = ex5.group_element(a, v)
        Q = ex5.quadratic_representation(g)
        assert np.abs(ex5.group_involution(Q) - np.linalg.inv(Q)).max() <= 1e-10 * max(1, np.abs(Q).max())


def test_quadratic_representation_rejects_singular():
    with pytest.raises(InvalidInputError):
        space_from_selector("ex5").quadratic_representation(np.zeros((4, 4)))


# -- differential of the exponential ----------------------------------------------------------


@pytest.mark.parametrize("sel", ["hyperbolic", "ex5"])
def test_exponential_spaces_have_nonsingular_differential(sel, rng):
    space = space_from_selector(sel)
    emb = standard_embedding(space.lts())
    for X in rng.uniform(-3, 3, (50, 2)):
        assert abs(np.linalg.det(helgason_differential(emb, space, X))) >= 1e-6


# -- geodesic subspaces -----------------------------------------------------------------------


def test_geodesic_subspaces_closed_under_midpoints(rng):
    ex5 = space_from_selector("ex5")
    for s, t in rng.uniform(-3, 3, (20, 2)):
        z = midpoint(ex5, [s, 0.0], [t, 0.0]).solutions[0]
        assert abs(z[1]) <= 1e-9 and abs(z[0] - (s + t) / 2) <= 1e-9
    H = Hyperbolic()
    for _ in range(20):
        u = rng.standard_normal(2)
        u /= np.linalg.norm(u)
        s, t = rng.uniform(-2, 2, 2)
        z = midpoint(H, H.exp_base(s * u), H.exp_base(t * u)).solutions[0]
        normal = np.r_[-u[1], u[0], 0.0]
        assert abs(lorentz(z, normal)) <= 1e-9
