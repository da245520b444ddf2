import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm, sinhm

from oracles import companion_roots, faddeev_leverrier, multiset_distance
from symspace.errors import InvalidInputError, RangeError, UnsupportedError
from symspace.lts import LtsStructure, random_solvable_lts, standard_embedding
from symspace.models import space_from_selector
from symspace.spectral import (
    Spectrum,
    eigenvalues,
    helgason_differential,
    local_diffeo_test,
    locally_exponential_sample_test,
    sinhc,
    square_spectrum_check,
    unipotent_inverse,
)


# -- eigenvalues -------------------------------------------------------------


def test_identity_spectrum():
    spec = eigenvalues(np.eye(3))
    assert np.array_equal(spec.values, np.ones(3))
    assert spec.to_json() == [[1.0, 0.0, 3]]


def test_rotation_generator_spectrum():
    spec = eigenvalues([[0.0, -1.0], [1.0, 0.0]])
    assert np.allclose(spec.values, [-1j, 1j])


def test_random_matrix_against_companion_oracle(rng):
    A = rng.standard_normal((5, 5))
    oracle = companion_roots(faddeev_leverrier(A))
    assert multiset_distance(eigenvalues(A).values, oracle) <= 1e-8


def test_spectrum_is_conjugate_closed(rng):
    vals = eigenvalues(rng.standard_normal((7, 7))).values
    assert multiset_distance(vals, vals.conj()) <= 1e-12


def test_non_square_rejected():
    with pytest.raises(InvalidInputError):
        eigenvalues(np.zeros((2, 3)))


def test_multiplicities_sum_to_dim(rng):
    spec = eigenvalues(np.diag([2.0, 2.0, -1.0, 5.0]))
    assert sum(m for _, m in spec.multiplicities()) == spec.dim == 4


def test_clustered_jordan_block():
    J = np.array([[2.0, 1.0], [1e-17, 2.0]]) + np.diag([0.0, 1e-16])
    vals = eigenvalues(np.kron(np.eye(2), J) + np.triu(np.ones((4, 4)), 2) * 1e-3).clustered()
    assert np.abs(vals - 2.0).max() <= 1e-12


def test_clustered_keeps_distinct_values():
    vals = eigenvalues(np.diag([1.0, 1.0 + 1e-3, 5.0])).clustered()
    assert np.allclose(vals, [1.0, 1.001, 5.0], atol=1e-14)


# -- sinh(A)/A -----------------------------------------------------------------


def test_sinhc_zero_is_identity():
    out = sinhc(np.zeros((3, 3)))
    assert np.array_equal(out.matrix, np.eye(3))


def test_sinhc_diagonal():
    out = sinhc(np.diag([1.0, -2.0]))
    assert np.allclose(out.matrix, np.diag([math.sinh(1.0), math.sinh(-2.0) / -2.0]), rtol=1e-14)
    assert out.order <= 20


def test_sinhc_square_zero_nilpotent_is_identity():
    N = np.array([[0.0, 3.0], [0.0, 0.0]])
    assert np.allclose(sinhc(N).matrix, np.eye(2), atol=0)


def test_sinhc_matches_scipy_for_invertible(rng):
    for _ in range(10):
        A = rng.standard_normal((5, 5)) * 3
        ref = np.linalg.solve(A, sinhm(A))
        assert np.allclose(sinhc(A).matrix, ref, rtol=1e-10, atol=1e-10)


def test_sinhc_large_argument_uses_scaling():
    A = np.diag([40.0, -30.0, 0.5])
    out = sinhc(A)
    assert out.scaling > 0 and out.order <= 20
    assert np.allclose(np.diag(out.matrix), np.sinh(np.diag(A)) / np.diag(A), rtol=1e-12)
    assert out.backward_error <= 1e-12


def test_sinhc_overflow_raises():
    with pytest.raises(RangeError):
        sinhc(np.diag([800.0, 1.0]))


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(1, 8))
def test_sinhc_commutes_with_argument(seed, n):
    A = np.random.default_rng(seed).standard_normal((n, n)) * 2
    S = sinhc(A).matrix
    bound = 1e-12 * np.linalg.norm(A) * np.linalg.norm(S)
    assert np.linalg.norm(A @ S - S @ A) <= max(bound, 1e-15)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(1, 6))
def test_sinhc_spectral_mapping(seed, n):
    A = np.random.default_rng(seed).standard_normal((n, n))
    lam = np.linalg.eigvals(A)
    mapped = np.where(np.abs(lam) < 1e-12, 1.0, np.sinh(lam) / np.where(lam == 0, 1, lam))
    assert multiset_distance(np.linalg.eigvals(sinhc(A).matrix), mapped) <= 1e-8


# -- the i*pi*k lattice test ---------------------------------------------------


def _spec(values):
    return Spectrum(np.asarray(values, complex), len(values), float(np.max(np.abs(values))))


def test_lattice_cases():
    assert local_diffeo_test(_spec([0, 0]))
    assert not local_diffeo_test(_spec([1j * np.pi, -1j * np.pi]))
    assert local_diffeo_test(_spec([0.5j * np.pi, -0.5j * np.pi]))
    assert not local_diffeo_test(_spec([0.0, 3j * np.pi]))


# -- squared spectra -------------------------------------------------------------


def test_square_spectrum_at_zero(ex6_lts):
    rep = square_spectrum_check(standard_embedding(ex6_lts), np.zeros(2))
    assert np.allclose(rep.squared, 0) and np.allclose(rep.on_m, 0)


def test_square_spectrum_ex6(ex6_lts):
    emb = standard_embedding(ex6_lts)
    ad_vals = np.linalg.eigvals(emb.ad([1.0, 0.0]))
    assert multiset_distance(ad_vals[np.abs(ad_vals) > 0.5], [1j, -1j]) <= 1e-12
    rep = square_spectrum_check(emb, [1.0, 0.0])
    assert np.any(np.isclose(rep.on_m, -1.0))


@settings(max_examples=32, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), dim=st.integers(2, 4))
def test_square_spectrum_random_solvable(seed, dim):
    rng = np.random.default_rng(seed)
    emb = standard_embedding(random_solvable_lts(rng, dim))
    rep = square_spectrum_check(emb, rng.standard_normal(dim))
    assert rep.ok


@pytest.mark.parametrize("sel", ["sphere:2", "hyperbolic", "ex5", "ex6", "group:sl2", "sphere:3"])
def test_square_spectrum_model_spaces(sel, rng):
    emb = standard_embedding(space_from_selector(sel).lts())
    for _ in range(32):
        assert square_spectrum_check(emb, rng.standard_normal(emb.dim_m)).ok


# -- Helgason's differential ------------------------------------------------------


def _fd_jacobian(space, X, h=1e-4):
    cols = []
    for E in np.eye(space.dim):
        cols.append((space.chart(space.exp_base(X + h * E)) - space.chart(space.exp_base(X - h * E))) / (2 * h))
    return np.column_stack(cols)


@pytest.mark.parametrize("sel", ["hyperbolic", "ex5", "ex6", "sphere:2", "euclidean:3", "group:sl2"])
def test_helgason_identity_at_origin(sel):
    space = space_from_selector(sel)
    emb = standard_embedding(space.lts())
    assert np.allclose(helgason_differential(emb, space, np.zeros(space.dim)), np.eye(space.dim), atol=1e-12)


@pytest.mark.parametrize("sel", ["hyperbolic", "ex5"])
def test_helgason_matches_finite_differences(sel, rng):
    space = space_from_selector(sel)
    emb = standard_embedding(space.lts())
    for X in [np.array([1.0, 0.0]), np.array([0.0, 1.0])] + list(rng.uniform(-2, 2, (5, 2))):
        H = helgason_differential(emb, space, X)
        J = _fd_jacobian(space, X)
        assert np.abs(H - J).max() <= 1e-5 * np.abs(J).max()


def test_helgason_singular_exactly_on_lattice(ex6_lts):
    space = space_from_selector("ex6")
    emb = standard_embedding(ex6_lts)
    X = np.array([np.pi, 0.0])
    assert abs(np.linalg.det(helgason_differential(emb, space, X))) <= 1e-6
    assert not local_diffeo_test(eigenvalues(emb.ad(X)))
    Y = np.array([0.5, 0.0])
    assert abs(np.linalg.det(helgason_differential(emb, space, Y))) >= 1e-3
    assert local_diffeo_test(eigenvalues(emb.ad(Y)))


def test_helgason_needs_group():
    class Bare:
        name = "bare"
        has_group = False

    with pytest.raises(UnsupportedError):
        helgason_differential(standard_embedding(LtsStructure.zero(2)), Bare(), np.zeros(2))


# -- sampled local exponentiality ---------------------------------------------------


def test_sampling_abelian_no_violation():
    assert not locally_exponential_sample_test(LtsStructure.zero(3), 16).violated


def test_sampling_ex6_witness(ex6_lts):
    v = locally_exponential_sample_test(ex6_lts, 16)
    assert v.violated
    assert np.array_equal(v.witness_x, [1.0, 0.0])
    assert v.eigenvalue == pytest.approx(-1.0)


def test_sampling_sphere_witness(sphere_lts):
    v = locally_exponential_sample_test(sphere_lts, 16)
    assert v.violated
    assert v.eigenvalue == pytest.approx(-np.dot(v.witness_x, v.witness_x))
    assert v.residual <= 1e-9


def test_sampling_requires_samples():
    with pytest.raises(InvalidInputError):
        locally_exponential_sample_test(LtsStructure.zero(1), 0)


# -- the nilpotent inverse -------------------------------------------------------------


def test_unipotent_inverse_zero():
    assert np.allclose(unipotent_inverse(np.zeros((3, 3))), 0.5 * np.eye(3))


def test_unipotent_inverse_two_by_two():
    t = 1.7
    N = np.array([[0.0, t], [0.0, 0.0]])
    R = unipotent_inverse(N)
    assert np.allclose(R, 0.5 * (np.eye(2) - (t / 2) * np.array([[0.0, 1.0], [0.0, 0.0]])))
    assert np.allclose(R, np.linalg.inv(np.eye(2) + expm(N)), atol=1e-15)


def test_unipotent_inverse_random_nilpotent(rng):
    for _ in range(10):
        N = np.triu(rng.standard_normal((4, 4)), 1)
        Q = rng.standard_normal((4, 4)) + 3 * np.eye(4)
        N = Q @ N @ np.linalg.inv(Q)
        R = unipotent_inverse(N)
        A = np.eye(4) + expm(N)
        assert np.abs(A @ R - np.eye(4)).max() <= 1e-12 * max(1, np.abs(A).max() * np.abs(R).max())


def test_unipotent_inverse_rejects_non_nilpotent():
    with pytest.raises(UnsupportedError):
        unipotent_inverse(np.diag([1.0, 0.0]))
