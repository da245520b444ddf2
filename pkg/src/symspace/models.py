"""Concrete symmetric spaces with closed-form symmetries.

Points are stored in ambient coordinates (the coordinates the symmetry is
written in); every space also has a chart ``R^dim`` whose differential at
the base point is the identity on the tangent space, so chart vectors at
``o`` and tangent vectors in ``m`` coincide there. All point maps accept
arrays with arbitrary leading axes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import InvalidInputError, UnsupportedError
from .lts import LtsStructure, direct_sum

POINT_TOL = 1e-9


def _unit(X):
    """Norm and unit vector along the last axis; the unit vector is 0 where the norm is."""
    r = np.linalg.norm(X, axis=-1, keepdims=True)
    safe = np.where(r > 0, r, 1.0)
    return r[..., 0], np.where(r > 0, X / safe, 0.0)


def _sinhc(t):
    return np.where(np.abs(t) < 1e-8, 1.0 + t * t / 6, np.sinh(t) / np.where(t == 0, 1.0, t))


def _sinc(t):
    return np.where(np.abs(t) < 1e-8, 1.0 - t * t / 6, np.sin(t) / np.where(t == 0, 1.0, t))


class ModelSpace:
    """Common interface; subclasses fill in the geometry.

    Subclasses define ``name``, ``dim``, ``ambient_dim``, ``base_point`` and
    the raw maps ``_symmetry``, ``_exp``, ``_chart``, ``_from_chart`` and
    ``_off_manifold``. Spaces with a matrix group realization also provide
    ``m_basis``, ``group_exp``, ``act``, ``tangent_action`` and
    ``group_involution``.
    """

    name = "abstract"
    has_log = False
    has_group = False
    # random samples stay where double precision keeps identities near 1e-10
    sample_scale = 1.0

    @property
    def point_dim(self) -> int:
        return self.dim

    # -- validation -------------------------------------------------------
    def validate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.ambient_dim,):
            raise InvalidInputError(
                f"{self.name}: points need {self.ambient_dim} coordinates, got shape {x.shape}"
            )
        if not np.all(np.isfinite(x)):
            raise InvalidInputError(f"{self.name}: non-finite point coordinates")
        off = self._off_manifold(x)
        if np.any(off > POINT_TOL):
            raise InvalidInputError(f"{self.name}: point off the manifold by {np.max(off):.3g}")
        return x

    def _tangent(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1:] != (self.dim,):
            raise InvalidInputError(f"{self.name}: tangent vectors need {self.dim} entries")
        if not np.all(np.isfinite(X)):
            raise InvalidInputError(f"{self.name}: non-finite tangent vector")
        return X

    def _off_manifold(self, x):
        return np.zeros(x.shape[:-1])

    # -- public maps ------------------------------------------------------
    def symmetry(self, x, y) -> np.ndarray:
        """``s_x(y)``."""
        return self._symmetry(self.validate(x), self.validate(y))

    def exp_base(self, X) -> np.ndarray:
        return self._exp(self._tangent(X))

    def log_base(self, y) -> np.ndarray:
        if not self.has_log:
            raise UnsupportedError(f"{self.name} is not exponential; no global logarithm")
        return self._log(self.validate(y))

    def perp_product(self, x, y) -> np.ndarray:
        """``x (perp) y = s_x s_o y``."""
        x, y = self.validate(x), self.validate(y)
        o = np.broadcast_to(self.base_point, y.shape)
        return self._symmetry(x, self._symmetry(o, y))

    def chart(self, x) -> np.ndarray:
        return self._chart(self.validate(x))

    def from_chart(self, c) -> np.ndarray:
        """Inverse chart; NaN rows where ``c`` lies outside the chart domain."""
        c = np.asarray(c, dtype=float)
        if c.shape[-1:] != (self.dim,):
            raise InvalidInputError(f"{self.name}: chart points need {self.dim} entries")
        return self._from_chart(c)

    def lts(self) -> LtsStructure:
        raise NotImplementedError

    def random_points(self, rng, count, scale=1.0) -> np.ndarray:
        return self._exp(rng.uniform(-scale, scale, size=(count, self.dim)))

    # -- group realization ------------------------------------------------
    def _need_group(self):
        if not self.has_group:
            raise UnsupportedError(f"{self.name} has no matrix group realization")

    def group_exp(self, Z) -> np.ndarray:
        self._need_group()
        return expm(np.asarray(Z, dtype=float))

    def transvection(self, X) -> np.ndarray:
        """Group element ``exp X`` for ``X`` in ``m`` (given in basis coordinates)."""
        self._need_group()
        return self.group_exp(np.tensordot(self._tangent(X), self.m_basis, axes=1))

    def in_group(self, g, tol=1e-9) -> bool:
        return False

    def quadratic_representation(self, g) -> np.ndarray:
        """``g sigma(g)^{-1}``."""
        self._need_group()
        g = np.asarray(g, dtype=float)
        if g.shape != self.m_basis.shape[1:]:
            raise InvalidInputError("group element has the wrong shape")
        if abs(np.linalg.det(g)) <= 1e-12 or not np.all(np.isfinite(g)):
            raise InvalidInputError("group element is singular")
        return g @ np.linalg.inv(self.group_involution(g))

    def group_involution(self, g):
        raise NotImplementedError

    def tangent_action(self, Z, x) -> np.ndarray:
        """Chart velocity of ``t -> exp(tZ) x`` at ``t = 0``."""
        raise NotImplementedError


# -- Euclidean space --------------------------------------------------------


@dataclass(frozen=True)
class Euclidean(ModelSpace):
    n: int = 2
    has_log = True
    has_group = True

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError("dimension must be positive")

    @property
    def name(self):
        return f"euclidean:{self.n}"

    @property
    def dim(self):
        return self.n

    @property
    def ambient_dim(self):
        return self.n

    @property
    def base_point(self):
        return np.zeros(self.n)

    def _symmetry(self, x, y):
        return 2 * x - y

    def _exp(self, X):
        return X.copy()

    def _log(self, y):
        return y.copy()

    def _chart(self, x):
        return x.copy()

    def _from_chart(self, c):
        return c.copy()

    def lts(self):
        return LtsStructure.zero(self.n)

    @property
    def m_basis(self):
        n = self.n
        B = np.zeros((n, n + 1, n + 1))
        for i in range(n):
            B[i, i, n] = 1.0
        return B

    def group_exp(self, Z):
        # translations square to zero, so the series stops after the linear term
        return np.eye(self.n + 1) + np.asarray(Z, dtype=float)

    def act(self, g, x):
        n = self.n
        return x @ g[:n, :n].T + g[:n, n]

    def tangent_action(self, Z, x):
        n = self.n
        return Z[:n, :n] @ x + Z[:n, n]

    def group_involution(self, g):
        D = np.diag(np.r_[-np.ones(self.n), 1.0])
        return D @ g @ D

    def in_group(self, g, tol=1e-9):
        n = self.n
        g = np.asarray(g, dtype=float)
        if g.shape != (n + 1, n + 1):
            return False
        return bool(
            np.allclose(g[:n, :n], np.eye(n), atol=tol)
            and np.allclose(g[n], np.eye(n + 1)[n], atol=tol)
        )


# -- sphere -----------------------------------------------------------------


@dataclass(frozen=True)
class Sphere(ModelSpace):
    """Unit sphere in ``R^(n+1)`` with base point ``e_(n+1)``; chart is a scaled stereographic projection."""

    n: int = 2
    has_group = True

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError("dimension must be positive")

    @property
    def name(self):
        return f"sphere:{self.n}"

    @property
    def dim(self):
        return self.n

    @property
    def ambient_dim(self):
        return self.n + 1

    @property
    def base_point(self):
        return np.eye(self.n + 1)[self.n]

    def _off_manifold(self, x):
        return np.abs(np.sum(x * x, axis=-1) - 1.0)

    def _symmetry(self, x, y):
        return 2 * np.sum(x * y, axis=-1, keepdims=True) * x - y

    def _exp(self, X):
        r, u = _unit(X)
        out = np.zeros(X.shape[:-1] + (self.n + 1,))
        out[..., : self.n] = np.sin(r)[..., None] * u
        out[..., self.n] = np.cos(r)
        return out

    def _chart(self, x):
        # the antipode of the base point has no chart image
        den = 1 + x[..., self.n : self.n + 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(den > 0, 2 * x[..., : self.n] / den, np.nan)

    def _from_chart(self, c):
        u = c / 2
        q = np.sum(u * u, axis=-1, keepdims=True)
        return np.concatenate([2 * u / (1 + q), (1 - q) / (1 + q)], axis=-1)

    def lts(self):
        I = np.eye(self.n)
        # [u, v, w] = <u, w> v - <v, w> u
        T = np.einsum("ik,jl->ijkl", I, I) - np.einsum("jk,il->ijkl", I, I)
        return LtsStructure(T)

    @property
    def m_basis(self):
        n = self.n
        o = self.base_point
        E = np.eye(n + 1)
        return np.array([np.outer(E[i], o) - np.outer(o, E[i]) for i in range(n)])

    def act(self, g, x):
        return x @ g.T

    def tangent_action(self, Z, x):
        n = self.n
        v = Z @ x
        d = 1 + x[n]
        return 2 * v[:n] / d - 2 * x[:n] * v[n] / d**2

    def group_involution(self, g):
        D = np.diag(np.r_[-np.ones(self.n), 1.0])
        return D @ g @ D

    def in_group(self, g, tol=1e-9):
        g = np.asarray(g, dtype=float)
        if g.shape != (self.n + 1,) * 2:
            return False
        return bool(np.allclose(g.T @ g, np.eye(self.n + 1), atol=tol) and np.linalg.det(g) > 0)

    def random_points(self, rng, count, scale=1.0):
        x = rng.standard_normal((count, self.n + 1))
        return x / np.linalg.norm(x, axis=-1, keepdims=True)


# -- hyperbolic space -------------------------------------------------------


def lorentz(x, y):
    """``x_n y_n - sum_{i<n} x_i y_i`` along the last axis."""
    return x[..., -1] * y[..., -1] - np.sum(x[..., :-1] * y[..., :-1], axis=-1)


@dataclass(frozen=True)
class Hyperbolic(ModelSpace):
    """Upper sheet of ``x_(n+1)^2 - |x'|^2 = 1``; chart is the projection to ``x'``."""

    n: int = 2
    sample_scale = 0.75
    has_log = True
    has_group = True

    @property
    def name(self):
        return "hyperbolic" if self.n == 2 else f"hyperbolic:{self.n}"

    @property
    def dim(self):
        return self.n

    @property
    def ambient_dim(self):
        return self.n + 1

    @property
    def base_point(self):
        return np.eye(self.n + 1)[self.n]

    def _off_manifold(self, x):
        scale = np.maximum(1.0, x[..., -1] ** 2)
        bad_sheet = np.where(x[..., -1] > 0, 0.0, np.inf)
        return np.abs(lorentz(x, x) - 1.0) / scale + bad_sheet

    def _symmetry(self, x, y):
        return 2 * lorentz(x, y)[..., None] * x - y

    def _exp(self, X):
        r, u = _unit(X)
        out = np.zeros(X.shape[:-1] + (self.n + 1,))
        out[..., : self.n] = np.sinh(r)[..., None] * u
        out[..., self.n] = np.cosh(r)
        return out

    def _log(self, y):
        r, u = _unit(y[..., : self.n])
        return np.arcsinh(r)[..., None] * u

    def _chart(self, x):
        return x[..., : self.n].copy()

    def _from_chart(self, c):
        last = np.sqrt(1 + np.sum(c * c, axis=-1, keepdims=True))
        return np.concatenate([c, last], axis=-1)

    def lts(self):
        I = np.eye(self.n)
        # [u, v, w] = <v, w> u - <u, w> v
        T = np.einsum("jk,il->ijkl", I, I) - np.einsum("ik,jl->ijkl", I, I)
        return LtsStructure(T)

    @property
    def m_basis(self):
        n = self.n
        o = self.base_point
        E = np.eye(n + 1)
        return np.array([np.outer(E[i], o) + np.outer(o, E[i]) for i in range(n)])

    def act(self, g, x):
        return x @ g.T

    def tangent_action(self, Z, x):
        return (Z @ x)[: self.n]

    def group_involution(self, g):
        D = np.diag(np.r_[-np.ones(self.n), 1.0])
        return D @ g @ D

    def in_group(self, g, tol=1e-9):
        g = np.asarray(g, dtype=float)
        if g.shape != (self.n + 1,) * 2:
            return False
        J = np.diag(np.r_[-np.ones(self.n), 1.0])
        scale = max(1.0, np.abs(g).max() ** 2)
        return bool(
            np.abs(g.T @ J @ g - J).max() <= tol * scale
            and np.linalg.det(g) > 0
            and g[self.n, self.n] > 0
        )


# -- the two solvable planes ------------------------------------------------


_W = np.array([1.0, -1.0])  # translation direction in m
_U = np.array([1.0, 1.0])  # translation direction in h


@dataclass(frozen=True)
class SolvablePlane(ModelSpace):
    """The plane with ``s_(a,b)(a',b') = (2a - a', 2 f(a - a') b - b')``.

    ``f = cosh`` gives the exponential space (boosts acting on ``R^2``),
    ``f = cos`` the non-exponential one (rotations, universal cover in ``a``).
    Realized in 4x4 matrices ``[[R(a), 0, v], [0, 1, a], [0, 0, 1]]`` where
    ``R(a)`` is the boost or rotation; the point ``(a, b)`` is the coset of
    ``(a, R(a) b w)`` with ``w = (1, -1)``.
    """

    kind: str = "cosh"
    has_group = True
    sample_scale = 3.0

    def __post_init__(self):
        if self.kind not in ("cosh", "cos"):
            raise InvalidInputError("kind must be 'cosh' or 'cos'")

    @property
    def name(self):
        return "ex5" if self.kind == "cosh" else "ex6"

    @property
    def has_log(self):
        return self.kind == "cosh"

    dim = 2
    ambient_dim = 2

    @property
    def base_point(self):
        return np.zeros(2)

    def _f(self, t):
        return np.cosh(t) if self.kind == "cosh" else np.cos(t)

    def _symmetry(self, x, y):
        a, b = x[..., 0], x[..., 1]
        a2, b2 = y[..., 0], y[..., 1]
        return np.stack([2 * a - a2, 2 * self._f(a - a2) * b - b2], axis=-1)

    def _exp(self, X):
        alpha, beta = X[..., 0], X[..., 1]
        ratio = _sinhc(alpha) if self.kind == "cosh" else _sinc(alpha)
        return np.stack([alpha, beta * ratio], axis=-1)

    def _log(self, y):
        a, b = y[..., 0], y[..., 1]
        return np.stack([a, b / _sinhc(a)], axis=-1)

    def _chart(self, x):
        return x.copy()

    def _from_chart(self, c):
        return c.copy()

    def lts(self):
        T = np.zeros((2,) * 4)
        sign = 1.0 if self.kind == "cosh" else -1.0
        T[1, 0, 0, 1] = sign  # [e2, e1, e1] = +-e2
        T[0, 1, 0, 1] = -sign
        return LtsStructure(T)

    # realization
    @property
    def _gen(self):
        if self.kind == "cosh":
            return np.diag([1.0, -1.0])
        return np.array([[0.0, -1.0], [1.0, 0.0]])

    def _rot(self, a):
        if self.kind == "cosh":
            return np.diag([np.exp(a), np.exp(-a)])
        c, s = np.cos(a), np.sin(a)
        return np.array([[c, -s], [s, c]])

    def algebra_element(self, zeta, t):
        Z = np.zeros((4, 4))
        Z[:2, :2] = zeta * self._gen
        Z[2, 3] = zeta
        Z[:2, 3] = t
        return Z

    def group_element(self, a, v):
        g = np.eye(4)
        g[:2, :2] = self._rot(a)
        g[:2, 3] = v
        g[2, 3] = a
        return g

    @property
    def m_basis(self):
        return np.array([self.algebra_element(1.0, np.zeros(2)), self.algebra_element(0.0, _W)])

    @property
    def h_basis(self):
        return np.array([self.algebra_element(0.0, _U)])

    def _wcoord_back(self, a, v):
        """w-coordinate of ``R(-a) v`` in ``R^2 = R w + R u`` (vectorized over ``a``)."""
        if self.kind == "cosh":
            return 0.5 * (np.exp(-a) * v[0] - np.exp(a) * v[1])
        c, s = np.cos(a), np.sin(a)
        return 0.5 * ((c + s) * v[0] + (s - c) * v[1])

    def act(self, g, x):
        a = g[2, 3] + x[..., 0]
        return np.stack([a, self._wcoord_back(a, g[:2, 3]) + x[..., 1]], axis=-1)

    def tangent_action(self, Z, x):
        return np.array([Z[2, 3], self._wcoord_back(x[0], Z[:2, 3])])

    def group_involution(self, g):
        S = np.zeros((4, 4))
        S[0, 1] = S[1, 0] = 1.0
        S[2, 2] = -1.0
        S[3, 3] = 1.0
        return S @ g @ S

    def in_group(self, g, tol=1e-9):
        g = np.asarray(g, dtype=float)
        if g.shape != (4, 4) or not np.all(np.isfinite(g)):
            return False
        ref = self.group_element(g[2, 3], g[:2, 3])
        return bool(np.abs(g - ref).max() <= tol * max(1.0, np.abs(g).max()))

    def random_points(self, rng, count, scale=1.0):
        return rng.uniform(-scale, scale, size=(count, 2))


# -- a Lie group as a symmetric space ---------------------------------------


_SL2_BASIS = np.array(
    [[[1.0, 0.0], [0.0, -1.0]], [[0.0, 1.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
)
# [H, E] = 2E, [H, F] = -2F, [E, F] = H
_SL2_BRACKET = np.zeros((3, 3, 3))
_SL2_BRACKET[0, 1, 1], _SL2_BRACKET[1, 0, 1] = 2.0, -2.0
_SL2_BRACKET[0, 2, 2], _SL2_BRACKET[2, 0, 2] = -2.0, 2.0
_SL2_BRACKET[1, 2, 0], _SL2_BRACKET[2, 1, 0] = 1.0, -1.0


@dataclass(frozen=True)
class SL2Group(ModelSpace):
    """``SL(2,R)`` with ``s_g l = g l^{-1} g``, acted on by ``G x G``.

    The tangent vector ``X`` corresponds to ``(X, -X)`` in the Lie algebra of
    ``G x G`` (4x4 block diagonal), so ``[X, Y, Z] = [[X, Y], Z]`` and
    ``Exp_o X = exp(2X)``. Points are flattened 2x2 matrices; the chart is
    ``(l11 - 1, l12, l21) / 2``, valid where ``l11`` is not 0.
    """

    name = "group:sl2"
    sample_scale = 0.5
    dim = 3
    ambient_dim = 4
    has_group = True

    @property
    def base_point(self):
        return np.eye(2).ravel()

    @staticmethod
    def _mat(x):
        return x.reshape(x.shape[:-1] + (2, 2))

    def _off_manifold(self, x):
        m = self._mat(x)
        det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
        return np.abs(det - 1.0) / np.maximum(1.0, np.sum(x * x, axis=-1))

    def _symmetry(self, x, y):
        X, Y = self._mat(x), self._mat(y)
        Yinv = np.stack(
            [np.stack([Y[..., 1, 1], -Y[..., 0, 1]], -1), np.stack([-Y[..., 1, 0], Y[..., 0, 0]], -1)],
            -2,
        )
        Yinv = Yinv / (Y[..., 0, 0] * Y[..., 1, 1] - Y[..., 0, 1] * Y[..., 1, 0])[..., None, None]
        out = X @ Yinv @ X
        return out.reshape(out.shape[:-2] + (4,))

    def _exp(self, X):
        M = np.tensordot(X, _SL2_BASIS, axes=1)
        out = expm(2 * M)
        return out.reshape(out.shape[:-2] + (4,))

    def _chart(self, x):
        return np.stack([x[..., 0] - 1.0, x[..., 1], x[..., 2]], axis=-1) / 2

    def _from_chart(self, c):
        l11 = 1 + 2 * c[..., 0]
        l12, l21 = 2 * c[..., 1], 2 * c[..., 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            l22 = np.where(np.abs(l11) > 1e-8, (1 + l12 * l21) / l11, np.nan)
        return np.stack([l11, l12, l21, l22], axis=-1)

    def lts(self):
        C = _SL2_BRACKET
        return LtsStructure(np.einsum("ijd,dkl->ijkl", C, C))

    @property
    def m_basis(self):
        out = np.zeros((3, 4, 4))
        out[:, :2, :2] = _SL2_BASIS
        out[:, 2:, 2:] = -_SL2_BASIS
        return out

    def act(self, g, x):
        L = self._mat(x)
        out = g[:2, :2] @ L @ np.linalg.inv(g[2:, 2:])
        return out.reshape(out.shape[:-2] + (4,))

    def tangent_action(self, Z, x):
        L = self._mat(x)
        dL = Z[:2, :2] @ L - L @ Z[2:, 2:]
        return np.array([dL[0, 0], dL[0, 1], dL[1, 0]]) / 2

    def group_involution(self, g):
        out = np.zeros_like(g)
        out[:2, :2], out[2:, 2:] = g[2:, 2:], g[:2, :2]
        return out

    def in_group(self, g, tol=1e-9):
        g = np.asarray(g, dtype=float)
        if g.shape != (4, 4):
            return False
        return bool(
            np.abs(g[:2, 2:]).max() <= tol
            and np.abs(g[2:, :2]).max() <= tol
            and abs(np.linalg.det(g[:2, :2]) - 1) <= tol
            and abs(np.linalg.det(g[2:, 2:]) - 1) <= tol
        )


# -- products ---------------------------------------------------------------


@dataclass(frozen=True)
class ProductSpace(ModelSpace):
    first: ModelSpace
    second: ModelSpace

    @property
    def name(self):
        return f"{self.first.name}*{self.second.name}"

    @property
    def dim(self):
        return self.first.dim + self.second.dim

    @property
    def ambient_dim(self):
        return self.first.ambient_dim + self.second.ambient_dim

    @property
    def sample_scale(self):
        return min(self.first.sample_scale, self.second.sample_scale)

    @property
    def has_log(self):
        return self.first.has_log and self.second.has_log

    @property
    def has_group(self):
        return self.first.has_group and self.second.has_group

    @property
    def base_point(self):
        return np.concatenate([self.first.base_point, self.second.base_point])

    def _split(self, x, first_len):
        return x[..., :first_len], x[..., first_len:]

    def _pts(self, x):
        return self._split(x, self.first.ambient_dim)

    def _vec(self, X):
        return self._split(X, self.first.dim)

    def _off_manifold(self, x):
        p, q = self._pts(x)
        return np.maximum(self.first._off_manifold(p), self.second._off_manifold(q))

    def _symmetry(self, x, y):
        (x1, x2), (y1, y2) = self._pts(x), self._pts(y)
        return np.concatenate([self.first._symmetry(x1, y1), self.second._symmetry(x2, y2)], -1)

    def _exp(self, X):
        X1, X2 = self._vec(X)
        return np.concatenate([self.first._exp(X1), self.second._exp(X2)], -1)

    def _log(self, y):
        y1, y2 = self._pts(y)
        return np.concatenate([self.first._log(y1), self.second._log(y2)], -1)

    def _chart(self, x):
        x1, x2 = self._pts(x)
        return np.concatenate([self.first._chart(x1), self.second._chart(x2)], -1)

    def _from_chart(self, c):
        c1, c2 = self._vec(c)
        return np.concatenate([self.first._from_chart(c1), self.second._from_chart(c2)], -1)

    def lts(self):
        return direct_sum(self.first.lts(), self.second.lts())

    def random_points(self, rng, count, scale=1.0):
        return np.concatenate(
            [self.first.random_points(rng, count, scale), self.second.random_points(rng, count, scale)],
            -1,
        )

    # realization: block-diagonal matrices
    @property
    def _sizes(self):
        return self.first.m_basis.shape[-1], self.second.m_basis.shape[-1]

    @property
    def m_basis(self):
        k1, k2 = self._sizes
        B1, B2 = self.first.m_basis, self.second.m_basis
        out = np.zeros((len(B1) + len(B2), k1 + k2, k1 + k2))
        out[: len(B1), :k1, :k1] = B1
        out[len(B1) :, k1:, k1:] = B2
        return out

    def _blocks(self, g):
        k1, _ = self._sizes
        return g[:k1, :k1], g[k1:, k1:]

    def act(self, g, x):
        g1, g2 = self._blocks(g)
        x1, x2 = self._pts(x)
        return np.concatenate([self.first.act(g1, x1), self.second.act(g2, x2)], -1)

    def tangent_action(self, Z, x):
        Z1, Z2 = self._blocks(Z)
        x1, x2 = self._pts(x)
        return np.concatenate([self.first.tangent_action(Z1, x1), self.second.tangent_action(Z2, x2)])

    def group_involution(self, g):
        g1, g2 = self._blocks(g)
        k1, k2 = self._sizes
        out = np.zeros((k1 + k2,) * 2)
        out[:k1, :k1] = self.first.group_involution(g1)
        out[k1:, k1:] = self.second.group_involution(g2)
        return out

    def in_group(self, g, tol=1e-9):
        g = np.asarray(g, dtype=float)
        k1, k2 = self._sizes
        if g.shape != (k1 + k2,) * 2:
            return False
        off = max(np.abs(g[:k1, k1:]).max(), np.abs(g[k1:, :k1]).max())
        g1, g2 = self._blocks(g)
        return bool(off <= tol and self.first.in_group(g1, tol) and self.second.in_group(g2, tol))


# -- selectors and the Loos check -------------------------------------------


def space_from_selector(selector: str) -> ModelSpace:
    """Parse ``euclidean:<n>``, ``sphere:<n>``, ``hyperbolic``, ``ex5``, ``ex6``, ``group:sl2``."""
    s = selector.strip().lower()
    if "*" in s:
        left, right = s.split("*", 1)
        return ProductSpace(space_from_selector(left), space_from_selector(right))
    if s in ("ex5", "ex6"):
        return SolvablePlane("cosh" if s == "ex5" else "cos")
    if s == "group:sl2":
        return SL2Group()
    head, _, arg = s.partition(":")
    try:
        if head == "euclidean":
            return Euclidean(int(arg) if arg else 2)
        if head == "sphere":
            return Sphere(int(arg) if arg else 2)
        if head == "hyperbolic":
            return Hyperbolic(int(arg) if arg else 2)
    except ValueError as exc:
        raise InvalidInputError(f"bad dimension in space selector {selector!r}") from exc
    raise InvalidInputError(f"unknown space selector {selector!r}")


MODEL_SELECTORS = ("euclidean:2", "sphere:2", "hyperbolic", "ex5", "ex6", "group:sl2")


@dataclass(frozen=True)
class LoosReport:
    residuals: dict
    isolation_ratio: float
    tol: float
    samples: int

    @property
    def passed(self) -> dict:
        out = {k: v <= self.tol for k, v in self.residuals.items()}
        out["isolation"] = self.isolation_ratio >= 0.1
        return out

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def _relative(lhs, rhs):
    err = np.linalg.norm(lhs - rhs, axis=-1)
    return float(np.max(err / np.maximum(1.0, np.linalg.norm(lhs, axis=-1))))


def _probe_offsets(dim, radius, step, rng, cap=5000):
    k = int(round(radius / step))
    axes = np.arange(-k, k + 1) * step
    if (2 * k + 1) ** dim <= 4 * cap:
        grid = np.stack(np.meshgrid(*([axes] * dim), indexing="ij"), -1).reshape(-1, dim)
    else:
        grid = rng.choice(axes, size=(4 * cap, dim))
    r = np.linalg.norm(grid, axis=1)
    grid = grid[(r > 0) & (r <= radius + 1e-12)]
    if len(grid) > cap:
        grid = grid[rng.choice(len(grid), cap, replace=False)]
    return grid


def loos_axiom_check(
    space: ModelSpace,
    n_samples: int = 100,
    seed: int = 0,
    tol: float = 1e-9,
    scale: float | None = None,
    probe_points: int = 5,
    radius: float = 0.1,
    step: float = 0.01,
) -> LoosReport:
    """Involution, fixed point, distributivity and isolation on random samples.

    Residuals are relative: ``|lhs - rhs| / max(1, |lhs|)`` in ambient
    coordinates. Isolation probes a chart grid around a few sample points
    and reports the smallest ``|s_x y - y| / |y - x|`` (about 2 near a
    genuine isolated fixed point).
    """
    if n_samples < 1:
        raise InvalidInputError("n_samples must be at least 1")
    rng = np.random.default_rng(seed)
    scale = space.sample_scale if scale is None else scale
    x = space.random_points(rng, n_samples, scale)
    y = space.random_points(rng, n_samples, scale)
    z = space.random_points(rng, n_samples, scale)
    s = space._symmetry
    res = {
        "involution": _relative(s(x, s(x, y)), y),
        "fixed_point": _relative(s(x, x), x),
        "distributivity": _relative(s(x, s(y, z)), s(s(x, y), s(x, z))),
    }
    offsets = _probe_offsets(space.dim, radius, step, rng)
    ratio = np.inf
    for p in x[: max(1, probe_points)]:
        c = space._chart(p)
        q = space._from_chart(c + offsets)
        moved = space._chart(s(np.broadcast_to(p, q.shape), q)) - (c + offsets)
        r = np.linalg.norm(moved, axis=-1) / np.linalg.norm(offsets, axis=-1)
        r = r[np.isfinite(r)]
        if r.size:
            ratio = min(ratio, float(r.min()))
    return LoosReport(res, ratio, tol, n_samples)
