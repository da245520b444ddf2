"""Midpoints, double polygons and transvection placement in model spaces."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import AmbiguityError, InvalidInputError
from .models import Euclidean, Hyperbolic, ModelSpace, ProductSpace
from .newton import UNIQUE, SolveResult, newton_solve, start_grid

DEFAULT_TOL = 1e-9
DEDUP_RADIUS = 1e-6


@dataclass(frozen=True, eq=False)
class Triangle:
    space: ModelSpace
    points: np.ndarray  # (3, ambient_dim)

    def __post_init__(self):
        pts = self.space.validate(self.points)
        if pts.shape != (3, self.space.ambient_dim):
            raise InvalidInputError("a triangle needs exactly three points")
        object.__setattr__(self, "points", pts)

    def __iter__(self):
        return iter(self.points)


def _solver_kwargs(tol, starts, seed, max_iter):
    return dict(tol=tol, starts=starts, seed=seed, max_iter=max_iter)


def _chart_residual(space, a, b):
    return float(np.linalg.norm(space._chart(a) - space._chart(b)))


def exp_at(space: ModelSpace, x, X):
    """``Exp_x(X)`` for ``X`` in ``m``, moved to ``x`` by the transvection through ``x``."""
    g = space.transvection(space.log_base(x))
    return space.act(g, space.exp_base(X))


def log_at(space: ModelSpace, x, y):
    """``Exp_x^{-1}(y)`` expressed in ``m`` via the transvection through ``x``."""
    g = space.transvection(space.log_base(x))
    return space.log_base(space.act(np.linalg.inv(g), space.validate(y)))


def midpoint(space: ModelSpace, x, y, tol=DEFAULT_TOL, starts=None, seed=0, max_iter=100,
             dedup_radius=DEDUP_RADIUS) -> SolveResult:
    """All ``z`` with ``s_z x = y`` that the solver can find.

    Exponential spaces use ``Exp_x(Log_x(y) / 2)`` and report a unique
    answer; other spaces run a multistart Newton solve in the chart.
    """
    x, y = space.validate(x), space.validate(y)
    if space.has_log and space.has_group:
        z = exp_at(space, x, log_at(space, x, y) / 2)
        res = _chart_residual(space, space._symmetry(z, x), y)
        return SolveResult(z[None, :], np.array([res]), UNIQUE, 1)
    cy = space._chart(y)

    def F(c):
        z = space._from_chart(c)
        return space._chart(space._symmetry(z, np.broadcast_to(x, z.shape))) - cy

    rng = np.random.default_rng(seed)
    grid = start_grid([space._chart(x), cy], starts, rng)
    out = newton_solve(F, grid, tol, max_iter, dedup_radius)
    return SolveResult(
        space._from_chart(out.solutions) if out.count else np.zeros((0, space.ambient_dim)),
        out.residuals, out.status, out.starts, out.escaped, isolated=out.isolated,
    )


def square_root(space: ModelSpace, x, **kwargs) -> SolveResult:
    """Midpoints of ``x`` and the base point."""
    return midpoint(space, x, space.base_point, **kwargs)


def _unique_midpoint(space, p, q, label, **kwargs):
    out = midpoint(space, p, q, **kwargs)
    if out.status != UNIQUE:
        raise AmbiguityError(f"midpoint of {label} is not unique (status {out.status})")
    return out.solutions[0]


def gamma_n(space: ModelSpace, points, **kwargs) -> np.ndarray:
    """Edge midpoints ``(g(p_n, p_1), g(p_1, p_2), ..., g(p_(n-1), p_n))``."""
    P = space.validate(points)
    n = len(P)
    out = [_unique_midpoint(space, P[-1], P[0], f"(p{n}, p1)", **kwargs)]
    for k in range(1, n):
        out.append(_unique_midpoint(space, P[k - 1], P[k], f"(p{k}, p{k + 1})", **kwargs))
    return np.array(out)


def gamma3(space: ModelSpace, a, b, c, **kwargs) -> Triangle:
    """``(g(c, a), g(a, b), g(b, c))`` where ``g`` is the unique midpoint."""
    names = {"(p3, p1)": "(c, a)", "(p1, p2)": "(a, b)", "(p2, p3)": "(b, c)"}
    try:
        mids = gamma_n(space, np.array([a, b, c], dtype=float), **kwargs)
    except AmbiguityError as exc:
        msg = str(exc)
        for k, v in names.items():
            msg = msg.replace(k, v)
        raise AmbiguityError(msg) from None
    return Triangle(space, mids)


def delta3_flat(x, y, z):
    """Inverse of the edge-midpoint map in a vector space."""
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    return x + y - z, y + z - x, z + x - y


@dataclass(frozen=True)
class DoubleCriterion:
    exists: bool
    det: float

    @property
    def det_squared(self) -> float:
        return self.det**2


def hyperbolic_double_exists(x, y, z) -> DoubleCriterion:
    """A triangle on the hyperboloid is a midpoint triangle iff ``det[x y z]^2 < 1``."""
    H = Hyperbolic()
    M = np.column_stack([H.validate(p) for p in (x, y, z)])
    det = float(np.linalg.det(M))
    return DoubleCriterion(det * det < 1.0, det)


def _compose(space, mids):
    """The map ``p -> s_(m1) s_(mn) ... s_(m2) p``."""

    def S(p):
        for m in list(mids[1:]) + [mids[0]]:
            p = space._symmetry(np.broadcast_to(m, p.shape), p)
        return p

    return S


def _polygon_from(space, mids, a):
    pts = [a]
    for m in mids[1:]:
        pts.append(space._symmetry(m, pts[-1]))
    return np.array(pts)


def double_ngon_solve(space: ModelSpace, midpoints, tol=DEFAULT_TOL, starts=None, seed=0,
                      max_iter=100, dedup_radius=DEDUP_RADIUS) -> SolveResult:
    """Polygons ``(p_1, ..., p_n)`` whose edge midpoints are the given points.

    With ``m_1 = g(p_n, p_1)`` and ``m_k = g(p_(k-1), p_k)``, ``p_1`` is a
    fixed point of ``s_(m1) s_(mn) ... s_(m2)`` and ``p_k = s_(mk) p_(k-1)``.
    On Euclidean space the composition is a point reflection and the fixed
    point is read off directly; elsewhere it is found by multistart Newton.
    """
    mids = space.validate(midpoints)
    if mids.ndim != 2 or len(mids) < 1:
        raise InvalidInputError("need a list of midpoints")
    n = len(mids)
    if n % 2 == 0:
        raise InvalidInputError(f"double polygons are only defined for odd n (got n = {n})")
    S = _compose(space, mids)
    extra = {}
    if isinstance(space, Hyperbolic) and space.n == 2 and n == 3:
        crit = hyperbolic_double_exists(*mids)
        extra = {"det": crit.det, "det_squared": crit.det_squared}
    if isinstance(space, Euclidean):
        a = S(space.base_point) / 2
        poly = _polygon_from(space, mids, a)
        res = _chart_residual(space, space._symmetry(mids[0], poly[-1]), poly[0])
        return SolveResult(poly[None], np.array([res]), UNIQUE, 1, 0, extra)

    def F(c):
        p = space._from_chart(c)
        return space._chart(S(p)) - c

    rng = np.random.default_rng(seed)
    grid = start_grid(space._chart(mids), starts, rng)
    out = newton_solve(F, grid, tol, max_iter, dedup_radius)
    polys = [_polygon_from(space, mids, space._from_chart(c)) for c in out.solutions]
    polys = np.array(polys) if polys else np.zeros((0, n, space.ambient_dim))
    return SolveResult(polys, out.residuals, out.status, out.starts, out.escaped, extra, out.isolated)


def transvection_placement(space: ModelSpace, g, z, tol=DEFAULT_TOL, starts=None, seed=0,
                           max_iter=100, dedup_radius=DEDUP_RADIUS) -> SolveResult:
    """Points ``x`` with ``g x = s_z x``."""
    g = np.asarray(g, dtype=float)
    if not space.has_group or not space.in_group(g):
        raise InvalidInputError(f"g is not an element of the transvection group of {space.name}")
    z = space.validate(z)
    if isinstance(space, Euclidean):
        x = z - g[: space.n, space.n] / 2
        res = _chart_residual(space, space.act(g, x), space._symmetry(z, x))
        return SolveResult(x[None], np.array([res]), UNIQUE, 1)

    def F(c):
        x = space._from_chart(c)
        return space._chart(space.act(g, x)) - space._chart(space._symmetry(np.broadcast_to(z, x.shape), x))

    rng = np.random.default_rng(seed)
    anchors = np.array([space._chart(z), space._chart(space.act(g, z))])
    grid = start_grid(anchors, starts, rng, dim=space.dim)
    out = newton_solve(F, grid, tol, max_iter, dedup_radius)
    sols = space._from_chart(out.solutions) if out.count else np.zeros((0, space.ambient_dim))
    return SolveResult(sols, out.residuals, out.status, out.starts, out.escaped, isolated=out.isolated)


def product_chart(first: ModelSpace, second: ModelSpace, X, Y) -> np.ndarray:
    """``Exp_o(X/2) (perp) Exp_o(Y)`` in the direct product, ``X`` tangent to the first factor."""
    P = ProductSpace(first, second)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    zX = np.zeros(X.shape[:-1] + (second.dim,))
    zY = np.zeros(Y.shape[:-1] + (first.dim,))
    left = P.exp_base(np.concatenate([X / 2, zX], -1))
    right = P.exp_base(np.concatenate([zY, Y], -1))
    left, right = np.broadcast_arrays(left, right)
    return P.perp_product(left, right)


@dataclass(frozen=True)
class InjectivityReport:
    samples: int
    close_pairs: int
    violations: int

    @property
    def ok(self) -> bool:
        return self.violations == 0


def product_chart_injectivity(first: ModelSpace, second: ModelSpace, samples=10_000, seed=0,
                              scale=2.0, image_radius=1e-9, preimage_radius=1e-6) -> InjectivityReport:
    """Spot check: no two samples more than ``preimage_radius`` apart share an image."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(-scale, scale, (samples, first.dim))
    Y = rng.uniform(-scale, scale, (samples, second.dim))
    P = ProductSpace(first, second)
    img = P._chart(product_chart(first, second, X, Y))
    pairs = cKDTree(img).query_pairs(image_radius, output_type="ndarray")
    pre = np.hstack([X, Y])
    bad = 0
    if len(pairs):
        d = np.linalg.norm(pre[pairs[:, 0]] - pre[pairs[:, 1]], axis=1)
        bad = int(np.sum(d > preimage_radius))
    return InjectivityReport(samples, len(pairs), bad)

