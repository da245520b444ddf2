"""Batched multistart Newton iteration for small square systems."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

UNIQUE = "unique"
MULTIPLE = "multiple"
NONE_FOUND = "none-found"
DIVERGED = "diverged"
SINGULAR_RATIO = 1e-6


@dataclass(frozen=True, eq=False)
class SolveResult:
    """Solutions sorted lexicographically, with residuals and a status verdict."""

    solutions: np.ndarray
    residuals: np.ndarray
    status: str
    starts: int
    escaped: int = 0
    extra: dict = field(default_factory=dict)
    isolated: bool = True  # False when some solution sits on a continuum (singular Jacobian)

    @property
    def count(self) -> int:
        return len(self.solutions)

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "solutions": np.asarray(self.solutions).tolist(),
            "residuals": [float(r) for r in self.residuals],
            "starts": self.starts,
            "escaped": self.escaped,
            "isolated": self.isolated,
        }
        out.update(self.extra)
        return out


def fd_jacobian(F, x, Fx=None):
    """Central-difference Jacobians of ``F`` at each row of ``x``, step ``1e-6 (1 + |x|)``."""
    N, d = x.shape
    h = 1e-6 * (1 + np.linalg.norm(x, axis=1))
    E = np.eye(d)
    plus = x[:, None, :] + h[:, None, None] * E
    minus = x[:, None, :] - h[:, None, None] * E
    vals = F(np.concatenate([plus, minus]).reshape(2 * N * d, d))
    k = vals.shape[-1]
    vals = vals.reshape(2, N, d, k)
    return ((vals[0] - vals[1]) / (2 * h[:, None, None])).transpose(0, 2, 1)


def _norm(v):
    with np.errstate(invalid="ignore", over="ignore"):
        n = np.linalg.norm(v, axis=-1)
    return np.where(np.isfinite(n), n, np.inf)


def dedup(points, radius):
    """Greedy deduplication; returns indices of kept rows."""
    kept = []
    for i, p in enumerate(points):
        if all(np.linalg.norm(p - points[j]) > radius for j in kept):
            kept.append(i)
    return kept


def newton_solve(F, starts, tol=1e-9, max_iter=100, dedup_radius=1e-6, polish=3, bound=1e8):
    """Solve ``F(x) = 0`` from every row of ``starts`` at once.

    ``F`` maps ``(N, d)`` to ``(N, k)`` and returns NaN where ``x`` is outside
    its domain. Steps use the pseudo-inverse of a finite-difference Jacobian
    with backtracking. Iterates that turn non-finite or exceed ``bound`` are
    counted as escaped.
    """
    x = np.array(starts, dtype=float)
    if x.ndim != 2:
        raise ValueError("starts must be a 2-d array")
    N = len(x)
    fx = F(x)
    r = _norm(fx)
    active = np.isfinite(r)
    escaped = ~active
    never_finite = not active.any()
    converged = np.zeros(N, dtype=bool)
    extra_steps = np.zeros(N, dtype=int)
    for _ in range(max_iter + polish):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        xa, fa, ra = x[idx], fx[idx], r[idx]
        with np.errstate(all="ignore"):
            J = fd_jacobian(F, xa)
            good = np.all(np.isfinite(J), axis=(1, 2))
            J = np.where(good[:, None, None], J, 0.0)
            step = -np.einsum("nij,nj->ni", np.linalg.pinv(J), fa)
        accepted = np.zeros(idx.size, dtype=bool)
        new_x, new_f, new_r = xa.copy(), fa.copy(), ra.copy()
        alpha = 1.0
        for _ in range(12):
            todo = np.flatnonzero(~accepted & good)
            if todo.size == 0:
                break
            trial = xa[todo] + alpha * step[todo]
            ft = F(trial)
            rt = _norm(ft)
            ok = rt < ra[todo]
            new_x[todo[ok]], new_f[todo[ok]], new_r[todo[ok]] = trial[ok], ft[ok], rt[ok]
            accepted[todo[ok]] = True
            alpha /= 2
        x[idx], fx[idx], r[idx] = new_x, new_f, new_r
        done = new_r <= tol
        converged[idx] |= done
        extra_steps[idx[done]] += 1
        stalled = ~accepted
        big = np.linalg.norm(new_x, axis=1) > bound
        escaped[idx[big]] = True
        finished = stalled | big | (extra_steps[idx] > polish)
        active[idx[finished]] = False
    converged &= ~escaped & (r <= tol)
    sols, res = x[converged], r[converged]
    order = np.lexsort(sols.T[::-1]) if len(sols) else np.zeros(0, dtype=int)
    sols, res = sols[order], res[order]
    keep = dedup(sols, dedup_radius)
    sols, res = sols[keep], res[keep]
    isolated = True
    if len(sols):
        with np.errstate(all="ignore"):
            sv = np.linalg.svd(fd_jacobian(F, sols), compute_uv=False)
        isolated = bool(np.all(sv[:, -1] > SINGULAR_RATIO * np.maximum(1.0, sv[:, 0])))
    if len(sols) == 1:
        status = UNIQUE
    elif len(sols) > 1:
        status = MULTIPLE
    else:
        status = DIVERGED if never_finite else NONE_FOUND
    return SolveResult(sols, res, status, N, int(escaped.sum()), isolated=isolated)


def start_grid(points, count=None, rng=None, dim=None):
    """Seeded starting points covering the bounding box of ``points`` (chart coordinates).

    The box is padded by ``max(1, span/2)``; a regular grid of at most
    ``count`` (default ``min(20^d, 400)``) points is topped up with uniform
    random points, and the given points themselves are appended.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    d = P.shape[1] if dim is None else dim
    P = P[np.all(np.isfinite(P), axis=1)] if P.size else P
    if len(P) == 0:
        P = np.zeros((1, d))
    count = min(20**d, 400) if count is None else count
    rng = np.random.default_rng(0) if rng is None else rng
    lo, hi = P.min(axis=0), P.max(axis=0)
    pad = max(1.0, 0.5 * float(np.max(hi - lo)))
    lo, hi = lo - pad, hi + pad
    per_axis = max(1, int(np.floor(count ** (1.0 / d) + 1e-9)))
    axes = [np.linspace(a, b, per_axis) for a, b in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, d)
    rest = count - len(grid)
    if rest > 0:
        grid = np.vstack([grid, rng.uniform(lo, hi, size=(rest, d))])
    return np.vstack([grid, P])
