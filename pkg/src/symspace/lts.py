"""Lie triple systems stored as dense structure constants.

A Lie triple system on ``R^n`` is held as a tensor ``T`` of shape
``(n, n, n, n)`` with ``[e_i, e_j, e_k] = sum_l T[i, j, k, l] e_l``.
Dimensions are small (at most a few dozen), so every check simply runs
over all index combinations.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from .errors import InvalidInputError, NumericalAmbiguityError, UnsupportedError

DEFAULT_TOL = 1e-10

# Eigen-derived quantities (roots, induced eigenvalues) are only accurate to
# roughly sqrt(eps) on defective spectra; axiom residuals use the Lts tol.
ROOT_TOL = 1e-8

REAL = "real"
COMPLEX = "complexified"


@dataclass(frozen=True, eq=False)
class LtsStructure:
    """Trilinear bracket on ``R^dim`` given by its structure constants."""

    constants: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        T = np.array(self.constants, dtype=float)
        if T.ndim != 4 or len(set(T.shape)) != 1 or T.shape[0] < 1:
            raise InvalidInputError(
                f"constants must have shape (n, n, n, n) with n >= 1, got {T.shape}"
            )
        if not np.all(np.isfinite(T)):
            raise InvalidInputError("structure constants contain non-finite values")
        if not np.isfinite(self.tol) or self.tol < 0:
            raise InvalidInputError(f"tol must be a nonnegative real, got {self.tol}")
        T.setflags(write=False)
        object.__setattr__(self, "constants", T)

    @property
    def dim(self) -> int:
        return self.constants.shape[0]

    @classmethod
    def zero(cls, dim: int, tol: float = DEFAULT_TOL) -> "LtsStructure":
        """The abelian (flat) system of dimension ``dim``."""
        return cls(np.zeros((dim,) * 4), tol)

    def bracket(self, X, Y, Z) -> np.ndarray:
        return np.einsum("i,j,k,ijkl->l", X, Y, Z, self.constants, optimize=True)

    def change_basis(self, P) -> "LtsStructure":
        """Constants in the basis given by the columns of ``P``."""
        P = np.asarray(P, dtype=float)
        if P.shape != (self.dim, self.dim):
            raise InvalidInputError("basis matrix must be square of size dim")
        Pinv = np.linalg.inv(P)
        T = np.einsum("ia,jb,kc,ijkl,ml->abcm", P, P, P, self.constants, Pinv, optimize=True)
        return LtsStructure(T, self.tol)

    def to_json(self) -> dict:
        return {"dim": self.dim, "tol": self.tol, "constants": self.constants.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "LtsStructure":
        try:
            dim = int(data["dim"])
            constants = np.array(data["constants"], dtype=float)
            tol = float(data.get("tol", DEFAULT_TOL))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed Lts document: {exc}") from exc
        if constants.shape != (dim,) * 4:
            raise InvalidInputError(
                f"constants shape {constants.shape} does not match dim {dim}"
            )
        return cls(constants, tol)


def _reject_nonfinite(token):
    raise InvalidInputError(f"non-finite value {token!r} in Lts file")


def loads_lts(text: str) -> LtsStructure:
    """Parse an Lts JSON document. ``json.JSONDecodeError`` propagates."""
    return LtsStructure.from_json(json.loads(text, parse_constant=_reject_nonfinite))


def load_lts(path) -> LtsStructure:
    return loads_lts(Path(path).read_text())


def save_lts(lts: LtsStructure, path) -> None:
    Path(path).write_text(json.dumps(lts.to_json()))


# -- linear algebra helpers -------------------------------------------------


def span_basis(vectors, tol=DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the span of the rows of ``vectors``.

    Singular values below ``tol * max(1, s_max)`` are treated as zero.
    """
    V = np.asarray(vectors)
    if V.ndim == 1:
        V = V[None, :]
    n = V.shape[1]
    if V.shape[0] == 0:
        return np.zeros((n, 0), dtype=V.dtype)
    U, s, _ = np.linalg.svd(V.T, full_matrices=False)
    if s.size == 0 or s[0] <= tol:
        return np.zeros((n, 0), dtype=U.dtype)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return U[:, :rank]


def null_space(M, tol=DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of ``M``."""
    M = np.asarray(M)
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=M.dtype)
    _, s, Vh = np.linalg.svd(M)
    scale = max(1.0, s[0]) if s.size else 1.0
    rank = int(np.sum(s > tol * scale))
    return Vh[rank:].conj().T


def _outside(v, Q) -> float:
    """Norm of the component of ``v`` orthogonal to the orthonormal columns ``Q``."""
    if Q.shape[1] == 0:
        return float(np.linalg.norm(v))
    return float(np.linalg.norm(v - Q @ (Q.conj().T @ v)))


# -- axioms and operators ---------------------------------------------------


@dataclass(frozen=True)
class AxiomReport:
    residuals: dict
    tol: float

    @property
    def passed(self) -> dict:
        return {name: r <= self.tol for name, r in self.residuals.items()}

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    @property
    def failed(self) -> list:
        return [name for name, good in self.passed.items() if not good]


def _axiom_residuals(T) -> dict:
    n = T.shape[0]
    # (Lts1) polarized: [X,Y,Z] = -[Y,X,Z]
    lts1 = np.abs(T + T.transpose(1, 0, 2, 3)).max()
    cyc = T + np.einsum("jkil->ijkl", T) + np.einsum("kijl->ijkl", T)
    lts2 = np.abs(cyc).max()
    # (Lts3): each L_{x,y} is a derivation of the bracket
    lts3 = 0.0
    for x in range(n):
        for y in range(n):
            D = T[x, y]  # D[m, l]: [e_x, e_y, e_m] = sum_l D[m, l] e_l
            lhs = T @ D
            rhs = (
                np.einsum("um,mvwl->uvwl", D, T)
                + np.einsum("vm,umwl->uvwl", D, T)
                + np.einsum("wm,uvml->uvwl", D, T)
            )
            lts3 = max(lts3, np.abs(lhs - rhs).max())
    return {"lts1": float(lts1), "lts2": float(lts2), "lts3": float(lts3)}


def verify_lts_axioms(lts: LtsStructure) -> AxiomReport:
    """Residuals of (Lts1)-(Lts3) over all basis index combinations."""
    return AxiomReport(_axiom_residuals(lts.constants), lts.tol)


def curvature_operator(lts: LtsStructure, X) -> np.ndarray:
    """Matrix of ``Y -> [Y, X, X]``."""
    X = _vector(X, lts.dim)
    return np.einsum("jabl,a,b->lj", lts.constants, X, X)


def bracket_operator(lts: LtsStructure, X, Y) -> np.ndarray:
    """Matrix of ``L_{X,Y} = [X, Y, .]``."""
    X = _vector(X, lts.dim)
    Y = _vector(Y, lts.dim)
    return np.einsum("ijkl,i,j->lk", lts.constants, X, Y)


def _vector(X, dim):
    X = np.asarray(X, dtype=float)
    if X.shape != (dim,):
        raise InvalidInputError(f"expected a vector of length {dim}, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InvalidInputError("vector has non-finite entries")
    return X


# -- standard embedding -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class StdEmbedding:
    """The Lie algebra ``g = m + [m, m]`` with ``[g_a, g_b] = sum_c C[a, b, c] g_c``.

    The first ``dim_m`` coordinates are ``m``; the remaining ones are the
    operators in ``h_basis`` spanning ``[m, m]`` inside ``gl(m)``.
    """

    dim_m: int
    dim_h: int
    bracket: np.ndarray
    h_basis: np.ndarray
    tol: float = DEFAULT_TOL
    closure_residual: float = 0.0

    @property
    def dim(self) -> int:
        return self.dim_m + self.dim_h

    @property
    def sigma(self) -> np.ndarray:
        return np.concatenate([-np.ones(self.dim_m), np.ones(self.dim_h)])

    def ad(self, v) -> np.ndarray:
        v = np.asarray(v)
        if v.shape == (self.dim_m,):
            v = np.concatenate([v, np.zeros(self.dim_h, dtype=v.dtype)])
        return np.einsum("a,abc->cb", v, self.bracket)

    def lie_bracket(self, u, v) -> np.ndarray:
        return np.einsum("a,b,abc->c", u, v, self.bracket)

    def jacobi_residual(self) -> float:
        C = self.bracket
        if C.size == 0:
            return 0.0
        J = (
            np.einsum("bcd,ade->abce", C, C)
            + np.einsum("cad,bde->abce", C, C)
            + np.einsum("abd,cde->abce", C, C)
        )
        return float(np.abs(J).max())

    def sigma_residual(self) -> float:
        """How far ``sigma`` is from being an automorphism (equivalently, the grading)."""
        if self.bracket.size == 0:
            return 0.0
        s = self.sigma
        mismatch = self.bracket * (s[None, None, :] - s[:, None, None] * s[None, :, None])
        return float(np.abs(mismatch).max())

    def lts_residual(self, lts: LtsStructure) -> float:
        """Distance between ``[[X, Y], Z]`` restricted to ``m`` and the given system."""
        n = self.dim_m
        C = self.bracket
        T = np.einsum("ijd,dkl->ijkl", C[:n, :n, :], C[:, :n, :n])
        return float(np.abs(T - lts.constants).max())


def _embed(T, tol):
    """Standard embedding of raw constants (real or complex)."""
    n = T.shape[0]
    ops = T.transpose(0, 1, 3, 2).reshape(n * n, n * n)  # rows: vec(L_{e_i, e_j})
    H = span_basis(ops, tol)
    r = H.shape[1]
    hb = H.T.reshape(r, n, n)
    N = n + r
    C = np.zeros((N, N, N), dtype=np.result_type(T, H))
    C[:n, :n, n:] = (ops @ H.conj()).reshape(n, n, r)
    C[n:, :n, :n] = hb.transpose(0, 2, 1)
    C[:n, n:, :n] = -C[n:, :n, :n].transpose(1, 0, 2)
    closure = 0.0
    if r:
        comm = np.einsum("kab,lbc->klac", hb, hb) - np.einsum("lab,kbc->klac", hb, hb)
        flat = comm.reshape(r * r, n * n)
        coef = flat @ H.conj()
        closure = float(np.abs(flat - coef @ H.T).max())
        C[n:, n:, n:] = coef.reshape(r, r, r)
    return C, hb, closure


def standard_embedding(lts: LtsStructure) -> StdEmbedding:
    """Build ``g = m + [m, m]`` with the bracket of the standard embedding."""
    report = verify_lts_axioms(lts)
    if not report.ok:
        raise InvalidInputError(f"Lts axioms fail: {', '.join(report.failed)}")
    C, hb, closure = _embed(lts.constants, lts.tol)
    return StdEmbedding(lts.dim, hb.shape[0], C, hb, lts.tol, closure)


def tangent_bundle_lts(lts: LtsStructure) -> LtsStructure:
    """The tangent-bundle system on ``m + m``.

    ``[(x,u),(y,v),(z,w)] = ([x,y,z], [u,y,z] + [x,v,z] + [x,y,w])``.
    """
    n = lts.dim
    T = lts.constants
    D = np.zeros((2 * n,) * 4)
    b, f = slice(0, n), slice(n, 2 * n)
    D[b, b, b, b] = T
    D[f, b, b, f] = T
    D[b, f, b, f] = T
    D[b, b, f, f] = T
    return LtsStructure(D, lts.tol)


def direct_sum(first: LtsStructure, second: LtsStructure) -> LtsStructure:
    n, k = first.dim, second.dim
    T = np.zeros((n + k,) * 4)
    T[:n, :n, :n, :n] = first.constants
    T[n:, n:, n:, n:] = second.constants
    return LtsStructure(T, max(first.tol, second.tol))


def lts_from_lie_algebra(bracket, sigma, tol=DEFAULT_TOL) -> LtsStructure:
    """Restrict ``[[X, Y], Z]`` to the (-1)-eigenspace of a diagonal involution."""
    C = np.asarray(bracket, dtype=float)
    m = np.flatnonzero(np.asarray(sigma) < 0)
    T = np.einsum("ijd,dkl->ijkl", C[np.ix_(m, m)], C[:, m, :])[..., m]
    return LtsStructure(T, tol)


def lts_from_matrices(m_basis, tol=DEFAULT_TOL) -> LtsStructure:
    """Lts of a matrix realization: ``[[X_i, X_j], X_k]`` in the ``m_basis`` coordinates."""
    B = np.asarray(m_basis, dtype=float)
    n = B.shape[0]
    flat = B.reshape(n, -1).T

    def comm(a, b):
        return a @ b - b @ a

    T = np.zeros((n,) * 4)
    for i in range(n):
        for j in range(n):
            Kij = comm(B[i], B[j])
            for k in range(n):
                v = comm(Kij, B[k]).ravel()
                coef, *_ = np.linalg.lstsq(flat, v, rcond=None)
                if np.linalg.norm(flat @ coef - v) > 1e-9 * max(1.0, np.linalg.norm(v)):
                    raise InvalidInputError("m_basis does not span a Lie triple system")
                T[i, j, k] = coef
    return LtsStructure(T, tol)


# -- ideals and solvability -------------------------------------------------


def is_abelian_ideal(lts: LtsStructure, basis) -> bool:
    """True iff the rows of ``basis`` span an abelian ideal of ``lts``."""
    n = lts.dim
    W = np.asarray(basis, dtype=float).reshape(-1, n)
    if W.shape[0] == 0:
        return True
    if np.linalg.matrix_rank(W, tol=lts.tol * max(1.0, np.abs(W).max())) < W.shape[0]:
        raise InvalidInputError("subspace basis vectors are linearly dependent")
    Q = np.linalg.qr(W.T)[0]
    T = lts.constants
    tol = lts.tol * max(1.0, np.abs(T).max())
    E = np.eye(n)
    for w in W:
        for i in range(n):
            for j in range(n):
                for v in (lts.bracket(E[i], E[j], w), lts.bracket(w, E[i], E[j])):
                    if _outside(v, Q) > tol:
                        return False
    for w1 in W:
        for w2 in W:
            for i in range(n):
                for v in (
                    lts.bracket(w1, w2, E[i]),
                    lts.bracket(w1, E[i], w2),
                    lts.bracket(E[i], w1, w2),
                ):
                    if np.linalg.norm(v) > tol:
                        return False
    return True


def derived_series_dims(emb: StdEmbedding) -> list:
    """Dimensions of ``g, [g, g], [[g, g], [g, g]], ...`` until it stabilizes."""
    C = emb.bracket
    N = emb.dim
    B = np.eye(N)
    dims = [N]
    while B.shape[1]:
        vecs = np.einsum("ia,jb,abc->ijc", B.T, B.T, C).reshape(-1, N)
        B = span_basis(vecs, emb.tol)
        if B.shape[1] == dims[-1]:
            break
        dims.append(B.shape[1])
    return dims


def is_solvable(lts: LtsStructure) -> bool:
    return derived_series_dims(standard_embedding(lts))[-1] == 0


# -- modules, Jordan-Holder series, roots -----------------------------------


@dataclass(frozen=True, eq=False)
class LtsModule:
    """An ``m``-module ``V``: a system on ``m + V`` (``m`` first) with ``V`` an abelian ideal."""

    base: LtsStructure
    total: LtsStructure

    def __post_init__(self):
        p, N = self.base.dim, self.total.dim
        if N <= p:
            raise InvalidInputError("module must have positive dimension")
        T = self.total.constants
        tol = self.total.tol * max(1.0, np.abs(T).max())
        sub = T[:p, :p, :p]
        if np.abs(sub[..., :p] - self.base.constants).max() > tol or np.abs(sub[..., p:]).max() > tol:
            raise InvalidInputError("base is not a subsystem of the total system")
        if not is_abelian_ideal(self.total, np.eye(N)[p:]):
            raise InvalidInputError("module is not an abelian ideal")

    @property
    def mod_dim(self) -> int:
        return self.total.dim - self.base.dim

    @classmethod
    def self_module(cls, lts: LtsStructure) -> "LtsModule":
        return cls(lts, tangent_bundle_lts(lts))

    @classmethod
    def trivial(cls, lts: LtsStructure, mod_dim: int) -> "LtsModule":
        p = lts.dim
        T = np.zeros((p + mod_dim,) * 4)
        T[:p, :p, :p, :p] = lts.constants
        return cls(lts, LtsStructure(T, lts.tol))

    def action_operators(self) -> list:
        """Operators ``v -> [v, y, z]`` and ``v -> [y, z, v]`` on ``V`` for basis ``y, z``."""
        return _action_operators(self.total.constants, self.base.dim)


def _action_operators(T, p):
    ops = []
    for i in range(p):
        for j in range(p):
            ops.append(T[p:, i, j, p:].T)
            ops.append(T[i, j, p:, p:].T)
    return ops


@dataclass(frozen=True, eq=False)
class JordanHolderSeries:
    """Nested ideals ``m_0 = V > m_1 > ... > m_p = 0`` (rows span each subspace).

    ``quotients[k]`` holds rows spanning a complement of ``m_{k+1}`` in ``m_k``.
    """

    subspaces: tuple
    quotients: tuple
    field: str

    @property
    def length(self) -> int:
        return len(self.quotients)

    @property
    def quotient_dims(self) -> list:
        return [q.shape[0] for q in self.quotients]


def _quotient_constants(T, p, W):
    """Constants of ``(m + V) / W`` for ``W`` (columns, in V-coordinates) an ideal."""
    q = T.shape[0] - p
    Q = np.linalg.qr(W, mode="complete")[0]
    k = W.shape[1]
    comp = Q[:, k:]
    N = p + q
    basis = np.zeros((N, N), dtype=Q.dtype)
    basis[:p, :p] = np.eye(p)
    basis[p:, p : p + q - k] = comp
    basis[p:, p + q - k :] = W
    P = np.linalg.inv(basis)[: p + q - k]
    keep = basis[:, : p + q - k]
    Tn = np.einsum("ia,jb,kc,ijkl,ml->abcm", keep, keep, keep, T, P, optimize=True)
    return Tn, comp


def _common_eigenvector(ops, tol, rng, prefer_real):
    """A common eigenvector of a commuting family, via a random combination."""
    d = ops[0].shape[0]
    for _ in range(8):
        c = rng.standard_normal(len(ops))
        G = sum(ci * A for ci, A in zip(c, ops))
        mus = np.linalg.eigvals(G)
        order = np.lexsort((mus.imag, mus.real, np.abs(mus.imag) > tol))
        if not prefer_real:
            order = np.lexsort((mus.imag, mus.real))
        for idx in order:
            mu = mus[idx]
            scale = max(1.0, np.abs(G).max())
            E = null_space(G - mu * np.eye(d), 1e-7 * scale)
            if E.shape[1] == 0:
                continue
            restricted = [E.conj().T @ A @ E for A in ops]
            shifted = [R - np.trace(R) / R.shape[0] * np.eye(R.shape[0]) for R in restricted]
            K = null_space(np.vstack(shifted), 1e-7 * scale)
            if K.shape[1] == 0:
                continue
            y = E @ K[:, 0]
            if prefer_real and abs(mu.imag) <= tol:
                y = y.real if np.linalg.norm(y.real) >= np.linalg.norm(y.imag) else y.imag
            y = y / np.linalg.norm(y)
            resid = max(
                np.linalg.norm(A @ y - (y.conj() @ A @ y) * y) for A in ops
            )
            if resid <= 1e-6 * scale:
                return y
    raise NumericalAmbiguityError("no common eigenvector found after 8 random combinations")


def _simple_submodule(T, p, field, rng, tol):
    """A simple submodule of ``V`` (columns in V-coordinates)."""
    N = T.shape[0]
    q = N - p
    C, _, _ = _embed(T, tol)
    G = C.shape[0]
    # abelian ideal a = V + [m, V] of the standard embedding of m + V
    vecs = [np.eye(G)[p + j] for j in range(q)]
    vecs += [C[i, p + j] for i in range(p) for j in range(q)]
    Qa = span_basis(np.array(vecs), tol)
    ads = [np.einsum("a,abc->cb", np.eye(G)[b], C) for b in range(G)]
    A = [Qa.conj().T @ M @ Qa for M in ads]
    derived = [X @ Y - Y @ X for X in A for Y in A]
    K = null_space(np.vstack(derived), 1e-8)
    ops = [K.conj().T @ X @ K for X in A]
    y = _common_eigenvector(ops, ROOT_TOL, rng, prefer_real=(field == REAL))
    x = Qa @ (K @ y)
    v = x[p:N]
    if np.linalg.norm(v) <= 1e-8 * np.linalg.norm(x):
        raise NumericalAmbiguityError("minimal ideal has no module component")
    v = v / np.linalg.norm(v)
    if field == COMPLEX:
        return v[:, None].astype(complex)
    pair = np.column_stack([v.real, v.imag])
    W = span_basis(pair.T, 1e-7)
    return W


def jordan_holder_series(module: LtsModule, field: str = COMPLEX, seed: int = 0) -> JordanHolderSeries:
    """Maximal flag of submodules with simple quotients.

    Each simple submodule is read off a minimal sigma-invariant ideal of the
    standard embedding of ``m + V`` inside ``V + [m, V]``; the flag is then
    built by recursing on the quotient module.
    """
    if field not in (REAL, COMPLEX):
        raise InvalidInputError(f"field must be {REAL!r} or {COMPLEX!r}")
    if not is_solvable(module.base):
        raise UnsupportedError("Jordan-Holder series needs a solvable base system")
    rng = np.random.default_rng(seed)
    p, q = module.base.dim, module.mod_dim
    dtype = complex if field == COMPLEX else float
    T = module.total.constants.astype(dtype)
    lift = np.eye(q, dtype=dtype)
    found = []
    while T.shape[0] > p:
        W = _simple_submodule(T, p, field, rng, module.total.tol)
        found.append(lift @ W)
        T, comp = _quotient_constants(T, p, W.astype(dtype))
        if field == REAL:
            T = T.real
            comp = comp.real
        lift = lift @ comp
    flags = []
    acc = np.zeros((0, q), dtype=dtype)
    for W in found:
        acc = np.vstack([acc, W.T])
        flags.append(acc)
    subspaces = tuple(reversed(flags)) + (np.zeros((0, q), dtype=dtype),)
    quotients = tuple(W.T for W in reversed(found))
    return JordanHolderSeries(subspaces, quotients, field)


def _induced(op, U, lower):
    """Matrix of ``op`` on ``span(U) mod span(lower)`` (rows are vectors)."""
    k = U.shape[0]
    basis = np.vstack([U, lower]).T
    coef, *_ = np.linalg.lstsq(basis, op @ U.T, rcond=None)
    return coef[:k]


def quotient_action(module: LtsModule, series: JordanHolderSeries, k: int, X) -> np.ndarray:
    """Induced matrix of ``[., X, X]`` on the quotient ``m_k / m_{k+1}``."""
    p = module.base.dim
    X = _vector(X, p)
    T = module.total.constants
    R = np.einsum("jabl,a,b->lj", T[p:, :p, :p, p:], X, X)
    return _induced(R, series.quotients[k], series.subspaces[k + 1])


def classify_simple_quotient(
    module: LtsModule, series: JordanHolderSeries, k: int, samples: int = 32, seed: int = 0
) -> str:
    """Type S1-S4 of a real simple quotient.

    One-dimensional quotients are typed by the sign of the induced
    eigenvalue of ``[., X, X]`` over the basis and ``samples`` random ``X``.
    """
    if series.field != REAL:
        raise InvalidInputError("classification applies to real Jordan-Holder series")
    samples = max(samples, 32)
    U, lower = series.quotients[k], series.subspaces[k + 1]
    p = module.base.dim
    actions = [_induced(op, U, lower) for op in module.action_operators()]
    act_scale = max(np.abs(a).max() for a in actions)
    if U.shape[0] == 1 and act_scale <= ROOT_TOL:
        return "S1"
    rng = np.random.default_rng(seed)
    Xs = np.vstack([np.eye(p), rng.standard_normal((samples, p))])
    eigs = [np.linalg.eigvals(quotient_action(module, series, k, X)) for X in Xs]
    scale = max(1.0, max(np.abs(e).max() for e in eigs))
    tol = ROOT_TOL * scale
    if U.shape[0] == 2:
        # a simple real quotient of dimension 2 has no invariant line; its
        # induced eigenvalues may still be real at special X, so the type is
        # read from the dimension alone
        return "S4"
    vals = np.array([e[0].real for e in eigs])
    if np.abs(vals).max() <= tol:
        raise NumericalAmbiguityError(
            "nontrivial one-dimensional quotient with vanishing eigenvalues", sample=Xs[0]
        )
    if (vals < -tol).any() and (vals > tol).any():
        bad = Xs[int(np.argmax(vals))]
        raise NumericalAmbiguityError("induced eigenvalue changes sign", sample=bad)
    return "S2" if (vals < -tol).any() else "S3"


@dataclass(frozen=True, eq=False)
class Root:
    """Quadratic form ``X -> X^T A X + i X^T B X`` on ``m``."""

    A: np.ndarray
    B: np.ndarray

    def __call__(self, X) -> complex:
        X = np.asarray(X, dtype=float)
        return complex(X @ self.A @ X, X @ self.B @ X)

    @property
    def is_real(self) -> bool:
        return np.abs(self.B).max() <= ROOT_TOL * max(1.0, np.abs(self.A).max())


def roots(lts: LtsStructure, seed: int = 0) -> list:
    """Roots of the complexified system, one per Jordan-Holder quotient of ``m_C``."""
    module = LtsModule.self_module(lts)
    series = jordan_holder_series(module, COMPLEX, seed)
    n = lts.dim
    T = lts.constants
    out = []
    for k in range(series.length):
        U, lower = series.quotients[k], series.subspaces[k + 1]
        c = np.zeros((n, n), dtype=complex)
        for a in range(n):
            for b in range(n):
                c[a, b] = _induced(T[:, a, b, :].T, U, lower)[0, 0]
        c = (c + c.T) / 2
        out.append(Root(c.real.copy(), c.imag.copy()))
    return out


@dataclass(frozen=True, eq=False)
class ExponentialityVerdict:
    exponential: bool
    witness_root: int | None = None
    witness_x: np.ndarray | None = None
    witness_value: float | None = None
    witness_residual: float | None = None
    sampled: bool = False
    assumes_simply_connected: bool = True
    roots: list = field(default_factory=list)


def _min_on_null_cone(root, rng, starts):
    """Minimize ``X^T A X`` over unit ``X`` with ``X^T B X = 0``."""
    n = root.A.shape[0]
    cons = [
        {"type": "eq", "fun": lambda x: x @ x - 1.0, "jac": lambda x: 2 * x},
        {"type": "eq", "fun": lambda x: x @ root.B @ x, "jac": lambda x: 2 * root.B @ x},
    ]
    best_val, best_x = np.inf, None
    for _ in range(starts):
        x0 = rng.standard_normal(n)
        x0 /= np.linalg.norm(x0)
        res = minimize(
            lambda x: x @ root.A @ x,
            x0,
            jac=lambda x: 2 * root.A @ x,
            constraints=cons,
            method="SLSQP",
            options={"ftol": 1e-14, "maxiter": 200},
        )
        x = res.x
        feasible = abs(x @ x - 1) < 1e-8 and abs(x @ root.B @ x) < 1e-8
        if feasible and res.fun < best_val:
            best_val, best_x = float(res.fun), x / np.linalg.norm(x)
    return best_val, best_x


def solvable_exponentiality(lts: LtsStructure, seed: int = 0, starts: int = 64) -> ExponentialityVerdict:
    """Decide exponentiality of a solvable, simply connected space from its roots.

    The space fails to be exponential iff some root takes a strictly negative
    real value on the real system. Real roots are decided from the spectrum
    of their symmetric matrix; the others by a multistart constrained search,
    in which case the verdict is flagged ``sampled``.
    """
    if not is_solvable(lts):
        raise UnsupportedError("root criterion needs a solvable system")
    rs = roots(lts, seed)
    rng = np.random.default_rng(seed)
    sampled = False
    for idx, root in enumerate(rs):
        scale = max(1.0, np.abs(root.A).max())
        if root.is_real:
            w, V = np.linalg.eigh(root.A)
            val, x = w[0], V[:, 0]
        else:
            sampled = True
            val, x = _min_on_null_cone(root, rng, max(starts, 64))
            if x is None:
                continue
        if val < -ROOT_TOL * scale:
            x = x * np.sign(x[np.argmax(np.abs(x))])
            value = root(x).real
            eig = np.linalg.eigvals(curvature_operator(lts, x))
            resid = float(np.abs(eig - value).min())
            return ExponentialityVerdict(
                False, idx, x, value, resid, sampled, True, rs
            )
    return ExponentialityVerdict(True, sampled=sampled, roots=rs)


# -- random solvable systems (property tests, verify suites) ---------------


def random_solvable_lts(rng, dim: int) -> LtsStructure:
    """Random solvable system of the given dimension (at least 2).

    Built from ``a x| R^{2k}`` where commuting generators in ``a`` act on each
    plane by multiples of ``[[p, q], [-q, -p]]`` and the involution swaps the
    plane coordinates; then put in a random basis. Draws whose operators
    ``[e_i, e_j, .]`` span ``h`` with a singular-value gap below 1e-3 are
    rejected, so the structure is not within rounding of a degenerate one.
    """
    if dim < 2:
        return LtsStructure.zero(max(dim, 1))
    while True:
        T = _random_solvable_tensor(rng, dim)
        s = np.linalg.svd(T.reshape(dim * dim, dim * dim), compute_uv=False)
        live = s[s > 1e-9 * s[0]]
        if live[-1] >= 1e-3 * s[0]:
            break
    # well-conditioned basis change keeps axiom residuals near rounding level
    Q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    P = Q * rng.uniform(0.5, 2.0, size=dim)
    return LtsStructure(T).change_basis(P)


def _random_solvable_tensor(rng, dim):
    r = int(rng.integers(1, dim))
    k = dim - r
    c = rng.standard_normal((r, k))
    kappa = rng.standard_normal(k) * rng.choice([0.5, 1.0, 2.0], size=k)
    T = np.zeros((dim,) * 4)
    for j in range(k):
        wj = r + j
        for i in range(r):
            for l in range(r):
                coef = kappa[j] * c[i, j] * c[l, j]
                T[wj, i, l, wj] += coef
                T[i, wj, l, wj] -= coef
    return T
