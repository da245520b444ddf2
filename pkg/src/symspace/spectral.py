"""Spectra of real operators and the matrix functions built on them."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InvalidInputError, PropertyViolationError, RangeError, UnsupportedError
from .lts import LtsStructure, StdEmbedding, curvature_operator


def _square(op) -> np.ndarray:
    A = np.asarray(op, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError("matrix has non-finite entries")
    return A


def _sorted(values) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    return values[np.lexsort((values.imag, values.real))]


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues (with repetition) of a real square operator."""

    values: np.ndarray
    dim: int
    norm: float = 1.0

    def multiplicities(self, tol: float | None = None) -> list:
        """Cluster nearby eigenvalues: list of ``(value, multiplicity)``."""
        tol = self.default_tol() if tol is None else tol
        out = []
        for v in self.values:
            for k, (c, m) in enumerate(out):
                if abs(v - c) <= tol:
                    out[k] = ((c * m + v) / (m + 1), m + 1)
                    break
            else:
                out.append((v, 1))
        return out

    def clustered(self, tol: float | None = None) -> np.ndarray:
        """Values with each cluster replaced by its mean.

        A defective eigenvalue of multiplicity ``k`` is split by about
        ``eps^(1/k) |A|`` in floating point while the cluster mean stays
        accurate to about ``eps |A|``; compare spectra through this.
        """
        tol = 1e-6 * max(1.0, self.norm) if tol is None else tol
        out = []
        for c, m in self.multiplicities(tol):
            out += [c] * m
        return _sorted(out)

    def default_tol(self) -> float:
        return 1e-9 * max(1.0, self.norm)

    def to_json(self, tol: float | None = None) -> list:
        return [[float(v.real), float(v.imag), m] for v, m in self.multiplicities(tol)]


def eigenvalues(op) -> Spectrum:
    A = _square(op)
    if A.shape[0] == 0:
        return Spectrum(np.zeros(0, dtype=complex), 0, 0.0)
    vals = np.linalg.eigvals(A)
    # real input: force exact conjugate pairing
    vals = np.where(np.abs(vals.imag) <= 1e-14 * max(1.0, np.abs(vals).max()), vals.real, vals)
    return Spectrum(_sorted(vals), A.shape[0], float(np.linalg.norm(A, 2)))


@dataclass(frozen=True, eq=False)
class MatrixFunctionResult:
    matrix: np.ndarray
    order: int
    scaling: int
    backward_error: float


def sinhc(op, max_order: int = 20) -> MatrixFunctionResult:
    """``sinh(A)/A`` as an entire function of ``A``.

    The argument is halved until its norm is at most 1, both ``sinh(x)/x``
    and ``cosh(x)`` are summed in powers of ``x^2``, and the result is
    doubled back with ``sinhc(2x) = cosh(x) sinhc(x)`` and
    ``cosh(2x) = 2 cosh(x)^2 - 1``.
    """
    A = _square(op)
    n = A.shape[0]
    I = np.eye(n)
    norm = float(np.linalg.norm(A, 1)) if n else 0.0
    if norm == 0.0:
        return MatrixFunctionResult(I, 0, 0, 0.0)
    s = max(0, math.ceil(math.log2(norm))) if norm > 1 else 0
    B = A / 2.0**s
    B2 = B @ B
    b2 = norm**2 / 4.0**s
    S = I.copy()
    C = I.copy()
    term = I.copy()
    order = 0
    tail = 0.0
    for k in range(1, max_order // 2 + 1):
        term = term @ B2
        S = S + term / math.factorial(2 * k + 1)
        C = C + term / math.factorial(2 * k)
        order = 2 * k
        tail = b2 ** (k + 1) / math.factorial(2 * k + 2)
        if tail < 1e-17:
            break
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(s):
            S = C @ S
            C = 2 * C @ C - I
    if not np.all(np.isfinite(S)):
        raise RangeError(f"sinh(A)/A overflows for ||A||_1 = {norm:.3g}")
    return MatrixFunctionResult(S, order, s, tail)


def local_diffeo_test(spec: Spectrum, tol: float | None = None) -> bool:
    """False iff some eigenvalue sits on ``i*pi*k`` for a nonzero integer ``k``."""
    tol = spec.default_tol() if tol is None else tol
    for lam in spec.values:
        k = round(lam.imag / math.pi)
        if k != 0 and abs(lam.real) <= tol and abs(lam.imag - k * math.pi) <= tol:
            return False
    return True


@dataclass(frozen=True, eq=False)
class SquareSpectrumReport:
    squared: np.ndarray  # lambda^2 over spec(ad X)
    on_m: np.ndarray  # spec([., X, X]) on m
    on_h: np.ndarray  # spec((ad X)^2) on h
    matching: np.ndarray  # squared[i] <-> union[matching[i]]
    error: float
    sylvester_error: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.error <= self.tol and self.sylvester_error <= self.tol


def _match(a, b):
    if len(a) == 0:
        return np.zeros(0, dtype=int), 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return cols[np.argsort(rows)], float(cost[rows, cols].max())


def square_spectrum_check(emb: StdEmbedding, X, tol: float | None = None) -> SquareSpectrumReport:
    """Squares of the eigenvalues of ``ad X`` against the spectra of its square on ``m`` and ``h``.

    ``ad X`` swaps ``m`` and ``h``; writing it as blocks ``P: m -> h`` and
    ``Q: h -> m``, the curvature operator is ``QP`` and the ``h`` part is
    ``PQ``, whose nonzero spectra agree (Sylvester).
    """
    n = emb.dim_m
    X = np.asarray(X, dtype=float)
    if X.shape != (n,):
        raise InvalidInputError(f"X must lie in m (length {n})")
    ad = emb.ad(X)
    P, Q = ad[n:, :n], ad[:n, n:]
    QP, PQ = Q @ P, P @ Q
    lam = eigenvalues(ad).values
    squared = _sorted(lam**2)
    on_m = eigenvalues(QP).values
    on_h = eigenvalues(PQ).values if emb.dim_h else np.zeros(0, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(ad, 2)) ** 2)
    tol = 1e-8 * scale if tol is None else tol
    union = np.concatenate([on_m, on_h])
    matching, err = _match(squared, union)
    pad_m = np.concatenate([on_m, np.zeros(max(0, emb.dim_h - n))])
    pad_h = np.concatenate([on_h, np.zeros(max(0, n - emb.dim_h))])
    _, syl = _match(pad_h, pad_m)
    report = SquareSpectrumReport(squared, on_m, on_h, matching, err, syl, tol)
    if not report.ok:
        raise PropertyViolationError(
            f"squared ad-spectrum mismatch: error {err:.3g}, Sylvester {syl:.3g}, tol {tol:.3g}"
        )
    return report


def helgason_differential(emb: StdEmbedding, model, X) -> np.ndarray:
    """Differential of the base-point exponential at ``X`` in chart coordinates.

    Computed as the tangent action of the transvection ``exp X`` composed
    with the ``m`` block of ``sinh(ad X)/ad X``.
    """
    if not getattr(model, "has_group", False):
        raise UnsupportedError(f"{model.name} has no matrix group realization")
    n = emb.dim_m
    X = np.asarray(X, dtype=float)
    if X.shape != (n,):
        raise InvalidInputError(f"X must lie in m (length {n})")
    basis = model.m_basis
    g = model.group_exp(np.tensordot(X, basis, axes=1))
    x = model.act(g, model.base_point)
    ginv = np.linalg.inv(g)
    K = np.column_stack([model.tangent_action(g @ Y @ ginv, x) for Y in basis])
    S = sinhc(emb.ad(X)).matrix[:n, :n]
    return K @ S


@dataclass(frozen=True, eq=False)
class LocalExpVerdict:
    violated: bool
    witness_x: np.ndarray | None
    eigenvalue: float | None
    residual: float | None
    samples: int
    sampled: bool = True


def locally_exponential_sample_test(lts: LtsStructure, samples: int = 64, seed: int = 0, tol=None) -> LocalExpVerdict:
    """Search for a strictly negative eigenvalue of ``Y -> [Y, X, X]``.

    Basis vectors come first, then ``samples`` Gaussian directions. Only a
    violation is a certificate; "no violation" is a sampling statement.
    """
    if samples < 1:
        raise InvalidInputError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    n = lts.dim
    Xs = np.vstack([np.eye(n), rng.standard_normal((samples, n))])
    best = None
    for idx, X in enumerate(Xs):
        if best is not None and idx >= n:
            break  # prefer a basis witness; otherwise stop at the first one
        C = curvature_operator(lts, X)
        w, V = np.linalg.eig(C)
        t = 1e-9 * max(1.0, np.abs(C).max()) if tol is None else tol
        for lam, v in zip(w, V.T):
            if abs(lam.imag) <= t and lam.real < -t:
                if best is None or lam.real < best[1]:
                    v = v.real / np.linalg.norm(v.real)
                    res = float(np.linalg.norm(C @ v - lam.real * v))
                    best = (X, float(lam.real), res)
    if best is None:
        return LocalExpVerdict(False, None, None, None, len(Xs))
    return LocalExpVerdict(True, best[0], best[1], best[2], len(Xs))


def _nilpotent(N, tol):
    n = N.shape[0]
    scale = max(1.0, float(np.abs(N).max())) ** max(n, 1)
    return np.abs(np.linalg.matrix_power(N, n)).max() <= tol * scale


def unipotent_inverse(N, tol: float = 1e-10) -> np.ndarray:
    """``(Id + exp N)^{-1}`` for nilpotent ``N`` as a finite polynomial.

    With ``M = exp N - Id`` (nilpotent) the inverse of ``2 Id + M`` is
    ``sum_j (-M/2)^j / 2``, a finite sum.
    """
    N = _square(N)
    n = N.shape[0]
    if not _nilpotent(N, tol):
        raise UnsupportedError("operator is not nilpotent")
    I = np.eye(n)
    M = np.zeros_like(N)
    term = I.copy()
    for k in range(1, n + 1):
        term = term @ N / k
        M = M + term
    R = I.copy()
    power = I.copy()
    for _ in range(n):
        power = power @ (-M / 2)
        R = R + power
    R = R / 2
    A = 2 * I + M
    resid = float(np.abs(A @ R - I).max())
    if resid > 1e-12 * max(1.0, np.abs(A).max() * np.abs(R).max()):
        raise PropertyViolationError(f"unipotent inverse residual {resid:.3g}")
    return R
