"""Property suites run by the ``verify`` command."""
from __future__ import annotations

import numpy as np

from .errors import PropertyViolationError
from .lts import LtsStructure, lts_from_matrices, standard_embedding, verify_lts_axioms
from .models import ModelSpace, loos_axiom_check
from .spectral import helgason_differential, square_spectrum_check

SUITE_TOLS = {
    "loos": 1e-9,
    "lts_axioms": 1e-10,
    "round_trip": 1e-9,
    "helgason": 1e-5,
    "spectral": 1e-8,
}


def _entry(residual, tol):
    residual = float(residual)
    return {"max_residual": residual, "tol": tol, "pass": bool(residual <= tol)}


def suite_lts_axioms(lts: LtsStructure, tol):
    report = verify_lts_axioms(lts)
    worst = max(report.residuals.values())
    if report.ok:
        worst = max(worst, standard_embedding(lts).jacobi_residual())
    return _entry(worst, tol)


def suite_spectral(lts: LtsStructure, rng, tol, samples=16):
    """Relative mismatch of the squared ad-spectrum; scaled by ``max(1, |ad X|^2)``."""
    emb = standard_embedding(lts)
    worst = 0.0
    for _ in range(samples):
        X = rng.standard_normal(lts.dim)
        try:
            rep = square_spectrum_check(emb, X, tol=np.inf)
        except PropertyViolationError:
            return _entry(np.inf, tol)
        scale = max(1.0, float(np.linalg.norm(emb.ad(X), 2)) ** 2)
        worst = max(worst, rep.error / scale, rep.sylvester_error / scale)
    return _entry(worst, tol)


def suite_loos(space: ModelSpace, seed, tol, samples=200):
    rep = loos_axiom_check(space, samples, seed)
    entry = _entry(rep.max_residual, tol)
    entry["isolation_ratio"] = rep.isolation_ratio
    entry["pass"] = entry["pass"] and rep.passed["isolation"]
    return entry


def suite_round_trip(space: ModelSpace, rng, tol, samples=50):
    """Chart, exp/log, group-versus-symmetry and realization-versus-closed-form consistency."""
    worst = 0.0
    pts = space.random_points(rng, samples, space.sample_scale)
    worst = max(worst, np.abs(space._from_chart(space._chart(pts)) - pts).max())
    X = rng.uniform(-1, 1, (samples, space.dim)) * space.sample_scale
    if space.has_log:
        worst = max(worst, np.abs(space._log(space._exp(X)) - X).max())
        worst = max(worst, np.abs(space._exp(space._log(pts)) - pts).max())
    if space.has_group:
        o = space.base_point
        for Xi, y in zip(X[:10], pts[:10]):
            g = space.transvection(Xi)
            lhs = space._symmetry(space._exp(Xi / 2), space._symmetry(o, y))
            rhs = space.act(g, y)
            worst = max(worst, np.abs(lhs - rhs).max() / max(1.0, np.abs(rhs).max()))
        realized = lts_from_matrices(space.m_basis)
        worst = max(worst, np.abs(realized.constants - space.lts().constants).max())
    return _entry(worst, tol)


def suite_helgason(space: ModelSpace, rng, tol, samples=10, step=1e-4):
    if not space.has_group:
        return None
    emb = standard_embedding(space.lts())
    worst = 0.0
    for _ in range(samples):
        X = rng.uniform(-1, 1, space.dim) * min(1.0, space.sample_scale)
        H = helgason_differential(emb, space, X)
        cols = []
        for E in np.eye(space.dim):
            plus = space._chart(space._exp(X + step * E))
            minus = space._chart(space._exp(X - step * E))
            cols.append((plus - minus) / (2 * step))
        J = np.column_stack(cols)
        worst = max(worst, np.abs(H - J).max() / max(1e-12, np.abs(J).max()))
    return _entry(worst, tol)


def verify_space(space: ModelSpace, seed=0, tol=None):
    rng = np.random.default_rng(seed)
    t = (lambda name: SUITE_TOLS[name]) if tol is None else (lambda name: tol)
    lts = space.lts()
    out = {
        "loos": suite_loos(space, seed, t("loos")),
        "lts_axioms": suite_lts_axioms(lts, t("lts_axioms")),
        "round_trip": suite_round_trip(space, rng, t("round_trip")),
        "spectral": suite_spectral(lts, rng, t("spectral")),
    }
    hel = suite_helgason(space, rng, t("helgason"))
    if hel is not None:
        out["helgason"] = hel
    return out


def verify_lts(lts: LtsStructure, seed=0, tol=None):
    rng = np.random.default_rng(seed)
    t = (lambda name: SUITE_TOLS[name]) if tol is None else (lambda name: tol)
    out = {"lts_axioms": suite_lts_axioms(lts, t("lts_axioms"))}
    if out["lts_axioms"]["pass"]:
        out["spectral"] = suite_spectral(lts, rng, t("spectral"))
    return out


def all_pass(summary: dict) -> bool:
    return all(entry["pass"] for suites in summary.values() for entry in suites.values())
