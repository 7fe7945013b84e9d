"""Basis pursuit over a two-basis dictionary and its dual certificates.

The problem ``min ||alpha||_1  s.t.  Phi alpha = f`` is solved with
Douglas-Rachford splitting. Because ``Phi Phi^* = 2 I``, projecting onto the
affine feasible set is just ``alpha + Phi^*(f - Phi alpha) / 2``; the other
half-step is complex soft-thresholding. A feasible dual point is read off the
splitting iterate at every check, so optimality is certified by a duality gap
rather than by iteration count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .dictionary import CoefficientVector, PairDictionary, as_signal

__all__ = [
    "GramSingularError",
    "SolverConfig",
    "DualCertificate",
    "SolveResult",
    "KKTReport",
    "soft_threshold",
    "basis_pursuit",
    "min_energy_dual",
    "certificate_valid",
    "kkt_check",
    "recovery_success",
]

GRAM_TOL = 1e-8
ON_SUPPORT_TOL = 1e-8
STRICT_MARGIN = 1e-10


class GramSingularError(np.linalg.LinAlgError):
    """Raised when ``Phi_G^* Phi_G`` is (numerically) singular."""


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 20000
    feasibility_tol: float = 1e-9
    duality_gap_tol: float = 1e-8
    step_parameter: float = 1.0
    check_every: int = 10
    record_history: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if min(self.feasibility_tol, self.duality_gap_tol, self.step_parameter) <= 0:
            raise ValueError("tolerances and step parameter must be positive")
        if self.check_every < 1:
            raise ValueError("check_every must be >= 1")


@dataclass(frozen=True, eq=False)
class DualCertificate:
    """Dual signal ``S`` and its analysis ``P = Phi^* S`` against a support."""

    dual_signal: np.ndarray
    p_vector: np.ndarray
    on_support_residual: float
    off_support_max: float
    gram_min_eig: float
    support: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))


@dataclass(frozen=True, eq=False)
class SolveResult:
    alpha_hat: CoefficientVector
    status: str
    iterations: int
    feasibility_residual: float
    l1_value: float
    certificate: Optional[DualCertificate] = None
    duality_gap: float = float("inf")
    polished: bool = False
    history: List[float] = field(default_factory=list)


@dataclass(frozen=True)
class KKTReport:
    dual_sup_norm: float
    dual_value: float
    primal_value: float
    gap: float
    passed: bool


def soft_threshold(x, tau):
    """Complex soft-thresholding: shrink moduli by ``tau``, keep phases."""
    mag = np.abs(x)
    scale = np.zeros_like(mag)
    big = mag > tau
    scale[big] = 1.0 - tau / mag[big]
    return x * scale


def _certificate(d, s, support, signs=None, gram_min=None):
    p = d.analyze(s)
    on = np.zeros(2 * d.n, dtype=bool)
    on[support] = True
    if signs is None:
        signs = np.zeros(support.size, dtype=np.complex128)
    on_res = float(np.max(np.abs(p[support] - signs))) if support.size else 0.0
    off_max = float(np.max(np.abs(p[~on]))) if (~on).any() else 0.0
    if gram_min is None:
        gram_min = _gram_min_eig(d, support)
    return DualCertificate(s, p, on_res, off_max, float(gram_min), support)


def _gram_min_eig(d, support):
    if support.size == 0:
        return 1.0
    if support.size > d.n:
        return 0.0
    phi = d.atoms(support)
    return float(np.linalg.eigvalsh(phi.conj().T @ phi)[0])


def _dual_value(s, f):
    return float(np.real(np.vdot(s, f)))


def _polish(d, f, support, fnorm, cfg):
    """Least-squares fit on ``support`` plus its least-norm sign-matching dual.

    Returns ``None`` when the fit is rank deficient or infeasible.
    """
    if support.size == 0 or support.size > d.n:
        return None
    phi = d.atoms(support)
    coef, _, rank, _ = np.linalg.lstsq(phi, f, rcond=None)
    if rank < support.size:
        return None
    if np.linalg.norm(phi @ coef - f) > cfg.feasibility_tol * fnorm:
        return None
    mag = np.abs(coef)
    if np.any(mag == 0):
        return None
    s = np.linalg.pinv(phi.conj().T) @ (coef / mag)
    s = s / max(1.0, float(np.max(np.abs(d.analyze(s)))))
    alpha = np.zeros(2 * d.n, dtype=np.complex128)
    alpha[support] = coef
    return alpha, float(mag.sum()), s


def _certify(candidate, duals, f, tol):
    """Smallest relative gap of ``candidate`` over the given dual points."""
    alpha, l1, s_own = candidate
    best = None
    for s in (s_own,) + tuple(duals):
        gap = max(l1 - _dual_value(s, f), 0.0) / l1
        if best is None or gap < best[1]:
            best = (s, gap)
    return best if best[1] <= tol else None


def basis_pursuit(d: PairDictionary, f, cfg: Optional[SolverConfig] = None) -> SolveResult:
    """Minimize ``sum |alpha|`` subject to ``Phi alpha = f``.

    Parameters
    ----------
    d : PairDictionary
    f : array_like
        Signal of length ``d.n``. A signal of the wrong length gives
        ``status='infeasible_input'``; every other signal is feasible.
    cfg : SolverConfig, optional

    Returns
    -------
    SolveResult
        ``status`` is ``'optimal'`` when the iterate is feasible to
        ``feasibility_tol`` (relative) and the relative duality gap is below
        ``duality_gap_tol``, ``'max_iters'`` otherwise.

    Notes
    -----
    The threshold is ``step_parameter * ||f|| / sqrt(n)`` so the iteration is
    equivariant under ``f -> c f`` for any complex ``c``. When the support
    of the thresholded iterate stops changing, a least-squares fit on that
    support is tried and accepted only if a dual point proves it optimal.
    """
    cfg = cfg or SolverConfig()
    n = d.n
    arr = np.asarray(f, dtype=np.complex128)
    if arr.ndim != 1 or arr.size != n:
        zero = CoefficientVector.zeros(n)
        return SolveResult(zero, "infeasible_input", 0, float("inf"), 0.0)
    f = arr
    fnorm = float(np.linalg.norm(f))
    if fnorm == 0.0:
        s = np.zeros(n, dtype=np.complex128)
        cert = _certificate(d, s, np.zeros(0, dtype=np.int64))
        return SolveResult(CoefficientVector.zeros(n), "optimal", 0, 0.0, 0.0, cert, 0.0)

    tau = cfg.step_parameter * fnorm / np.sqrt(n)
    z = np.zeros(2 * n, dtype=np.complex128)
    x_prev = None
    last_support = None
    candidate = None
    history = []
    best = None
    k = 0
    while k < cfg.max_iterations:
        k += 1
        x = z + 0.5 * d.analyze(f - d.synthesize(z))
        y = soft_threshold(2.0 * x - z, tau)
        z = z + y - x
        if k % cfg.check_every and k < cfg.max_iterations:
            continue

        l1 = float(np.abs(x).sum())
        if cfg.record_history:
            history.append(l1)
        # x - z is tau times a subgradient of ||.||_1 at y; map it into range(Phi^*)
        s = d.synthesize(x - z) / (2.0 * tau)
        s /= max(1.0, float(np.max(np.abs(d.analyze(s)))))
        gap = (l1 - _dual_value(s, f)) / l1
        feas = float(np.linalg.norm(d.synthesize(x) - f)) / fnorm
        change = np.inf if x_prev is None else np.linalg.norm(x - x_prev) / np.linalg.norm(x)
        x_prev = x

        support = np.flatnonzero(y)
        if last_support is not None and np.array_equal(support, last_support):
            if candidate is None:
                candidate = _polish(d, f, support, fnorm, cfg) or False
            if candidate:
                best = _certify(candidate, (s,), f, cfg.duality_gap_tol)
                if best is not None:
                    break
        else:
            candidate = None
        last_support = support

        if feas <= cfg.feasibility_tol and change <= cfg.duality_gap_tol and gap <= cfg.duality_gap_tol:
            break

    if best is not None:
        alpha, (s, gap) = candidate[0], best
        status, polished = "optimal", True
    else:
        alpha = x
        polished = False
        status = "optimal" if (feas <= cfg.feasibility_tol and gap <= cfg.duality_gap_tol
                               and change <= cfg.duality_gap_tol) else "max_iters"
    alpha_hat = CoefficientVector.from_dense(alpha)
    feas = float(np.linalg.norm(d.synthesize(alpha) - f)) / fnorm
    cert = _certificate(d, s, alpha_hat.support, alpha_hat.sign()[alpha_hat.support])
    if cfg.record_history:
        history.append(alpha_hat.l1_norm())
    return SolveResult(alpha_hat, status, k, feas, alpha_hat.l1_norm(), cert,
                       float(max(gap, 0.0)), polished, history)


def min_energy_dual(d: PairDictionary, support, signs) -> DualCertificate:
    """Minimum-norm ``S`` with ``(Phi^* S)[g] = signs[g]`` on the support.

    ``S = Phi_G (Phi_G^* Phi_G)^{-1} signs``. ``signs`` may be given either
    on the (sorted) support or as a full length-2N vector.

    Raises
    ------
    GramSingularError
        If the smallest Gram eigenvalue is at most ``1e-8``.
    """
    support = np.unique(np.asarray(support, dtype=np.int64))
    signs = np.asarray(signs, dtype=np.complex128)
    if signs.size == 2 * d.n and support.size != 2 * d.n:
        signs = signs[support]
    if signs.size != support.size:
        raise ValueError("signs must match the support")
    if support.size and not np.allclose(np.abs(signs), 1.0, atol=1e-12):
        raise ValueError("signs must have unit modulus")
    if support.size == 0:
        return _certificate(d, np.zeros(d.n, dtype=np.complex128), support, signs, 1.0)
    phi = d.atoms(support)
    gram = phi.conj().T @ phi
    lam_min = float(np.linalg.eigvalsh(gram)[0])
    if lam_min <= GRAM_TOL:
        raise GramSingularError(f"gram-singular: smallest eigenvalue {lam_min:.3e}")
    s = phi @ np.linalg.solve(gram, signs)
    return _certificate(d, s, support, signs, lam_min)


def certificate_valid(c: DualCertificate) -> bool:
    """Sufficient condition for ``alpha`` to be the unique l1 minimizer."""
    return bool(
        c.on_support_residual <= ON_SUPPORT_TOL
        and c.off_support_max < 1.0 - STRICT_MARGIN
        and c.gram_min_eig > GRAM_TOL
    )


def kkt_check(d: PairDictionary, f, r: SolveResult, gap_tol: Optional[float] = None) -> KKTReport:
    """Duality-gap check of a solve using the dual signal it carries.

    ``gap_tol`` is relative to the l1 value (default: the solver default).
    """
    f = as_signal(f, d.n)
    tol = SolverConfig.duality_gap_tol if gap_tol is None else gap_tol
    if r.certificate is None:
        return KKTReport(float("inf"), float("-inf"), r.l1_value, float("inf"), False)
    s = r.certificate.dual_signal
    sup = float(np.max(np.abs(d.analyze(s))))
    dual = _dual_value(s, f)
    gap = r.l1_value - dual
    passed = sup <= 1.0 + 1e-6 and gap <= tol * max(r.l1_value, 1e-300)
    if r.l1_value == 0.0:
        passed = sup <= 1.0 + 1e-6 and abs(gap) == 0.0
    return KKTReport(sup, dual, r.l1_value, gap, bool(passed))


def recovery_success(alpha_hat, alpha_true, rel_tol: float = 1e-3) -> bool:
    """``||alpha_hat - alpha|| <= rel_tol ||alpha||`` (absolute when alpha = 0)."""
    a = alpha_hat.entries if isinstance(alpha_hat, CoefficientVector) else np.asarray(alpha_hat)
    b = alpha_true.entries if isinstance(alpha_true, CoefficientVector) else np.asarray(alpha_true)
    if a.shape != b.shape:
        raise ValueError("coefficient vectors differ in length")
    ref = np.linalg.norm(b)
    err = np.linalg.norm(a - b)
    if ref == 0:
        return bool(err <= rel_tol)
    return bool(err <= rel_tol * ref)
