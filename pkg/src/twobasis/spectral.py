"""Partial cross-basis operators and their spectra.

For supports ``T`` (spikes) and ``Omega`` (second basis) the partial operator
is ``A = R_Omega B^* R_T^*``, an ``|Omega| x |T|`` block of the change of
basis. For the spike/Fourier pair its entries are
``exp(-2j*pi*w*t/N) / sqrt(N)``. The Gram matrix of the selected atoms is
``Phi_G^* Phi_G = [[I, A^*], [A, I]]``; we write ``G = I - Phi_G^* Phi_G``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dictionary import PairDictionary, make_dictionary
from .sampling import SupportPair

__all__ = [
    "PartialOperator",
    "SpectralReport",
    "partial_operator",
    "auxiliary_matrix",
    "operator_norm_sq",
    "power_iteration",
    "gram_matrix",
    "gram_spectrum",
    "trace_identity_check",
    "trace_gsg",
    "qrup_check",
]

DENSE_LIMIT = 2048
QRUP_THRESHOLD = 0.5


@dataclass(frozen=True, eq=False)
class PartialOperator:
    matrix: np.ndarray
    t_set: np.ndarray
    omega_set: np.ndarray
    n: int


@dataclass(frozen=True)
class SpectralReport:
    """Spectral summary of one support pair.

    ``aux_norm`` is only defined for the spike/Fourier pair (``None``
    otherwise). ``pairing_error`` is the largest deviation between the
    sorted Gram spectrum and ``1 -+ singular values of A`` padded with ones.
    """

    op_norm_sq: float
    gram_min_eig: float
    gram_max_eig: float
    aux_norm: Optional[float]
    trace_gsg: float
    qrup_pass: bool
    pairing_error: float
    null_dim: int


def partial_operator(d: PairDictionary, s: SupportPair) -> PartialOperator:
    if s.n != d.n:
        raise ValueError("support pair and dictionary disagree on n")
    t, w = s.t_set, s.omega_set
    if d.basis2_matrix is None:
        mat = np.exp(-2j * np.pi * np.outer(w, t) / d.n) / np.sqrt(d.n)
    else:
        # <b_w, e_t> = conj(B[t, w])
        mat = np.ascontiguousarray(d.basis2_matrix[np.ix_(t, w)].conj().T)
    return PartialOperator(mat, t, w, d.n)


def auxiliary_matrix(s: SupportPair, n: int) -> np.ndarray:
    """Zero-diagonal ``|T| x |T|`` matrix of sums ``sum_w exp(2j*pi*w*(t - t')/n)``.

    Satisfies ``n * A^* A = |Omega| I + H`` for the spike/Fourier pair.
    """
    t = s.t_set
    diff = t[:, None] - t[None, :]
    h = np.exp(2j * np.pi * np.multiply.outer(diff, s.omega_set) / n).sum(axis=-1)
    np.fill_diagonal(h, 0.0)
    return h


def power_iteration(apply, dim, tol=1e-10, max_iter=10000, seed=0):
    """Largest eigenvalue of a Hermitian PSD operator given as a callable."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = apply(x)
        new = float(np.real(np.vdot(x, y)))
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        x = y / ny
        if abs(new - lam) <= tol * max(abs(new), 1e-300):
            return new
        lam = new
    return lam


def operator_norm_sq(a) -> float:
    """``||A^* A||``, the squared spectral norm; 0 for an empty operator."""
    m = a.matrix if isinstance(a, PartialOperator) else np.asarray(a)
    if m.size == 0:
        return 0.0
    rows, cols = m.shape
    if min(rows, cols) <= DENSE_LIMIT:
        small = m.conj().T @ m if cols <= rows else m @ m.conj().T
        return float(max(np.linalg.eigvalsh(small)[-1], 0.0))
    return power_iteration(lambda x: m.conj().T @ (m @ x), cols)


def gram_matrix(d: PairDictionary, gamma) -> np.ndarray:
    phi = d.atoms(gamma)
    return phi.conj().T @ phi


def trace_gsg(d: PairDictionary, s: SupportPair) -> float:
    """``Tr(G^* G)`` from the assembled Gram matrix."""
    g = np.eye(s.size) - gram_matrix(d, s.gamma)
    return float(np.real(np.sum(g * g.conj())))


def gram_spectrum(d: PairDictionary, s: SupportPair, null_tol: float = 1e-8) -> SpectralReport:
    if s.size < 1:
        raise ValueError("gram_spectrum needs a nonempty support")
    gram = gram_matrix(d, s.gamma)
    eigs = np.linalg.eigvalsh(gram)
    a = partial_operator(d, s)
    if a.matrix.size:
        sv = np.linalg.svd(a.matrix, compute_uv=False)
    else:
        sv = np.zeros(0)
    pad = np.ones(s.size - 2 * sv.size)
    predicted = np.sort(np.concatenate([1 - sv, 1 + sv, pad]))
    nsq = float(sv[0] ** 2) if sv.size else 0.0
    g = np.eye(s.size) - gram
    aux = None
    if d.kind == "spike_fourier":
        h = auxiliary_matrix(s, d.n)
        aux = float(np.linalg.norm(h, 2)) if h.size else 0.0
    return SpectralReport(
        op_norm_sq=nsq,
        gram_min_eig=float(eigs[0]),
        gram_max_eig=float(eigs[-1]),
        aux_norm=aux,
        trace_gsg=float(np.real(np.sum(g * g.conj()))),
        qrup_pass=nsq <= QRUP_THRESHOLD,
        pairing_error=float(np.max(np.abs(predicted - eigs))),
        null_dim=int(np.count_nonzero(eigs < null_tol)),
    )


def trace_identity_check(s: SupportPair, n: int):
    """Return ``(Tr(G^*G) computed, 2|T||Omega|/n)`` for the spike/Fourier pair."""
    predicted = 2.0 * s.t_set.size * s.omega_set.size / n
    if s.size == 0:
        return 0.0, predicted
    return trace_gsg(make_dictionary(n, "spike_fourier"), s), predicted


def qrup_check(d: PairDictionary, s: SupportPair):
    """Return ``(passed, report)`` where ``passed`` means ``||A^*A|| <= 1/2``.

    A pass implies every signal supported on ``T`` keeps at most half its
    energy on ``Omega`` in the second basis, and vice versa.
    """
    if s.size == 0:
        report = SpectralReport(0.0, 1.0, 1.0, 0.0, 0.0, True, 0.0, 0)
        return True, report
    report = gram_spectrum(d, s)
    return report.qrup_pass, report
