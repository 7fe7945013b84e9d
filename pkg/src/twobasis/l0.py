"""Exhaustive l0 decomposition for small dictionaries.

Supports are enumerated by increasing size; each one is fitted by least
squares and accepted when the relative residual is at most ``1e-8``. All
minimal supports are returned, so non-uniqueness is visible rather than
silently broken by tie rules.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .dictionary import CoefficientVector, PairDictionary, as_signal, dft, make_dictionary
from .l1 import SolverConfig, basis_pursuit, recovery_success
from .sampling import CoefficientModel, SupportPair, rng_for, sample_coefficients

__all__ = [
    "EnumerationGuardError",
    "L0Result",
    "PrimeSweepReport",
    "l0_solve",
    "l0_agrees_with_l1",
    "null_space_dim",
    "prime_sweep",
    "is_prime",
]

MAX_N = 16
MAX_SUPPORT = 8
RESIDUAL_TOL = 1e-8
NULL_TOL = 1e-8
_BATCH = 4096


class EnumerationGuardError(ValueError):
    """Raised when an exhaustive search would exceed ``n <= 16, k <= 8``."""


@dataclass(frozen=True)
class L0Result:
    minimizers: List[CoefficientVector]
    l0_value: int
    unique: bool
    status: str = "found"


@dataclass(frozen=True)
class PrimeSweepReport:
    n: int
    trials: int
    unique_count: int
    recovered_count: int
    up_checks: int
    up_violations: int
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (self.unique_count == self.trials and self.recovered_count == self.trials
                and self.up_violations == 0)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, math.isqrt(n) + 1))


def _feasible_supports(phi, f, k):
    """Yield ``(support, coef)`` for every size-``k`` column subset fitting ``f``."""
    m = phi.shape[1]
    fnorm = np.linalg.norm(f)
    combos = itertools.combinations(range(m), k)
    while True:
        block = np.array(list(itertools.islice(combos, _BATCH)), dtype=np.int64)
        if block.size == 0:
            return
        a = phi[:, block].transpose(1, 0, 2)  # (batch, n, k)
        ah = a.conj().transpose(0, 2, 1)
        gram = ah @ a
        # rank-deficient supports span the same space as a smaller one; at the
        # minimal size they cannot be feasible, so skipping them is safe
        ok = np.linalg.eigvalsh(gram)[:, 0] > 1e-10
        if not ok.any():
            continue
        a, ah, gram, block = a[ok], ah[ok], gram[ok], block[ok]
        coef = np.linalg.solve(gram, (ah @ f)[..., None])[..., 0]
        res = np.linalg.norm((a @ coef[..., None])[..., 0] - f, axis=1)
        for idx in np.flatnonzero(res <= RESIDUAL_TOL * fnorm):
            yield block[idx], coef[idx]


def l0_solve(d: PairDictionary, f, max_support: int = MAX_SUPPORT) -> L0Result:
    """Sparsest exact decompositions of ``f`` with at most ``max_support`` atoms.

    Raises
    ------
    EnumerationGuardError
        If ``d.n > 16`` or ``max_support > 8``.
    """
    if d.n > MAX_N or max_support > MAX_SUPPORT:
        raise EnumerationGuardError(
            f"exhaustive search limited to n <= {MAX_N}, k <= {MAX_SUPPORT}"
        )
    f = as_signal(f, d.n)
    if np.linalg.norm(f) == 0:
        return L0Result([CoefficientVector.zeros(d.n)], 0, True)
    phi = d.atoms(np.arange(2 * d.n))
    for k in range(1, max_support + 1):
        found = []
        for support, coef in _feasible_supports(phi, f, k):
            entries = np.zeros(2 * d.n, dtype=np.complex128)
            entries[support] = coef
            found.append(CoefficientVector(entries, support))
        if found:
            found.sort(key=lambda c: tuple(c.support))
            return L0Result(found, k, len(found) == 1)
    return L0Result([], -1, False, "not_found")


def l0_agrees_with_l1(d: PairDictionary, alpha, rel_tol: float = 1e-3,
                      cfg: SolverConfig = None) -> bool:
    """True iff the l0 solution is unique, equals ``alpha``, and l1 finds it too."""
    if not isinstance(alpha, CoefficientVector):
        alpha = CoefficientVector.from_dense(alpha)
    f = d.synthesize(alpha)
    k = max(int(alpha.support.size), 1)
    res = l0_solve(d, f, max_support=min(k, MAX_SUPPORT))
    if not (res.unique and recovery_success(res.minimizers[0], alpha, rel_tol)):
        return False
    return recovery_success(basis_pursuit(d, f, cfg).alpha_hat, alpha, rel_tol)


def null_space_dim(d: PairDictionary, gamma) -> int:
    """Number of singular values of ``Phi_Gamma`` below ``1e-8``, plus the
    columns in excess of ``n`` (which are always null directions)."""
    gamma = np.asarray(gamma, dtype=np.int64)
    if gamma.size == 0:
        return 0
    sv = np.linalg.svd(d.atoms(gamma), compute_uv=False)
    return int(gamma.size - sv.size + np.count_nonzero(sv < NULL_TOL))


def _support_size(v):
    mag = np.abs(v)
    return int(np.count_nonzero(mag > 1e-8 * mag.max()))


def prime_sweep(n: int, trials: int, seed: int = 0) -> PrimeSweepReport:
    """Random l0-uniqueness checks and uncertainty-principle checks at prime ``n``.

    Each trial draws a total support size ``k`` in ``[1, n // 2]``, a uniform
    random ``k``-subset of the ``2n`` atoms and Gaussian coefficients, then
    asks the exhaustive solver for all sparsest decompositions. Separately, a
    random signal on every nonempty spike support (``n <= 7``) or on one
    random support per trial (larger ``n``) is checked for
    ``|supp f| + |supp fhat| > n``.
    """
    if not is_prime(n) or n > 13:
        raise ValueError(f"prime_sweep needs a prime n <= 13, got {n}")
    d = make_dictionary(n, "spike_fourier")
    unique = recovered = 0
    failures = []
    for trial in range(trials):
        rng = rng_for(seed, trial)
        k = int(rng.integers(1, n // 2 + 1))
        gamma = rng.choice(2 * n, size=k, replace=False)
        support = SupportPair.from_gamma(gamma, n)
        alpha = sample_coefficients(support, CoefficientModel(), int(rng.integers(2**63)))
        res = l0_solve(d, d.synthesize(alpha), max_support=k)
        if res.unique:
            unique += 1
            if recovery_success(res.minimizers[0], alpha, 1e-6):
                recovered += 1
                continue
        failures.append(trial)

    checks = violations = 0
    rng = rng_for(seed, trials + 1)
    if n <= 7:
        supports = [
            np.array(t) for k in range(1, n + 1) for t in itertools.combinations(range(n), k)
        ]
    else:
        supports = [
            rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False) for _ in range(trials)
        ]
    for t in supports:
        f = np.zeros(n, dtype=np.complex128)
        f[t] = rng.standard_normal(t.size) + 1j * rng.standard_normal(t.size)
        checks += 1
        if _support_size(f) + _support_size(dft(f)) <= n:
            violations += 1
    return PrimeSweepReport(n, trials, unique, recovered, checks, violations, failures)
