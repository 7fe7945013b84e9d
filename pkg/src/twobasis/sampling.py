"""Random supports, random coefficients and support-size budgets.

Every sampler is a pure function of its arguments and an integer seed, so
trials can run in any order (or in parallel) and reproduce bit for bit.
Logarithms are natural logarithms throughout.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dictionary import CoefficientVector

__all__ = [
    "ExtrapolationWarning",
    "SamplingParams",
    "SupportPair",
    "CoefficientModel",
    "TailCheckReport",
    "sample_support_pair",
    "sample_support_exact",
    "sample_support_random_split",
    "sample_coefficients",
    "qrup_budget",
    "l1_budget",
    "empirical_tail_check",
    "rng_for",
]

QRUP_FINITE_CONSTANT = 0.2660
L1_LEADING_CONSTANT = 1.0 / 8.0


class ExtrapolationWarning(UserWarning):
    """A budget formula was evaluated outside ``n >= 512, beta >= 1``."""


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for an independent sub-stream of ``seed``."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, stream])


@dataclass(frozen=True)
class SamplingParams:
    n: int
    p1: float
    p2: float
    beta: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        for p in (self.p1, self.p2):
            if not 0.0 <= p <= 1.0:
                raise ValueError("Bernoulli rates must lie in [0, 1]")
        if self.beta <= 0:
            raise ValueError("beta must be positive")


@dataclass(frozen=True, eq=False)
class SupportPair:
    """Spike support ``t_set`` and second-basis support ``omega_set``."""

    t_set: np.ndarray
    omega_set: np.ndarray
    n: int

    def __post_init__(self):
        t = np.asarray(self.t_set, dtype=np.int64)
        w = np.asarray(self.omega_set, dtype=np.int64)
        for s in (t, w):
            if s.ndim != 1:
                raise ValueError("supports are 1-D index sets")
            if s.size and (s.min() < 0 or s.max() >= self.n):
                raise IndexError("support index out of range")
            if np.unique(s).size != s.size:
                raise ValueError("support contains duplicates")
        t, w = np.sort(t), np.sort(w)
        t.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "t_set", t)
        object.__setattr__(self, "omega_set", w)

    @property
    def gamma(self) -> np.ndarray:
        """Combined dictionary support ``T  u  (Omega + n)``."""
        return np.concatenate([self.t_set, self.omega_set + self.n])

    @property
    def size(self) -> int:
        return self.t_set.size + self.omega_set.size

    @classmethod
    def from_gamma(cls, gamma, n: int) -> "SupportPair":
        gamma = np.asarray(gamma, dtype=np.int64)
        return cls(gamma[gamma < n], gamma[gamma >= n] - n, n)

    def __eq__(self, other):
        if not isinstance(other, SupportPair):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.t_set, other.t_set)
            and np.array_equal(self.omega_set, other.omega_set)
        )

    def __hash__(self):
        return hash((self.n, self.t_set.tobytes(), self.omega_set.tobytes()))


@dataclass(frozen=True)
class CoefficientModel:
    """Circularly symmetric coefficient law.

    ``complex_gaussian`` draws real and imaginary parts as independent
    centred normals of variance ``scale**2 / 2``; ``unit_modulus`` draws
    ``scale * exp(i*theta)`` with uniform phase.
    """

    magnitude_law: str = "complex_gaussian"
    scale: float = 1.0

    def __post_init__(self):
        if self.magnitude_law not in ("complex_gaussian", "unit_modulus"):
            raise ValueError(f"unknown magnitude law {self.magnitude_law!r}")
        if not self.scale > 0:
            raise ValueError("scale must be positive")


def sample_support_pair(params: SamplingParams, rng_seed: int) -> SupportPair:
    """Independent Bernoulli(p1) spike support and Bernoulli(p2) second support."""
    rng = rng_for(rng_seed, 0)
    u = rng.random((2, params.n))
    return SupportPair(
        np.flatnonzero(u[0] < params.p1), np.flatnonzero(u[1] < params.p2), params.n
    )


def sample_support_exact(n: int, k1: int, k2: int, rng_seed: int) -> SupportPair:
    """Uniform ``k1``-subset of spikes and independent uniform ``k2``-subset."""
    if not (0 <= k1 <= n and 0 <= k2 <= n):
        raise ValueError(f"support sizes ({k1}, {k2}) out of range for n={n}")
    rng = rng_for(rng_seed, 0)
    t = rng.choice(n, size=k1, replace=False)
    w = rng.choice(n, size=k2, replace=False)
    return SupportPair(t, w, n)


def sample_support_random_split(n: int, k: int, rng_seed: int) -> SupportPair:
    """Uniform ``k``-subset of all ``2n`` atoms; the split between bases is random."""
    if not 0 <= k <= 2 * n:
        raise ValueError(f"support size {k} out of range for n={n}")
    rng = rng_for(rng_seed, 0)
    return SupportPair.from_gamma(rng.choice(2 * n, size=k, replace=False), n)


def sample_coefficients(
    support: SupportPair, model: CoefficientModel, rng_seed: int
) -> CoefficientVector:
    gamma = support.gamma
    rng = rng_for(rng_seed, 1)
    if model.magnitude_law == "complex_gaussian":
        z = rng.standard_normal((2, gamma.size))
        vals = model.scale * (z[0] + 1j * z[1]) / np.sqrt(2.0)
    else:
        vals = model.scale * np.exp(2j * np.pi * rng.random(gamma.size))
    entries = np.zeros(2 * support.n, dtype=np.complex128)
    entries[gamma] = vals
    # a Gaussian draw of exactly 0 has probability zero; keep the support honest
    return CoefficientVector(entries, gamma[vals != 0])


def _check_regime(n, beta, name):
    if n < 512 or beta < 1:
        warnings.warn(
            f"{name}(n={n}, beta={beta}) is outside n >= 512, beta >= 1; value extrapolated",
            ExtrapolationWarning,
            stacklevel=3,
        )


def qrup_budget(n: int, beta: float) -> float:
    """Finite-sample budget ``0.2660 n / sqrt((beta+1) ln n)`` for ``E|T| + E|Omega|``.

    Emits :class:`ExtrapolationWarning` outside ``n >= 512, beta >= 1``.
    """
    _check_regime(n, beta, "qrup_budget")
    return QRUP_FINITE_CONSTANT * n / math.sqrt((beta + 1.0) * math.log(n))


def l1_budget(n: int, beta: float) -> float:
    """Leading-order budget ``n / (8 (beta+1) ln n)``; the o(1) term is dropped."""
    _check_regime(n, beta, "l1_budget")
    return L1_LEADING_CONSTANT * n / ((beta + 1.0) * math.log(n))


@dataclass(frozen=True)
class TailCheckReport:
    empirical: float
    bound: float
    sigma: float
    trials: int
    epsilon: float
    passed: bool


def empirical_tail_check(bounds, trials: int, epsilon: float, rng_seed: int,
                         chunk: int = 20000) -> TailCheckReport:
    """Monte Carlo check of the complex Hoeffding tail bound.

    Each trial forms ``sum_j X_j`` with ``X_j = a_j * exp(i*theta_j)``, theta
    uniform, which is zero-mean, circularly symmetric and bounded by ``a_j``.
    The empirical frequency of ``|sum| >= epsilon`` is compared with
    ``4 exp(-epsilon**2 / (4 ||a||^2))``; the check passes when the frequency
    does not exceed the bound by more than three Monte Carlo standard errors.
    """
    if trials < 1000:
        raise ValueError("empirical_tail_check needs at least 1000 trials")
    a = np.asarray(bounds, dtype=float)
    if np.any(a < 0):
        raise ValueError("bounds must be nonnegative")
    a2 = float(np.sum(a * a))
    if a2 == 0.0:
        bound = 4.0 if epsilon <= 0 else 0.0
    else:
        bound = 4.0 * math.exp(-epsilon**2 / (4.0 * a2))
    rng = rng_for(rng_seed, 2)
    hits = 0
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        phases = np.exp(2j * np.pi * rng.random((m, a.size)))
        sums = phases @ a.astype(np.complex128)
        hits += int(np.count_nonzero(np.abs(sums) >= epsilon))
        done += m
    p = hits / trials
    sigma = math.sqrt(max(p * (1.0 - p), 1.0 / trials) / trials)
    return TailCheckReport(p, bound, sigma, trials, float(epsilon), p <= bound + 3 * sigma)
