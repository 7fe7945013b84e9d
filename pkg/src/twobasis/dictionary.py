"""Two-orthobasis dictionaries on C^N.

The first basis is always the spike (identity) basis. The second basis is
either the Fourier basis, applied with FFTs, or a dense unitary matrix.
Dictionary index ``g < n`` is spike ``g``; index ``g >= n`` is atom ``g - n``
of the second basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "KINDS",
    "CoefficientVector",
    "PairDictionary",
    "as_signal",
    "dft",
    "idft",
    "make_dictionary",
    "synthesize",
    "analyze",
    "mutual_incoherence",
]

KINDS = ("spike_fourier", "spike_random", "custom")

_UNITARY_TOL = 1e-10


def as_signal(f, n=None):
    """Return `f` as a 1-D complex128 array, optionally checking its length."""
    arr = np.asarray(f, dtype=np.complex128)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("a signal must be a non-empty 1-D sequence")
    if n is not None and arr.size != n:
        raise ValueError(f"signal has length {arr.size}, expected {n}")
    return arr


def dft(f):
    """Unitary DFT, ``fhat[w] = N**-0.5 * sum_t f[t] exp(-2j*pi*w*t/N)``."""
    return np.fft.fft(as_signal(f), norm="ortho")


def idft(fhat):
    """Inverse of :func:`dft` (positive exponent, same normalization)."""
    return np.fft.ifft(as_signal(fhat), norm="ortho")


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Length-2N coefficient vector together with its support.

    Use :meth:`from_dense` to build one from raw entries; the support is then
    the set of exactly nonzero entries.
    """

    entries: np.ndarray
    support: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.complex128)
        support = np.unique(np.asarray(self.support, dtype=np.int64))
        if entries.ndim != 1 or entries.size % 2:
            raise ValueError("coefficient vectors have even length 2N")
        if support.size and (support[0] < 0 or support[-1] >= entries.size):
            raise ValueError("support index out of range")
        off = np.ones(entries.size, dtype=bool)
        off[support] = False
        if np.any(entries[off] != 0):
            raise ValueError("nonzero coefficient outside the declared support")
        entries.setflags(write=False)
        support.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "support", support)

    @classmethod
    def from_dense(cls, entries) -> "CoefficientVector":
        entries = np.asarray(entries, dtype=np.complex128)
        return cls(entries, np.flatnonzero(entries))

    @classmethod
    def zeros(cls, n: int) -> "CoefficientVector":
        return cls(np.zeros(2 * n, dtype=np.complex128), np.zeros(0, dtype=np.int64))

    @property
    def n(self) -> int:
        return self.entries.size // 2

    @property
    def first(self) -> np.ndarray:
        return self.entries[: self.n]

    @property
    def second(self) -> np.ndarray:
        return self.entries[self.n :]

    def sign(self) -> np.ndarray:
        """Entrywise ``alpha/|alpha|`` with ``sgn(0) = 0``."""
        mag = np.abs(self.entries)
        out = np.zeros_like(self.entries)
        nz = mag > 0
        out[nz] = self.entries[nz] / mag[nz]
        return out

    def l1_norm(self) -> float:
        return float(np.abs(self.entries).sum())

    def __eq__(self, other):
        if not isinstance(other, CoefficientVector):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())


def _coeffs(a, n):
    if isinstance(a, CoefficientVector):
        arr = a.entries
    else:
        arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 1 or arr.size != 2 * n:
        raise ValueError(f"coefficient vector has length {arr.size}, expected {2 * n}")
    return arr


@dataclass(frozen=True, eq=False)
class PairDictionary:
    """Dictionary ``Phi = [I, B]`` made of the spike basis and a unitary ``B``.

    Attributes
    ----------
    n : int
        Signal length.
    kind : str
        One of ``spike_fourier``, ``spike_random`` or ``custom``.
    basis2_matrix : ndarray or None
        Dense ``n x n`` unitary whose columns are the second-basis atoms.
        ``None`` for ``spike_fourier``.
    seed : int or None
        Seed used to draw ``basis2_matrix`` for ``spike_random``.
    """

    n: int
    kind: str
    basis2_matrix: Optional[np.ndarray] = field(default=None, repr=False)
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown dictionary kind {self.kind!r}")
        if self.basis2_matrix is not None:
            self.basis2_matrix.setflags(write=False)

    # -- second basis -----------------------------------------------------
    def basis2_synthesize(self, coef):
        if self.basis2_matrix is None:
            return np.fft.ifft(coef, norm="ortho")
        return self.basis2_matrix @ coef

    def basis2_analyze(self, f):
        if self.basis2_matrix is None:
            return np.fft.fft(f, norm="ortho")
        return self.basis2_matrix.conj().T @ f

    # -- whole dictionary -------------------------------------------------
    def synthesize(self, a) -> np.ndarray:
        arr = _coeffs(a, self.n)
        return arr[: self.n] + self.basis2_synthesize(arr[self.n :])

    def analyze(self, f) -> np.ndarray:
        f = as_signal(f, self.n)
        return np.concatenate([f, self.basis2_analyze(f)])

    def basis2_atoms(self, idx) -> np.ndarray:
        """Dense ``n x len(idx)`` matrix of second-basis atoms."""
        idx = np.asarray(idx, dtype=np.int64)
        if self.basis2_matrix is not None:
            return self.basis2_matrix[:, idx]
        t = np.arange(self.n)
        return np.exp(2j * np.pi * np.outer(t, idx) / self.n) / np.sqrt(self.n)

    def atoms(self, gamma) -> np.ndarray:
        """Dense ``n x |gamma|`` matrix ``Phi_Gamma`` of dictionary columns."""
        gamma = np.asarray(gamma, dtype=np.int64)
        if gamma.size and (gamma.min() < 0 or gamma.max() >= 2 * self.n):
            raise IndexError("dictionary index out of range")
        out = np.zeros((self.n, gamma.size), dtype=np.complex128)
        spikes = gamma < self.n
        out[gamma[spikes], np.flatnonzero(spikes)] = 1.0
        second = ~spikes
        if second.any():
            out[:, second] = self.basis2_atoms(gamma[second] - self.n)
        return out

    def basis2_dense(self) -> np.ndarray:
        if self.basis2_matrix is not None:
            return np.asarray(self.basis2_matrix)
        return self.basis2_atoms(np.arange(self.n))


def _random_unitary(n, seed):
    # Haar measure: QR of a complex Ginibre matrix, phases of diag(R) fixed.
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def make_dictionary(n, kind="spike_fourier", seed=None, basis2=None) -> PairDictionary:
    """Build a spike + second-basis dictionary.

    Parameters
    ----------
    n : int
        Signal length, at least 2.
    kind : {'spike_fourier', 'spike_random', 'custom'}
        Which second basis to use. Dashes are accepted in place of
        underscores.
    seed : int, optional
        Required for ``spike_random``; the same seed gives a bit-identical
        basis.
    basis2 : array_like, optional
        Unitary ``n x n`` matrix, required for ``custom``.
    """
    kind = str(kind).replace("-", "_")
    n = int(n)
    if n < 2:
        raise ValueError("dictionary needs n >= 2")
    if kind == "spike_fourier":
        return PairDictionary(n, kind)
    if kind == "spike_random":
        if seed is None:
            raise ValueError("spike_random dictionaries need a seed")
        return PairDictionary(n, kind, _random_unitary(n, int(seed)), int(seed))
    if kind == "custom":
        if basis2 is None:
            raise ValueError("custom dictionaries need basis2")
        b = np.array(basis2, dtype=np.complex128)
        if b.shape != (n, n):
            raise ValueError(f"basis2 must be {n}x{n}")
        if not np.allclose(b.conj().T @ b, np.eye(n), atol=_UNITARY_TOL * n):
            raise ValueError("basis2 is not unitary")
        return PairDictionary(n, kind, b, seed)
    raise ValueError(f"unknown dictionary kind {kind!r}")


def synthesize(d: PairDictionary, a) -> np.ndarray:
    """``Phi @ a``: first N coefficients on spikes, last N on the second basis."""
    return d.synthesize(a)


def analyze(d: PairDictionary, f) -> np.ndarray:
    """``Phi^* f``, the stacked analyses in both bases (length 2N)."""
    return d.analyze(f)


def mutual_incoherence(d: PairDictionary) -> float:
    """Largest ``|<spike_t, b_w>|`` over all atom pairs.

    Since the first basis is the identity, this is the largest entry modulus
    of the second-basis matrix. For the Fourier basis every entry has modulus
    ``1/sqrt(n)``.
    """
    if d.basis2_matrix is None:
        return 1.0 / np.sqrt(d.n)
    return float(np.abs(d.basis2_matrix).max())
