import itertools

import numpy as np
import pytest

from twobasis import make_dictionary
from twobasis.dictionary import CoefficientVector
from twobasis.l0 import (EnumerationGuardError, is_prime, l0_agrees_with_l1, l0_solve,
                         null_space_dim, prime_sweep)
from twobasis.sampling import CoefficientModel, SupportPair, sample_coefficients


def random_alpha(rng, n, k):
    gamma = rng.choice(2 * n, size=k, replace=False)
    return sample_coefficients(SupportPair.from_gamma(gamma, n), CoefficientModel(),
                               int(rng.integers(2**62)))


class TestL0Solve:
    def test_zero(self):
        r = l0_solve(make_dictionary(8), np.zeros(8))
        assert r.l0_value == 0 and r.unique and not np.any(r.minimizers[0].entries)

    def test_dirac_comb_not_unique(self):
        d = make_dictionary(4)
        r = l0_solve(d, [1, 0, 1, 0])
        assert r.l0_value == 2 and not r.unique
        assert [tuple(m.support) for m in r.minimizers] == [(0, 2), (4, 6)]
        for m in r.minimizers:
            np.testing.assert_allclose(d.synthesize(m), [1, 0, 1, 0], atol=1e-12)

    def test_prime_unique(self, rng):
        d = make_dictionary(7)
        for _ in range(10):
            alpha = random_alpha(rng, 7, 3)
            r = l0_solve(d, d.synthesize(alpha), max_support=3)
            assert r.unique and r.l0_value == 3
            np.testing.assert_allclose(r.minimizers[0].entries, alpha.entries, atol=1e-8)

    def test_minimizers_are_feasible(self, rng):
        d = make_dictionary(6, "spike_random", seed=2)
        alpha = random_alpha(rng, 6, 2)
        f = d.synthesize(alpha)
        r = l0_solve(d, f, 3)
        for m in r.minimizers:
            assert m.support.size == r.l0_value
            assert np.linalg.norm(d.synthesize(m) - f) <= 1e-8 * np.linalg.norm(f)

    def test_no_smaller_support_fits(self, rng):
        d = make_dictionary(5)
        alpha = random_alpha(rng, 5, 2)
        f = d.synthesize(alpha)
        r = l0_solve(d, f, 3)
        phi = d.atoms(np.arange(10))
        for g in range(10):
            coef, *_ = np.linalg.lstsq(phi[:, [g]], f, rcond=None)
            assert np.linalg.norm(phi[:, [g]] @ coef - f) > 1e-8 * np.linalg.norm(f)
        assert r.l0_value == 2

    def test_not_found(self, rng):
        d = make_dictionary(8)
        f = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        r = l0_solve(d, f, max_support=2)
        assert r.status == "not_found" and not r.minimizers

    def test_guard(self):
        with pytest.raises(EnumerationGuardError):
            l0_solve(make_dictionary(17), np.ones(17))
        with pytest.raises(EnumerationGuardError):
            l0_solve(make_dictionary(8), np.ones(8), max_support=9)

    def test_relabeling_permutes_minimizers(self, rng):
        n = 4
        d = make_dictionary(n, "spike_random", seed=9)
        perm_b = rng.permutation(n)
        b2 = d.basis2_matrix[:, perm_b]
        d2 = make_dictionary(n, "custom", basis2=b2)
        alpha = random_alpha(rng, n, 2)
        f = d.synthesize(alpha)
        r1 = l0_solve(d, f, 3)
        r2 = l0_solve(d2, f, 3)
        # atom w of d2's second basis is atom perm_b[w] of d's
        inverse = np.argsort(perm_b)
        mapped = sorted(
            tuple(sorted(g if g < n else n + inverse[g - n] for g in m.support)) for m in r1.minimizers
        )
        assert mapped == sorted(tuple(m.support) for m in r2.minimizers)


class TestAgreement:
    def test_single_spike(self):
        alpha = np.zeros(16)
        alpha[2] = 1.5
        assert l0_agrees_with_l1(make_dictionary(8), CoefficientVector.from_dense(alpha))

    def test_dirac_comb(self):
        alpha = np.zeros(8)
        alpha[[0, 2]] = 1
        assert not l0_agrees_with_l1(make_dictionary(4), alpha)

    def test_random_toy(self):
        d = make_dictionary(8)
        rng = np.random.default_rng(77)
        hits = sum(l0_agrees_with_l1(d, random_alpha(rng, 8, 2)) for _ in range(50))
        assert hits >= 49


class TestNullSpace:
    def test_single_atom(self):
        assert null_space_dim(make_dictionary(8), [3]) == 0

    def test_all_atoms(self):
        assert null_space_dim(make_dictionary(4), np.arange(8)) == 4

    def test_dirac_comb(self):
        assert null_space_dim(make_dictionary(4), [0, 2, 4, 6]) == 1

    def test_random_bound(self):
        rng = np.random.default_rng(3)
        d = make_dictionary(8)
        for _ in range(500):
            k = int(rng.integers(1, 16))
            gamma = rng.choice(16, size=k, replace=False)
            assert null_space_dim(d, gamma) < k / 2

    def test_exhaustive_n4(self):
        d = make_dictionary(4)
        for k in range(1, 8):
            for gamma in itertools.combinations(range(8), k):
                assert null_space_dim(d, gamma) < k / 2


class TestPrimeSweep:
    def test_seven(self):
        r = prime_sweep(7, 100, seed=0)
        assert r.unique_count == 100 and r.recovered_count == 100 and r.passed

    def test_five_uncertainty_principle(self):
        r = prime_sweep(5, 20, seed=1)
        assert r.up_checks == 31 and r.up_violations == 0

    def test_eleven(self):
        assert prime_sweep(11, 10, seed=2).passed

    @pytest.mark.parametrize("n", [4, 9, 17, 1])
    def test_rejects(self, n):
        with pytest.raises(ValueError):
            prime_sweep(n, 5)

    def test_composite_counterexample(self):
        # the comb on n = 4 has |supp f| + |supp fhat| = 4 = n
        f = np.array([1, 0, 1, 0], dtype=complex)
        assert np.count_nonzero(np.abs(np.fft.fft(f)) > 1e-8) + 2 == 4

    def test_is_prime(self):
        assert [p for p in range(20) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19]
