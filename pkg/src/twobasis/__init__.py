"""Sparse decomposition over pairs of orthobases.

Basis pursuit recovery, dual certificates, partial-operator spectra and the
Monte Carlo sweeps that measure where recovery breaks down.
"""

__version__ = "0.1.0"

from .dictionary import (CoefficientVector, PairDictionary, analyze, dft, idft,
                         make_dictionary, mutual_incoherence, synthesize)
from .l0 import l0_agrees_with_l1, l0_solve, null_space_dim, prime_sweep
from .l1 import (DualCertificate, GramSingularError, SolveResult, SolverConfig,
                 basis_pursuit, certificate_valid, kkt_check, min_energy_dual,
                 recovery_success)
from .sampling import (CoefficientModel, SamplingParams, SupportPair, empirical_tail_check,
                       l1_budget, qrup_budget, sample_coefficients, sample_support_exact,
                       sample_support_pair)
from .spectral import (auxiliary_matrix, gram_spectrum, operator_norm_sq, partial_operator,
                       qrup_check, trace_identity_check)
