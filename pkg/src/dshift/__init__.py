"""Exact and numerical invariants of monomial submodules of the finite-rank d-shift."""

__version__ = "0.1.0"

from .lattice import MonomialSubmodule, curvature, fiber, graded_dims, leq, minimalize
from .fock import adjoint, defect, fock_norm_sq, self_commutator, shift_tuple, truncated_shift, verify_identities
from .schatten import commutator_spectrum, number_operator_series, numeric_singular_values, schatten_sum, tail_exponent
from .dirac import block_kernel_dims, creation_matrices, dirac_block, dirac_index, verify_index_formulas
from .probe import HomogeneousGeneratorSet, decay_verdict, graded_subspace_bases, probe_commutator_decay
