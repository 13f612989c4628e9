"""jspec: spectra of doubly infinite complex Jacobi operators.

The point spectrum, eigenvectors, generalized eigenvectors, and resolvent of
a doubly infinite Jacobi operator are computed through its characteristic
function: an analytic function whose zeros are exactly the eigenvalues, with
zero orders equal to algebraic multiplicities.  Renormalized variants extend
the function across the closure of the diagonal sequence for operators with
compactness structure (compact, compact-resolvent, or mixed).
"""

from .errors import (AmbiguousMatch, Budget, ConfigError, ContourDeadlock,
                     DepthExceeded, Inconsistent, JspecError, NearSpectrum,
                     NegativeInput, NonConvergent, NoTailBound, OnContourZero,
                     PoleArgument, PoleAtBase, PoleHit, TooLong,
                     WindowTooSmall, ZeroArgument, ZeroVector)
from .jets import Jet
from .ffunc import f_eval, f_eval_bruteforce, jet_lift, pair_sum, tail_bound
from .operators import (ConditionReport, GammaSquared, OperatorSpec, PoleBook,
                        RegClass, bessel_compact, custom_operator, linear_free,
                        load_spec, p_factor, pole_book, pole_indices,
                        q_geometric, spec_from_json, summability_report)
from .charfn import (CharValue, SolutionSlice, SumRuleReport, a_ratio, charfn,
                     charfn_jet, eigenvector_values, eigvec_sum_identity,
                     green, recurrence_residual, solution_f, solution_g,
                     wronskian, wronskian_reg)
from .regularization import (DetpResult, charfn_reg, charfn_reg_batch,
                             detp_finite, detp_identity_residual,
                             hadamard_phi, hadamard_psi, regularizer_window,
                             solution_f_reg, solution_g_reg)
from .spectra import (Box, Disk, Eigenpoint, SpectrumReport, chain_residuals,
                      finite_section_zeros, generalized_eigvecs, locate_zeros,
                      multiplicity, residual_norm, spectrum, winding_count)

__version__ = "0.1.0"
