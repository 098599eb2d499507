"""Spectral symbols, monotone rearrangements and spectral relative errors
for finite-difference and isogeometric discretizations of Sturm-Liouville
operators."""

__version__ = "0.1.0"

from .core import (BoundaryCondition, EulerCauchyCase, Grid, GridMap, OperatorSpec,
                   exact_spectrum_euler_cauchy, identity_map, liouville_invariant_B, liouville_map,
                   make_uniform_grid, map_grid)
from .eigen import EigenResult, eig_dense_general, eig_dense_sym, eig_gen_sym, eig_sym_tridiag, eigenvalues
from .errors import (BracketError, ConfigError, ConvergenceError, DimensionMismatchError, DomainError,
                     InvalidArgumentError, NotPositiveDefiniteError, SingularGridError, SpectraError)
from .fd import BandedMatrix, FdScheme, assemble_fd, fd_coefficients, fd_symbol_f, weight_matrix
from .bspline import BSplineBasis, eval_bspline
from .iga import GalerkinPencil, assemble_iga, iga_symbol_f
from .metrics import (ErrorReport, SpectrumReport, WeylLaw, asymptotic_error, counting_function,
                      detect_outliers, local_and_max_errors, numerical_and_analytic_errors, reindex,
                      saturation_constant, weyl_law_euler_cauchy)
from .symbols import (DistributionFunction, RearrangedSymbol, SymbolFunction, invert_phi,
                      phi_euler_cauchy_analytic, phi_grid, rearrangement_by_sampling, sample_rearranged,
                      symbol_fd, symbol_iga)
from .multidim import (MultiDimCase, ddim_error_bound, exact_laplacian_eigs_ddim, kron_laplacian_eigs,
                       weyl_law_ddim)
