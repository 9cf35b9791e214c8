"""Spectral tensor calculus on periodic grids and the Cauchy-Ahlfors decomposition."""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .fields import OneFormField, ScalarField, SymTensorField, TwoFormField, VectorField
from .grid import Conformal, Explicit, Flat, GridManifold, build_grid, curvature, integrate
from .tensor_ops import (
    ahlfors_adjoint,
    cauchy_ahlfors,
    codiff,
    ext_d,
    flat,
    inner_l2,
    killing_op,
    norm_l2,
    sharp,
    trace_g,
    tracefree,
)
from .laplacians import verify_identities
from .solve import SolveOptions, SolveResult, kernel_basis, solve_ahlfors
from .decomposition import certify, decompose, reconstruct
from .constraints import constraint_report, corollary1_check, gen_momentum_data, theorem3_check
from .fieldio import read_field, write_field
