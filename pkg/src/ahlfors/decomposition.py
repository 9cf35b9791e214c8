"""L2-orthogonal splitting of a symmetric 2-tensor.

Given K on (M, g), write

    K = delta* theta + lambda g + phi_TT,    K_0 = S theta + phi_TT,

where K_0 is the trace-free part of K, theta solves S*S theta = delta K_0
(orthogonal to the known kernel), phi_TT = K_0 - S theta is trace-free and
divergence-free, and lambda = (H + delta theta)/n with H = trace_g K.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import NotTT
from .fields import OneFormField, ScalarField, SymTensorField
from .grid import GridManifold
from .solve import SolveOptions, kernel_basis, solve_ahlfors
from .tensor_ops import (
    cauchy_ahlfors,
    codiff,
    div_sym2,
    inner_l2,
    killing_op,
    norm_l2,
    trace_g,
    tracefree,
)

# smallest relative residual requested from the solver when tightening for the divergence bound
_TOL_FLOOR = 1e-13


@dataclass
class DecompositionResult:
    theta: OneFormField
    lam: ScalarField
    phi_tt: SymTensorField
    H: ScalarField
    K0: SymTensorField
    iterations: int
    residual: float
    converged: bool
    deflated_dim: int
    solver_tol: float


def _ratio(a: float, b: float) -> float:
    if a == 0.0:
        return 0.0
    return a / b if b > 0.0 else float("inf")


def decompose(m: GridManifold, K: SymTensorField, opts: SolveOptions | None = None) -> DecompositionResult:
    """Split K into its Cauchy-Ahlfors image, pure-trace part and TT remainder.

    The solver tolerance is tightened when ||delta K_0|| is large compared
    to ||K_0|| so that the divergence of phi_TT stays below
    10 * tol * ||K_0||.  NoConvergence from the solver propagates.
    """
    opts = opts or SolveOptions()
    n = m.n
    H = trace_g(m, K)
    K0 = tracefree(m, K)
    b = div_sym2(m, K0)

    # delta K_0 is L2-orthogonal to the conformal Killing kernel by adjointness;
    # remove the round-off component so the solver's consistency guard sees clean data
    basis = kernel_basis(m, opts.basis if opts.deflation == "supplied" else None) \
        if opts.deflation != "none" else []
    for q in basis:
        b = b - inner_l2(m, b, q) * q

    bnorm, k0norm = norm_l2(m, b), norm_l2(m, K0)
    tol = opts.tol
    if bnorm <= _TOL_FLOOR * k0norm:
        # K_0 is already TT to round-off
        b = OneFormField.zeros(m.shape)
    elif bnorm > 0.0 and k0norm > 0.0:
        tol = min(tol, max(10.0 * opts.tol * k0norm / bnorm, _TOL_FLOOR))
    sol = solve_ahlfors(m, b, dataclasses.replace(opts, tol=tol))

    theta = sol.theta
    phi = K0 - cauchy_ahlfors(m, theta)
    lam = ScalarField((H.values + codiff(m, theta).values)[None] / n, copy=False)
    return DecompositionResult(theta, lam, phi, H, K0, sol.iterations, sol.residual,
                               sol.converged, sol.deflated_dim, opts.tol)


def reconstruct(r: DecompositionResult, m: GridManifold) -> SymTensorField:
    """delta* theta + lambda g + phi_TT."""
    return killing_op(m, r.theta) + m.metric * r.lam + r.phi_tt


@dataclass
class Certificate:
    trace_residual: float          # ||trace phi_TT|| / ||K||
    divergence_residual: float     # ||delta phi_TT|| / ||K_0||
    orthogonality: float           # |<S theta, phi_TT>| / ||K_0||^2
    lambda_residual: float         # max |n lambda - H - delta theta|
    reconstruction: float          # ||K - reconstruct|| / ||K||
    conformal_killing_ratio: float  # ||S theta|| / ||theta||, 0 when theta = 0
    theta_zero: bool
    norms: dict

    def thresholds(self, solver_tol: float) -> dict[str, float]:
        return {
            "trace_residual": 1e-9,
            "divergence_residual": 10.0 * solver_tol,
            "orthogonality": 1e-8,
            "lambda_residual": 1e-9,
            "reconstruction": 1e-8,
        }

    def residuals(self) -> dict[str, float]:
        return {
            "trace_residual": self.trace_residual,
            "divergence_residual": self.divergence_residual,
            "orthogonality": self.orthogonality,
            "lambda_residual": self.lambda_residual,
            "reconstruction": self.reconstruction,
        }

    def verdicts(self, solver_tol: float) -> dict[str, bool]:
        res = self.residuals()
        return {k: bool(res[k] <= lim) for k, lim in self.thresholds(solver_tol).items()}


def certify(r: DecompositionResult, m: GridManifold, K: SymTensorField) -> Certificate:
    """Measure every claimed property of a decomposition."""
    n = m.n
    Knorm = norm_l2(m, K)
    K0norm = norm_l2(m, r.K0)
    S_theta = cauchy_ahlfors(m, r.theta)
    theta_norm = norm_l2(m, r.theta)
    S_norm = norm_l2(m, S_theta)
    lam_res = n * r.lam.values - r.H.values - codiff(m, r.theta).values
    theta_zero = theta_norm == 0.0
    return Certificate(
        trace_residual=_ratio(norm_l2(m, trace_g(m, r.phi_tt)), Knorm),
        divergence_residual=_ratio(norm_l2(m, div_sym2(m, r.phi_tt)), K0norm),
        orthogonality=_ratio(abs(inner_l2(m, S_theta, r.phi_tt)), K0norm ** 2),
        lambda_residual=float(np.abs(lam_res).max()),
        reconstruction=_ratio(norm_l2(m, K - reconstruct(r, m)), Knorm),
        conformal_killing_ratio=0.0 if theta_zero else S_norm / theta_norm,
        theta_zero=theta_zero,
        norms={
            "K": Knorm,
            "K0": K0norm,
            "theta": theta_norm,
            "S_theta": S_norm,
            "phi_tt": norm_l2(m, r.phi_tt),
            "lambda": norm_l2(m, r.lam),
        },
    )


def check_tt(m: GridManifold, phi: SymTensorField, tol: float = 1e-8) -> tuple[float, float]:
    """Raise NotTT unless trace and divergence of phi are below tol * max(1, ||phi||)."""
    scale = max(1.0, norm_l2(m, phi))
    tr = norm_l2(m, trace_g(m, phi))
    dv = norm_l2(m, div_sym2(m, phi))
    if tr > tol * scale or dv > tol * scale:
        raise NotTT(f"not transverse-traceless: ||trace|| = {tr:.3e}, ||div|| = {dv:.3e}")
    return tr, dv


def make_synthetic(m: GridManifold, theta: OneFormField, lam: ScalarField, phi_tt: SymTensorField) -> SymTensorField:
    """Assemble K = delta* theta + lambda g + phi_TT after checking that phi_TT is TT."""
    check_tt(m, phi_tt)
    return killing_op(m, theta) + m.metric * lam + phi_tt
