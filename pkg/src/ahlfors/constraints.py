"""Constraint residuals for initial data (g, K) and checks built on the decomposition.

Hamiltonian:  s - g(K, K) + (trace_g K)^2 - 2 kappa rho - 2 Lambda
Momentum:     div_g K - d(trace_g K) - kappa J  =  -delta K - dH - kappa J

Under the vacuum momentum constraint delta K = -dH, so
delta K_0 = -((n-1)/n) dH, and pairing S*S theta = delta K_0 with theta
gives the integral identity

    -((n-1)/n) int xi(H) dvol = ||S theta||^2 = ||delta* theta||^2 - (1/n) ||delta theta||^2.

``theorem3_check`` measures both sides and fits the coefficient in front
of the integral, so the value (n-1)/n can be compared with (n+1)/n.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .decomposition import DecompositionResult, check_tt, decompose
from .errors import Inapplicable, NotFlat
from .fields import OneFormField, ScalarField, SymTensorField, sym_index, sym_pairs
from .grid import GridManifold, integrate, spectral_diff
from .solve import SolveOptions
from .tensor_ops import (
    cauchy_ahlfors,
    codiff,
    div_sym2,
    ext_d,
    killing_op,
    norm_l2,
    pointwise_inner,
    trace_g,
)


def hamiltonian_residual(m: GridManifold, K: SymTensorField, cosmological: float = 0.0,
                         kappa: float = 1.0, rho: ScalarField | None = None) -> ScalarField:
    H = trace_g(m, K).values
    val = m.scalar.values - pointwise_inner(m, K, K).values + H * H
    if rho is not None:
        val = val - 2.0 * kappa * rho.values
    if cosmological:
        val = val - 2.0 * cosmological
    return ScalarField(val[None], copy=False)


def momentum_residual(m: GridManifold, K: SymTensorField, kappa: float = 1.0,
                      J: OneFormField | None = None) -> OneFormField:
    res = -div_sym2(m, K) - ext_d(m, trace_g(m, K))
    if J is not None:
        res = res - kappa * J
    return res


@dataclass
class ConstraintReport:
    hamiltonian: ScalarField
    hamiltonian_norm: float
    momentum: OneFormField
    momentum_norm: float
    parameters: dict = field(default_factory=dict)


def constraint_report(m: GridManifold, K: SymTensorField, cosmological: float = 0.0, kappa: float = 1.0,
                      rho: ScalarField | None = None, J: OneFormField | None = None) -> ConstraintReport:
    ham = hamiltonian_residual(m, K, cosmological, kappa, rho)
    mom = momentum_residual(m, K, kappa, J)
    return ConstraintReport(
        hamiltonian=ham,
        hamiltonian_norm=norm_l2(m, ham),
        momentum=mom,
        momentum_norm=norm_l2(m, mom),
        parameters={"lambda": cosmological, "kappa": kappa, "rho": rho is not None, "J": J is not None},
    )


def hessian_flat(m: GridManifold, f: ScalarField) -> SymTensorField:
    n = m.n
    df = [spectral_diff(f.values, a, n) for a in range(n)]
    comps = [spectral_diff(df[j], i, n) for i, j in sym_pairs(n)]
    return SymTensorField(np.stack(comps), copy=False)


def gen_momentum_data(m: GridManifold, f: ScalarField, c: float,
                      phi_tt: SymTensorField | None = None) -> tuple[SymTensorField, ScalarField]:
    """Momentum-constraint data K = Hess f + (c/n) g + phi_TT with H = Delta f + c.

    Needs a constant metric so that second derivatives commute with the
    connection; raises NotFlat otherwise, and NotTT for a bad phi_TT.
    """
    if not m.constant_metric:
        raise NotFlat("momentum data generator needs a constant metric")
    n = m.n
    hess = hessian_flat(m, f)
    if phi_tt is not None:
        check_tt(m, phi_tt)
    idx = sym_index(n)
    lap = sum(m.ginv_ij(i, j) * hess.data[idx[i, j]] for i in range(n) for j in range(n))
    H = ScalarField((lap + c)[None])
    K = hess + m.metric * (c / n)
    if phi_tt is not None:
        K = K + phi_tt
    return K, H


def mean_and_sd(m: GridManifold, f: ScalarField) -> tuple[float, float]:
    """Volume-weighted mean and standard deviation."""
    vol = m.volume
    mean = integrate(f, m) / vol
    dev = ScalarField(((f.values - mean) ** 2)[None], copy=False)
    return mean, float(np.sqrt(max(integrate(dev, m) / vol, 0.0)))


@dataclass
class Theorem3Report:
    n: int
    lie_integral: float        # int xi(H) dvol
    lhs: float                 # -((n-1)/n) * lie_integral
    rhs_derived: float         # ||delta* theta||^2 - (1/n) ||delta theta||^2
    rhs_alt: float           # 1/2 ||delta* theta||^2 + (n-2)/(2n) ||delta theta||^2
    fitted_c: float            # c with -c * lie_integral = rhs_derived; nan when lie_integral = 0
    derived_coefficient: float  # (n-1)/n
    alt_coefficient: float   # (n+1)/n
    alt_lhs: float           # -((n+1)/n) * lie_integral
    killing_sq: float
    div_sq: float
    momentum_residual_norm: float
    sd_H: float
    decomposition: DecompositionResult = field(repr=False)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "n", "lie_integral", "lhs", "rhs_derived", "rhs_alt", "fitted_c", "derived_coefficient",
            "alt_coefficient", "alt_lhs", "killing_sq", "div_sq", "momentum_residual_norm", "sd_H")}


def theorem3_check(m: GridManifold, K: SymTensorField, opts: SolveOptions | None = None) -> Theorem3Report:
    n = m.n
    r = decompose(m, K, opts)
    theta = r.theta
    lie_H = pointwise_inner(m, ext_d(m, r.H), theta)  # xi(H) = g(dH, theta)
    lie_integral = integrate(lie_H, m)
    killing_sq = norm_l2(m, killing_op(m, theta)) ** 2
    div_sq = norm_l2(m, codiff(m, theta)) ** 2
    rhs_derived = killing_sq - div_sq / n
    fitted = -rhs_derived / lie_integral if lie_integral != 0.0 else float("nan")
    return Theorem3Report(
        n=n,
        lie_integral=lie_integral,
        lhs=-((n - 1) / n) * lie_integral,
        rhs_derived=rhs_derived,
        rhs_alt=0.5 * killing_sq + ((n - 2) / (2 * n)) * div_sq,
        fitted_c=fitted,
        derived_coefficient=(n - 1) / n,
        alt_coefficient=(n + 1) / n,
        alt_lhs=-((n + 1) / n) * lie_integral,
        killing_sq=killing_sq,
        div_sq=div_sq,
        momentum_residual_norm=norm_l2(m, momentum_residual(m, K)),
        sd_H=mean_and_sd(m, r.H)[1],
        decomposition=r,
    )


@dataclass
class Corollary1Report:
    sd_H: float
    mean_H: float
    conformal_killing_ratio: float   # ||S theta|| / ||K_0||
    umbilic_tt_residual: float       # ||K - (H/n) g - phi_TT|| / ||K||
    scalar_identity_residual: float  # ||s - g(phi, phi) + ((n-1)/n) H^2||
    scalar_curvature_integral: float
    tt_energy_integral: float        # int g(phi, phi) - ((n-1)/n) H^2
    momentum_residual_norm: float
    hamiltonian_residual_norm: float
    decomposition: DecompositionResult = field(repr=False)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "sd_H", "mean_H", "conformal_killing_ratio", "umbilic_tt_residual", "scalar_identity_residual",
            "scalar_curvature_integral", "tt_energy_integral", "momentum_residual_norm",
            "hamiltonian_residual_norm")}


def corollary1_check(m: GridManifold, K: SymTensorField, opts: SolveOptions | None = None) -> Corollary1Report:
    """Report the CMC / conformal-Killing / umbilic-plus-TT quantities for momentum-constrained K.

    Raises Inapplicable when the momentum residual exceeds 1e-8 * max(1, ||K||).
    """
    n = m.n
    Knorm = norm_l2(m, K)
    mom = norm_l2(m, momentum_residual(m, K))
    if mom > 1e-8 * max(1.0, Knorm):
        raise Inapplicable(f"momentum residual {mom:.3e} too large for the CMC characterization")
    r = decompose(m, K, opts)
    mean_H, sd_H = mean_and_sd(m, r.H)
    K0norm = norm_l2(m, r.K0)
    S_norm = norm_l2(m, cauchy_ahlfors(m, r.theta))
    umbilic = K - m.metric * (r.H / n) - r.phi_tt
    H2 = r.H.values ** 2
    phi2 = pointwise_inner(m, r.phi_tt, r.phi_tt).values
    ident = ScalarField((m.scalar.values - phi2 + (n - 1) / n * H2)[None], copy=False)
    return Corollary1Report(
        sd_H=sd_H,
        mean_H=mean_H,
        conformal_killing_ratio=0.0 if S_norm == 0.0 else S_norm / K0norm,
        umbilic_tt_residual=0.0 if Knorm == 0.0 else norm_l2(m, umbilic) / Knorm,
        scalar_identity_residual=norm_l2(m, ident),
        scalar_curvature_integral=integrate(m.scalar, m),
        tt_energy_integral=integrate(ScalarField((phi2 - (n - 1) / n * H2)[None], copy=False), m),
        momentum_residual_norm=mom,
        hamiltonian_residual_norm=norm_l2(m, hamiltonian_residual(m, K)),
        decomposition=r,
    )
