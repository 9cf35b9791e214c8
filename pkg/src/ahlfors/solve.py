"""Matrix-free solver for S*S theta = b with kernel deflation.

The iteration is the conjugate residual method in the L2(g) inner
product; S*S is self-adjoint and non-negative there, and positive on the
orthogonal complement of its kernel (the conformal Killing one-forms).
Iterates, residuals and search directions are projected onto that
complement every step, so the computed theta is the unique solution
orthogonal to the deflation basis.  Conjugate residual minimizes the
residual norm over the Krylov space, which keeps the recorded residual
history non-increasing.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import Inconsistent, NoConvergence
from .fields import OneFormField, VectorField
from .grid import Conformal, Flat, GridManifold
from .laplacians import ahlfors_direct
from .tensor_ops import flat, inner_l2, norm_l2

log = logging.getLogger(__name__)

DEFLATION_SOURCES = ("analytic-flat", "supplied", "none")


@dataclass
class SolveOptions:
    tol: float = 1e-10
    maxiter: int | None = None  # None -> 10 * sqrt(total nodes)
    deflation: str = "analytic-flat"
    basis: Sequence[OneFormField] = ()
    precondition: bool = False

    def __post_init__(self):
        if not 0.0 < self.tol <= 1e-2:
            raise ValueError(f"tolerance must lie in (0, 1e-2], got {self.tol}")
        if self.maxiter is not None and self.maxiter < 1:
            raise ValueError("maxiter must be >= 1")
        if self.deflation not in DEFLATION_SOURCES:
            raise ValueError(f"deflation must be one of {DEFLATION_SOURCES}")

    def max_iterations(self, m: GridManifold) -> int:
        if self.maxiter is not None:
            return self.maxiter
        return int(10 * np.sqrt(m.nodes))


@dataclass
class SolveResult:
    theta: OneFormField
    iterations: int
    residual: float
    deflated_dim: int
    converged: bool = True
    history: list[float] = field(default_factory=list)


def _orthonormalize(m: GridManifold, vectors: Sequence[OneFormField]) -> list[OneFormField]:
    out: list[OneFormField] = []
    for v in vectors:
        for q in out:
            v = v - inner_l2(m, v, q) * q
        nv = norm_l2(m, v)
        if nv > 1e-12:
            out.append(v / nv)
    return out


def kernel_basis(m: GridManifold, supplied: Sequence[OneFormField] | None = None) -> list[OneFormField]:
    """L2-orthonormal basis of the known kernel of S*S.

    The coordinate translations d/dx^i are Killing for a constant metric
    and conformal Killing for g = exp(2u) * identity (the conformal Killing
    equation is conformally invariant), so for both metric kinds the
    lowered fields (d/dx^i)_flat span known kernel directions.  Other
    metrics use the supplied basis, or none.
    """
    if supplied:
        return _orthonormalize(m, supplied)
    if not (m.constant_metric or isinstance(m.spec, (Flat, Conformal))):
        return []
    translations = []
    for i in range(m.n):
        data = np.zeros((m.n,) + m.shape)
        data[i] = 1.0
        translations.append(flat(m, VectorField(data, copy=False)))
    return _orthonormalize(m, translations)


class _Deflator:
    def __init__(self, m, basis):
        self.m = m
        self.basis = basis

    def __call__(self, v: OneFormField) -> OneFormField:
        for q in self.basis:
            v = v - inner_l2(self.m, v, q) * q
        return v


def fourier_preconditioner(m: GridManifold):
    """Inverse of the flat Laplacian 1/2 |k|^2, weighted so it is self-adjoint in L2(g)."""
    n, shape = m.n, m.shape
    axes = tuple(range(1, n + 1))
    ks = [np.fft.fftfreq(N, 1.0 / N) for N in shape[:-1]] + [np.arange(shape[-1] // 2 + 1, dtype=float)]
    grids = np.meshgrid(*ks, indexing="ij")
    k2 = sum(k * k for k in grids)
    symbol = np.where(k2 == 0, 1.0, 1.0 / np.where(k2 == 0, 1.0, 0.5 * k2))
    weight = m.g / m.sqrt_det  # g_ij / sqrt(det g)

    def apply(r: OneFormField) -> OneFormField:
        pr = np.fft.irfftn(np.fft.rfftn(r.data, axes=axes) * symbol, s=shape, axes=axes)
        return OneFormField(np.einsum("ij...,j...->i...", weight, pr))

    return apply


def solve_ahlfors(m: GridManifold, b: OneFormField, opts: SolveOptions | None = None,
                  x0: OneFormField | None = None, raise_on_fail: bool = True) -> SolveResult:
    """Solve S*S theta = b for theta orthogonal to the deflation basis.

    Raises Inconsistent when b has a component along the kernel larger than
    1e-8 * ||b||, and NoConvergence (carrying the partial result) when the
    iteration limit is reached before ||S*S theta - b|| <= tol * ||b||.
    """
    opts = opts or SolveOptions()
    if opts.deflation == "none":
        basis = []
    elif opts.deflation == "supplied":
        basis = kernel_basis(m, opts.basis)
    else:
        basis = kernel_basis(m)
    project = _Deflator(m, basis)
    zero = OneFormField.zeros(m.shape)

    bnorm = norm_l2(m, b)
    if bnorm == 0.0:
        return SolveResult(zero, 0, 0.0, len(basis), True, [0.0])
    for q in basis:
        c = inner_l2(m, b, q)
        if abs(c) > 1e-8 * bnorm:
            raise Inconsistent(f"right-hand side has kernel component {c:.3e} (||b|| = {bnorm:.3e})")
    b = project(b)

    A = lambda v: project(ahlfors_direct(m, v))  # noqa: E731
    M = fourier_preconditioner(m) if opts.precondition else None
    precond = (lambda v: project(M(v))) if M is not None else (lambda v: v)

    maxiter = opts.max_iterations(m)
    x = zero if x0 is None else project(x0)
    target = opts.tol * bnorm
    it = 0
    r = b - A(x) if x0 is not None else b
    rnorm = norm_l2(m, r)
    history = [rnorm / bnorm]

    while rnorm > target and it < maxiter:
        start = it
        z = precond(r)
        Az = A(z)
        p, Ap = z, Az
        zAz = inner_l2(m, z, Az)
        while it < maxiter:
            q = precond(Ap)
            denom = inner_l2(m, Ap, q)
            if denom <= 0.0 or zAz <= 0.0:
                break
            alpha = zAz / denom
            x = x + alpha * p
            r = r - alpha * Ap
            z = z - alpha * q if M is not None else r
            it += 1
            rnorm = norm_l2(m, r)
            history.append(rnorm / bnorm)
            if rnorm <= target:
                break
            Az = A(z)
            zAz_new = inner_l2(m, z, Az)
            p = z + (zAz_new / zAz) * p
            Ap = Az + (zAz_new / zAz) * Ap
            zAz = zAz_new
        # the recursively updated residual drifts; confirm against the true one
        r = b - A(x)
        true_norm = norm_l2(m, r)
        if true_norm > target and it < maxiter:
            log.debug("restarting at iteration %d, true residual %.3e", it, true_norm / bnorm)
        rnorm = true_norm
        if it == start:
            break

    result = SolveResult(x, it, rnorm / bnorm, len(basis), rnorm <= target, history)
    if not result.converged and raise_on_fail:
        raise NoConvergence(f"no convergence after {it} iterations (residual {result.residual:.3e})", result)
    return result
