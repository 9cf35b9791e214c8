"""First-order operators on a GridManifold.

Sign conventions: every codifferential is minus a divergence,

    (delta theta)   = -g^ij nabla_i theta_j
    (delta omega)_j = -g^ik nabla_i omega_kj      (2-forms and symmetric 2-tensors)

and the Killing operator is delta* theta = 1/2 L_xi g with xi = theta^#.
The Cauchy-Ahlfors operator S is the trace-free part of delta*, and its
formal adjoint on trace-free tensors is the divergence delta.

Each operator is written from its covariant formula; adjointness between
pairs (d / delta, delta* / delta) is a measured property, not something
built in by transposition.  Contractions loop explicitly over the (at
most three) indices: on constant metrics the coefficients are plain
floats and exact zeros are skipped.
"""
from __future__ import annotations

import numpy as np

from .errors import NotTraceFree, RankMismatch
from .fields import (
    Field,
    OneFormField,
    ScalarField,
    SymTensorField,
    TwoFormField,
    VectorField,
    antisym_pairs,
    sym_index,
    sym_pairs,
)
from .grid import GridManifold, integrate, spectral_diff, spectral_grad


def _is_zero(c) -> bool:
    return isinstance(c, float) and c == 0.0


def _accumulate(shape, terms) -> np.ndarray:
    """Sum of coef * array over ``terms``, skipping exactly-zero float coefficients."""
    out = np.zeros(shape)
    for coef, arr in terms:
        if _is_zero(coef):
            continue
        if isinstance(coef, float) and coef == 1.0:
            out += arr
        else:
            out += coef * arr
    return out


def _component(packed: np.ndarray, n: int, sym: int, k: int, j: int):
    """F_kj from packed storage; returns (sign, array) or None for a structural zero."""
    if sym == 1:
        return 1.0, packed[sym_index(n)[k, j]]
    if k == j:
        return None
    pairs = antisym_pairs(n)
    if k < j:
        return 1.0, packed[pairs.index((k, j))]
    return -1.0, packed[pairs.index((j, k))]


def sharp(m: GridManifold, theta: OneFormField) -> VectorField:
    """Raise the index: xi^k = g^kl theta_l."""
    n = m.n
    comps = [_accumulate(m.shape, ((m.ginv_ij(k, l), theta.data[l]) for l in range(n))) for k in range(n)]
    return VectorField(np.stack(comps), copy=False)


def flat(m: GridManifold, xi: VectorField) -> OneFormField:
    """Lower the index: theta_k = g_kl xi^l."""
    n = m.n
    comps = [_accumulate(m.shape, ((m.g_ij(k, l), xi.data[l]) for l in range(n))) for k in range(n)]
    return OneFormField(np.stack(comps), copy=False)


def _christoffel_contract(m: GridManifold, theta: np.ndarray, i: int, j: int) -> np.ndarray:
    return sum(m.gamma[k, i, j] * theta[k] for k in range(m.n))


def nabla_oneform(m: GridManifold, theta: OneFormField) -> np.ndarray:
    """Full covariant derivative D[i, j] = d_i theta_j - Gamma^k_ij theta_k."""
    D = spectral_grad(theta.data, m.n)
    if not m.constant_metric:
        D = D - np.einsum("kij...,k...->ij...", m.gamma, theta.data)
    return D


def killing_op(m: GridManifold, theta: OneFormField) -> SymTensorField:
    """delta* theta = symmetrized covariant derivative of theta."""
    n = m.n
    G = spectral_grad(theta.data, n)  # G[a, j] = d_a theta_j
    comps = []
    for i, j in sym_pairs(n):
        c = G[i, i].copy() if i == j else 0.5 * (G[i, j] + G[j, i])
        if not m.constant_metric:
            c -= _christoffel_contract(m, theta.data, i, j)
        comps.append(c)
    return SymTensorField(np.stack(comps), copy=False)


def lie_metric(m: GridManifold, xi: VectorField) -> SymTensorField:
    """L_xi g = nabla_i xi_j + nabla_j xi_i."""
    return SymTensorField(2.0 * killing_op(m, flat(m, xi)).data, copy=False)


def trace_g(m: GridManifold, phi: SymTensorField) -> ScalarField:
    n = m.n
    idx = sym_index(n)
    terms = []
    for i, j in sym_pairs(n):
        c = m.ginv_ij(i, j)
        if i != j and not _is_zero(c):
            c = 2.0 * c
        terms.append((c, phi.data[idx[i, j]]))
    return ScalarField(_accumulate(m.shape, terms)[None], copy=False)


def tracefree(m: GridManifold, phi: SymTensorField) -> SymTensorField:
    """phi - (1/n) trace_g(phi) g."""
    tr_n = trace_g(m, phi).values / m.n
    comps = []
    for c, (i, j) in enumerate(sym_pairs(m.n)):
        gij = m.g_ij(i, j)
        comps.append(phi.data[c].copy() if _is_zero(gij) else phi.data[c] - tr_n * gij)
    return SymTensorField(np.stack(comps), copy=False)


def _div_rank2(m: GridManifold, packed: np.ndarray, sym: int) -> np.ndarray:
    # (delta F)_j = -g^ik (d_i F_kj - Gamma^l_ik F_lj - Gamma^l_ij F_kl)
    n = m.n
    dP = spectral_grad(packed, n)  # dP[i, c] = d_i of packed component c
    out = []
    for j in range(n):
        terms = []
        for i in range(n):
            for k in range(n):
                comp = _component(dP[i], n, sym, k, j)
                if comp is not None:
                    sign, arr = comp
                    coef = m.ginv_ij(i, k)
                    terms.append((coef if sign > 0 or _is_zero(coef) else -coef, arr))
        acc = _accumulate(m.shape, terms)
        if not m.constant_metric:
            for l in range(n):
                comp = _component(packed, n, sym, l, j)
                if comp is not None:
                    acc -= comp[0] * m.gamma_trace[l] * comp[1]
            for k in range(n):
                for l in range(n):
                    comp = _component(packed, n, sym, k, l)
                    if comp is not None:
                        acc -= comp[0] * m.gamma_mixed[k, l, j] * comp[1]
        out.append(-acc)
    return np.stack(out)


def div_sym2(m: GridManifold, phi: SymTensorField) -> OneFormField:
    """delta phi = -div_g phi for a symmetric 2-tensor."""
    return OneFormField(_div_rank2(m, phi.data, 1), copy=False)


def codiff(m: GridManifold, f: Field) -> Field:
    """Codifferential: 2-form -> one-form, one-form -> scalar."""
    if isinstance(f, TwoFormField):
        return OneFormField(_div_rank2(m, f.data, -1), copy=False)
    if isinstance(f, OneFormField):
        n = m.n
        terms = []
        for i in range(n):
            di = spectral_diff(f.data, i, n)
            terms.extend((m.ginv_ij(i, j), di[j]) for j in range(n))
        div = _accumulate(m.shape, terms)
        if not m.constant_metric:
            div -= sum(m.gamma_trace[k] * f.data[k] for k in range(n))
        return ScalarField((-div)[None], copy=False)
    if isinstance(f, SymTensorField):
        return div_sym2(m, f)
    raise RankMismatch(f"no codifferential defined for {type(f).__name__}")


def ext_d(m: GridManifold, f: Field) -> Field:
    """Exterior derivative: scalar -> one-form, one-form -> 2-form."""
    n = m.n
    if isinstance(f, ScalarField):
        return OneFormField(spectral_grad(f.values, n), copy=False)
    if isinstance(f, OneFormField):
        comps = [
            spectral_diff(f.data[j], i, n) - spectral_diff(f.data[i], j, n)
            for i, j in antisym_pairs(n)
        ]
        return TwoFormField(np.stack(comps), copy=False)
    raise RankMismatch(f"no exterior derivative defined for {type(f).__name__}")


def cauchy_ahlfors(m: GridManifold, theta: OneFormField) -> SymTensorField:
    """S theta = delta* theta + (1/n)(delta theta) g, formed as the trace-free part of delta* theta."""
    return tracefree(m, killing_op(m, theta))


def ahlfors_adjoint(m: GridManifold, omega: SymTensorField, require_tracefree: bool = False) -> OneFormField:
    """S* omega = delta omega on trace-free symmetric tensors."""
    if require_tracefree:
        tr = np.abs(trace_g(m, omega).values).max()
        scale = max(1.0, float(np.abs(omega.data).max()))
        if tr > 1e-8 * scale:
            raise NotTraceFree(f"max |trace_g omega| = {tr:.3e}")
    return div_sym2(m, omega)


def _raise_both(m: GridManifold, full: np.ndarray) -> list[list[np.ndarray]]:
    n = m.n
    half = [[_accumulate(m.shape, ((m.ginv_ij(j, l), full[i][j]) for j in range(n))) for l in range(n)]
            for i in range(n)]
    return [[_accumulate(m.shape, ((m.ginv_ij(k, i), half[i][l]) for i in range(n))) for l in range(n)]
            for k in range(n)]


def pointwise_inner(m: GridManifold, a: Field, b: Field) -> ScalarField:
    """g(a, b) with all indices contracted by the metric."""
    if type(a) is not type(b):
        raise RankMismatch(f"cannot pair {type(a).__name__} with {type(b).__name__}")
    n = m.n
    if isinstance(a, ScalarField):
        val = a.values * b.values
    elif isinstance(a, (OneFormField, VectorField)):
        coef = m.ginv_ij if isinstance(a, OneFormField) else m.g_ij
        val = _accumulate(m.shape, ((coef(i, j), a.data[i] * b.data[j]) for i in range(n) for j in range(n)
                                    if not _is_zero(coef(i, j))))
    elif isinstance(a, (SymTensorField, TwoFormField)):
        A = a.full()
        B = b.full()
        up = _raise_both(m, A)
        val = sum(up[k][l] * B[k, l] for k in range(n) for l in range(n))
        if isinstance(a, TwoFormField):
            # half the full contraction: the pairing under which delta is the adjoint of d
            val = 0.5 * val
    else:
        raise RankMismatch(f"unsupported field type {type(a).__name__}")
    return ScalarField(np.asarray(val, dtype=np.float64)[None], copy=False)


def inner_l2(m: GridManifold, a: Field, b: Field) -> float:
    """L2 product: integral of g(a, b) dvol_g."""
    return integrate(pointwise_inner(m, a, b), m)


def norm_l2(m: GridManifold, a: Field) -> float:
    return float(np.sqrt(max(inner_l2(m, a, a), 0.0)))
