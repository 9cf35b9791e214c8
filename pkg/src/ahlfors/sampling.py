"""Seeded band-limited random fields and transverse-traceless generators."""
from __future__ import annotations

import numpy as np

from .errors import NotFlat
from .fields import Field, OneFormField, ScalarField, SymTensorField, sym_pairs
from .grid import GridManifold


def band_limit(shape) -> int:
    """Largest admissible mode per axis: N/4 keeps quadratic terms alias-free."""
    return min(shape) // 4


def _mode_mask(shape, kmax):
    ks = [np.fft.fftfreq(N, 1.0 / N) for N in shape]
    grids = np.meshgrid(*ks, indexing="ij")
    mask = np.ones(shape, dtype=bool)
    for k in grids:
        mask &= np.abs(k) <= kmax
    return mask


def random_component(rng: np.random.Generator, shape, kmax: int | None = None, zero_mean: bool = False) -> np.ndarray:
    """Real band-limited array with unit standard deviation."""
    kmax = band_limit(shape) if kmax is None else kmax
    mask = _mode_mask(shape, kmax)
    coef = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * mask
    if zero_mean:
        coef[(0,) * len(shape)] = 0.0
    arr = np.fft.ifftn(coef).real
    std = arr.std()
    if std == 0.0:
        return arr
    if not zero_mean:
        return arr / std
    return (arr - arr.mean()) / std


def random_field(cls: type[Field], m: GridManifold, rng: np.random.Generator,
                 kmax: int | None = None, zero_mean: bool = False) -> Field:
    comps = [random_component(rng, m.shape, kmax, zero_mean) for _ in range(cls.ncomp_for(m.n))]
    return cls(np.stack(comps))


def random_tt(m: GridManifold, rng: np.random.Generator, kmax: int | None = None,
              constant_part: bool = True) -> SymTensorField:
    """Random transverse-traceless tensor on a flat torus.

    Each Fourier mode is projected with the TT projector built from
    P = I - k k^T / |k|^2; the k = 0 mode keeps an arbitrary constant
    trace-free tensor.  On T^2 only the constant part survives.
    """
    if not (m.constant_metric and np.array_equal(m.g[(Ellipsis,) + (0,) * m.n], np.eye(m.n))):
        raise NotFlat("TT generator needs the identity metric")
    n, shape = m.n, m.shape
    kmax = band_limit(shape) if kmax is None else kmax
    mask = _mode_mask(shape, kmax)
    A = np.zeros((n, n) + shape, dtype=complex)
    for i, j in sym_pairs(n):
        A[i, j] = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * mask
        A[j, i] = A[i, j]
    ks = np.meshgrid(*[np.fft.fftfreq(N, 1.0 / N) for N in shape], indexing="ij")
    k = np.stack(ks)
    k2 = np.sum(k * k, axis=0)
    safe = np.where(k2 == 0, 1.0, k2)
    P = np.eye(n).reshape((n, n) + (1,) * n) - np.einsum("i...,j...->ij...", k, k) / safe
    # TT projection: P A P - (1/(n-1)) P tr(P A)
    PAP = np.einsum("ik...,kl...,lj...->ij...", P, A, P)
    trPA = np.einsum("ij...,ji...->...", P, A)
    TT = PAP - P * trPA / (n - 1)
    zero = (0,) * n
    TT[(slice(None), slice(None)) + zero] = 0.0
    if constant_part:
        C = rng.standard_normal((n, n))
        C = 0.5 * (C + C.T)
        C -= np.trace(C) / n * np.eye(n)
        TT[(slice(None), slice(None)) + zero] = C * np.prod(shape)
    real = np.fft.ifftn(TT, axes=tuple(range(2, 2 + n))).real
    return SymTensorField.from_full(real)


def tt_wave(m: GridManifold, amp_a: float = 1.0, amp_b: float = 0.5) -> SymTensorField:
    """The T^3 wave phi_11 = -phi_22 = A cos z, phi_12 = B cos z."""
    if m.n != 3:
        raise ValueError("tt_wave is defined on T^3")
    z = m.coords[2]
    full = np.zeros((3, 3) + m.shape)
    full[0, 0] = amp_a * np.cos(z)
    full[1, 1] = -amp_a * np.cos(z)
    full[0, 1] = full[1, 0] = amp_b * np.cos(z)
    return SymTensorField.from_full(full)


def random_scalar(m, rng, kmax=None, zero_mean=False) -> ScalarField:
    return random_field(ScalarField, m, rng, kmax, zero_mean)


def random_oneform(m, rng, kmax=None, zero_mean=False) -> OneFormField:
    return random_field(OneFormField, m, rng, kmax, zero_mean)
