"""Periodic Riemannian grid manifolds on [0, 2pi)^n.

Derivatives are Fourier pseudo-spectral along each axis; products are taken
pointwise.  All metric-derived geometry (inverse, Christoffel symbols,
Ricci tensor, scalar curvature, volume density) is computed once at build
time and kept on the manifold.

Curvature conventions::

    Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)
    Ric_ij     = d_k Gamma^k_ij - d_i Gamma^k_kj
                 + Gamma^k_kl Gamma^l_ij - Gamma^k_il Gamma^l_kj
    s          = g^ij Ric_ij

so that round spheres have positive scalar curvature.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import BadShape, NonSPDMetric
from .fields import Field, ScalarField, SymTensorField

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Flat:
    pass


@dataclass(frozen=True)
class Conformal:
    """g = exp(2u) * identity.  ``u`` is a ScalarField, an array, or a callable of the coordinates."""

    u: Union[ScalarField, np.ndarray, Callable]
    amp: float | None = None  # recorded for reports only


@dataclass(frozen=True)
class Explicit:
    g: SymTensorField


MetricSpec = Union[Flat, Conformal, Explicit]


def _check_shape(n, shape):
    if n not in (2, 3):
        raise BadShape(f"dimension must be 2 or 3, got {n}")
    shape = tuple(int(s) for s in shape)
    if len(shape) != n:
        raise BadShape(f"expected {n} grid sizes, got {len(shape)}")
    for s in shape:
        if s < 8 or s % 2:
            raise BadShape(f"grid sizes must be even and >= 8, got {shape}")
    return shape


def coordinates(shape) -> tuple[np.ndarray, ...]:
    axes = [TWO_PI * np.arange(N) / N for N in shape]
    return tuple(np.meshgrid(*axes, indexing="ij"))


def spectral_diff(arr: np.ndarray, axis: int, n: int) -> np.ndarray:
    """Derivative along grid axis ``axis`` (0-based) of an array whose trailing ``n`` axes are the grid."""
    ax = arr.ndim - n + axis
    N = arr.shape[ax]
    k = np.arange(N // 2 + 1, dtype=np.float64)
    k[-1] = 0.0  # Nyquist mode has no real derivative
    mult = 1j * k
    mult = mult.reshape((N // 2 + 1,) + (1,) * (arr.ndim - ax - 1))
    return np.fft.irfft(np.fft.rfft(arr, axis=ax) * mult, n=N, axis=ax)


def spectral_grad(arr: np.ndarray, n: int) -> np.ndarray:
    """Stack of all first derivatives: result[a] = d_a arr."""
    return np.stack([spectral_diff(arr, a, n) for a in range(n)])


def partial_derivative(f: Field, axis: int) -> Field:
    """Component-wise spectral derivative of a field along grid axis ``axis`` (0-based)."""
    if not 0 <= axis < f.n:
        raise IndexError(f"axis {axis} out of range for a {f.n}-dimensional field")
    return type(f)(spectral_diff(f.data, axis, f.n))


def compute_inverse(g_full: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise inverse metric (n, n, *shape) and sqrt(det g)."""
    mats = np.moveaxis(g_full, (0, 1), (-2, -1))
    inv = np.linalg.inv(mats)
    inv = 0.5 * (inv + np.swapaxes(inv, -1, -2))
    det = np.linalg.det(mats)
    return np.moveaxis(inv, (-2, -1), (0, 1)), np.sqrt(det)


def compute_christoffel(g_full: np.ndarray, ginv: np.ndarray, n: int) -> np.ndarray:
    """Gamma[k, i, j] = Gamma^k_ij."""
    dg = spectral_grad(g_full, n)  # dg[l, i, j] = d_l g_ij
    # first kind: lower[l, i, j] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    lower = 0.5 * (np.einsum("ijl...->lij...", dg) + np.einsum("jil...->lij...", dg) - dg)
    gam = np.einsum("kl...,lij...->kij...", ginv, lower)
    return 0.5 * (gam + np.swapaxes(gam, 1, 2))


def compute_ricci(gamma: np.ndarray, n: int) -> np.ndarray:
    """Full (n, n, *shape) Ricci tensor from the Christoffel symbols."""
    term1 = sum(spectral_diff(gamma[k], k, n) for k in range(n))
    contracted = np.einsum("kkj...->j...", gamma)  # Gamma^k_kj
    term2 = spectral_grad(contracted, n)  # [i, j] = d_i Gamma^k_kj
    term3 = np.einsum("l...,lij...->ij...", contracted, gamma)
    term4 = np.einsum("kil...,lkj...->ij...", gamma, gamma)
    ric = term1 - term2 + term3 - term4
    return 0.5 * (ric + np.swapaxes(ric, 0, 1))


class GridManifold:
    """A closed periodic grid manifold carrying a smooth Riemannian metric.

    Use :func:`build_grid` rather than calling the constructor directly.
    Geometry caches are plain attributes:

    ``g``, ``ginv``
        full ``(n, n, *shape)`` metric and inverse metric
    ``sqrt_det``
        volume density sqrt(det g), shape ``shape``
    ``gamma``
        Christoffel symbols ``gamma[k, i, j] = Gamma^k_ij``
    ``gamma_trace``, ``gamma_mixed``
        ``g^ij Gamma^k_ij`` and ``[k, l, j] = g^ik Gamma^l_ij``
    ``ricci``, ``scalar``
        Ricci tensor (SymTensorField) and scalar curvature (ScalarField)
    """

    def __init__(self, metric: SymTensorField, spec: MetricSpec):
        self.metric = metric
        self.spec = spec
        self.n = metric.n
        self.shape = metric.shape
        self.cell = float(np.prod([TWO_PI / N for N in self.shape]))
        self.coords = coordinates(self.shape)

        n = self.n
        self.g = metric.full()
        self.ginv, self.sqrt_det = compute_inverse(self.g, n)
        self.gamma = compute_christoffel(self.g, self.ginv, n)
        self.gamma_trace = np.einsum("ik...,lik...->l...", self.ginv, self.gamma)  # g^ik Gamma^l_ik
        self.gamma_mixed = np.einsum("ik...,lij...->klj...", self.ginv, self.gamma)  # g^ik Gamma^l_ij
        ric = compute_ricci(self.gamma, n)
        self.ricci = SymTensorField.from_full(ric)
        self.scalar = ScalarField.from_values(np.einsum("ij...,ij...->...", self.ginv, self.ricci.full()))
        first = metric.data[(slice(None),) + (slice(0, 1),) * n]
        # a spatially constant metric has vanishing Christoffel symbols exactly
        self.constant_metric = bool(np.all(metric.data == first))
        if self.constant_metric:
            origin = (slice(None), slice(None)) + (0,) * n
            self._g_const = self.g[origin].copy()
            self._ginv_const = self.ginv[origin].copy()
        else:
            self._g_const = self._ginv_const = None
        for arr in (self.g, self.ginv, self.sqrt_det, self.gamma, self.gamma_trace, self.gamma_mixed):
            arr.setflags(write=False)

    def g_ij(self, i: int, j: int):
        """Metric coefficient: a float for constant metrics, else an array."""
        if self._g_const is not None:
            return float(self._g_const[i, j])
        return self.g[i, j]

    def ginv_ij(self, i: int, j: int):
        if self._ginv_const is not None:
            return float(self._ginv_const[i, j])
        return self.ginv[i, j]

    @property
    def nodes(self) -> int:
        return int(np.prod(self.shape))

    @property
    def volume(self) -> float:
        return integrate(ScalarField.from_values(np.ones(self.shape)), self)

    def describe(self) -> dict:
        spec = self.spec
        if isinstance(spec, Flat):
            kind = {"kind": "flat"}
        elif isinstance(spec, Conformal):
            kind = {"kind": "conformal"}
            if spec.amp is not None:
                kind["amp"] = spec.amp
        else:
            kind = {"kind": "explicit"}
        return {"n": self.n, "shape": list(self.shape), **kind}

    def __repr__(self):
        return f"GridManifold(n={self.n}, shape={self.shape}, spec={type(self.spec).__name__})"


def build_grid(n: int, shape, metric: MetricSpec | None = None) -> GridManifold:
    """Build a periodic grid manifold with all geometry caches populated.

    Raises BadShape for odd or too-small axes and NonSPDMetric when an
    explicit metric fails to be positive definite at some node.
    """
    shape = _check_shape(n, shape)
    metric = Flat() if metric is None else metric
    if isinstance(metric, Flat):
        g = SymTensorField.diag([np.ones(shape)] * n)
    elif isinstance(metric, Conformal):
        u = metric.u
        if callable(u):
            u = u(*coordinates(shape))
        elif isinstance(u, ScalarField):
            u = u.values
        u = np.broadcast_to(np.asarray(u, dtype=np.float64), shape)
        g = SymTensorField.diag([np.exp(2.0 * u)] * n)
    elif isinstance(metric, Explicit):
        g = metric.g
        if g.n != n or g.shape != shape:
            raise BadShape(f"metric field has shape {g.shape}, expected {shape}")
        eig = np.linalg.eigvalsh(np.moveaxis(g.full(), (0, 1), (-2, -1)))
        lo = eig[..., 0]
        if not np.all(lo > 0):
            idx = np.unravel_index(np.argmin(lo), shape)
            raise NonSPDMetric(f"metric not positive definite at node {tuple(int(i) for i in idx)} "
                               f"(min eigenvalue {lo[idx]:.3e})")
    else:
        raise TypeError(f"unknown metric spec {metric!r}")
    return GridManifold(g, metric)


def christoffel(m: GridManifold) -> np.ndarray:
    return m.gamma


def curvature(m: GridManifold) -> tuple[SymTensorField, ScalarField]:
    return m.ricci, m.scalar


def integrate(f: ScalarField, m: GridManifold) -> float:
    """Riemannian integral: sum of f * sqrt(det g) * cell volume over all nodes."""
    if f.shape != m.shape:
        raise BadShape(f"field shape {f.shape} does not match grid {m.shape}")
    return float(np.sum(f.values * m.sqrt_det) * m.cell)
