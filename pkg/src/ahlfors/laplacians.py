"""Second-order operators on one-forms and numerical checks of the identities linking them.

    hodge     Delta_H = d delta + delta d
    sampson   Delta_S = 2 delta delta* - d delta
    ahlfors   S*S     = delta S

The Ahlfors operator admits three equivalent second-order expansions,
each assembled here literally from its right-hand side:

    S*S = 1/2 delta d + (n-1)/n d delta - Ric(xi, .)
        = 1/2 Delta_H + (n-2)/(2n) d delta - Ric(xi, .)
        = 1/2 Delta_S + (n-2)/(2n) d delta

together with the Weitzenbock relation Delta_H = Delta_S + 2 Ric.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import OneFormField, SymTensorField
from .grid import GridManifold
from .sampling import random_field
from .tensor_ops import (
    ahlfors_adjoint,
    cauchy_ahlfors,
    codiff,
    div_sym2,
    ext_d,
    inner_l2,
    killing_op,
    norm_l2,
    pointwise_inner,
    sharp,
)

IDENTITIES = ("adjointness", "ahlfors_expansion", "ahlfors_hodge", "weitzenbock", "ahlfors_sampson")


def ricci_action(m: GridManifold, theta: OneFormField) -> OneFormField:
    """Ric(xi, .) with xi = theta^#."""
    xi = sharp(m, theta)
    return OneFormField(np.einsum("ij...,i...->j...", m.ricci.full(), xi.data))


def d_delta(m: GridManifold, theta: OneFormField) -> OneFormField:
    return ext_d(m, codiff(m, theta))


def delta_d(m: GridManifold, theta: OneFormField) -> OneFormField:
    return codiff(m, ext_d(m, theta))


def hodge_laplacian(m: GridManifold, theta: OneFormField) -> OneFormField:
    return d_delta(m, theta) + delta_d(m, theta)


def sampson_laplacian(m: GridManifold, theta: OneFormField) -> OneFormField:
    return 2.0 * div_sym2(m, killing_op(m, theta)) - d_delta(m, theta)


def ahlfors_direct(m: GridManifold, theta: OneFormField) -> OneFormField:
    """S*S theta by composing the Cauchy-Ahlfors operator with its adjoint."""
    return ahlfors_adjoint(m, cauchy_ahlfors(m, theta))


def ahlfors_via_expansion(m: GridManifold, theta: OneFormField) -> OneFormField:
    """1/2 delta d theta + (n-1)/n d delta theta - Ric(xi, .)."""
    n = m.n
    return 0.5 * delta_d(m, theta) + ((n - 1) / n) * d_delta(m, theta) - ricci_action(m, theta)


def ahlfors_via_hodge(m: GridManifold, theta: OneFormField) -> OneFormField:
    """1/2 Delta_H theta + (n-2)/(2n) d delta theta - Ric(xi, .)."""
    n = m.n
    return 0.5 * hodge_laplacian(m, theta) + ((n - 2) / (2 * n)) * d_delta(m, theta) - ricci_action(m, theta)


def ahlfors_via_sampson(m: GridManifold, theta: OneFormField) -> OneFormField:
    """1/2 Delta_S theta + (n-2)/(2n) d delta theta."""
    n = m.n
    return 0.5 * sampson_laplacian(m, theta) + ((n - 2) / (2 * n)) * d_delta(m, theta)


def relative_error(m: GridManifold, a: OneFormField, b: OneFormField) -> float:
    num = norm_l2(m, a - b)
    den = max(norm_l2(m, a), norm_l2(m, b))
    if num == 0.0:
        return 0.0
    return num / den if den > 0 else float("inf")


def _worst_node(m: GridManifold, a: OneFormField, b: OneFormField) -> list[int]:
    diff = a - b
    mag = pointwise_inner(m, diff, diff).values
    return [int(i) for i in np.unravel_index(np.argmax(mag), m.shape)]


@dataclass
class IdentityReport:
    """Worst relative error of each identity over the drawn samples."""

    errors: dict[str, float]
    samples: int
    metric: dict
    seed: int
    worst_node: dict[str, list[int] | None] = field(default_factory=dict)

    def max_error(self) -> float:
        return max(self.errors.values())

    def passed(self, tol: float) -> bool:
        return all(np.isfinite(e) and e <= tol for e in self.errors.values())

    def as_dict(self) -> dict:
        return {
            "errors": dict(self.errors),
            "samples": self.samples,
            "metric": self.metric,
            "seed": self.seed,
            "worst_node": dict(self.worst_node),
        }


def verify_identities(m: GridManifold, seed: int = 42, samples: int = 5, kmax: int | None = None) -> IdentityReport:
    """Draw seeded band-limited samples and measure every operator identity.

    The two sides of each identity go through different operator chains:
    the composed S*S (Killing operator, trace projection, tensor
    divergence) is checked against the exterior-calculus expansions, and
    the Sampson form is checked against the first expansion, with which it
    shares only d delta.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    errors = {k: 0.0 for k in IDENTITIES}
    worst = {k: None for k in IDENTITIES}
    for _ in range(samples):
        theta = random_field(OneFormField, m, rng, kmax)
        phi = random_field(SymTensorField, m, rng, kmax)

        ks = killing_op(m, theta)
        dphi = div_sym2(m, phi)
        lhs, rhs = inner_l2(m, phi, ks), inner_l2(m, dphi, theta)
        scale = max(norm_l2(m, phi) * norm_l2(m, ks), norm_l2(m, dphi) * norm_l2(m, theta))
        err = abs(lhs - rhs) / scale if scale > 0 else abs(lhs - rhs)
        errors["adjointness"] = max(errors["adjointness"], err)

        direct = ahlfors_direct(m, theta)
        expansion = ahlfors_via_expansion(m, theta)
        hodge = hodge_laplacian(m, theta)
        sampson = sampson_laplacian(m, theta)
        pairs = {
            "ahlfors_expansion": (direct, expansion),
            "ahlfors_hodge": (direct, ahlfors_via_hodge(m, theta)),
            "weitzenbock": (hodge, sampson + 2.0 * ricci_action(m, theta)),
            "ahlfors_sampson": (expansion, ahlfors_via_sampson(m, theta)),
        }
        for name, (a, b) in pairs.items():
            e = relative_error(m, a, b)
            if e >= errors[name]:
                errors[name] = e
                worst[name] = _worst_node(m, a, b)
    return IdentityReport(errors=errors, samples=samples, metric=m.describe(), seed=seed, worst_node=worst)
