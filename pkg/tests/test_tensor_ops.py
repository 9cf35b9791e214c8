import numpy as np
import pytest
from hypothesis import given, strategies as st

from ahlfors import (
    OneFormField, ScalarField, SymTensorField, TwoFormField, VectorField,
    ahlfors_adjoint, cauchy_ahlfors, codiff, ext_d, flat, inner_l2, killing_op, norm_l2, sharp, trace_g, tracefree,
)
from ahlfors.errors import NotTraceFree, RankMismatch
from ahlfors.sampling import random_field, random_oneform, random_scalar
from ahlfors.tensor_ops import lie_metric, pointwise_inner

seeds = st.integers(0, 2**32 - 1)


def _sin_x_dx(m):
    comps = np.zeros((m.n,) + m.shape)
    comps[0] = np.sin(m.coords[0])
    return OneFormField(comps)


def test_killing_of_sin_x_dx(flat2):
    ks = killing_op(flat2, _sin_x_dx(flat2))
    x = flat2.coords[0]
    assert np.abs(ks.data[0] - np.cos(x)).max() < 1e-13
    assert np.abs(ks.data[1:]).max() < 1e-13
    assert np.abs(codiff(flat2, _sin_x_dx(flat2)).values + np.cos(x)).max() < 1e-13


def test_flat_sharp_bitwise_on_identity(flat3):
    th = random_oneform(flat3, np.random.default_rng(1))
    assert np.array_equal(flat(flat3, sharp(flat3, th)).data, th.data)


@given(seed=seeds)
def test_flat_sharp_roundtrip_curved(conf3, seed):
    th = random_oneform(conf3, np.random.default_rng(seed))
    back = flat(conf3, sharp(conf3, th))
    assert np.abs(back.data - th.data).max() <= 1e-14 * np.abs(th.data).max()


@given(seed=seeds)
def test_tracefree_is_tracefree_and_idempotent(conf2, seed):
    phi = random_field(SymTensorField, conf2, np.random.default_rng(seed))
    t = tracefree(conf2, phi)
    assert np.abs(trace_g(conf2, t).values).max() < 1e-12 * np.abs(phi.data).max()
    assert np.abs(tracefree(conf2, t).data - t.data).max() < 1e-13 * np.abs(phi.data).max()


@given(seed=seeds)
def test_cauchy_ahlfors_is_tracefree(conf3, seed):
    s = cauchy_ahlfors(conf3, random_oneform(conf3, np.random.default_rng(seed)))
    assert np.abs(trace_g(conf3, s).values).max() < 1e-12 * max(1.0, np.abs(s.data).max())


@given(seed=seeds)
def test_d_squared_zero(conf3, seed):
    f = random_scalar(conf3, np.random.default_rng(seed))
    assert np.abs(ext_d(conf3, ext_d(conf3, f)).data).max() < 1e-11


@given(seed=seeds)
def test_codiff_adjoint_of_d_on_functions(conf2, seed):
    rng = np.random.default_rng(seed)
    f, th = random_scalar(conf2, rng), random_oneform(conf2, rng)
    a, b = inner_l2(conf2, ext_d(conf2, f), th), inner_l2(conf2, f, codiff(conf2, th))
    assert abs(a - b) <= 1e-11 * norm_l2(conf2, ext_d(conf2, f)) * norm_l2(conf2, th)


@given(seed=seeds)
def test_codiff_adjoint_of_d_on_oneforms(conf3, seed):
    rng = np.random.default_rng(seed)
    th, w = random_oneform(conf3, rng), random_field(TwoFormField, conf3, rng)
    a, b = inner_l2(conf3, ext_d(conf3, th), w), inner_l2(conf3, th, codiff(conf3, w))
    assert abs(a - b) <= 1e-11 * norm_l2(conf3, ext_d(conf3, th)) * norm_l2(conf3, w)


@given(seed=seeds)
def test_ahlfors_adjointness(conf2, seed):
    rng = np.random.default_rng(seed)
    th = random_oneform(conf2, rng)
    w = tracefree(conf2, random_field(SymTensorField, conf2, rng))
    a, b = inner_l2(conf2, cauchy_ahlfors(conf2, th), w), inner_l2(conf2, th, ahlfors_adjoint(conf2, w))
    assert abs(a - b) <= 1e-11 * norm_l2(conf2, th) * norm_l2(conf2, w) * 10


def test_ahlfors_adjoint_requires_tracefree(flat2):
    with pytest.raises(NotTraceFree):
        ahlfors_adjoint(flat2, flat2.metric, require_tracefree=True)


def test_lie_metric_is_twice_killing(conf2):
    th = random_oneform(conf2, np.random.default_rng(3))
    xi = sharp(conf2, th)
    assert np.abs(lie_metric(conf2, xi).data - 2 * killing_op(conf2, flat(conf2, xi)).data).max() == 0.0


def test_translations_are_conformal_killing_on_conformal_metric(conf3):
    for i in range(3):
        v = np.zeros((3,) + conf3.shape)
        v[i] = 1.0
        th = flat(conf3, VectorField(v))
        assert norm_l2(conf3, cauchy_ahlfors(conf3, th)) < 1e-12


def test_pointwise_inner_rank_mismatch(flat2):
    with pytest.raises(RankMismatch):
        pointwise_inner(flat2, ScalarField.zeros(flat2.shape), OneFormField.zeros(flat2.shape))


def test_twoform_inner_is_half_full_contraction(flat2):
    w = random_field(TwoFormField, flat2, np.random.default_rng(0))
    full = w.full()
    assert np.allclose(pointwise_inner(flat2, w, w).values, 0.5 * (full * full).sum(axis=(0, 1)), rtol=1e-15)
