import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ahlfors import ScalarField, SymTensorField, build_grid, constraint_report, corollary1_check, gen_momentum_data, theorem3_check
from ahlfors.constraints import hamiltonian_residual, momentum_residual
from ahlfors.errors import Inapplicable, NotFlat, NotTT
from ahlfors.sampling import random_scalar, tt_wave


def test_vacuum_zero(flat3):
    rep = constraint_report(flat3, SymTensorField.zeros(flat3.shape))
    assert rep.hamiltonian_norm <= 1e-13 and rep.momentum_norm <= 1e-13


def test_umbilical_T3_hamiltonian_is_six():
    m = build_grid(3, (16, 16, 16))
    rep = constraint_report(m, m.metric)
    assert np.all(rep.hamiltonian.values == 6.0)
    assert rep.momentum_norm <= 1e-13


@given(lam=st.floats(-10, 10), kappa=st.floats(0.1, 5), rho=st.floats(-3, 3))
def test_hamiltonian_matter_and_lambda_terms(flat2, lam, kappa, rho):
    K = SymTensorField.zeros(flat2.shape)
    r = ScalarField(np.full((1,) + flat2.shape, rho))
    h = hamiltonian_residual(flat2, K, cosmological=lam, kappa=kappa, rho=r)
    assert np.allclose(h.values, -2 * kappa * rho - 2 * lam, rtol=0, atol=1e-12 * (1 + abs(lam) + abs(kappa * rho)))


@settings(max_examples=8)
@given(seed=st.integers(0, 2**32 - 1), lam=st.floats(-5, 5))
def test_hamiltonian_linear_in_lambda(conf2, seed, lam):
    K = SymTensorField(np.stack([random_scalar(conf2, np.random.default_rng(seed), kmax=4).values] * 3))
    h0 = hamiltonian_residual(conf2, K).values
    h1 = hamiltonian_residual(conf2, K, cosmological=lam).values
    assert np.abs(h1 - (h0 - 2 * lam)).max() <= 4 * np.spacing(np.abs(h0).max() + 2 * abs(lam))


@settings(max_examples=5)
@given(seed=st.integers(0, 2**32 - 1), c=st.floats(-2, 2))
def test_generated_momentum_data_satisfies_constraint(flat2, seed, c):
    f = random_scalar(flat2, np.random.default_rng(seed), kmax=4)
    K, H = gen_momentum_data(flat2, f, c)
    assert constraint_report(flat2, K).momentum_norm < 1e-10 * max(1.0, np.abs(K.data).max())


def test_momentum_generator_needs_constant_metric(conf2):
    with pytest.raises(NotFlat):
        gen_momentum_data(conf2, ScalarField.zeros(conf2.shape), 0.0)


def test_momentum_generator_rejects_non_tt(flat2):
    with pytest.raises(NotTT):
        gen_momentum_data(flat2, ScalarField.zeros(flat2.shape), 0.0, SymTensorField.diag([np.cos(flat2.coords[0])] * 2))


def test_worked_theorem3():
    m = build_grid(2, (32, 32))
    K, _ = gen_momentum_data(m, ScalarField.from_values(np.cos(m.coords[0])), 0.0)
    rep = theorem3_check(m, K)
    assert rep.lhs == pytest.approx(np.pi ** 2, rel=1e-6)
    assert rep.rhs_derived == pytest.approx(np.pi ** 2, rel=1e-6)
    assert rep.fitted_c == pytest.approx(0.5, abs=1e-5)


@settings(max_examples=4)
@given(seed=st.integers(0, 2**32 - 1), c=st.floats(-1, 1))
def test_theorem3_coefficient_T3(flat3, seed, c):
    f = random_scalar(flat3, np.random.default_rng(seed), kmax=3)
    rep = theorem3_check(flat3, gen_momentum_data(flat3, f, c, tt_wave(flat3))[0])
    assert rep.fitted_c == pytest.approx(2 / 3, abs=1e-5)
    assert abs(rep.lhs - rep.rhs_derived) <= 1e-6 * abs(rep.lhs)


def test_corollary1_cmc_tt():
    m = build_grid(3, (32, 32, 32))
    K, _ = gen_momentum_data(m, ScalarField.zeros(m.shape), 1.5, tt_wave(m))
    rep = corollary1_check(m, K)
    assert rep.sd_H <= 1e-10 and rep.conformal_killing_ratio <= 1e-7
    assert rep.umbilic_tt_residual < 1e-12


def test_corollary1_inapplicable_without_momentum_constraint(flat2):
    K = SymTensorField.diag([np.cos(flat2.coords[1]), np.ones(flat2.shape)])
    assert momentum_residual(flat2, K) is not None
    with pytest.raises(Inapplicable):
        corollary1_check(flat2, K)
