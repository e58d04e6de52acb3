import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpmix.errors import ComponentSingular, SingularRateOnGrid
from gpmix.generators import (RateProfile, component_gamma_integral, component_rate, k_block_rates,
                              mixture_rates, mixture_rates_simplified, propagate_timelocal,
                              regularity_scan)
from gpmix.mixtures import Cos, EigenFunction, Exp, ExpCos, MixtureSpec, SemigroupMix
from gpmix.volterra import TimeGrid, Trajectory, compare_trajectories


def test_component_rate_values():
    assert component_rate(Exp(2.0), 1.3) == pytest.approx(2.0)
    assert component_rate(Cos(1.0), 1.0) == pytest.approx(math.tan(1.0))
    assert component_rate(Cos(1.0), math.pi / 2) == math.inf
    assert component_gamma_integral(Exp(0.5), 2.0) == pytest.approx(1.0)
    with pytest.raises(ComponentSingular):
        component_gamma_integral(Cos(1.0), 2.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 1.2))
def test_rates_sum_and_forms_agree(seed, t):
    rng = np.random.default_rng(seed)
    d = int(rng.choice([2, 3, 5]))
    x = rng.dirichlet(np.ones(d + 1))
    m = MixtureSpec(d, x, ExpCos(0.3, 1.0))
    g = mixture_rates(m, t)
    gs = mixture_rates_simplified(m, t)
    assert np.max(np.abs(g - gs)) <= 1e-9 * max(1.0, np.max(np.abs(g)))
    # sum_alpha gamma_alpha = gamma_0 = (1/d) sum_beta gamma (1-x_beta)/(...)
    g0 = g.sum()
    q = -(1 - x) * float(m.f.derivative(t)) / m.eigenvalues(t)
    assert abs(g0 - q.sum() / d) <= 1e-9 * max(1.0, abs(g0))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.floats(0.05, 1.0))
def test_k_block_matches_general(d, t):
    f = ExpCos(0.2, 1.3)
    for k in range(1, d + 2):
        x = np.zeros(d + 1)
        x[:k] = 1.0 / k
        g = mixture_rates(MixtureSpec(d, x, f), t)
        shared, passthrough = k_block_rates(k, component_rate(f, t), component_gamma_integral(f, t), d)
        assert np.allclose(g[:k], shared, atol=1e-10)
        assert np.allclose(g[k:], passthrough, atol=1e-10)


def test_k_block_sign_structure():
    # while lambda decays, the passthrough slots get non-positive rates
    for d in (2, 3, 5):
        for k in range(2, d + 1):
            s, p = k_block_rates(k, 0.7, 0.4, d)
            assert p < 0 < s
    assert k_block_rates(1, 0.7, 0.4, 3) == (pytest.approx(0.7), 0.0)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_semigroup_rates_constant(d):
    m = MixtureSpec.uniform(d, SemigroupMix(1.0, d))
    ts = np.linspace(0.01, 0.99 * math.log(d + 1), 50)
    for t in ts:
        assert np.max(np.abs(mixture_rates(m, t) - 1.0 / d)) <= 1e-12
    # the simplified form stays finite through and past the component root
    g = mixture_rates_simplified(m, np.linspace(0, 5, 501))
    assert np.max(np.abs(g - 1.0 / d)) <= 1e-12
    assert regularity_scan(m, 5.0).kind == "regular"


def test_regularity_kinds():
    v = regularity_scan(MixtureSpec(2, np.full(3, 1 / 3), Cos(1.0)), 7.0)
    assert v.kind == "singular"
    assert v.singular_at == pytest.approx([2 * math.pi / 3, 4 * math.pi / 3], abs=1e-9)
    assert v.component_singular_at == pytest.approx([math.pi / 2, 3 * math.pi / 2], abs=1e-9)
    v = regularity_scan(MixtureSpec.uniform(2, ExpCos(math.log(4) / math.pi, 1.0)), 10.0)
    assert v.kind == "regular" and not v.forced_non_invertible
    # tangential zero: lambda reaches -1/2 with zero slope at pi
    v = regularity_scan(MixtureSpec(2, np.full(3, 1 / 3), Touch()), 4.0)
    assert v.kind == "indeterminate"


class Touch(EigenFunction):
    """Reaches -1/2 with zero slope at t = pi."""

    tag = "touch"

    def value(self, t):
        return -0.5 + 1.5 * ((1 + np.cos(np.asarray(t, dtype=float))) / 2) ** 2

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        return -0.75 * (1 + np.cos(t)) * np.sin(t)


def test_propagate_constant_rates():
    prof = RateProfile.constant([0.2, 0.5, 0.1])
    tr = propagate_timelocal(prof, TimeGrid(2.0, 1e-2))
    g = np.array([0.2, 0.5, 0.1])
    want = np.exp((g - g.sum())[:, None] * tr.t[None, :])
    assert np.max(np.abs(tr.values - want)) < 1e-10


def test_propagate_single_slot_matches_lambda():
    f = ExpCos(0.3, 0.5)
    tr = propagate_timelocal(RateProfile.single_slot(f, 2, 1), TimeGrid(2.0, 1e-3))
    # gamma L_1: slot 1 keeps 1, the other slots follow lambda
    assert np.max(np.abs(tr.values[0] - 1.0)) < 1e-12
    other = Trajectory(tr.grid, tr.values[1:])
    assert compare_trajectories(other, f.value)[0] < 1e-10


def test_propagate_semigroup_mixture():
    m = MixtureSpec.uniform(3, SemigroupMix(1.0, 3))
    tr = propagate_timelocal(RateProfile.from_mixture(m), TimeGrid(3.0, 1e-3))
    assert compare_trajectories(tr, lambda t: np.exp(-np.asarray(t)))[0] < 1e-12


def test_propagate_refuses_singular_rates():
    m = MixtureSpec(2, np.full(3, 1 / 3), Cos(1.0))
    with pytest.raises(SingularRateOnGrid):
        propagate_timelocal(RateProfile.from_mixture(m), TimeGrid(2 * math.pi / 3, math.pi / 300))


def test_gamma_alpha_integral():
    m = MixtureSpec.uniform(2, SemigroupMix(1.0, 2))
    prof = RateProfile.from_mixture(m)
    assert np.allclose(prof.Gamma_alpha(2.0), 1.0, atol=1e-9)
    assert prof.gamma0(0.5) == pytest.approx(1.5)


def test_deterministic():
    m = MixtureSpec(3, [0.1, 0.2, 0.3, 0.4], ExpCos(0.2, 1.0))
    t = np.linspace(0, 1, 101)
    assert np.array_equal(mixture_rates_simplified(m, t), mixture_rates_simplified(m, t))
