import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpmix.channel import fujiwara_algoet_check
from gpmix.errors import InvalidWeights, OutOfTableRange, SpecParseError
from gpmix.mixtures import (Cos, Exp, ExpCos, MixtureSpec, SemigroupMix, Table, find_singularities,
                            invertibility_threshold, k_block_eigenvalues, lambda_to_p,
                            mixture_eigenvalue_derivatives, parse_eigenfunction, parse_weights,
                            scalar_roots)
from gpmix.worked_examples import mixture_cp_along


def test_family_values():
    assert Cos(2.0).value(math.pi / 4) == pytest.approx(0.0, abs=1e-15)
    f = ExpCos(0.3, 1.5)
    t = np.linspace(0, 5, 11)
    assert np.allclose(f.value(t), np.exp(-0.3 * t) * np.cos(1.5 * t), atol=1e-15)
    g = SemigroupMix(1.0, 3)
    assert g.value(0.0) == pytest.approx(1.0)
    assert g.value(math.log(4)) == pytest.approx(0.0, abs=1e-15)
    assert g.first_root() == pytest.approx(math.log(4))
    assert Exp(2.0).value(1.0) == pytest.approx(math.exp(-2))


@pytest.mark.parametrize("f", [Cos(1.3), ExpCos(0.4, 2.0), SemigroupMix(0.7, 5), Exp(1.1)])
def test_derivative_vs_finite_difference(f):
    t = np.linspace(0.1, 3.0, 30)
    h = 1e-6
    fd = (np.asarray(f.value(t + h)) - np.asarray(f.value(t - h))) / (2 * h)
    assert np.max(np.abs(fd - np.asarray(f.derivative(t)))) < 1e-8


def test_semigroup_mix_uniform_is_exponential():
    for d in (2, 3, 5, 7):
        m = MixtureSpec.uniform(d, SemigroupMix(1.0, d))
        t = np.linspace(0, 5, 501)
        assert np.max(np.abs(m.eigenvalues(t) - np.exp(-t)[:, None])) < 1e-12


def test_mixture_affine():
    m = MixtureSpec(2, [0.5, 0.25, 0.25], Cos(1.0))
    lam = m.eigenvalues(math.pi / 2)
    assert np.allclose(lam, [0.5, 0.25, 0.25], atol=1e-15)
    assert np.allclose(m.eigenvalues(0.0), 1.0)
    dl = mixture_eigenvalue_derivatives(m, 1.0)
    assert np.allclose(dl, -np.array([0.5, 0.75, 0.75]) * math.sin(1.0))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 10))
def test_mixture_is_convex_combination(seed, t):
    # mixing the component channels gives the affine eigenvalue formula
    rng = np.random.default_rng(seed)
    d = int(rng.choice([2, 3, 5]))
    x = rng.dirichlet(np.ones(d + 1))
    f = ExpCos(0.2, 1.0)
    lam = float(f.value(t))
    comps = np.full((d + 1, d + 1), lam)
    np.fill_diagonal(comps, 1.0)
    direct = x @ comps
    assert np.max(np.abs(MixtureSpec(d, x, f).eigenvalues(t) - direct)) < 1e-12


def test_mixture_stays_cp():
    for d, f in ((2, Cos(1.0)), (2, ExpCos(math.log(2) / math.pi, 1.0)), (3, SemigroupMix(1.0, 3))):
        x = np.random.default_rng(d).dirichlet(np.ones(d + 1))
        assert mixture_cp_along(MixtureSpec(d, x, f), 10.0, 1e-2)


def test_component_maps_cp_where_in_range():
    # lambda(t) in [-1/(d-1), 1] makes each component map CP
    for lam in np.linspace(-0.5, 1, 31):
        v = np.full(4, lam)
        v[0] = 1.0
        assert fujiwara_algoet_check(v, 3).is_cp
    assert not fujiwara_algoet_check([1.0, -0.6, -0.6, -0.6], 3).is_cp


def test_lambda_to_p():
    assert lambda_to_p(1.0, 3) == pytest.approx(0.0)
    assert lambda_to_p(-0.5, 3) == pytest.approx(1.0)


def test_threshold():
    assert invertibility_threshold([1 / 3] * 3) == (pytest.approx(-0.5), False)
    thr = invertibility_threshold([0.5, 0.5, 0.0])
    assert thr.forced_non_invertible and thr.value == 0.0
    assert invertibility_threshold([0.25] * 4).value == pytest.approx(-1 / 3)


def test_k_block():
    assert k_block_eigenvalues(3, 0.0, 3) == (pytest.approx(1 / 3), 0.0)
    assert k_block_eigenvalues(1, 0.2, 3) == (pytest.approx(1.0), 0.2)
    with pytest.raises(ValueError):
        k_block_eigenvalues(5, 0.0, 3)


def test_cos_roots_and_shift():
    m = MixtureSpec(2, np.full(3, 1 / 3), Cos(1.0))
    rep = find_singularities(m, 7.0)
    assert rep.verdict == "non-invertible"
    assert rep.slot_roots[0] == pytest.approx([2 * math.pi / 3, 4 * math.pi / 3], abs=1e-9)
    assert rep.shifts[0][0] == pytest.approx(math.pi / 6, abs=1e-9)
    # shift is forward in time: mixing delays the first singular point
    assert rep.shifts[0][0] > 0


def test_uniform_expcos_invertible():
    m = MixtureSpec.uniform(2, ExpCos(math.log(4) / math.pi, 1.0))
    rep = find_singularities(m, 10.0)
    assert rep.invertible and rep.verdict == "invertible"
    assert rep.component_roots[0] == pytest.approx(math.pi / 2, abs=1e-9)
    assert rep.min_lambda > rep.threshold


def test_zero_weight_verdict():
    m = MixtureSpec(2, [1.0, 0.0, 0.0], Cos(1.0))
    rep = find_singularities(m, 5.0)
    assert rep.verdict == "non-invertible (zero weight)"
    assert rep.slot_roots[0] == []
    assert rep.slot_roots[1] == pytest.approx([math.pi / 2, 3 * math.pi / 2], abs=1e-9)


def test_added_singularity():
    m = MixtureSpec(3, [1 / 3, 1 / 3, 1 / 3, 0.0], ExpCos(math.log(2) / math.pi, 1.0))
    rep = find_singularities(m, 4.0)
    assert rep.slot_roots[3] == pytest.approx([math.pi / 2], abs=1e-9)
    for a in range(3):
        assert min(abs(r - math.pi) for r in rep.slot_roots[a]) < 1e-9
        # frozen: lambda dips below -1/2 before pi, giving an earlier crossing
        assert rep.slot_roots[a][0] == pytest.approx(2.714021899679625, abs=1e-9)


def test_tangential_root():
    assert scalar_roots(lambda t: (np.asarray(t) - 1.0) ** 2, 3.0, 0.013) == pytest.approx([1.0], abs=1e-6)


def test_weights_validation():
    with pytest.raises(InvalidWeights):
        MixtureSpec(3, [1, 0, 0], Cos(1.0))
    with pytest.raises(InvalidWeights):
        MixtureSpec(2, [0.5, 0.6, -0.1], Cos(1.0))
    with pytest.raises(InvalidWeights):
        MixtureSpec(2, [0.5, 0.5, 0.1], Cos(1.0))


def test_parse_weights():
    assert np.array_equal(parse_weights("1/3,1/3,1/3"), np.full(3, 1 / 3))
    assert np.array_equal(parse_weights("0.5, 0.5, 0"), [0.5, 0.5, 0.0])
    for bad in ("1/3,1/3", "a,b", "1,-0.5,0.5", "1/0,1"):
        with pytest.raises(SpecParseError):
            parse_weights(bad)


def test_parse_eigenfunction():
    assert parse_eigenfunction("cos:omega=2", 2) == Cos(2.0)
    assert parse_eigenfunction("expcos:Z=0.1,omega=1", 2) == ExpCos(0.1, 1.0)
    assert parse_eigenfunction("semigroup-mix:r=1", 3) == SemigroupMix(1.0, 3)
    assert parse_eigenfunction("exp:r=1/2", 3) == Exp(0.5)
    for bad in ("sin:omega=1", "cos:w=1", "cos:omega", "expcos:Z=1", "table:"):
        with pytest.raises(SpecParseError):
            parse_eigenfunction(bad, 2)


def test_table(tmp_path):
    t = np.linspace(0, 5, 501)
    p = tmp_path / "lam.csv"
    p.write_text("t,lambda\n" + "\n".join(f"{a:.17g},{b:.17g}" for a, b in zip(t, np.cos(t))) + "\n")
    f = parse_eigenfunction(f"table:{p}", 2)
    assert isinstance(f, Table)
    s = np.linspace(0, 5, 57)
    assert np.max(np.abs(f.value(s) - np.cos(s))) < 1e-7
    assert np.max(np.abs(f.derivative(s) + np.sin(s))) < 1e-4
    with pytest.raises(OutOfTableRange):
        f.value(5.5)
    rep = find_singularities(MixtureSpec(2, np.full(3, 1 / 3), f), 5.0)
    assert rep.slot_roots[0] == pytest.approx([2 * math.pi / 3, 4 * math.pi / 3], abs=1e-6)


def test_table_requires_header(tmp_path):
    p = tmp_path / "lam.csv"
    p.write_text("0,1\n1,0.5\n2,0.2\n3,0.1\n")
    with pytest.raises(SpecParseError):
        Table.from_csv(p)
    p.write_text("t,lambda\n0,1\n1,oops\n")
    with pytest.raises(SpecParseError):
        Table.from_csv(p)
