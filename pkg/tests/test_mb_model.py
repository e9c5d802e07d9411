import cmath

import pytest
from scipy.special import gamma

from mbhf.config.constants import Side
from mbhf.errors import GammaPole, ModelError, NonPositiveKernelBase
from mbhf.expr import ONE, expr_equal, parse_expr
from mbhf.mb_model import (
    canonicalize, fold_exponents, integrals_equal, integrand_eval, prefactor_value, relabel,
)
from mbhf.models import GammaArg, GammaFactor, MBIntegral, ParamLin, Prefactor


def num(text):
    return GammaFactor(GammaArg.parse(text))


def den(text):
    return GammaFactor(GammaArg.parse(text), Side.DEN)


PRINTED_ORDER = ["-z1", "-z2", "b+z1", "z2", "a+z3", "a+a1+z3", "c+z3", "z1+z3", "-z2+z3", "z2-z3", "z2+2*z3"]


def test_canonical_order_of_mixed_factors():
    kernels = tuple(parse_expr(k) for k in ("-x", "-y", "-z"))
    shuffled = MBIntegral(3, kernels, tuple(num(t) for t in reversed(PRINTED_ORDER)))
    ordered = canonicalize(shuffled)
    assert [g.arg for g in ordered.gammas] == [GammaArg.parse(t) for t in PRINTED_ORDER]


def test_pure_factor_comes_first():
    m = MBIntegral(1, (parse_expr("-x"),), (num("a+z1"), num("-z1")))
    assert [g.arg for g in canonicalize(m).gammas] == [GammaArg.parse("-z1"), GammaArg.parse("a+z1")]


def test_canonicalize_is_idempotent(seeds):
    for name in seeds.names():
        once = canonicalize(seeds.get(name))
        assert canonicalize(once) == once


def test_canonicalize_moves_constant_gammas_and_cancels_pairs():
    m = MBIntegral(1, (parse_expr("-x"),),
                   (num("-z1"), num("a+z1"), den("a+z1"), num("b+z1"), num("c"), den("c+z1")))
    c = canonicalize(m)
    assert [g.arg for g in c.gammas] == [GammaArg.parse("-z1"), GammaArg.parse("b+z1"), GammaArg.parse("c+z1")]
    assert c.prefactor.gamma_ratios == ((ParamLin.parse("c"), Side.NUM),)


def test_fold_exponents_moves_z_dependence_into_kernels(seeds):
    f1 = seeds.get("F1")
    folded = fold_exponents(f1, [(parse_expr("1-x"), GammaArg.parse("-a-z2"))])
    assert expr_equal(folded.kernels[1], parse_expr("-y/(1-x)"))
    assert expr_equal(folded.kernels[0], parse_expr("-x"))
    (power,) = folded.prefactor.powers
    assert expr_equal(power.base, parse_expr("1-x"))
    assert power.exponent == ParamLin.parse("-a")


def test_fold_exponents_preserves_integrand(seeds, generic_params):
    f1 = seeds.get("F1")
    folded = fold_exponents(f1, [(parse_expr("1-x"), GammaArg.parse("-a-z2"))])
    point = {'x': -0.2, 'y': -0.15}
    for zvec in [(-0.1 + 0.3j, -0.2 - 0.4j), (-0.05 - 1.1j, -0.15 + 0.7j)]:
        raw = integrand_eval(f1, generic_params, point, zvec) * 1.2 ** (-generic_params['a'] - zvec[1])
        assert integrand_eval(folded, generic_params, point, zvec) == pytest.approx(raw, rel=1e-10)


def test_fold_exponents_without_z_dependence_appends_power(seeds):
    folded = fold_exponents(seeds.get("F1"), [(parse_expr("1-y"), GammaArg.parse("-b'"))])
    assert folded.kernels == seeds.get("F1").kernels
    assert len(folded.prefactor.powers) == 1


def test_integrand_eval_pole():
    two_f1 = MBIntegral(1, (parse_expr("-z"),), (num("-z1"), num("a+z1"), num("b+z1"), den("c+z1")))
    with pytest.raises(GammaPole):
        integrand_eval(two_f1, {'a': 1, 'b': 1, 'c': 1}, {'z': -1}, [0])


def test_integrand_eval_binomial_product():
    binomial = MBIntegral(1, (ONE,), (num("-z1"), num("1+z1")))
    s = 0.3j
    expected = gamma(-s) * gamma(1 + s)
    assert integrand_eval(binomial, {}, {}, [s]) == pytest.approx(expected, rel=1e-12)


def test_integrand_eval_rejects_negative_kernel(seeds):
    with pytest.raises(NonPositiveKernelBase):
        integrand_eval(seeds.get("2F1"), {'a': 0.3, 'b': 0.4, 'c': 2.0}, {'z': 0.5}, [-0.1])


def test_integrand_eval_h_c_is_finite(seeds):
    value = integrand_eval(seeds.get("H_C"), {'a': 0.3, 'b': 0.3, 'c': 0.3, 'd': 2.6},
                           {'x': -0.1, 'y': -0.1, 'z': -0.1}, [-0.05, -0.05, -0.05])
    assert cmath.isfinite(value)
    assert value != 0


def test_prefactor_value():
    prefactor = Prefactor.from_dict({'powers': [["1-x", "-a"]], 'gammaNum': ["c"], 'gammaDen': ["a"]})
    value = prefactor_value(prefactor, {'a': 0.5, 'c': 2.0}, {'x': 0.75})
    assert value == pytest.approx(0.25 ** -0.5 * gamma(2.0) / gamma(0.5))


def test_symmetric_relabeling_is_equal(seeds):
    f1 = seeds.get("F1")
    swapped = relabel(f1, {1: 2, 2: 1}, {'b': "b'", "b'": 'b'}, {'x': 'y', 'y': 'x'})
    assert integrals_equal(swapped, f1)
    assert not integrals_equal(f1, seeds.get("F2"))


def test_document_round_trip_keeps_canonical_form(seeds):
    for name in seeds.names():
        m = seeds.get(name)
        assert integrals_equal(MBIntegral.from_dict(m.to_dict()), m)


def test_check_rejects_free_variable():
    m = MBIntegral(2, (parse_expr("-x"), parse_expr("-y")), (num("-z1"), num("a+z1")))
    with pytest.raises(ModelError):
        m.check()
