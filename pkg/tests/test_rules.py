import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gamma, hyp2f1

from mbhf.config.constants import Side
from mbhf.errors import NoMatch
from mbhf.expr import ONE, expr_equal, parse_expr
from mbhf.mb_model import integrals_equal, prefactor_value
from mbhf.models import GammaArg, GammaFactor, MBIntegral, TransformStep
from mbhf.quadrature import mb_quad
from mbhf.rules import (
    apply_step, apply_step_detailed, barnes_first_lemma_reduce, enumerate_steps, figure_reading, match_form,
)


def step(label):
    digits = ''.join(ch for ch in label if ch.isdigit())
    return TransformStep(tuple(int(d) for d in digits), label[len(digits)], label[len(digits) + 1])


def test_match_a_form_on_f1_second_variable(seeds):
    ext = match_form(seeds.get("F1"), [2], 'a')
    assert ext.gauss == (GammaArg.parse("a+z1"), GammaArg.parse("b'"), GammaArg.parse("c+z1"))
    assert expr_equal(ext.argument, parse_expr("y"))


def test_match_a_form_on_h_c_first_variable(seeds):
    ext = match_form(seeds.get("H_C"), [1], 'a')
    assert ext.gauss == (GammaArg.parse("a+z2"), GammaArg.parse("c+z3"), GammaArg.parse("d+z2+z3"))
    assert expr_equal(ext.argument, parse_expr("x"))


def test_match_k_form_on_f1(seeds):
    ext = match_form(seeds.get("F1"), [1, 2], 'k')
    assert ext.b == GammaArg.parse("b")
    assert ext.b_prime == GammaArg.parse("b'")
    assert ext.joint_num == (GammaArg.parse("a"),)
    assert ext.joint_den == (GammaArg.parse("c"),)


@pytest.mark.parametrize("vars, letter", [([1], 'c'), ([1, 2], 'l'), ([1, 2], 'm'), ([3], 'a'), ([1], 'k')])
def test_match_form_rejects_other_shapes(seeds, vars, letter):
    with pytest.raises(NoMatch):
        match_form(seeds.get("F1"), vars, letter)


def test_a_to_c_and_back_restores_integral(seeds):
    for name, i in [("2F1", 1), ("H_C", 1), ("F1", 2)]:
        m = seeds.get(name)
        there = apply_step(m, TransformStep((i,), 'a', 'C'))
        assert not integrals_equal(there, m)
        back = apply_step(there, TransformStep((i,), 'c', 'A'))
        assert integrals_equal(back, m)


gauss_like = st.tuples(
    st.permutations(["a", "b", "c", "d"]),
    st.lists(st.sampled_from(["0", "1/2", "1", "3/4", "2"]), min_size=3, max_size=3),
    st.sampled_from(["-x", "x", "y-x", "-x/(1-x)"]),
)


@settings(max_examples=100, deadline=None)
@given(gauss_like, st.sampled_from(["B", "C"]))
def test_round_trip_through_symmetric_targets(shape, target):
    names, shifts, kernel = shape
    args = [f"{n}+{k}+z1" for n, k in zip(names, shifts)]
    m = MBIntegral(1, (parse_expr(kernel),), (
        GammaFactor(GammaArg.parse("-z1")), GammaFactor(GammaArg.parse(args[0])),
        GammaFactor(GammaArg.parse(args[1])), GammaFactor(GammaArg.parse(args[2]), Side.DEN)))
    there = apply_step(m, TransformStep((1,), 'a', target))
    back = apply_step(there, TransformStep((1,), target.lower(), 'A'))
    assert integrals_equal(back, m)


def test_k_to_l_and_back_restores_f1(seeds):
    f1 = seeds.get("F1")
    kdf_type = apply_step(f1, step("12kL"))
    assert expr_equal(kdf_type.kernels[0], parse_expr("y-x"))
    assert integrals_equal(apply_step(kdf_type, step("12lK")), f1)


def test_euler_steps_commute(seeds):
    f1 = seeds.get("F1")
    first = apply_step(apply_step(f1, step("1aE")), step("2aE"))
    second = apply_step(apply_step(f1, step("2aE")), step("1aE"))
    assert integrals_equal(first, second)


def test_step_ledger_factor_mentions_power(seeds):
    _, ext, factor = apply_step_detailed(seeds.get("F1"), step("2aE"))
    assert ext.letter == 'a'
    assert "^(-b')" in factor and "y" in factor


def test_enumerate_steps_on_gauss_seed(seeds):
    labels = [s.label for s in enumerate_steps(seeds.get("2F1"))]
    assert labels == ["1aB", "1aC", "1aD", "1aE"]


def test_enumerate_steps_on_h_c(seeds):
    labels = {s.label for s in enumerate_steps(seeds.get("H_C"))}
    assert {"1aB", "1aC", "1aD", "1aE", "2aD", "3aE", "23kL", "23kM"} <= labels
    assert "1aA" not in labels


def test_figure_reading_of_pair_label(seeds):
    alternate = figure_reading(seeds.get("H_C"), step("23lK"))
    assert alternate == step("23kL")


def test_single_variable_steps_preserve_value(seeds):
    two_f1 = seeds.get("2F1")
    params = {'a': 0.31, 'b': 0.43, 'c': 2.11}
    point = {'z': -0.3 + 0.2j}
    reference = mb_quad(two_f1, params, point).value
    assert reference == pytest.approx(hyp2f1(0.31, 0.43, 2.11, -0.3 + 0.2j), rel=1e-6)
    for s in enumerate_steps(two_f1):
        value = mb_quad(apply_step(two_f1, s), params, point).value
        assert value == pytest.approx(reference, rel=1e-5), s.label


def test_barnes_first_lemma_closed_form():
    halves = [GammaFactor(GammaArg.parse(t)) for t in ("1/2+z1", "1/2+z1", "1/2-z1", "1/2-z1")]
    reduced = barnes_first_lemma_reduce(MBIntegral(1, (ONE,), tuple(halves)), 1)
    assert reduced.nvars == 0
    assert prefactor_value(reduced.prefactor, {}, {}) == pytest.approx(1.0)


def test_barnes_first_lemma_matches_quadrature():
    params = {'a': 0.3, 'b': 0.4, 'c': 0.6, 'd': 0.7}
    factors = tuple(GammaFactor(GammaArg.parse(t)) for t in ("a+z1", "b+z1", "c-z1", "d-z1"))
    m = MBIntegral(1, (ONE,), factors)
    reduced = barnes_first_lemma_reduce(m, 1)
    closed = gamma(0.9) * gamma(1.0) * gamma(1.0) * gamma(1.1) / gamma(2.0)
    assert prefactor_value(reduced.prefactor, params, {}) == pytest.approx(closed, rel=1e-12)
    assert mb_quad(m, params, {}).value == pytest.approx(closed, rel=1e-6)


def test_barnes_first_lemma_keeps_other_variables():
    factors = tuple(GammaFactor(GammaArg.parse(t)) for t in ("-z1", "a+z1", "b+z2", "c+z1+z2", "d-z2", "e-z2"))
    m = MBIntegral(2, (parse_expr("-x"), ONE), factors)
    reduced = barnes_first_lemma_reduce(m, 2)
    assert reduced.nvars == 1
    args = {g.arg for g in reduced.gammas if g.side is Side.NUM}
    assert GammaArg.parse("c+d+z1") in args


def test_barnes_first_lemma_needs_unit_kernel(seeds):
    with pytest.raises(NoMatch):
        barnes_first_lemma_reduce(seeds.get("2F1"), 1)
