import math

import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import hyp2f1, poch

from mbhf.config.constants import LITERATURE_SERIES_FILE
from mbhf.errors import (
    DenominatorPochPole, DuplicateName, PoleInNegativeExtension, UnregisteredDefinition, ValidationFailure,
)
from mbhf.expr import parse_expr
from mbhf.models import HornSeries, ParamLin, Prefactor, SamplePoint, SeriesBlock, SeriesCall
from mbhf.series import (
    NamedSeriesRegistry, block_eval, block_eval_detailed, default_registry, horn_eval, kampe_de_feriet, pochhammer,
)
from mbhf.storage.file_manager import data_path

GAUSS = HornSeries.from_dict({'args': ["z"], 'num': [["a", "m"], ["b", "m"]], 'den': [["c", "m"]]})


def call(name, params, args, shape=None):
    return SeriesCall(name, tuple(ParamLin.parse(p) for p in params), tuple(parse_expr(a) for a in args), shape)


@pytest.mark.parametrize("shift, n, expected", [
    (3, 4, 360), (5, -2, 1 / 12), (-2, 3, 0), (-2, 2, 2), (0.5, 0, 1), (1, 5, 120),
])
def test_pochhammer_values(shift, n, expected):
    assert pochhammer(shift, n) == pytest.approx(expected)


def test_pochhammer_large_index_uses_log_gamma():
    assert pochhammer(0.5, 100) == pytest.approx(poch(0.5, 100), rel=1e-10)


def test_pochhammer_negative_extension_pole():
    with pytest.raises(PoleInNegativeExtension):
        pochhammer(2, -3)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 3.0), st.integers(0, 10), st.integers(0, 10))
def test_pochhammer_addition(a, m, n):
    assert pochhammer(a, m + n) == pytest.approx(pochhammer(a, m) * pochhammer(a + m, n), rel=1e-9)


def test_gauss_series_closed_form():
    result = horn_eval(GAUSS, {'a': 1, 'b': 1, 'c': 2}, {'z': 0.5})
    assert result.converged
    assert result.value == pytest.approx(2 * math.log(2), rel=1e-10)


@pytest.mark.parametrize("z", [-0.3, 0.45, 0.2 + 0.3j, -0.5 - 0.1j])
def test_gauss_series_matches_scipy(z):
    value = horn_eval(GAUSS, {'a': 0.31, 'b': 0.43, 'c': 2.11}, {'z': z}).value
    assert value == pytest.approx(hyp2f1(0.31, 0.43, 2.11, z), rel=1e-9)


def test_terminating_series():
    result = horn_eval(GAUSS, {'a': -3, 'b': 0.5, 'c': 1.5}, {'z': 0.4})
    assert result.converged
    assert result.value == pytest.approx(hyp2f1(-3, 0.5, 1.5, 0.4), rel=1e-12)
    assert result.shells <= 5


def test_vanishing_denominator():
    with pytest.raises(DenominatorPochPole):
        horn_eval(GAUSS, {'a': 0.5, 'b': 0.5, 'c': -2}, {'z': 0.3})


def test_divergent_series_is_not_converged():
    result = horn_eval(GAUSS, {'a': 0.31, 'b': 0.43, 'c': 2.11}, {'z': 2.0}, maxN=60)
    assert not result.converged


def test_appell_f1_collapses_to_gauss(registry, generic_params):
    p = generic_params
    f1 = registry.instantiate(call("F1", ["a", "b", "b'", "c"], ["x", "y"]))
    value = horn_eval(f1, p, {'x': -0.2, 'y': 0}).value
    assert value == pytest.approx(hyp2f1(p['a'], p['b'], p['c'], -0.2), rel=1e-9)

    reduced = registry.reduce(call("F1", ["a", "b", "b'", "c"], ["x", "y"]), [1])
    assert reduced.name == "2F1"
    assert reduced.params == (ParamLin.parse("a"), ParamLin.parse("b'"), ParamLin.parse("c"))


def test_h_c_collapses_to_gauss(registry, generic_params):
    p = generic_params
    h_c = registry.instantiate(call("H_C", ["a", "b", "c", "d"], ["x", "y", "z"]))
    value = horn_eval(h_c, p, {'x': -0.25, 'y': 0, 'z': 0}).value
    assert value == pytest.approx(hyp2f1(p['a'], p['c'], p['d'], -0.25), rel=1e-9)


def test_kampe_de_feriet_generalizes_f1(registry, generic_params):
    kdf = call("KdF", ["a", "b", "b'", "c"], ["x", "y"], shape=(1, 1, 1, 1, 0, 0))
    point = {'x': -0.2, 'y': -0.15}
    f1 = registry.instantiate(call("F1", ["a", "b", "b'", "c"], ["x", "y"]))
    assert horn_eval(registry.instantiate(kdf), generic_params, point).value == pytest.approx(
        horn_eval(f1, generic_params, point).value, rel=1e-12)


def test_kampe_de_feriet_slots():
    entry = kampe_de_feriet((1, 2, 0, 0, 1, 1))
    assert entry.slots == ("a1", "b1", "b2", "d1", "dp1")
    with pytest.raises(UnregisteredDefinition):
        kampe_de_feriet((1, 1))


def test_registry_lookup(registry):
    assert {"2F1", "F1", "F2", "F3", "F4", "H_C", "KdF"} <= set(registry.names())
    with pytest.raises(UnregisteredDefinition):
        registry.get("H_B")


def test_register_without_mb_form_is_unvalidated():
    registry = NamedSeriesRegistry()
    entry = registry.register_named("G", GAUSS)
    assert entry.slots == ("a", "b", "c")
    assert not entry.validated
    with pytest.raises(DuplicateName):
        registry.register_named("G", GAUSS)


def test_register_validates_against_mb_form(seeds):
    registry = NamedSeriesRegistry()
    sample = SamplePoint({'a': 0.31, 'b': 0.43, 'c': 2.11}, {'z': -0.3})
    assert registry.register_named("G", GAUSS, seeds.get("2F1"), validation=sample).validated

    wrong = HornSeries.from_dict({'args': ["z"], 'num': [["a", "m"], ["a", "m"]], 'den': [["c", "m"]]})
    with pytest.raises(ValidationFailure):
        registry.register_named("W", wrong, seeds.get("2F1"), validation=sample)
    with pytest.raises(ValidationFailure):
        registry.register_named("V", GAUSS, seeds.get("2F1"))
    assert "W" not in registry


def test_literature_definitions_load(seeds):
    registry = NamedSeriesRegistry()
    added = registry.load_file(str(data_path(LITERATURE_SERIES_FILE)), validate=False, seed_lookup=seeds.get)
    assert added == ["H_B", "H2"]
    assert registry.get("H_B").mb_form.nvars == 3
    assert registry.get("H2").mb_form is None


@pytest.mark.slow
def test_shipped_series_match_their_mb_forms():
    registry = default_registry()
    checked = registry.validate_all()
    assert set(checked) == {"2F1", "F1", "F2", "F3", "F4", "H_C"}
    assert all(registry.get(name).validated for name in checked)


@pytest.mark.slow
def test_literature_mb_forms_validate(seeds):
    registry = NamedSeriesRegistry()
    registry.load_file(str(data_path(LITERATURE_SERIES_FILE)), seed_lookup=seeds.get)
    assert registry.get("H_B").validated
    assert not registry.get("H2").validated


def test_block_with_euler_prefactor(registry, generic_params):
    p = generic_params
    z = -0.4
    block = SeriesBlock(call("2F1", ["a", "c-b", "c"], ["z/(z-1)"]),
                        Prefactor.from_dict({'powers': [["1-z", "-a"]]}))
    assert block_eval(block, p, {'z': z}, registry=registry) == pytest.approx(
        hyp2f1(p['a'], p['b'], p['c'], z), rel=1e-9)


def test_block_needs_registry_for_calls():
    block = SeriesBlock(call("2F1", ["a", "b", "c"], ["z"]))
    with pytest.raises(UnregisteredDefinition):
        block_eval(block, {'a': 0.3, 'b': 0.4, 'c': 2.0}, {'z': 0.1})


def test_block_with_vanishing_prefactor_skips_series(registry):
    block = SeriesBlock(call("2F1", ["a", "b", "c"], ["z"]), Prefactor.from_dict({'gammaDen': ["a"]}))
    result = block_eval_detailed(block, {'a': -1, 'b': 0.4, 'c': 2.0}, {'z': 0.1}, registry=registry)
    assert result.value == 0
    assert result.converged
