import math

import pytest
from scipy.special import hyp2f1

from mbhf.errors import Infeasible, PoleAtNonpositiveInteger
from mbhf.expr import parse_expr
from mbhf.models import GammaArg, GammaFactor, MBIntegral, ParamLin, SeriesCall
from mbhf.quadrature import ContourSpec, find_contour, log_gamma, mb_quad
from mbhf.series import horn_eval

GAUSS_PARAMS = {'a': 0.31, 'b': 0.43, 'c': 2.11}


def integral(kernels, *args):
    return MBIntegral(len(kernels), tuple(parse_expr(k) for k in kernels),
                      tuple(GammaFactor(GammaArg.parse(a)) for a in args))


def test_log_gamma_values():
    assert log_gamma(1) == pytest.approx(0)
    assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)))


@pytest.mark.parametrize("t", [k / 2 for k in range(1, 41)])
def test_log_gamma_on_the_critical_line(t):
    # log |Γ(1/2 + it)|^2 = log π - log cosh(πt)
    expected = math.log(math.pi) - (math.pi * t + math.log1p(math.exp(-2 * math.pi * t)) - math.log(2))
    assert 2 * log_gamma(0.5 + 1j * t).real == pytest.approx(expected, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("z", [0, -1, -2, -7 + 0j])
def test_log_gamma_poles(z):
    with pytest.raises(PoleAtNonpositiveInteger):
        log_gamma(z)


def test_contour_separates_pole_sequences(seeds):
    contour = find_contour(seeds.get("2F1"), GAUSS_PARAMS)
    (r,) = contour.real_parts
    assert -0.31 < r < 0
    assert contour.margin == pytest.approx(0.155, abs=1e-6)


def test_contour_search_infeasible():
    with pytest.raises(Infeasible):
        find_contour(integral(["1"], "-z1", "-1/2+z1"), {})


def test_binomial_integral():
    result = mb_quad(integral(["x"], "-z1", "a+z1"), {'a': 1}, {'x': 1})
    assert result.value == pytest.approx(0.5, rel=1e-8)
    assert result.error_estimate < 1e-6
    assert abs(result.value - 0.5) <= max(result.error_estimate, 1e-12)


def test_step_is_halved_until_nested_grids_agree():
    m = integral(["x"], "-z1", "a+z1")
    single = mb_quad(m, {'a': 1}, {'x': 1}, max_refinements=0)
    refined = mb_quad(m, {'a': 1}, {'x': 1}, rtol=1e-12)
    assert single.refinements == 0
    assert refined.refinements >= 1
    assert refined.h == pytest.approx(single.h / 2 ** refined.refinements)
    assert abs(refined.value - 0.5) < abs(single.value - 0.5) + 1e-15


def test_error_estimate_covers_a_finer_run(seeds):
    point = {'z': -0.3}
    base = mb_quad(seeds.get("2F1"), GAUSS_PARAMS, point)
    finer = mb_quad(seeds.get("2F1"), GAUSS_PARAMS, point, T=2 * base.T, h=base.h / 2, max_refinements=0)
    assert abs(finer.value - base.value) <= base.error_estimate + 1e-14


def test_gauss_integral_matches_series(seeds):
    for z in (-0.3, -0.8, 0.4 + 0.3j):
        value = mb_quad(seeds.get("2F1"), GAUSS_PARAMS, {'z': z}).value
        assert value == pytest.approx(hyp2f1(0.31, 0.43, 2.11, z), rel=1e-6)


def test_explicit_contour_gives_same_value(seeds):
    m = seeds.get("2F1")
    found = mb_quad(m, GAUSS_PARAMS, {'z': -0.3})
    given = mb_quad(m, GAUSS_PARAMS, {'z': -0.3}, contour=ContourSpec((-0.2,), 0.11))
    assert given.contour.real_parts == (-0.2,)
    assert given.value == pytest.approx(found.value, rel=1e-6)


def test_two_fold_integral_matches_series(seeds, registry, generic_params):
    point = {'x': -0.2, 'y': -0.15}
    f1 = registry.instantiate(SeriesCall("F1", tuple(ParamLin.parse(p) for p in ("a", "b", "b'", "c")),
                                         (parse_expr("x"), parse_expr("y"))))
    series = horn_eval(f1, generic_params, point).value
    assert mb_quad(seeds.get("F1"), generic_params, point).value == pytest.approx(series, rel=1e-5)


def test_deterministic_threads_are_bit_stable(seeds, generic_params):
    point = {'x': -0.2, 'y': -0.15}
    m = seeds.get("F1")
    single = mb_quad(m, generic_params, point, threads=1)
    threaded = mb_quad(m, generic_params, point, threads=4)
    assert threaded.value == single.value
    loose = mb_quad(m, generic_params, point, threads=4, deterministic=False)
    assert loose.value == pytest.approx(single.value, rel=1e-12)


def test_unit_kernel_integral():
    # first Barnes lemma with a = b = c = d = 1/2
    result = mb_quad(integral(["1"], "1/2+z1", "1/2+z1", "1/2-z1", "1/2-z1"), {}, {})
    assert result.value == pytest.approx(1.0, rel=1e-7)


# three points inside each series' convergence region; F4 stays on the negative
# axes, where its MB integral converges, with a fast-decaying diagonal ridge
SEED_ORACLE = [
    ("2F1", GAUSS_PARAMS, [{'z': -0.3}, {'z': -0.6}, {'z': 0.2 + 0.3j}], 1e-6),
    ("F1", {'a': 0.31, 'b': 0.43, "b'": 0.57, 'c': 2.11},
     [{'x': -0.2, 'y': -0.15}, {'x': -0.4, 'y': -0.1}, {'x': 0.1 + 0.2j, 'y': -0.3}], 1e-6),
    ("F2", {'a': 0.31, 'b': 0.43, "b'": 0.57, 'c': 2.11, "c'": 1.73},
     [{'x': -0.2, 'y': -0.15}, {'x': -0.3, 'y': -0.25}, {'x': 0.1 + 0.2j, 'y': -0.2}], 1e-6),
    ("F3", {'a': 0.31, "a'": 0.29, 'b': 0.43, "b'": 0.57, 'c': 2.11},
     [{'x': -0.2, 'y': -0.15}, {'x': -0.4, 'y': -0.1}, {'x': 0.1 + 0.2j, 'y': -0.3}], 1e-6),
    ("F4", {'a': 1.31, 'b': 1.43, 'c': 3.61, "c'": 3.23},
     [{'x': -0.05, 'y': -0.04}, {'x': -0.08, 'y': -0.03}, {'x': -0.03, 'y': -0.1}], 1e-6),
    pytest.param("H_C", {'a': 0.9, 'b': 0.9, 'c': 0.9, 'd': 2.6},
                 [{'x': -0.1, 'y': -0.1, 'z': -0.1}, {'x': -0.2, 'y': -0.05, 'z': -0.1},
                  {'x': -0.1, 'y': -0.15, 'z': -0.05}], 1e-3, marks=pytest.mark.slow),
]


@pytest.mark.parametrize("name, params, points, rel", SEED_ORACLE)
def test_seed_integral_matches_its_series(seeds, registry, name, params, points, rel):
    template = registry.get(name).template
    for point in points:
        series = horn_eval(template, params, point)
        assert series.converged
        assert mb_quad(seeds.get(name), params, point).value == pytest.approx(series.value, rel=rel)
