"""
Canonical form, exponent folding and numerical evaluation of MB integrals.

The canonical Gamma order is:
  (i)   bare Γ(-z_i) factors first, ascending i;
  (ii)  fewer integration variables before more;
  (iii) smaller variable indices first, then the coefficient vectors compared
        lexicographically (negative before positive);
  (iv)  parameter-free shifts before parameterized ones, parameterized shifts
        by their sorted parameter names, then coefficients and constant,
        numerator before denominator.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np
from scipy.special import loggamma

from .config.constants import Side, LOG_MAGNITUDE_LIMIT, POLE_EPS
from .errors import GammaPole, NonPositiveKernelBase, BranchCutViolation, Overflow
from .expr import Expr, Sym, Mul, IntPow, ONE, eval_expr, expr_equal, simplify_basic, substitute
from .models import GammaArg, GammaFactor, MBIntegral, ParamLin, PowerFactor, Prefactor

logger = logging.getLogger(__name__)

RawPower = Tuple[Expr, GammaArg]


# ---------------------------------------------------------------------------
# Canonical form
# ---------------------------------------------------------------------------

def gamma_sort_key(g: GammaFactor):
    """Sort key realizing the canonical Gamma order."""
    arg = g.arg
    if g.side is Side.NUM and arg.is_pure:
        return (0, arg.variables[0])
    shift = arg.shift
    return (
        1,
        len(arg.zcoeffs),
        arg.variables,
        arg.coefficients,
        0 if shift.is_constant else 1,
        shift.names(),
        tuple(value for _, value in shift.coeffs),
        shift.constant,
        0 if g.side is Side.NUM else 1,
    )


def _ratio_sort_key(ratio: Tuple[ParamLin, Side]):
    arg, side = ratio
    return (0 if side is Side.NUM else 1, arg.names(), tuple(v for _, v in arg.coeffs), arg.constant)


def cancel_pairs(numerators: Sequence, denominators: Sequence) -> Tuple[List, List]:
    """Remove items present on both sides, as multisets, keeping order."""
    common = Counter(numerators) & Counter(denominators)
    if not common:
        return list(numerators), list(denominators)

    def strip(items):
        pending = Counter(common)
        kept = []
        for item in items:
            if pending[item]:
                pending[item] -= 1
            else:
                kept.append(item)
        return kept

    return strip(numerators), strip(denominators)


def normalize_powers(powers: Iterable[PowerFactor]) -> Tuple[PowerFactor, ...]:
    """Merge powers with equal bases and drop trivial ones."""
    merged: List[List] = []
    for power in powers:
        base = simplify_basic(power.base)
        for entry in merged:
            if expr_equal(entry[0], base):
                entry[1] = entry[1] + power.exponent
                break
        else:
            merged.append([base, power.exponent])
    return tuple(
        PowerFactor(base, exponent) for base, exponent in merged
        if exponent != ParamLin() and not expr_equal(base, ONE)
    )


def route_gammas(factors: Iterable[Tuple[GammaArg, Side]]) -> Tuple[List[GammaFactor], List[Tuple[ParamLin, Side]]]:
    """Split Gamma factors into integrand factors (z-dependent) and prefactor ratios."""
    integrand, ratios = [], []
    for arg, side in factors:
        if arg.zcoeffs:
            integrand.append(GammaFactor(arg, side))
        else:
            ratios.append((arg.shift, side))
    return integrand, ratios


def canonicalize(m: MBIntegral) -> MBIntegral:
    """
    Bring an integral to canonical form: cancel equal numerator/denominator
    Gammas, move z-free Gammas into the prefactor, sort the Gamma list, merge
    powers and simplify kernels. Idempotent.
    """
    integrand, moved = route_gammas((g.arg, g.side) for g in m.gammas)
    nums, dens = cancel_pairs([g.arg for g in integrand if g.side is Side.NUM],
                              [g.arg for g in integrand if g.side is Side.DEN])
    gammas = sorted([GammaFactor(a, Side.NUM) for a in nums] + [GammaFactor(a, Side.DEN) for a in dens],
                    key=gamma_sort_key)

    ratios = list(m.prefactor.gamma_ratios) + moved
    ratio_nums, ratio_dens = cancel_pairs([a for a, s in ratios if s is Side.NUM],
                                          [a for a, s in ratios if s is Side.DEN])
    ratios = sorted([(a, Side.NUM) for a in ratio_nums] + [(a, Side.DEN) for a in ratio_dens],
                    key=_ratio_sort_key)

    prefactor = Prefactor(normalize_powers(m.prefactor.powers), tuple(ratios), m.prefactor.constant)
    kernels = tuple(simplify_basic(k) for k in m.kernels)
    return MBIntegral(m.nvars, kernels, tuple(gammas), prefactor)


def fold_exponents(m: MBIntegral, raw_powers: Iterable[RawPower]) -> MBIntegral:
    """
    Multiply raw powers base^(shift + Σ c_j z_j) into the integral.

    The z-dependent part multiplies kernel_j by base^c_j; the shift is kept as
    a PowerFactor.
    """
    kernels = list(m.kernels)
    powers = []
    for base, exponent in raw_powers:
        for index, coeff in exponent.zcoeffs:
            kernels[index - 1] = simplify_basic(Mul(kernels[index - 1], IntPow(base, coeff)))
        if exponent.shift != ParamLin():
            powers.append(PowerFactor(base, exponent.shift))
    return MBIntegral(m.nvars, tuple(kernels), m.gammas, m.prefactor.with_powers(powers))


def relabel(m: MBIntegral, zmap: Mapping[int, int], param_map: Mapping[str, str] = None,
            var_map: Mapping[str, str] = None) -> MBIntegral:
    """
    Rename integration variables (z_i -> z_zmap[i]), parameters and point variables.
    All renamings are simultaneous.
    """
    param_map = param_map or {}
    var_subst = {old: Sym(new) for old, new in (var_map or {}).items()}
    kernels: List[Expr] = [None] * m.nvars
    for index, kernel in enumerate(m.kernels, start=1):
        kernels[zmap[index] - 1] = substitute(kernel, var_subst)
    gammas = tuple(GammaFactor(g.arg.renumber(zmap).rename(param_map), g.side) for g in m.gammas)
    prefactor = Prefactor(
        tuple(PowerFactor(substitute(p.base, var_subst), p.exponent.rename(param_map)) for p in m.prefactor.powers),
        tuple((arg.rename(param_map), side) for arg, side in m.prefactor.gamma_ratios),
        m.prefactor.constant,
    )
    return MBIntegral(m.nvars, tuple(kernels), gammas, prefactor)


# ---------------------------------------------------------------------------
# Equality
# ---------------------------------------------------------------------------

def _power_product(powers: Sequence[PowerFactor], pick, scale: int) -> Expr:
    product: Expr = ONE
    for power in powers:
        exponent = pick(power.exponent) * scale
        if exponent:
            product = Mul(product, IntPow(power.base, int(exponent)))
    return product


def powers_equivalent(first: Sequence[PowerFactor], second: Sequence[PowerFactor]) -> bool:
    """
    True when Π base^exponent agrees for every parameter value.

    Exponents are compared parameter by parameter: for each parameter (and for
    the constant part) the bases raised to the coefficients, cleared of
    denominators, must multiply to the same rational function.
    """
    names = set()
    for power in list(first) + list(second):
        names.update(power.exponent.names())
    picks = [lambda e, name=name: e.coeff(name) for name in sorted(names)]
    picks.append(lambda e: e.constant)
    for pick in picks:
        denominators = [Fraction(pick(p.exponent)).denominator for p in list(first) + list(second)]
        scale = lcm(*denominators) if denominators else 1
        if not expr_equal(_power_product(first, pick, scale), _power_product(second, pick, scale)):
            return False
    return True


def integrals_equal(m1: MBIntegral, m2: MBIntegral) -> bool:
    """Structural equality of canonical forms, kernels and powers compared as rational functions."""
    c1, c2 = canonicalize(m1), canonicalize(m2)
    if c1.nvars != c2.nvars or c1.gammas != c2.gammas:
        return False
    if Counter(c1.prefactor.gamma_ratios) != Counter(c2.prefactor.gamma_ratios):
        return False
    if c1.prefactor.constant != c2.prefactor.constant:
        return False
    if not all(expr_equal(k1, k2) for k1, k2 in zip(c1.kernels, c2.kernels)):
        return False
    return powers_equivalent(c1.prefactor.powers, c2.prefactor.powers)


# ---------------------------------------------------------------------------
# Numerical evaluation
# ---------------------------------------------------------------------------

def pole_mask(values: np.ndarray) -> np.ndarray:
    """Elementwise test for nonpositive integers."""
    values = np.asarray(values, dtype=complex)
    nearest = np.round(values.real)
    return (np.abs(values.imag) < POLE_EPS) & (nearest <= 0) & (np.abs(values.real - nearest) < POLE_EPS)


def _is_integer(value: complex) -> bool:
    return abs(value.imag) < POLE_EPS and abs(value.real - round(value.real)) < POLE_EPS


def complex_power(base: complex, exponent: complex) -> complex:
    """Principal-branch power; integer exponents accept any nonzero base."""
    if _is_integer(exponent):
        n = int(round(exponent.real))
        if base == 0 and n < 0:
            raise BranchCutViolation("zero base raised to a negative power")
        return complex(base) ** n
    if abs(base.imag) == 0 and base.real <= 0:
        raise BranchCutViolation(f"base {base} lies on the branch cut for exponent {exponent}")
    return complex(np.exp(exponent * np.log(complex(base))))


def gamma_ratio_value(ratios: Iterable[Tuple[ParamLin, Side]], params: Mapping[str, complex]) -> complex:
    """Value of Π Γ(num)/Π Γ(den); a denominator pole gives zero."""
    log_total = 0j
    for arg, side in ratios:
        value = arg.evaluate(params)
        if pole_mask(value):
            if side is Side.NUM:
                raise GammaPole(f"Γ({arg.to_text()}) has a pole at {value}")
            return 0j
        log_total += side.sign * complex(loggamma(value))
    return complex(np.exp(log_total))


def prefactor_value(prefactor: Prefactor, params: Mapping[str, complex], point: Mapping[str, complex]) -> complex:
    """Numerical value of a prefactor at a parameter/point assignment."""
    env = {**params, **point}
    value = complex(float(prefactor.constant))
    for power in prefactor.powers:
        value *= complex_power(eval_expr(power.base, env), power.exponent.evaluate(params))
    return value * gamma_ratio_value(prefactor.gamma_ratios, params)


@dataclass
class CompiledIntegrand:
    """An integral with parameters and point fixed, ready for vectorized evaluation in z."""
    nvars: int
    prefactor: complex
    log_kernels: np.ndarray
    num_shift: np.ndarray
    num_coeff: np.ndarray
    den_shift: np.ndarray
    den_coeff: np.ndarray

    def log_terms(self, Z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Log of the z-dependent integrand at the columns of Z (shape nvars x N).

        Returns:
            (log values, mask of points where a denominator Gamma has a pole)
        """
        log = self.log_kernels @ Z if self.nvars else np.zeros(Z.shape[1], dtype=complex)
        zero = np.zeros(Z.shape[1], dtype=bool)
        if len(self.num_shift):
            args = self.num_shift[:, None] + self.num_coeff @ Z
            if pole_mask(args).any():
                raise GammaPole("numerator Gamma evaluated at a pole")
            log = log + loggamma(args).sum(axis=0)
        if len(self.den_shift):
            args = self.den_shift[:, None] + self.den_coeff @ Z
            poles = pole_mask(args)
            log = log - np.where(poles, 0, loggamma(np.where(poles, 1, args))).sum(axis=0)
            zero |= poles.any(axis=0)
        return log, zero

    def values(self, Z: np.ndarray) -> np.ndarray:
        log, zero = self.log_terms(Z)
        if np.any(log.real[~zero] > LOG_MAGNITUDE_LIMIT):
            raise Overflow(f"integrand log-magnitude exceeds {LOG_MAGNITUDE_LIMIT}")
        out = self.prefactor * np.exp(np.where(zero, 0, log))
        out[zero] = 0
        return out


def _gamma_arrays(args: Sequence[GammaArg], params: Mapping[str, complex], nvars: int):
    shifts = np.array([a.shift.evaluate(params) for a in args], dtype=complex)
    coeffs = np.zeros((len(args), nvars), dtype=complex)
    for row, arg in enumerate(args):
        for index, value in arg.zcoeffs:
            coeffs[row, index - 1] = value
    return shifts, coeffs


def compile_integrand(m: MBIntegral, params: Mapping[str, complex], point: Mapping[str, complex]) -> CompiledIntegrand:
    """
    Fix parameters and point of an integral.

    Raises:
        NonPositiveKernelBase: a kernel evaluates on (-inf, 0]
        BranchCutViolation: a prefactor power is ambiguous at the point
    """
    env = {**params, **point}
    log_kernels = []
    for index, kernel in enumerate(m.kernels, start=1):
        value = eval_expr(kernel, env)
        if value.imag == 0 and value.real <= 0:
            raise NonPositiveKernelBase(f"kernel of z{index} evaluates to {value.real}")
        log_kernels.append(np.log(value))
    num_shift, num_coeff = _gamma_arrays(m.numerators, params, m.nvars)
    den_shift, den_coeff = _gamma_arrays(m.denominators, params, m.nvars)
    return CompiledIntegrand(
        nvars=m.nvars,
        prefactor=prefactor_value(m.prefactor, params, point),
        log_kernels=np.array(log_kernels, dtype=complex),
        num_shift=num_shift, num_coeff=num_coeff,
        den_shift=den_shift, den_coeff=den_coeff,
    )


def integrand_eval(m: MBIntegral, params: Mapping[str, complex], point: Mapping[str, complex],
                   zvec: Sequence[complex]) -> complex:
    """
    Prefactor times Π kernel_i^{z_i} times the Gamma factors, at one z tuple.

    Raises:
        GammaPole: a numerator Gamma sits on a pole
        NonPositiveKernelBase: a kernel evaluates on (-inf, 0]
    """
    compiled = compile_integrand(m, params, point)
    Z = np.asarray(zvec, dtype=complex).reshape(m.nvars, 1)
    return complex(compiled.values(Z)[0])


def numeric_params(params: Mapping[str, object]) -> Dict[str, complex]:
    """Coerce a parameter mapping to complex values."""
    return {name: complex(value) for name, value in params.items()}
