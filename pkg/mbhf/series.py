"""
Summation of multivariable Pochhammer series and the named-series registry.

Series are summed over total-degree shells |m|+|n|+|p| = N. Pochhammer
factors with generic shifts are evaluated as log-Gamma differences; shifts
that are integers go through exact products so that terminating numerators
and vanishing denominators are detected.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import fsum
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln, loggamma

from .config.constants import (
    Side, DEFAULT_SERIES_TOL, DEFAULT_MAXN_SINGLE, DEFAULT_MAXN_DOUBLE, DEFAULT_MAXN_TRIPLE,
    MIN_CONVERGENCE_SHELL, MIN_DIVERGENCE_SHELL, GROWTH_SHELLS, DIRECT_POCHHAMMER_LIMIT,
    POLE_EPS, TRANSFORM_TOL_HIGH, TRANSFORM_TOL_LOW,
)
from .errors import (
    PoleInNegativeExtension, DenominatorPochPole, ArgumentPole, ValidationFailure,
    DuplicateName, UnregisteredDefinition, PoleAtPoint,
)
from .expr import Sym, eval_expr
from .mb_model import prefactor_value
from .models import (
    HornSeries, LinearForm, MBIntegral, ParamLin, PochFactor, Reduction, SamplePoint, SeriesBlock, SeriesCall,
)

logger = logging.getLogger(__name__)

KDF_NAME = "KdF"


def _integer_valued(value: complex) -> bool:
    return abs(value.imag) < POLE_EPS and abs(value.real - round(value.real)) < POLE_EPS


def pochhammer(shift: complex, n: int) -> complex:
    """
    (shift)_n = Γ(shift+n)/Γ(shift) for every integer n.

    Raises:
        PoleInNegativeExtension: n < 0 and one of shift-1, ..., shift+n vanishes
    """
    a = complex(shift)
    n = int(n)
    if n == 0:
        return 1 + 0j
    exact = _integer_valued(a)
    if n > 0:
        if exact and round(a.real) <= 0 and round(a.real) + n - 1 >= 0:
            return 0j
        if exact or n <= DIRECT_POCHHAMMER_LIMIT:
            return complex(np.prod(a + np.arange(n)))
        return complex(np.exp(loggamma(a + n) - loggamma(a)))
    factors = a - np.arange(1, -n + 1)
    if exact and np.any(np.abs(factors) < POLE_EPS):
        raise PoleInNegativeExtension(f"({a})_{n} divides by zero")
    if exact or -n <= DIRECT_POCHHAMMER_LIMIT:
        return complex(1 / np.prod(factors))
    return complex(np.exp(loggamma(a + n) - loggamma(a)))


@lru_cache(maxsize=1024)
def _shell_indices(nindices: int, N: int) -> np.ndarray:
    if nindices == 1:
        rows = [(N,)]
    elif nindices == 2:
        rows = [(m, N - m) for m in range(N + 1)]
    else:
        rows = [(m, n, N - m - n) for m in range(N + 1) for n in range(N - m + 1)]
    indices = np.array(rows, dtype=np.int64)
    indices.setflags(write=False)
    return indices


@dataclass
class SeriesResult:
    """Value of a summed series with its tail estimate and stopping state."""
    value: complex
    tail_estimate: float
    converged: bool
    shells: int


def _default_max_shells(nindices: int) -> int:
    return {1: DEFAULT_MAXN_SINGLE, 2: DEFAULT_MAXN_DOUBLE}.get(nindices, DEFAULT_MAXN_TRIPLE)


def horn_eval(series: HornSeries, params: Mapping[str, complex], point: Mapping[str, complex],
              tol: float = DEFAULT_SERIES_TOL, maxN: Optional[int] = None) -> SeriesResult:
    """
    Sum a Horn-type series shell by shell.

    Summation stops when the absolute sum of the last shell falls below
    tol * |partial sum| (from shell 4 on), when maxN is reached, or when the
    shell sums grow three times in a row (from shell 16 on).

    Raises:
        ArgumentPole: an argument cannot be evaluated at the point
        DenominatorPochPole: a denominator Pochhammer symbol vanishes
    """
    maxN = _default_max_shells(series.nindices) if maxN is None else maxN
    env = {**params, **point}
    args = []
    for arg in series.args:
        try:
            args.append(eval_expr(arg, env))
        except PoleAtPoint as e:
            raise ArgumentPole(str(e))
    args = np.array(args, dtype=complex)
    zero_args = args == 0
    log_args = np.log(np.where(zero_args, 1, args))

    generic, exact = [], []
    for poch in series.pochs:
        if poch.form.is_zero:
            continue
        shift = poch.shift.evaluate(params)
        coeffs = np.array(poch.form.coeffs[:series.nindices], dtype=np.int64)
        if _integer_valued(shift):
            exact.append((shift, coeffs, poch.side))
        else:
            generic.append((shift, complex(loggamma(shift)), coeffs, poch.side))
    constant = complex(float(series.constant))

    shells_re: List[float] = []
    shells_im: List[float] = []
    previous = None
    growth = 0
    converged = False
    tail = float('inf')
    N = 0
    with np.errstate(over='ignore', invalid='ignore'):
        for N in range(maxN + 1):
            idx = _shell_indices(series.nindices, N)
            log_terms = idx @ log_args - gammaln(idx + 1).sum(axis=1)
            for shift, log_shift, coeffs, side in generic:
                log_terms = log_terms + side.sign * (loggamma(shift + idx @ coeffs) - log_shift)
            terms = constant * np.exp(log_terms)
            if zero_args.any():
                terms[(idx[:, zero_args] > 0).any(axis=1)] = 0
            for shift, coeffs, side in exact:
                counts = idx @ coeffs
                values = {int(k): pochhammer(shift, int(k)) for k in np.unique(counts)}
                factors = np.array([values[int(k)] for k in counts], dtype=complex)
                if side is Side.DEN:
                    live = terms != 0
                    if np.any(factors[live] == 0):
                        raise DenominatorPochPole(f"denominator ({shift})_n vanishes in shell {N}")
                    terms = np.divide(terms, factors, out=np.zeros_like(terms), where=live)
                else:
                    terms = terms * factors

            shells_re.append(fsum(terms.real))
            shells_im.append(fsum(terms.imag))
            tail = fsum(np.abs(terms))
            total = complex(fsum(shells_re), fsum(shells_im))

            if N >= MIN_CONVERGENCE_SHELL and (tail <= tol * abs(total) or (tail == 0 and total == 0)):
                converged = True
                break
            if previous is not None and tail > previous:
                growth += 1
            else:
                growth = 0
            previous = tail
            if N >= MIN_DIVERGENCE_SHELL and growth >= GROWTH_SHELLS:
                logger.warning(f"series shells grow from shell {N - growth}; stopping at {N}")
                break

    total = complex(fsum(shells_re), fsum(shells_im))
    if not converged:
        logger.warning(f"series not converged after {N + 1} shells (tail {tail:.3e})")
    return SeriesResult(total, tail, converged, N + 1)


# ---------------------------------------------------------------------------
# Named series
# ---------------------------------------------------------------------------

@dataclass
class NamedSeries:
    """A registry entry: a series template whose parameters are named slots."""
    name: str
    slots: Tuple[str, ...]
    template: HornSeries
    mb_form: Optional[MBIntegral] = None
    validation: Optional[SamplePoint] = None
    reductions: Tuple[Reduction, ...] = ()
    validated: bool = False
    source: str = "builtin"

    def instantiate(self, call: SeriesCall) -> HornSeries:
        if len(call.params) != len(self.slots):
            raise UnregisteredDefinition(
                f"{self.name} takes {len(self.slots)} parameters, call passes {len(call.params)}")
        if len(call.args) != self.template.nindices:
            raise UnregisteredDefinition(
                f"{self.name} takes {self.template.nindices} arguments, call passes {len(call.args)}")
        return self.template.substitute(dict(zip(self.slots, call.params))).with_args(call.args)


def kampe_de_feriet(shape: Sequence[int]) -> NamedSeries:
    """
    Template of the Kampé de Fériet function F^{p:q;k}_{l:m;n}(x, y).

    Args:
        shape: group sizes (p, q, k, l, m, n): joint, first and second numerator
            parameters, then joint, first and second denominator parameters
    """
    shape = tuple(int(v) for v in shape)
    if len(shape) != 6:
        raise UnregisteredDefinition(f"Kampé de Fériet shape needs 6 group sizes, got {shape}")
    groups = [
        ('a', 'm+n', Side.NUM), ('b', 'm', Side.NUM), ('bp', 'n', Side.NUM),
        ('c', 'm+n', Side.DEN), ('d', 'm', Side.DEN), ('dp', 'n', Side.DEN),
    ]
    slots, pochs = [], []
    for (prefix, form, side), size in zip(groups, shape):
        for k in range(1, size + 1):
            slot = f"{prefix}{k}"
            slots.append(slot)
            pochs.append(PochFactor(ParamLin.of({slot: 1}), LinearForm.parse(form), side))
    template = HornSeries(2, (Sym('x'), Sym('y')), tuple(pochs))
    return NamedSeries(KDF_NAME, tuple(slots), template, validated=True)


class NamedSeriesRegistry:
    """Named hypergeometric series available to identities and the CLI."""

    def __init__(self):
        self._entries: Dict[str, NamedSeries] = {}

    def __contains__(self, name: str) -> bool:
        return name == KDF_NAME or name in self._entries

    def names(self) -> List[str]:
        return sorted(self._entries) + [KDF_NAME]

    def get(self, name: str) -> NamedSeries:
        try:
            return self._entries[name]
        except KeyError:
            raise UnregisteredDefinition(f"series '{name}' is not registered")

    def register_named(self, name: str, template: HornSeries, mb_form: Optional[MBIntegral] = None,
                       slots: Optional[Sequence[str]] = None, validation: Optional[SamplePoint] = None,
                       reductions: Iterable[Reduction] = (), validate: bool = True,
                       source: str = "user") -> NamedSeries:
        """
        Add a named series.

        Args:
            name: registry name
            template: series whose parameters are the slot names
            mb_form: MB representation of the same function, checked by quadrature
            slots: ordered parameter slots; defaults to the template's parameters
            validation: point at which series and MB form are compared
            reductions: lower-variable reductions declared for this series
            validate: compare series and MB form now

        Raises:
            DuplicateName: the name is taken
            ValidationFailure: series and MB form disagree
        """
        if name in self:
            raise DuplicateName(f"series '{name}' is already registered")
        entry = NamedSeries(name, tuple(slots or template.parameters()), template, mb_form,
                            validation, tuple(reductions), source=source)
        if mb_form is not None and validate:
            self._validate(entry)
        elif mb_form is None:
            logger.warning(f"series '{name}' registered without an MB form; left unvalidated")
        self._entries[name] = entry
        logger.debug(f"registered series '{name}' from {source}")
        return entry

    def _validate(self, entry: NamedSeries) -> None:
        from .quadrature import mb_quad

        if entry.validation is None:
            raise ValidationFailure(f"series '{entry.name}' has an MB form but no validation point")
        params, point = entry.validation.params, entry.validation.point
        series_value = horn_eval(entry.template, params, point).value
        quad_value = mb_quad(entry.mb_form, params, point).value
        deviation = abs(series_value - quad_value) / max(abs(quad_value), 1e-300)
        tolerance = TRANSFORM_TOL_HIGH if entry.mb_form.nvars >= 3 else TRANSFORM_TOL_LOW
        if deviation > tolerance:
            raise ValidationFailure(
                f"series '{entry.name}' = {series_value} but its MB form gives {quad_value}")
        entry.validated = True
        logger.info(f"validated series '{entry.name}' (relative deviation {deviation:.2e})")

    def validate_all(self) -> List[str]:
        """Validate every entry that carries an MB form; returns their names."""
        checked = []
        for name in sorted(self._entries):
            entry = self._entries[name]
            if entry.mb_form is not None:
                self._validate(entry)
                checked.append(name)
        return checked

    def entry_for(self, call: SeriesCall) -> NamedSeries:
        if call.name == KDF_NAME:
            if call.shape is None:
                raise UnregisteredDefinition("Kampé de Fériet call needs a shape")
            return kampe_de_feriet(call.shape)
        return self.get(call.name)

    def instantiate(self, call: SeriesCall) -> HornSeries:
        return self.entry_for(call).instantiate(call)

    def reduce(self, call: SeriesCall, zero_args: Sequence[int]) -> SeriesCall:
        """The declared lower-variable call equal to ``call`` with ``zero_args`` set to zero."""
        entry = self.get(call.name)
        for reduction in entry.reductions:
            if tuple(sorted(zero_args)) == tuple(sorted(reduction.zero_args)):
                mapping = dict(zip(entry.slots, call.params))
                return SeriesCall(reduction.target,
                                  tuple(p.substitute(mapping) for p in reduction.params),
                                  tuple(call.args[k - 1] for k in reduction.args))
        raise UnregisteredDefinition(f"no reduction of '{call.name}' for zero arguments {list(zero_args)}")

    def load_file(self, path: str, validate: bool = True,
                  seed_lookup: Optional[Callable[[str], MBIntegral]] = None) -> List[str]:
        """Register every entry of a named-series document; returns the new names."""
        from .storage.codec import read_named_series

        added = []
        for entry in read_named_series(path, seed_lookup):
            self.register_named(validate=validate, source=path, **entry)
            added.append(entry['name'])
        logger.info(f"loaded {len(added)} series from {path}")
        return added


def default_registry() -> NamedSeriesRegistry:
    """Registry with the shipped series: 2F1, the Appell functions and H_C."""
    from .notation import default_seeds
    from .storage.file_manager import data_path
    from .config.constants import NAMED_SERIES_FILE

    registry = NamedSeriesRegistry()
    seeds = default_seeds()
    registry.load_file(str(data_path(NAMED_SERIES_FILE)), validate=False, seed_lookup=seeds.get)
    return registry


# ---------------------------------------------------------------------------
# Blocks
# ---------------------------------------------------------------------------

def _resolve(series, registry: Optional[NamedSeriesRegistry]) -> HornSeries:
    if isinstance(series, SeriesCall):
        if registry is None:
            raise UnregisteredDefinition(f"series '{series.name}' needs a registry")
        return registry.instantiate(series)
    return series


def block_eval_detailed(block: SeriesBlock, params: Mapping[str, complex], point: Mapping[str, complex],
                        tol: float = DEFAULT_SERIES_TOL, maxN: Optional[int] = None,
                        registry: Optional[NamedSeriesRegistry] = None) -> SeriesResult:
    """Prefactor times series, with the series' stopping state."""
    factor = prefactor_value(block.prefactor, params, point)
    if factor == 0:
        return SeriesResult(0j, 0.0, True, 0)
    result = horn_eval(_resolve(block.series, registry), params, point, tol, maxN)
    return SeriesResult(factor * result.value, abs(factor) * result.tail_estimate,
                        result.converged, result.shells)


def block_eval(block: SeriesBlock, params: Mapping[str, complex], point: Mapping[str, complex],
               tol: float = DEFAULT_SERIES_TOL, maxN: Optional[int] = None,
               registry: Optional[NamedSeriesRegistry] = None) -> complex:
    """
    Value of a prefactored series block.

    Raises:
        BranchCutViolation: a prefactor base lies on (-inf, 0] with a non-integer exponent
    """
    return block_eval_detailed(block, params, point, tol, maxN, registry).value
