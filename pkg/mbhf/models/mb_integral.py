"""Data models for Mellin-Barnes integrals."""

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Any, Iterable, Mapping, Optional, Tuple, List

from ..config.constants import Side
from ..errors import CodecError, ModelError, NonLinearExpression
from ..expr import Expr, Sym, parse_expr, to_text, linear_coefficients, substitute, symbols

_ZVAR = re.compile(r"^z([1-9])$")


def _fraction_text(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _linear_text(terms: Iterable[Tuple[str, Fraction]], constant: Fraction) -> str:
    """Format a linear combination such as a-c+1 or -z1+2*z3."""
    pieces = []
    for name, coeff in terms:
        magnitude = abs(coeff)
        body = name if magnitude == 1 else f"{_fraction_text(magnitude)}*{name}"
        pieces.append(('-' if coeff < 0 else '+', body))
    if constant != 0 or not pieces:
        pieces.append(('-' if constant < 0 else '+', _fraction_text(abs(constant))))
    text = ''.join(sign + body for sign, body in pieces)
    return text[1:] if text.startswith('+') else text


def rename_symbols(e: Expr, mapping: Mapping[str, str]) -> Expr:
    return substitute(e, {old: Sym(new) for old, new in mapping.items()})


@dataclass(frozen=True)
class ParamLin:
    """Rational linear combination of named parameters plus a rational constant."""
    coeffs: Tuple[Tuple[str, Fraction], ...] = ()
    constant: Fraction = Fraction(0)

    def __post_init__(self):
        merged: Dict[str, Fraction] = {}
        for name, value in self.coeffs:
            merged[name] = merged.get(name, Fraction(0)) + Fraction(value)
        object.__setattr__(self, 'coeffs', tuple(sorted((k, v) for k, v in merged.items() if v != 0)))
        object.__setattr__(self, 'constant', Fraction(self.constant))

    @classmethod
    def of(cls, coeffs: Optional[Mapping[str, Fraction]] = None, constant=0) -> 'ParamLin':
        return cls(tuple((coeffs or {}).items()), Fraction(constant))

    @classmethod
    def parse(cls, text: str) -> 'ParamLin':
        """Parse text such as "1-d+a+b"."""
        coeffs, constant = linear_coefficients(parse_expr(text))
        return cls.of(coeffs, constant)

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    def names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.coeffs)

    def coeff(self, name: str) -> Fraction:
        return dict(self.coeffs).get(name, Fraction(0))

    def __add__(self, other: 'ParamLin') -> 'ParamLin':
        return ParamLin(self.coeffs + other.coeffs, self.constant + other.constant)

    def __neg__(self) -> 'ParamLin':
        return ParamLin(tuple((k, -v) for k, v in self.coeffs), -self.constant)

    def __sub__(self, other: 'ParamLin') -> 'ParamLin':
        return self + (-other)

    def scale(self, factor) -> 'ParamLin':
        factor = Fraction(factor)
        return ParamLin(tuple((k, factor * v) for k, v in self.coeffs), factor * self.constant)

    def shifted(self, amount) -> 'ParamLin':
        return ParamLin(self.coeffs, self.constant + Fraction(amount))

    def evaluate(self, params: Mapping[str, complex]) -> complex:
        total = complex(float(self.constant))
        for name, value in self.coeffs:
            if name not in params:
                raise ModelError(f"no value for parameter '{name}'")
            total += float(value) * complex(params[name])
        return total

    def substitute(self, mapping: Mapping[str, 'ParamLin']) -> 'ParamLin':
        """Replace parameters by linear combinations."""
        result = ParamLin.of(constant=self.constant)
        for name, value in self.coeffs:
            result = result + mapping.get(name, ParamLin.of({name: 1})).scale(value)
        return result

    def rename(self, mapping: Mapping[str, str]) -> 'ParamLin':
        return ParamLin(tuple((mapping.get(k, k), v) for k, v in self.coeffs), self.constant)

    def to_text(self) -> str:
        return _linear_text(self.coeffs, self.constant)

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class GammaArg:
    """Argument of a Gamma function: a parameter shift plus integer multiples of z_i."""
    shift: ParamLin = field(default_factory=ParamLin)
    zcoeffs: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        merged: Dict[int, int] = {}
        for index, value in self.zcoeffs:
            merged[index] = merged.get(index, 0) + int(value)
        object.__setattr__(self, 'zcoeffs', tuple(sorted((k, v) for k, v in merged.items() if v != 0)))

    @classmethod
    def of(cls, shift: ParamLin = None, zcoeffs: Optional[Mapping[int, int]] = None) -> 'GammaArg':
        return cls(shift or ParamLin(), tuple((zcoeffs or {}).items()))

    @classmethod
    def var(cls, index: int, coeff: int = 1) -> 'GammaArg':
        return cls(ParamLin(), ((index, coeff),))

    @classmethod
    def parse(cls, text: str) -> 'GammaArg':
        """Parse text such as "d-a-c+z1" or "-z2+z3"; z1..z9 are integration variables."""
        coeffs, constant = linear_coefficients(parse_expr(text))
        params = {}
        zcoeffs = {}
        for name, value in coeffs.items():
            match = _ZVAR.match(name)
            if match:
                if value.denominator != 1:
                    raise NonLinearExpression(f"integration variable {name} needs an integer coefficient in {text!r}")
                zcoeffs[int(match.group(1))] = int(value)
            else:
                params[name] = value
        return cls.of(ParamLin.of(params, constant), zcoeffs)

    @property
    def variables(self) -> Tuple[int, ...]:
        return tuple(index for index, _ in self.zcoeffs)

    @property
    def coefficients(self) -> Tuple[int, ...]:
        return tuple(value for _, value in self.zcoeffs)

    def coeff(self, index: int) -> int:
        return dict(self.zcoeffs).get(index, 0)

    def depends_on(self, index: int) -> bool:
        return self.coeff(index) != 0

    @property
    def is_pure(self) -> bool:
        """True for the bare Γ(-z_i) shape."""
        return self.shift == ParamLin() and len(self.zcoeffs) == 1 and self.zcoeffs[0][1] == -1

    def without(self, *indices: int) -> 'GammaArg':
        return GammaArg(self.shift, tuple((k, v) for k, v in self.zcoeffs if k not in indices))

    def with_var(self, index: int, coeff: int = 1) -> 'GammaArg':
        return GammaArg(self.shift, self.zcoeffs + ((index, coeff),))

    def __add__(self, other: 'GammaArg') -> 'GammaArg':
        return GammaArg(self.shift + other.shift, self.zcoeffs + other.zcoeffs)

    def __neg__(self) -> 'GammaArg':
        return GammaArg(-self.shift, tuple((k, -v) for k, v in self.zcoeffs))

    def __sub__(self, other: 'GammaArg') -> 'GammaArg':
        return self + (-other)

    def renumber(self, mapping: Mapping[int, int]) -> 'GammaArg':
        return GammaArg(self.shift, tuple((mapping[k], v) for k, v in self.zcoeffs))

    def rename(self, mapping: Mapping[str, str]) -> 'GammaArg':
        return GammaArg(self.shift.rename(mapping), self.zcoeffs)

    def to_text(self) -> str:
        terms = list(self.shift.coeffs) + [(f"z{k}", Fraction(v)) for k, v in self.zcoeffs]
        return _linear_text(terms, self.shift.constant)

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class GammaFactor:
    """Γ(arg) in the numerator or the denominator."""
    arg: GammaArg
    side: Side = Side.NUM

    def to_text(self) -> str:
        text = f"Γ({self.arg.to_text()})"
        return text if self.side is Side.NUM else f"1/{text}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            'shift': self.arg.shift.to_text(),
            'zcoeffs': {str(k): v for k, v in self.arg.zcoeffs},
            'side': self.side.value,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'GammaFactor':
        try:
            side = Side(data.get('side', 'num'))
            if 'arg' in data:
                return cls(GammaArg.parse(data['arg']), side)
            zcoeffs = {int(k): int(v) for k, v in data.get('zcoeffs', {}).items()}
            shift = data.get('shift', '0')
            shift = ParamLin.parse(shift) if isinstance(shift, str) else ParamLin.of(
                {k: Fraction(v) for k, v in shift.items()})
            return cls(GammaArg.of(shift, zcoeffs), side)
        except (KeyError, ValueError, TypeError) as e:
            raise CodecError(f"malformed gamma factor {data!r}: {e}")


@dataclass(frozen=True)
class PowerFactor:
    """base ** exponent with a z-free exponent."""
    base: Expr
    exponent: ParamLin

    def to_text(self) -> str:
        return f"({to_text(self.base)})^({self.exponent.to_text()})"

    def to_dict(self) -> Dict[str, Any]:
        return {'base': to_text(self.base), 'exponent': self.exponent.to_text()}

    def renamed(self, mapping: Mapping[str, str]) -> 'PowerFactor':
        return PowerFactor(rename_symbols(self.base, mapping), self.exponent.rename(mapping))

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'PowerFactor':
        try:
            return cls(parse_expr(data['base']), ParamLin.parse(data['exponent']))
        except KeyError as e:
            raise CodecError(f"power factor is missing {e}")


@dataclass(frozen=True)
class Prefactor:
    """Scalar prefactor: powers, symbolic Gamma ratios and a rational constant."""
    powers: Tuple[PowerFactor, ...] = ()
    gamma_ratios: Tuple[Tuple[ParamLin, Side], ...] = ()
    constant: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, 'constant', Fraction(self.constant))

    def times(self, other: 'Prefactor') -> 'Prefactor':
        return Prefactor(self.powers + other.powers,
                         self.gamma_ratios + other.gamma_ratios,
                         self.constant * other.constant)

    def with_powers(self, powers: Iterable[PowerFactor]) -> 'Prefactor':
        return Prefactor(self.powers + tuple(powers), self.gamma_ratios, self.constant)

    def with_ratios(self, ratios: Iterable[Tuple[ParamLin, Side]]) -> 'Prefactor':
        return Prefactor(self.powers, self.gamma_ratios + tuple(ratios), self.constant)

    def renamed(self, mapping: Mapping[str, str]) -> 'Prefactor':
        """Simultaneous renaming of parameters and point variables."""
        return Prefactor(tuple(p.renamed(mapping) for p in self.powers),
                         tuple((arg.rename(mapping), side) for arg, side in self.gamma_ratios),
                         self.constant)

    def parameters(self) -> Tuple[str, ...]:
        names = set()
        for power in self.powers:
            names.update(power.exponent.names())
        for arg, _ in self.gamma_ratios:
            names.update(arg.names())
        return tuple(sorted(names))

    def to_text(self) -> str:
        parts = []
        if self.constant != 1:
            parts.append(_fraction_text(self.constant))
        parts.extend(power.to_text() for power in self.powers)
        parts.extend(f"Γ({arg.to_text()})" if side is Side.NUM else f"1/Γ({arg.to_text()})"
                     for arg, side in self.gamma_ratios)
        return ' '.join(parts) if parts else '1'

    def to_dict(self) -> Dict[str, Any]:
        return {
            'powers': [power.to_dict() for power in self.powers],
            'gammaRatios': [{'arg': arg.to_text(), 'side': side.value} for arg, side in self.gamma_ratios],
            'constant': _fraction_text(self.constant),
        }

    @classmethod
    def from_dict(cls, data: Optional[Mapping[str, Any]]) -> 'Prefactor':
        """
        Read a prefactor document.

        Besides the canonical keys, hand-written data files may use
        ``gammaNum``/``gammaDen`` lists and ``[base, exponent]`` power pairs.
        """
        data = data or {}
        try:
            powers = tuple(
                PowerFactor(parse_expr(p[0]), ParamLin.parse(p[1])) if isinstance(p, (list, tuple))
                else PowerFactor.from_dict(p)
                for p in data.get('powers', [])
            )
            ratios = [(ParamLin.parse(r['arg']), Side(r.get('side', 'num')))
                      for r in data.get('gammaRatios', [])]
            ratios += [(ParamLin.parse(text), Side.NUM) for text in data.get('gammaNum', [])]
            ratios += [(ParamLin.parse(text), Side.DEN) for text in data.get('gammaDen', [])]
            return cls(powers, tuple(ratios), Fraction(str(data.get('constant', '1'))))
        except (KeyError, ValueError, IndexError) as e:
            raise CodecError(f"malformed prefactor: {e}")


@dataclass(frozen=True)
class MBIntegral:
    """
    An nvars-fold Mellin-Barnes integral

        prefactor * ∫ Π kernel_i^{z_i} Π Γ(num) / Π Γ(den) Π dz_i/(2πi).
    """
    nvars: int
    kernels: Tuple[Expr, ...]
    gammas: Tuple[GammaFactor, ...]
    prefactor: Prefactor = field(default_factory=Prefactor)

    def __post_init__(self):
        if len(self.kernels) != self.nvars:
            raise ModelError(f"{self.nvars}-fold integral needs {self.nvars} kernels, got {len(self.kernels)}")

    @property
    def numerators(self) -> List[GammaArg]:
        return [g.arg for g in self.gammas if g.side is Side.NUM]

    @property
    def denominators(self) -> List[GammaArg]:
        return [g.arg for g in self.gammas if g.side is Side.DEN]

    def parameters(self) -> Tuple[str, ...]:
        names = set(self.prefactor.parameters())
        for g in self.gammas:
            names.update(g.arg.shift.names())
        return tuple(sorted(names))

    def point_variables(self) -> Tuple[str, ...]:
        names = set()
        for kernel in self.kernels:
            names.update(symbols(kernel))
        for power in self.prefactor.powers:
            names.update(symbols(power.base))
        return tuple(sorted(names))

    def check(self) -> None:
        """Raise ModelError unless every integration variable appears in a Gamma factor."""
        for g in self.gammas:
            for index in g.arg.variables:
                if not 1 <= index <= self.nvars:
                    raise ModelError(f"z{index} is outside the {self.nvars}-fold integral")
        for index in range(1, self.nvars + 1):
            if not any(g.arg.depends_on(index) for g in self.gammas):
                raise ModelError(f"z{index} appears in no Gamma factor")

    def to_text(self) -> str:
        kernels = ' '.join(f"({to_text(k)})^z{i}" for i, k in enumerate(self.kernels, start=1))
        gammas = ' '.join(g.to_text() for g in self.gammas)
        return f"{self.prefactor.to_text()} ∫ {kernels} {gammas}".strip()

    def to_dict(self) -> Dict[str, Any]:
        return {
            'nvars': self.nvars,
            'kernels': [to_text(k) for k in self.kernels],
            'gammas': [g.to_dict() for g in self.gammas],
            'prefactor': self.prefactor.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'MBIntegral':
        try:
            integral = cls(
                int(data['nvars']),
                tuple(parse_expr(k) for k in data['kernels']),
                tuple(GammaFactor.from_dict(g) for g in data['gammas']),
                Prefactor.from_dict(data.get('prefactor')),
            )
        except KeyError as e:
            raise CodecError(f"MB integral is missing {e}")
        except ModelError as e:
            raise CodecError(str(e))
        return integral
