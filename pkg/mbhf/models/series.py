"""Data models for multivariable Pochhammer series and right-hand-side blocks."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Any, Mapping, Optional, Tuple, Union

from ..config.constants import Side
from ..errors import CodecError, NonLinearExpression
from ..expr import Expr, parse_expr, to_text, linear_coefficients
from .mb_integral import ParamLin, Prefactor, _fraction_text, _linear_text, rename_symbols

INDEX_NAMES = ("m", "n", "p")


@dataclass(frozen=True)
class LinearForm:
    """Integer combination of the summation indices m, n, p."""
    coeffs: Tuple[int, ...] = (0, 0, 0)

    def __post_init__(self):
        padded = tuple(int(c) for c in self.coeffs) + (0,) * (len(INDEX_NAMES) - len(self.coeffs))
        object.__setattr__(self, 'coeffs', padded[:len(INDEX_NAMES)])

    @classmethod
    def parse(cls, text: str) -> 'LinearForm':
        coeffs, constant = linear_coefficients(parse_expr(text))
        if constant != 0 or any(name not in INDEX_NAMES or value.denominator != 1
                                for name, value in coeffs.items()):
            raise NonLinearExpression(f"{text!r} is not an integer combination of m, n, p")
        return cls(tuple(int(coeffs.get(name, 0)) for name in INDEX_NAMES))

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def permuted(self, order: Tuple[int, ...]) -> 'LinearForm':
        """Coefficients for indices relabeled so that new index k is old index order[k]."""
        return LinearForm(tuple(self.coeffs[old] for old in order))

    def to_text(self) -> str:
        return _linear_text([(name, Fraction(c)) for name, c in zip(INDEX_NAMES, self.coeffs) if c], Fraction(0))


@dataclass(frozen=True)
class PochFactor:
    """(shift)_{form} in the numerator or the denominator."""
    shift: ParamLin
    form: LinearForm
    side: Side = Side.NUM

    def to_dict(self) -> Dict[str, Any]:
        return {'shift': self.shift.to_text(), 'form': self.form.to_text(), 'side': self.side.value}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'PochFactor':
        return cls(ParamLin.parse(data['shift']), LinearForm.parse(data['form']), Side(data.get('side', 'num')))


@dataclass(frozen=True)
class HornSeries:
    """
    constant * Σ Π (shift)_{form}^{±1} Π arg_k^{i_k} / i_k!  over i_1, ..., i_nindices >= 0.

    The factorials of the summation indices are always included.
    """
    nindices: int
    args: Tuple[Expr, ...]
    pochs: Tuple[PochFactor, ...]
    constant: Fraction = Fraction(1)

    def __post_init__(self):
        if not 1 <= self.nindices <= len(INDEX_NAMES):
            raise CodecError(f"series need 1 to {len(INDEX_NAMES)} indices, got {self.nindices}")
        if len(self.args) != self.nindices:
            raise CodecError(f"{self.nindices}-index series needs {self.nindices} arguments")
        object.__setattr__(self, 'constant', Fraction(self.constant))

    def parameters(self) -> Tuple[str, ...]:
        names = set()
        for poch in self.pochs:
            names.update(poch.shift.names())
        return tuple(sorted(names))

    def with_args(self, args: Tuple[Expr, ...]) -> 'HornSeries':
        return HornSeries(self.nindices, tuple(args), self.pochs, self.constant)

    def substitute(self, mapping: Mapping[str, ParamLin]) -> 'HornSeries':
        return HornSeries(self.nindices, self.args,
                          tuple(PochFactor(p.shift.substitute(mapping), p.form, p.side) for p in self.pochs),
                          self.constant)

    def renamed(self, mapping: Mapping[str, str]) -> 'HornSeries':
        return HornSeries(self.nindices, tuple(rename_symbols(a, mapping) for a in self.args),
                          tuple(PochFactor(p.shift.rename(mapping), p.form, p.side) for p in self.pochs),
                          self.constant)

    def permuted(self, order: Tuple[int, ...]) -> 'HornSeries':
        """Relabel indices: new index k is old index order[k]."""
        return HornSeries(self.nindices, tuple(self.args[old] for old in order),
                          tuple(PochFactor(p.shift, p.form.permuted(order + tuple(range(len(order), 3))), p.side)
                                for p in self.pochs),
                          self.constant)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'nindices': self.nindices,
            'args': [to_text(a) for a in self.args],
            'pochs': [p.to_dict() for p in self.pochs],
            'constant': _fraction_text(self.constant),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'HornSeries':
        """
        Read a series document. Data files may list Pochhammer symbols as
        ``num``/``den`` lists of ``[shift, form]`` pairs instead of ``pochs``.
        """
        try:
            pochs = [PochFactor.from_dict(p) for p in data.get('pochs', [])]
            pochs += [PochFactor(ParamLin.parse(s), LinearForm.parse(f), Side.NUM) for s, f in data.get('num', [])]
            pochs += [PochFactor(ParamLin.parse(s), LinearForm.parse(f), Side.DEN) for s, f in data.get('den', [])]
            args = tuple(parse_expr(a) for a in data['args'])
            return cls(int(data.get('nindices', len(args))), args, tuple(pochs),
                       Fraction(str(data.get('constant', '1'))))
        except (KeyError, ValueError) as e:
            raise CodecError(f"malformed series: {e}")


@dataclass(frozen=True)
class SeriesCall:
    """
    A named series applied to parameter combinations and argument expressions.

    ``shape`` is set for Kampé de Fériet calls: (p, q, k, l, m, n) group sizes of
    the flattened parameter list (joint, first, second numerators, then joint,
    first, second denominators).
    """
    name: str
    params: Tuple[ParamLin, ...]
    args: Tuple[Expr, ...]
    shape: Optional[Tuple[int, ...]] = None

    def renamed(self, mapping: Mapping[str, str]) -> 'SeriesCall':
        return SeriesCall(self.name, tuple(p.rename(mapping) for p in self.params),
                          tuple(rename_symbols(a, mapping) for a in self.args), self.shape)

    def to_dict(self) -> Dict[str, Any]:
        data = {'name': self.name, 'params': [p.to_text() for p in self.params],
                'args': [to_text(a) for a in self.args]}
        if self.shape is not None:
            data['shape'] = list(self.shape)
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'SeriesCall':
        try:
            shape = data.get('shape')
            params = data['params'] if 'groups' not in data else []
            if 'groups' in data:
                groups = data['groups']
                shape = [len(g) for g in groups]
                params = [p for g in groups for p in g]
            return cls(data['name'], tuple(ParamLin.parse(p) for p in params),
                       tuple(parse_expr(a) for a in data['args']),
                       tuple(int(v) for v in shape) if shape is not None else None)
        except KeyError as e:
            raise CodecError(f"series call is missing {e}")


@dataclass(frozen=True)
class SeriesBlock:
    """A prefactored series term of an identity's right-hand side."""
    series: Union[HornSeries, SeriesCall]
    prefactor: Prefactor = field(default_factory=Prefactor)
    label: str = ""

    def renamed(self, mapping: Mapping[str, str], label: Optional[str] = None) -> 'SeriesBlock':
        """The block with parameters and point variables renamed simultaneously."""
        return SeriesBlock(self.series.renamed(mapping), self.prefactor.renamed(mapping),
                           self.label if label is None else label)

    def to_dict(self) -> Dict[str, Any]:
        data = {'label': self.label, 'prefactor': self.prefactor.to_dict()}
        if isinstance(self.series, SeriesCall):
            data['call'] = self.series.to_dict()
        else:
            data['series'] = self.series.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'SeriesBlock':
        if 'call' in data:
            series = SeriesCall.from_dict(data['call'])
        elif 'series' in data:
            series = HornSeries.from_dict(data['series'])
        else:
            raise CodecError("series block needs a 'call' or a 'series' entry")
        return cls(series, Prefactor.from_dict(data.get('prefactor')), data.get('label', ''))


@dataclass(frozen=True)
class Reduction:
    """Setting the arguments ``zero_args`` (1-based) to zero turns a named series into ``target``."""
    zero_args: Tuple[int, ...]
    target: str
    params: Tuple[ParamLin, ...]
    args: Tuple[int, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {'zeroArgs': list(self.zero_args), 'target': self.target,
                'params': [p.to_text() for p in self.params], 'args': list(self.args)}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'Reduction':
        try:
            return cls(tuple(int(k) for k in data['zeroArgs']), data['target'],
                       tuple(ParamLin.parse(p) for p in data['params']),
                       tuple(int(k) for k in data['args']))
        except KeyError as e:
            raise CodecError(f"reduction is missing {e}")
