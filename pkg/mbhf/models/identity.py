"""Data models for corpus identities and verification reports."""

from dataclasses import dataclass, field
from typing import Dict, Any, List, Mapping, Optional, Tuple, Union

from ..config.constants import LhsKind, Tier
from ..errors import CodecError
from .mb_integral import MBIntegral, Prefactor
from .series import SeriesBlock, SeriesCall


def _scalar_from_json(value) -> complex:
    if isinstance(value, str):
        return complex(value.replace(' ', ''))
    return complex(value)


def _scalar_to_json(value: complex):
    value = complex(value)
    if value.imag == 0:
        return value.real
    return str(value).strip('()')


def block_from_dict(data: Mapping[str, Any], blocks: Optional[Mapping[str, SeriesBlock]] = None) -> SeriesBlock:
    """
    Read a series block, possibly a reference ``{"use": name}`` to a shared block.

    A reference may rename parameters and point variables simultaneously
    (``rename``) and multiply in an extra ``prefactor``.
    """
    if 'use' not in data:
        return SeriesBlock.from_dict(data)
    name = data['use']
    if blocks is None or name not in blocks:
        raise CodecError(f"reference to undefined block '{name}'")
    block = blocks[name].renamed(data.get('rename', {}), data.get('label', name))
    if 'prefactor' in data:
        block = SeriesBlock(block.series, Prefactor.from_dict(data['prefactor']).times(block.prefactor), block.label)
    return block


@dataclass
class SamplePoint:
    """Parameter values and variable values of one verification point."""
    params: Dict[str, complex]
    point: Dict[str, complex]

    def env(self) -> Dict[str, complex]:
        return {**self.params, **self.point}

    def to_dict(self) -> Dict[str, Any]:
        return {
            'params': {k: _scalar_to_json(v) for k, v in self.params.items()},
            'point': {k: _scalar_to_json(v) for k, v in self.point.items()},
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], defaults: Optional[Mapping[str, Any]] = None) -> 'SamplePoint':
        params = dict((defaults or {}).get('params', {}))
        params.update(data.get('params', {}))
        return cls({k: _scalar_from_json(v) for k, v in params.items()},
                   {k: _scalar_from_json(v) for k, v in data.get('point', {}).items()})


@dataclass
class Identity:
    """LHS = Σ RHS blocks, checked numerically at each sample point."""
    id: str
    lhs_kind: LhsKind
    lhs: Union[SeriesBlock, MBIntegral, str]
    rhs: List[SeriesBlock]
    sample_points: List[SamplePoint]
    tolerance: float
    tier: Tier = Tier.EXPLICIT
    requires: Tuple[str, ...] = ()
    ref: str = ""
    notes: str = ""

    def to_dict(self) -> Dict[str, Any]:
        if self.lhs_kind is LhsKind.PATH:
            lhs = {'kind': self.lhs_kind.value, 'path': self.lhs}
        elif self.lhs_kind is LhsKind.INTEGRAL:
            lhs = {'kind': self.lhs_kind.value, 'integral': self.lhs.to_dict()}
        else:
            lhs = {'kind': self.lhs_kind.value, **self.lhs.to_dict()}
        return {
            'id': self.id,
            'tier': self.tier.value,
            'requires': list(self.requires),
            'ref': self.ref,
            'notes': self.notes,
            'tolerance': self.tolerance,
            'lhs': lhs,
            'rhs': [block.to_dict() for block in self.rhs],
            'samplePoints': [p.to_dict() for p in self.sample_points],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], defaults: Optional[Mapping[str, Any]] = None,
                  blocks: Optional[Mapping[str, SeriesBlock]] = None) -> 'Identity':
        """
        Read an identity record.

        Args:
            data: the record
            defaults: shared entries of the corpus; ``params`` fills every sample point
            blocks: shared blocks that ``{"use": name}`` entries refer to
        """
        try:
            lhs_data = data['lhs']
            kind = LhsKind(lhs_data['kind'])
            if kind is LhsKind.PATH:
                lhs = lhs_data['path']
            elif kind is LhsKind.INTEGRAL:
                lhs = MBIntegral.from_dict(lhs_data['integral'])
            else:
                lhs = block_from_dict(lhs_data, blocks)
                if kind is LhsKind.NAMED and not isinstance(lhs.series, SeriesCall):
                    raise CodecError(f"identity {data['id']}: named left-hand side needs a 'call'")
            return cls(
                id=data['id'],
                lhs_kind=kind,
                lhs=lhs,
                rhs=[block_from_dict(b, blocks) for b in data.get('rhs', [])],
                sample_points=[SamplePoint.from_dict(p, defaults) for p in data.get('samplePoints', [])],
                tolerance=float(data.get('tolerance', 1e-7)),
                tier=Tier(data.get('tier', Tier.EXPLICIT.value)),
                requires=tuple(data.get('requires', [])),
                ref=data.get('ref', ''),
                notes=data.get('notes', ''),
            )
        except KeyError as e:
            raise CodecError(f"identity {data.get('id', '?')} is missing {e}")
        except ValueError as e:
            raise CodecError(f"identity {data.get('id', '?')}: {e}")


@dataclass
class PointResult:
    """Outcome of one identity at one sample point."""
    identity_id: str
    point_index: int
    lhs: Optional[complex] = None
    rhs: Optional[complex] = None
    deviation: Optional[float] = None
    converged: bool = True
    passed: bool = False
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'identity': self.identity_id,
            'point': self.point_index,
            'lhs': None if self.lhs is None else [self.lhs.real, self.lhs.imag],
            'rhs': None if self.rhs is None else [self.rhs.real, self.rhs.imag],
            'deviation': self.deviation,
            'converged': self.converged,
            'passed': self.passed,
            'error': self.error,
        }


@dataclass
class IdentityReport:
    """All point results of one identity."""
    identity_id: str
    tier: Tier
    points: List[PointResult] = field(default_factory=list)
    error: Optional[str] = None
    error_type: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(p.passed for p in self.points)

    @property
    def converged(self) -> bool:
        return all(p.converged for p in self.points)

    @property
    def status(self) -> str:
        if self.error is not None:
            return 'error'
        if self.passed:
            return 'pass'
        if not self.converged:
            return 'nonconvergent'
        return 'fail'

    @property
    def max_deviation(self) -> Optional[float]:
        values = [p.deviation for p in self.points if p.deviation is not None]
        return max(values) if values else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'identity': self.identity_id,
            'tier': self.tier.value,
            'status': self.status,
            'error': self.error,
            'errorType': self.error_type,
            'points': [p.to_dict() for p in self.points],
        }


@dataclass
class CorpusReport:
    """Aggregate report of a corpus run, ordered by identity id."""
    identities: List[IdentityReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.identities)

    def count(self, status: str) -> int:
        return sum(1 for r in self.identities if r.status == status)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'summary': {
                'total': len(self.identities),
                'pass': self.count('pass'),
                'fail': self.count('fail'),
                'nonconvergent': self.count('nonconvergent'),
                'error': self.count('error'),
            },
            'identities': [r.to_dict() for r in self.identities],
        }
