"""Data models for transformation steps, paths and form extractions."""

from dataclasses import dataclass
from typing import Dict, Any, Optional, Tuple

from ..expr import Expr, to_text
from .mb_integral import GammaArg


@dataclass(frozen=True)
class TransformStep:
    """One notation step: variable indices, source form letter and target form letter."""
    vars: Tuple[int, ...]
    source: str
    target: str

    @property
    def label(self) -> str:
        return ''.join(str(v) for v in self.vars) + self.source + self.target

    @property
    def is_pair(self) -> bool:
        return len(self.vars) == 2

    def to_dict(self) -> Dict[str, Any]:
        return {'vars': list(self.vars), 'source': self.source, 'target': self.target}


@dataclass(frozen=True)
class TransformPath:
    """A seed name as written plus the steps applied to it, left to right."""
    seed: str
    steps: Tuple[TransformStep, ...] = ()

    def extend(self, step: TransformStep) -> 'TransformPath':
        return TransformPath(self.seed, self.steps + (step,))


@dataclass(frozen=True)
class Extraction:
    """
    Parameters read off a matched sub-integrand.

    Single-variable forms fill ``gauss`` with (A, B, C) and ``argument`` with u.
    Pair forms fill ``b``, ``b_prime``, ``joint_num``, ``joint_den`` and
    ``pair_kernels``, always expressed in the F1-type frame.
    Arguments never contain the matched integration variables.
    """
    letter: str
    vars: Tuple[int, ...]
    matched: Tuple[int, ...]
    gauss: Optional[Tuple[GammaArg, GammaArg, GammaArg]] = None
    argument: Optional[Expr] = None
    b: Optional[GammaArg] = None
    b_prime: Optional[GammaArg] = None
    joint_num: Tuple[GammaArg, ...] = ()
    joint_den: Tuple[GammaArg, ...] = ()
    pair_kernels: Optional[Tuple[Expr, Expr]] = None

    def describe(self) -> str:
        if self.gauss is not None:
            A, B, C = (g.to_text() for g in self.gauss)
            return f"{self.letter}: A={A}, B={B}, C={C}, u={to_text(self.argument)}"
        joints = ', '.join(a.to_text() for a in self.joint_num)
        dens = ', '.join(c.to_text() for c in self.joint_den)
        return (f"{self.letter}: b={self.b.to_text()}, b'={self.b_prime.to_text()}, "
                f"a=[{joints}], c=[{dens}], kernels=({to_text(self.pair_kernels[0])}, "
                f"{to_text(self.pair_kernels[1])})")


@dataclass(frozen=True)
class LedgerEntry:
    """Record of one applied step: the label used and the prefactor it introduced."""
    index: int
    label: str
    applied: str
    factor: str
    extraction: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            'index': self.index,
            'label': self.label,
            'applied': self.applied,
            'factor': self.factor,
            'extraction': self.extraction,
        }
