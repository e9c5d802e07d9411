"""Data models for the MB engine."""

from .mb_integral import ParamLin, GammaArg, GammaFactor, PowerFactor, Prefactor, MBIntegral
from .transform import TransformStep, TransformPath, Extraction, LedgerEntry
from .series import INDEX_NAMES, LinearForm, PochFactor, HornSeries, SeriesCall, SeriesBlock, Reduction
from .identity import SamplePoint, Identity, PointResult, IdentityReport, CorpusReport, block_from_dict

__all__ = [
    'ParamLin', 'GammaArg', 'GammaFactor', 'PowerFactor', 'Prefactor', 'MBIntegral',
    'TransformStep', 'TransformPath', 'Extraction', 'LedgerEntry',
    'INDEX_NAMES', 'LinearForm', 'PochFactor', 'HornSeries', 'SeriesCall', 'SeriesBlock', 'Reduction',
    'SamplePoint', 'Identity', 'PointResult', 'IdentityReport', 'CorpusReport', 'block_from_dict',
]
