"""JSON codecs for the versioned document schemas."""

import logging
from typing import Any, Callable, Dict, List, Mapping, Optional, Union

from ..config.constants import (
    SCHEMA_MB_INTEGRAL, SCHEMA_HORN_SERIES, SCHEMA_SERIES_BLOCK, SCHEMA_NAMED_SERIES,
    SCHEMA_CORPUS, SCHEMA_REPORT, SCHEMA_SEEDS,
)
from ..errors import CodecError
from ..models import (
    CorpusReport, HornSeries, Identity, MBIntegral, Reduction, SamplePoint, SeriesBlock, block_from_dict,
)
from .file_manager import read_json, write_json

logger = logging.getLogger(__name__)


def _check_schema(doc: Mapping[str, Any], expected: str, source: str) -> None:
    if not isinstance(doc, Mapping):
        raise CodecError(f"{source}: expected a JSON object")
    schema = doc.get('schema')
    if schema is not None and schema != expected:
        raise CodecError(f"{source}: schema {schema!r}, expected {expected!r}")


# MB integrals

def integral_to_document(m: MBIntegral) -> Dict[str, Any]:
    return {'schema': SCHEMA_MB_INTEGRAL, **m.to_dict()}


def integral_from_document(doc: Mapping[str, Any], source: str = "document") -> MBIntegral:
    _check_schema(doc, SCHEMA_MB_INTEGRAL, source)
    integral = MBIntegral.from_dict(doc)
    integral.check()
    return integral


def read_integral(path: str) -> MBIntegral:
    return integral_from_document(read_json(path), path)


def write_integral(path: str, m: MBIntegral) -> None:
    write_json(path, integral_to_document(m))


# Series

def series_from_document(doc: Mapping[str, Any], source: str = "document") -> Union[HornSeries, SeriesBlock]:
    """A horn-series.v1 or series-block.v1 document; without a schema tag the keys decide."""
    if not isinstance(doc, Mapping):
        raise CodecError(f"{source}: expected a JSON object")
    schema = doc.get('schema')
    if schema == SCHEMA_SERIES_BLOCK or (schema is None and ('call' in doc or 'series' in doc)):
        return SeriesBlock.from_dict(doc)
    _check_schema(doc, SCHEMA_HORN_SERIES, source)
    return HornSeries.from_dict(doc)


def read_series(path: str) -> Union[HornSeries, SeriesBlock]:
    return series_from_document(read_json(path), path)


# Seeds

def read_seeds(path: str) -> List[Dict[str, Any]]:
    """
    Seed records of an mb-seeds.v1 document.

    Returns:
        dicts with keys name, aliases, integral (MBIntegral) and symmetries (raw generator maps)
    """
    doc = read_json(path)
    _check_schema(doc, SCHEMA_SEEDS, path)
    seeds = []
    for entry in doc.get('seeds', []):
        try:
            seeds.append({
                'name': entry['name'],
                'aliases': tuple(entry.get('aliases', [])),
                'integral': integral_from_document(entry['integral'], f"{path}:{entry['name']}"),
                'symmetries': list(entry.get('symmetries', [])),
            })
        except KeyError as e:
            raise CodecError(f"{path}: seed entry is missing {e}")
    return seeds


# Named series

def read_named_series(path: str, seed_lookup: Optional[Callable[[str], MBIntegral]] = None) -> List[Dict[str, Any]]:
    """
    Entries of a named-series.v1 document as keyword arguments of register_named.

    An entry gives its MB form either inline (``mbForm``) or by seed name (``mbSeed``).
    """
    doc = read_json(path)
    _check_schema(doc, SCHEMA_NAMED_SERIES, path)
    specs = []
    for entry in doc.get('series', []):
        try:
            name = entry['name']
            mb_form = None
            if 'mbForm' in entry:
                mb_form = integral_from_document(entry['mbForm'], f"{path}:{name}")
            elif 'mbSeed' in entry:
                if seed_lookup is None:
                    raise CodecError(f"{path}: series {name} refers to seed {entry['mbSeed']} without a seed registry")
                mb_form = seed_lookup(entry['mbSeed'])
            validation = SamplePoint.from_dict(entry['validation']) if 'validation' in entry else None
            specs.append({
                'name': name,
                'template': HornSeries.from_dict(entry['series']),
                'mb_form': mb_form,
                'slots': tuple(entry['slots']),
                'validation': validation,
                'reductions': tuple(Reduction.from_dict(r) for r in entry.get('reductions', [])),
            })
        except KeyError as e:
            raise CodecError(f"{path}: series entry is missing {e}")
    return specs


# Corpus and reports

def read_corpus(path: str) -> List[Identity]:
    """
    Identities of an identity-corpus.v1 document.

    ``defaults`` supplies shared parameter values and ``blocks`` shared
    series blocks that identities refer to by name.
    """
    doc = read_json(path)
    _check_schema(doc, SCHEMA_CORPUS, path)
    defaults = doc.get('defaults', {})
    blocks = {name: block_from_dict(entry) for name, entry in doc.get('blocks', {}).items()}
    identities = [Identity.from_dict(entry, defaults, blocks) for entry in doc.get('identities', [])]
    ids = [i.id for i in identities]
    duplicates = sorted({i for i in ids if ids.count(i) > 1})
    if duplicates:
        raise CodecError(f"{path}: duplicate identity ids {duplicates}")
    logger.debug(f"read {len(identities)} identities from {path}")
    return identities


def report_document(report: CorpusReport, **meta: Any) -> Dict[str, Any]:
    return {'schema': SCHEMA_REPORT, **meta, **report.to_dict()}
