"""Tabular views of verification reports, corpora and transformation maps."""

import logging
from typing import Iterable, Optional

import pandas as pd

from ..models import CorpusReport, Identity, LedgerEntry

logger = logging.getLogger(__name__)


def corpus_table(report: CorpusReport) -> pd.DataFrame:
    """One row per identity: status, worst deviation and error."""
    rows = [{
        'IDENTITY': r.identity_id,
        'TIER': r.tier.value,
        'STATUS': r.status,
        'POINTS': len(r.points),
        'MAX_DEVIATION': r.max_deviation,
        'ERROR': r.error or '',
    } for r in report.identities]
    return pd.DataFrame(rows, columns=['IDENTITY', 'TIER', 'STATUS', 'POINTS', 'MAX_DEVIATION', 'ERROR'])


def points_table(report: CorpusReport) -> pd.DataFrame:
    """One row per identity and sample point."""
    rows = []
    for r in report.identities:
        for p in r.points:
            rows.append({
                'IDENTITY': p.identity_id,
                'POINT': p.point_index,
                'LHS': p.lhs,
                'RHS': p.rhs,
                'DEVIATION': p.deviation,
                'CONVERGED': p.converged,
                'PASSED': p.passed,
            })
    return pd.DataFrame(rows, columns=['IDENTITY', 'POINT', 'LHS', 'RHS', 'DEVIATION', 'CONVERGED', 'PASSED'])


def identities_table(identities: Iterable[Identity]) -> pd.DataFrame:
    rows = [{
        'IDENTITY': i.id,
        'TIER': i.tier.value,
        'LHS': i.lhs_kind.value,
        'BLOCKS': len(i.rhs),
        'POINTS': len(i.sample_points),
        'TOLERANCE': i.tolerance,
        'REQUIRES': ','.join(i.requires),
        'REF': i.ref,
    } for i in identities]
    return pd.DataFrame(rows, columns=['IDENTITY', 'TIER', 'LHS', 'BLOCKS', 'POINTS', 'TOLERANCE', 'REQUIRES', 'REF'])


def ledger_table(ledger: Iterable[LedgerEntry]) -> pd.DataFrame:
    """Steps of an applied path with the prefactor each one introduced."""
    rows = [{
        'STEP': e.index,
        'LABEL': e.label,
        'APPLIED': e.applied,
        'FACTOR': e.factor,
        'EXTRACTION': e.extraction,
    } for e in ledger]
    return pd.DataFrame(rows, columns=['STEP', 'LABEL', 'APPLIED', 'FACTOR', 'EXTRACTION'])


def map_table(tmap) -> pd.DataFrame:
    """Nodes of a transformation map with their depth and number of incoming edges."""
    incoming = {}
    for edge in tmap.edges:
        incoming[edge.target] = incoming.get(edge.target, 0) + 1
    rows = [{'ID': n.id, 'DEPTH': n.depth, 'PATH': n.label, 'PARENTS': incoming.get(n.id, 0)}
            for n in tmap.nodes]
    return pd.DataFrame(rows, columns=['ID', 'DEPTH', 'PATH', 'PARENTS'])


class ReportWriter:
    """Prints tables to standard output and saves them as CSV."""

    def __init__(self, file_manager):
        self.file_manager = file_manager

    def render(self, df: pd.DataFrame) -> str:
        if df.empty:
            return "(no rows)"
        return df.to_string(index=False)

    def write_csv(self, df: pd.DataFrame, filename: str) -> Optional[str]:
        """
        Save a table as CSV.

        Args:
            df: table to save
            filename: file name, placed in the output directory unless it has a directory part

        Returns:
            The written path, or None on failure
        """
        path = self.file_manager.output_path(filename)
        try:
            df.to_csv(path, index=False)
            logger.info(f"Successfully saved {len(df)} rows to: {path}")
            return path
        except OSError as e:
            logger.error(f"Error saving table to {path}: {e}")
            return None
