"""
Numerical verification of identities and transformation paths.

An identity states LHS = Σ RHS blocks. The left-hand side is a named series
(summed), a block, an MB integral or a path (both integrated); the blocks
are always summed. Transformation paths are checked by integrating the
seed and the transformed integral at the same point.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Mapping, Optional, Sequence, Union

from .config.constants import CORPUS_FILE, LhsKind, Tier, TRANSFORM_TOL_HIGH, TRANSFORM_TOL_LOW
from .config.settings import EngineConfig
from .errors import ClassMismatch, MBHFError, UnregisteredDefinition
from .models import (
    CorpusReport, Identity, IdentityReport, MBIntegral, PointResult, SamplePoint, SeriesBlock, TransformPath,
)
from .notation import SeedRegistry, apply_path, default_seeds, normalize_seed, parse_path, print_path
from .quadrature import QuadResult, mb_quad
from .series import NamedSeriesRegistry, SeriesResult, block_eval_detailed, default_registry
from .storage import codec
from .storage.file_manager import data_path

logger = logging.getLogger(__name__)


def load_corpus(path: Optional[str] = None) -> List[Identity]:
    """Identities of a corpus file; the shipped corpus by default."""
    return codec.read_corpus(path or str(data_path(CORPUS_FILE)))


def relative_deviation(lhs: complex, rhs: complex) -> float:
    return abs(lhs - rhs) / max(abs(lhs), 1e-300)


class IdentityChecker:
    """Evaluates both sides of identities with shared registries and configuration."""

    def __init__(self, registry: Optional[NamedSeriesRegistry] = None, seeds: Optional[SeedRegistry] = None,
                 config: Optional[EngineConfig] = None):
        self.registry = registry or default_registry()
        self.seeds = seeds or default_seeds()
        self.config = config or EngineConfig()

    # -- evaluation ---------------------------------------------------------

    def _sum_block(self, block: SeriesBlock, sample: SamplePoint) -> SeriesResult:
        maxN = self.config.series_max_shells(len(block.series.args))
        return block_eval_detailed(block, sample.params, sample.point, self.config.series_tol, maxN, self.registry)

    def _integrate(self, m: MBIntegral, sample: SamplePoint, threads: int = 1) -> QuadResult:
        T, _ = self.config.quad_defaults(m.nvars)
        result = mb_quad(m, sample.params, sample.point, T=T, h=self.config.quad_step(m.nvars),
                         delta=self.config.quad_delta, threads=threads, deterministic=self.config.deterministic)
        logger.debug(f"quadrature value {result.value} (error estimate {result.error_estimate:.2e})")
        return result

    @staticmethod
    def _settled(result: QuadResult, tolerance: float) -> bool:
        """Whether the quadrature error estimate is within the relative tolerance."""
        if result.error_estimate <= tolerance * max(abs(result.value), 1e-300):
            return True
        logger.warning(f"quadrature error estimate {result.error_estimate:.2e} exceeds "
                       f"{tolerance:g} relative to {result.value}")
        return False

    def missing_definitions(self, identity: Identity) -> List[str]:
        return [name for name in identity.requires if name not in self.registry]

    def check_identity(self, identity: Identity) -> IdentityReport:
        """
        Check an identity at each of its sample points.

        A point passes when every series converged, an integrated left-hand
        side has an error estimate within the tolerance, and the relative
        deviation of the two sides is within the identity's tolerance.

        Raises:
            UnregisteredDefinition: a literature-tier identity needs definitions
                that are not registered
        """
        if identity.tier is Tier.LITERATURE:
            missing = self.missing_definitions(identity)
            if missing:
                raise UnregisteredDefinition(
                    f"identity {identity.id} needs definitions of {', '.join(missing)}")

        integral = None
        if identity.lhs_kind is LhsKind.PATH:
            integral = apply_path(parse_path(identity.lhs, self.seeds), self.seeds)
        elif identity.lhs_kind is LhsKind.INTEGRAL:
            integral = identity.lhs

        report = IdentityReport(identity.id, identity.tier)
        for index, sample in enumerate(identity.sample_points):
            point = PointResult(identity.id, index)
            try:
                if integral is not None:
                    quad = self._integrate(integral, sample)
                    point.lhs, point.converged = quad.value, self._settled(quad, identity.tolerance)
                else:
                    lhs = self._sum_block(identity.lhs, sample)
                    point.lhs, point.converged = lhs.value, lhs.converged
                rhs_total = 0j
                for block in identity.rhs:
                    term = self._sum_block(block, sample)
                    rhs_total += term.value
                    point.converged = point.converged and term.converged
                point.rhs = rhs_total
                point.deviation = relative_deviation(point.lhs, point.rhs)
                point.passed = point.converged and point.deviation <= identity.tolerance
            except UnregisteredDefinition:
                raise
            except MBHFError as e:
                point.error = f"{type(e).__name__}: {e}"
                point.converged = False
            report.points.append(point)

        if report.passed:
            logger.info(f"{identity.id}: pass (max deviation {report.max_deviation:.2e})")
        else:
            logger.error(f"{identity.id}: {report.status} (max deviation {report.max_deviation})")
        return report

    def run_corpus(self, identities: Iterable[Identity], tiers: Optional[Sequence[Tier]] = None,
                   ids: Optional[Sequence[str]] = None) -> CorpusReport:
        """
        Check every identity matching the filters.

        Identities run concurrently on the configured worker count. Errors of
        single identities are recorded in their reports; the result is ordered
        by identity id whatever the worker count.
        """
        selected = [i for i in identities
                    if (not tiers or i.tier in tiers) and (not ids or i.id in ids)]
        logger.info(f"checking {len(selected)} identities")

        def check(identity: Identity) -> IdentityReport:
            try:
                return self.check_identity(identity)
            except MBHFError as e:
                logger.error(f"{identity.id}: {type(e).__name__}: {e}")
                return IdentityReport(identity.id, identity.tier, error=str(e), error_type=type(e).__name__)

        workers = self.config.worker_count()
        if workers > 1 and len(selected) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                reports = list(pool.map(check, selected))
        else:
            reports = [check(identity) for identity in selected]
        report = CorpusReport(sorted(reports, key=lambda r: r.identity_id))
        logger.info(f"corpus: {report.count('pass')} of {len(reports)} identities pass")
        return report

    def check_transform_equivalence(self, seed: str, path: Union[str, TransformPath],
                                    params: Mapping[str, complex], point: Mapping[str, complex],
                                    tolerance: Optional[float] = None) -> IdentityReport:
        """
        Integrate a seed and the integral a path derives from it at the same point.

        The default tolerance is 1e-4, or 1e-3 for 3-fold integrals. The point
        counts as converged only when both quadrature error estimates are
        within the tolerance.

        Raises:
            ClassMismatch: the path starts from another seed
            Infeasible: no straight contour for one of the integrals
        """
        if isinstance(path, str):
            path = parse_path(path, self.seeds)
        if normalize_seed(self.seeds.canonical_name(path.seed)) != normalize_seed(self.seeds.canonical_name(seed)):
            raise ClassMismatch(f"path {print_path(path)} does not start from seed {seed}")
        original = self.seeds.get(seed)
        transformed = apply_path(path, self.seeds)
        if tolerance is None:
            tolerance = TRANSFORM_TOL_HIGH if original.nvars >= 3 else TRANSFORM_TOL_LOW

        sample = SamplePoint({k: complex(v) for k, v in params.items()}, {k: complex(v) for k, v in point.items()})
        threads = self.config.worker_count()
        result = PointResult(print_path(path), 0)
        lhs = self._integrate(original, sample, threads)
        rhs = self._integrate(transformed, sample, threads)
        result.lhs, result.rhs = lhs.value, rhs.value
        result.converged = self._settled(lhs, tolerance) and self._settled(rhs, tolerance)
        result.deviation = relative_deviation(result.lhs, result.rhs)
        result.passed = result.converged and result.deviation <= tolerance
        logger.info(f"{print_path(path)}: deviation {result.deviation:.2e} from seed {seed}")
        return IdentityReport(print_path(path), Tier.EXPLICIT, [result])


def check_identity(identity: Identity, registry: Optional[NamedSeriesRegistry] = None,
                   seeds: Optional[SeedRegistry] = None, config: Optional[EngineConfig] = None) -> IdentityReport:
    return IdentityChecker(registry, seeds, config).check_identity(identity)


def run_corpus(identities: Optional[Iterable[Identity]] = None, tiers: Optional[Sequence[Tier]] = None,
               ids: Optional[Sequence[str]] = None, registry: Optional[NamedSeriesRegistry] = None,
               seeds: Optional[SeedRegistry] = None, config: Optional[EngineConfig] = None) -> CorpusReport:
    """Check a corpus, the shipped one by default."""
    if identities is None:
        identities = load_corpus()
    return IdentityChecker(registry, seeds, config).run_corpus(identities, tiers, ids)


def check_transform_equivalence(seed: str, path: Union[str, TransformPath], params: Mapping[str, complex],
                                point: Mapping[str, complex], tolerance: Optional[float] = None,
                                seeds: Optional[SeedRegistry] = None,
                                config: Optional[EngineConfig] = None) -> IdentityReport:
    checker = IdentityChecker(seeds=seeds, config=config)
    return checker.check_transform_equivalence(seed, path, params, point, tolerance)
