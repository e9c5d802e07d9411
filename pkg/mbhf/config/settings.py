"""Configuration management for the MB engine."""

import os
import logging
from dataclasses import dataclass
from typing import Optional
from dotenv import load_dotenv

from .constants import (
    DEFAULT_EQUALITY_SAMPLES, DEFAULT_EQUALITY_SEED, DEFAULT_QUAD_T_LOW, DEFAULT_QUAD_H_LOW,
    DEFAULT_QUAD_T_HIGH, DEFAULT_QUAD_H_HIGH, DEFAULT_QUAD_DELTA, DEFAULT_SERIES_TOL,
    DEFAULT_MAXN_SINGLE, DEFAULT_MAXN_DOUBLE, DEFAULT_MAXN_TRIPLE, DEFAULT_MAP_DEPTH,
    DEFAULT_OUTPUT_DIR,
)


@dataclass
class EngineConfig:
    """Configuration for the MB engine."""

    # Parallelism
    threads: Optional[int] = None
    deterministic: bool = True

    # Randomized equality checks
    equality_samples: int = DEFAULT_EQUALITY_SAMPLES
    equality_seed: int = DEFAULT_EQUALITY_SEED

    # Quadrature (1-2 folds / 3 folds)
    quad_T_low: float = DEFAULT_QUAD_T_LOW
    quad_h_low: float = DEFAULT_QUAD_H_LOW
    quad_T_high: float = DEFAULT_QUAD_T_HIGH
    quad_h_high: float = DEFAULT_QUAD_H_HIGH
    quad_delta: float = DEFAULT_QUAD_DELTA

    # Series
    series_tol: float = DEFAULT_SERIES_TOL
    series_maxN_single: int = DEFAULT_MAXN_SINGLE
    series_maxN_double: int = DEFAULT_MAXN_DOUBLE
    series_maxN_triple: int = DEFAULT_MAXN_TRIPLE

    # Maps
    map_depth: int = DEFAULT_MAP_DEPTH

    # Output
    output_dir: str = DEFAULT_OUTPUT_DIR

    # Logging
    log_level: str = "INFO"

    @classmethod
    def from_env(cls) -> 'EngineConfig':
        """Create configuration from environment variables."""
        load_dotenv()

        threads = os.getenv('MBHF_THREADS')
        quad_T = os.getenv('MBHF_QUAD_T')
        quad_h = os.getenv('MBHF_QUAD_H')
        return cls(
            threads=int(threads) if threads else None,
            deterministic=os.getenv('MBHF_DETERMINISTIC', 'true').lower() == 'true',
            equality_samples=int(os.getenv('MBHF_EQUALITY_SAMPLES', str(DEFAULT_EQUALITY_SAMPLES))),
            equality_seed=int(os.getenv('MBHF_SEED', str(DEFAULT_EQUALITY_SEED))),
            quad_T_low=float(quad_T) if quad_T else DEFAULT_QUAD_T_LOW,
            quad_h_low=float(quad_h) if quad_h else DEFAULT_QUAD_H_LOW,
            quad_T_high=float(quad_T) if quad_T else DEFAULT_QUAD_T_HIGH,
            quad_h_high=float(quad_h) if quad_h else DEFAULT_QUAD_H_HIGH,
            quad_delta=float(os.getenv('MBHF_QUAD_DELTA', str(DEFAULT_QUAD_DELTA))),
            series_tol=float(os.getenv('MBHF_SERIES_TOL', str(DEFAULT_SERIES_TOL))),
            map_depth=int(os.getenv('MBHF_MAP_DEPTH', str(DEFAULT_MAP_DEPTH))),
            output_dir=os.getenv('MBHF_OUTPUT_DIR', DEFAULT_OUTPUT_DIR),
            log_level=os.getenv('MBHF_LOG_LEVEL', 'INFO'),
        )

    def quad_defaults(self, nvars: int):
        """Return the (T, h) pair for an integral with ``nvars`` folds."""
        if nvars >= 3:
            return self.quad_T_high, self.quad_h_high
        return self.quad_T_low, self.quad_h_low

    def quad_step(self, nvars: int) -> Optional[float]:
        """The configured step, or None when it is the default and may adapt to the contour."""
        _, h = self.quad_defaults(nvars)
        default = DEFAULT_QUAD_H_HIGH if nvars >= 3 else DEFAULT_QUAD_H_LOW
        return None if h == default else h

    def series_max_shells(self, nindices: int) -> int:
        """Return the shell cap for a series with ``nindices`` summation indices."""
        if nindices <= 1:
            return self.series_maxN_single
        if nindices == 2:
            return self.series_maxN_double
        return self.series_maxN_triple

    def worker_count(self) -> int:
        """Number of worker threads, defaulting to the available parallelism."""
        return max(1, self.threads or os.cpu_count() or 1)


def get_config() -> EngineConfig:
    """Get the engine configuration."""
    config = EngineConfig.from_env()

    # Set up logging
    logging.basicConfig(
        level=getattr(logging, config.log_level.upper()),
        format='%(asctime)s - %(levelname)s - %(message)s'
    )

    return config
