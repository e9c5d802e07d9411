"""Configuration management for the MB engine."""

from .settings import EngineConfig, get_config
from .constants import Side, Tier, LhsKind, ExitCode

__all__ = ['EngineConfig', 'get_config', 'Side', 'Tier', 'LhsKind', 'ExitCode']
