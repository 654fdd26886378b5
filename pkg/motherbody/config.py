"""
Settings Module

Centralized configuration for solvers, quadrature rules and runtime limits.
Every value has a default and can be overridden through environment
variables (optionally loaded from a ``.env`` file).
"""

import os
import logging
from dataclasses import dataclass, field
from typing import Optional

from dotenv import load_dotenv

# Existing environment variables win over values from .env
load_dotenv(override=False)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def get_env(key: str, default: Optional[str] = None) -> Optional[str]:
    """Stripped value of an environment variable; blank counts as unset"""
    value = os.getenv(key)
    if value is None or not value.strip():
        return default
    return value.strip()


TRUE_WORDS = frozenset({'1', 'true', 'yes', 'on'})
FALSE_WORDS = frozenset({'0', 'false', 'no', 'off'})


def get_bool_env(key: str, default: bool = False) -> bool:
    """Flag from an environment variable; unrecognised words keep the default"""
    word = (get_env(key) or '').lower()
    if word in TRUE_WORDS:
        return True
    if word in FALSE_WORDS:
        return False
    return default


def get_int_env(key: str, default: int) -> int:
    """Integer from an environment variable; malformed values keep the default"""
    try:
        return int(os.getenv(key, str(default)))
    except (ValueError, TypeError):
        return default


def get_float_env(key: str, default: float) -> float:
    """Float from an environment variable; malformed values keep the default"""
    try:
        return float(os.getenv(key, repr(default)))
    except (ValueError, TypeError):
        return default


@dataclass
class SolverConfig:
    """Newton / continuation settings for the conformal map and root polishing"""
    tol: float = 1e-12
    max_newton: int = 60
    continuation_steps: int = 40
    polish_steps: int = 4

    def __post_init__(self):
        self.tol = get_float_env('MOTHERBODY_TOL', self.tol)
        self.max_newton = get_int_env('MOTHERBODY_MAX_NEWTON', self.max_newton)
        self.continuation_steps = get_int_env('MOTHERBODY_CONTINUATION_STEPS', self.continuation_steps)
        self.polish_steps = max(0, get_int_env('MOTHERBODY_POLISH_STEPS', self.polish_steps))


@dataclass
class QuadratureConfig:
    """Node counts for the quadrature rules"""
    mu1_nodes: int = 256
    mu2_nodes: int = 48
    path_nodes: int = 96
    cell_budget: int = 4_000_000
    tail_factor: float = 1000.0

    def __post_init__(self):
        self.mu1_nodes = get_int_env('MOTHERBODY_MU1_NODES', self.mu1_nodes)
        self.mu2_nodes = get_int_env('MOTHERBODY_MU2_NODES', self.mu2_nodes)
        self.path_nodes = get_int_env('MOTHERBODY_PATH_NODES', self.path_nodes)
        self.cell_budget = get_int_env('MOTHERBODY_CELL_BUDGET', self.cell_budget)
        self.tail_factor = get_float_env('MOTHERBODY_TAIL_FACTOR', self.tail_factor)


@dataclass
class RuntimeConfig:
    """Process level settings"""
    threads: int = 1
    log_level: str = 'INFO'
    extra_dps: int = 30
    strict: bool = False   # acceptance warnings fail verify-all

    def __post_init__(self):
        self.threads = max(1, get_int_env('MOTHERBODY_THREADS', self.threads))
        self.log_level = (get_env('MOTHERBODY_LOG_LEVEL', self.log_level) or 'INFO').upper()
        self.extra_dps = get_int_env('MOTHERBODY_EXTRA_DPS', self.extra_dps)
        self.strict = get_bool_env('MOTHERBODY_STRICT', self.strict)


@dataclass
class Settings:
    """Aggregate of all configuration sections"""
    solver: SolverConfig = field(default_factory=SolverConfig)
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    runtime: RuntimeConfig = field(default_factory=RuntimeConfig)


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def reset_settings() -> Settings:
    """Rebuild settings from the current environment"""
    global _settings
    _settings = Settings()
    return _settings


def setup_logging(level: Optional[str] = None) -> None:
    resolved = getattr(logging, (level or get_settings().runtime.log_level).upper(), logging.INFO)
    logging.basicConfig(level=resolved, format=LOG_FORMAT)
    # basicConfig is a no-op once a handler exists
    logging.getLogger().setLevel(resolved)
