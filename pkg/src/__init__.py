"""
src 包初始化
"""

__version__ = '1.0.0'

from .config_loader import ConfigLoader, ConfigError, SweepConfig, load_config
from .sweep import SweepResult, SweepRecord, run_sweep, evaluate_point

__all__ = [
    '__version__', 'ConfigLoader', 'ConfigError', 'SweepConfig', 'load_config',
    'SweepResult', 'SweepRecord', 'run_sweep', 'evaluate_point',
]
