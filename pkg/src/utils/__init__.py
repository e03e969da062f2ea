"""
utils 包初始化
"""

from .logger import setup_logger, RunLogger
from .output_csv import generate_csv, render_csv
from .output_json import generate_json, generate_meta

__all__ = [
    'setup_logger', 'RunLogger',
    'generate_csv', 'render_csv',
    'generate_json', 'generate_meta',
]
