#!/usr/bin/env python3
"""
Runtime configuration for the discretization toolkit.

Values come from the environment (optionally a .env file) with the defaults below.
"""

import os
import logging
from typing import Optional

try:
    from dotenv import load_dotenv
    DOTENV_AVAILABLE = True
except ImportError:
    DOTENV_AVAILABLE = False

if DOTENV_AVAILABLE:
    load_dotenv()

# Directory configuration from environment variables
DEFAULT_OUTPUT_DIR = os.getenv('MZ_OUTPUT_DIR', './output')
DEFAULT_INPUT_DIR = os.getenv('MZ_INPUT_DIR', './data')

# Numerical guardrails
DEFAULT_POINT_BUDGET = int(float(os.getenv('MZ_POINT_BUDGET', '1e7')))
DEFAULT_MAX_DEPTH = int(os.getenv('MZ_MAX_DEPTH', '40'))
DEFAULT_C_MQ = float(os.getenv('MZ_C_MQ', '1.0'))
DEFAULT_WORKERS = int(os.getenv('MZ_WORKERS', '4'))

# Logging
DEFAULT_LOG_LEVEL = os.getenv('MZ_LOG_LEVEL', 'INFO')
DEFAULT_LOG_FILE = os.getenv('MZ_LOG_FILE', '')

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

SCHEMA_VERSION = 1


def resolve_input_path(path: str, default_dir: str = DEFAULT_INPUT_DIR) -> str:
    """Resolve an input path, checking the default input directory if relative"""
    if os.path.isabs(path) or os.path.exists(path):
        return path

    if default_dir:
        default_path = os.path.join(default_dir, path)
        if os.path.exists(default_path):
            return default_path

    # Let the caller fail on a missing file
    return path


def resolve_output_path(output_path: str, output_dir: Optional[str] = None) -> str:
    """Resolve output path, creating directory if needed"""
    if not os.path.isabs(output_path):
        output_path = os.path.join(output_dir or DEFAULT_OUTPUT_DIR, output_path)

    parent = os.path.dirname(output_path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return output_path


def configure_logging(verbose: bool = False) -> None:
    """Install root handlers; library modules only create named loggers"""
    handlers = [logging.StreamHandler()]
    if DEFAULT_LOG_FILE:
        handlers.append(logging.FileHandler(DEFAULT_LOG_FILE))

    level = logging.DEBUG if verbose else getattr(logging, DEFAULT_LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers, force=True)
