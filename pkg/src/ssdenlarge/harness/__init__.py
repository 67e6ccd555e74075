"""Batch verification harness: configuration, suite runner and CLI."""

from .config import SuiteConfig, load_config, parse_config
from .suite import CHECKS, SuiteResult, run_suite

__all__ = ["CHECKS", "SuiteConfig", "SuiteResult", "load_config", "parse_config", "run_suite"]
