"""
Command-line interface for the pGCL analysis toolkit
"""

from .interface import AnalysisCLI, build_parser, main, run_cli

__all__ = ['AnalysisCLI', 'build_parser', 'main', 'run_cli']
