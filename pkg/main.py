#!/usr/bin/env python3
"""
pGCL Analysis Toolkit - Main Entry Point
Partial-sum exploration, exact finite-chain solving, seeded sampling and
reduction gadgets for probabilistic guarded-command programs

    python main.py explore programs/coin.pgcl --var x --depth 5
    python main.py exact programs/geo_prime.pgcl --var c
    python main.py reduce --gadget lexp programs/q_id.pgcl
"""

import sys
import os

sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

from cli import main as run_toolkit

if __name__ == "__main__":
    run_toolkit()
