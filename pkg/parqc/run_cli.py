#!/usr/bin/env python3
"""
Simple entry point for the parqc benchmark CLI
"""

import os
import sys

current_dir = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, current_dir)

from src.app_cli import app  # noqa: E402

if __name__ == "__main__":
    app()
