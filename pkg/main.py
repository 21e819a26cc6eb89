#!/usr/bin/env python3
"""
Command-line entry point for the TL1 matrix completion toolkit
"""

from src.cli import cli

if __name__ == "__main__":
    cli()
