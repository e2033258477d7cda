#!/usr/bin/env python3
"""Run the bsjacobi command line: python -m bsjacobi."""

from .cli import main

main()
