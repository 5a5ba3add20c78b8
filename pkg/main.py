#!/usr/bin/env python3
"""
Harmonic Swarm - Entry Point

This file serves as the entry point for the command-line tool.
The library and CLI code live in the swarm_app package.
"""
import sys

from swarm_app.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
