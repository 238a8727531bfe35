#!/usr/bin/env python3
"""
Entry point script for the G2 Poisson command-line tool.
This script properly handles the package imports and runs the CLI.
"""

import os
import sys

# Add the current directory to Python path
current_dir = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, current_dir)


def main() -> int:
    """Main entry point for the command-line tool."""
    from g2_poisson.app import main as cli_main

    return cli_main()


if __name__ == "__main__":
    sys.exit(main())
