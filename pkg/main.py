#!/usr/bin/env python3
"""
Main entry point for the MB transformation engine.
This is a simple wrapper that imports and runs the main function from the mbhf package.
"""

from mbhf.main import main

if __name__ == "__main__":
    exit(main())
