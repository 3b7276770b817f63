#!/usr/bin/env python3
"""
Run the distinguisher command line with environment variables from .env.
"""
import sys
from pathlib import Path

from dotenv import load_dotenv

# Add the project root to Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

load_dotenv()

if __name__ == "__main__":
    from distinguisher.main import run

    sys.exit(run(sys.argv[1:]))
