"""
reflx entry point

    python reflx.py train --config configs/sudoku4.conf
    python reflx.py eval --checkpoint runs/sudoku4/model.ckpt --data data/sudoku4_test.csv
"""

import sys
from pathlib import Path

# Add project root to path so `src` imports resolve when run as a script
sys.path.insert(0, str(Path(__file__).parent))

from src.bench.cli import main

if __name__ == "__main__":
    sys.exit(main())
