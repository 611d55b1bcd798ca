#!/usr/bin/env python3
"""
Corpus Preparation
Generate the train/val/test corpora that the files under configs/ point at
"""

import argparse
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.bench.commands import cmd_generate
from src.data.generators import GenerationError
from src.utils.logger import setup_logger, get_logger

# Setup logging
setup_logger()
logger = get_logger("prepare_corpora")

SPLITS = {"train": 0, "val": 1, "test": 2}


def prepare_sudoku(out_dir: Path, side: int, clues: int, counts: dict, seed: int) -> None:
    for split, offset in SPLITS.items():
        path = out_dir / f"sudoku{side}_{split}.csv"
        cmd_generate("sudoku", path, seed=seed + offset, count=counts[split], side=side, clues=clues)
        print(f"  {path} ({counts[split]} puzzles, {clues} clues)")


def prepare_graphs(out_dir: Path, counts: dict, sizes, ps, seed: int) -> None:
    for split, offset in SPLITS.items():
        path = out_dir / f"graphs_{split}"
        cmd_generate("graphs", path, seed=seed + offset, count=counts[split], sizes=sizes, ps=ps)
        print(f"  {path}/ ({counts[split]} graphs)")


def main() -> int:
    parser = argparse.ArgumentParser(description="Generate the corpora used by configs/*.conf")
    parser.add_argument(
        "--kind",
        choices=["sudoku4", "sudoku9", "graphs", "all"],
        default="all",
        help="Which corpora to generate (default: all except sudoku9)"
    )
    parser.add_argument("--out", type=Path, default=Path("data"), help="Output directory (default: data)")
    parser.add_argument("--seed", type=int, default=0, help="Base seed; splits use seed, seed+1, seed+2")
    parser.add_argument("--train", type=int, default=1000, help="Training set size")
    parser.add_argument("--eval", type=int, default=200, help="Validation and test set size")

    args = parser.parse_args()
    counts = {"train": args.train, "val": args.eval, "test": args.eval}

    logger.info("corpus_preparation_started", kind=args.kind, out=str(args.out), seed=args.seed)
    try:
        if args.kind in ("sudoku4", "all"):
            print("4x4 Sudoku:")
            prepare_sudoku(args.out, 4, 6, counts, args.seed)
        if args.kind == "sudoku9":
            # 9x9 digging checks uniqueness with the SAT backend, so this takes a while
            print("9x9 Sudoku:")
            prepare_sudoku(args.out, 9, 30, counts, args.seed)
        if args.kind in ("graphs", "all"):
            print("Erdos-Renyi graphs:")
            prepare_graphs(args.out, counts, [10, 15, 20], [0.3, 0.5], args.seed)
    except (GenerationError, OSError) as e:
        logger.error("corpus_preparation_failed", error=str(e))
        print(f"Error: {e}", file=sys.stderr)
        return 1

    logger.info("corpus_preparation_completed", kind=args.kind)
    return 0


if __name__ == "__main__":
    sys.exit(main())
