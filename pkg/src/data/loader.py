"""
Corpus loading and writing: Sudoku CSV files, edge-list graphs and manifests
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence
import pandas as pd
from pydantic import ValidationError
from src.config.constants import EDGE_LIST_SUFFIX, MANIFEST_SUFFIX, SUDOKU_CSV_HEADER
from src.config.settings import get_settings
from src.data.models import CorpusManifest, DatasetError, Graph, SudokuRecord
from src.utils.logger import LoggerMixin, log_performance


def _first_error(e: ValidationError) -> str:
    err = e.errors()[0]
    return str(err.get("msg", e))


class CorpusLoader(LoggerMixin):
    """
    Reads and writes the on-disk corpus formats
    """

    def __init__(self, data_dir: Optional[Path] = None):
        self.data_dir = Path(data_dir) if data_dir is not None else get_settings().data_dir

    def resolve(self, path: Path) -> Path:
        """Relative paths that do not exist as given are looked up under data_dir"""
        path = Path(path)
        if path.is_absolute() or path.exists():
            return path
        return self.data_dir / path

    @log_performance
    def load_sudoku_csv(self, path: Path) -> List[SudokuRecord]:
        """
        Load a "quizzes,solutions" CSV

        Args:
            path: CSV file path

        Returns:
            Validated records in file order

        Raises:
            DatasetError: listing every invalid row by its line number
        """
        path = self.resolve(path)
        try:
            frame = pd.read_csv(path, dtype=str, keep_default_na=False)
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise DatasetError(f"cannot read {path}: {e}") from e

        if list(frame.columns) != SUDOKU_CSV_HEADER:
            raise DatasetError(f"{path}: expected header {','.join(SUDOKU_CSV_HEADER)}, got {','.join(frame.columns)}")

        records: List[SudokuRecord] = []
        bad_rows = []
        for offset, (puzzle, solution) in enumerate(zip(frame["quizzes"], frame["solutions"])):
            line = offset + 2
            try:
                records.append(SudokuRecord(puzzle=puzzle.strip(), solution=solution.strip()))
            except ValidationError as e:
                bad_rows.append(f"line {line}: {_first_error(e)}")

        if bad_rows:
            self.logger.error("invalid_sudoku_rows", path=str(path), count=len(bad_rows))
            raise DatasetError(f"{path}: {len(bad_rows)} invalid rows\n" + "\n".join(bad_rows))

        self.logger.info("sudoku_csv_loaded", path=str(path), records=len(records))
        return records

    def write_sudoku_csv(self, records: Sequence[SudokuRecord], path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame(
            {"quizzes": [r.puzzle for r in records], "solutions": [r.solution for r in records]},
            columns=SUDOKU_CSV_HEADER,
        )
        frame.to_csv(path, index=False, lineterminator="\n")
        self.logger.info("sudoku_csv_written", path=str(path), records=len(records))
        return path

    def load_edge_list(self, path: Path) -> Graph:
        """Parse "n m" followed by m lines "u v" (0-indexed)"""
        path = self.resolve(path)
        try:
            lines = [ln.strip() for ln in path.read_text(encoding="utf-8").splitlines()]
        except OSError as e:
            raise DatasetError(f"cannot read {path}: {e}") from e
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines:
            raise DatasetError(f"{path}: empty edge list")
        try:
            n, m = (int(tok) for tok in lines[0].split())
            edges = [tuple(int(tok) for tok in ln.split()) for ln in lines[1:]]
        except ValueError:
            raise DatasetError(f"{path}: edge list must contain integer pairs") from None
        malformed = [i + 2 for i, e in enumerate(edges) if len(e) != 2]
        if malformed:
            raise DatasetError(f"{path}: malformed edge lines {malformed}")
        if len(edges) != m:
            raise DatasetError(f"{path}: header declares {m} edges, found {len(edges)}")
        try:
            return Graph(node_count=n, edges=edges, name=path.stem)
        except ValidationError as e:
            raise DatasetError(f"{path}: {_first_error(e)}") from e

    def write_edge_list(self, g: Graph, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        body = [f"{g.node_count} {g.edge_count}"] + [f"{u} {v}" for u, v in g.edges]
        path.write_text("\n".join(body) + "\n", encoding="utf-8")
        return path

    @log_performance
    def load_graphs(self, path: Path) -> List[Graph]:
        """A single edge-list file, or every edge-list file of a directory in name order"""
        path = self.resolve(path)
        if path.is_dir():
            files = sorted(path.glob(f"*{EDGE_LIST_SUFFIX}"))
            if not files:
                raise DatasetError(f"{path}: no {EDGE_LIST_SUFFIX} files")
            graphs = [self.load_edge_list(f) for f in files]
        else:
            graphs = [self.load_edge_list(path)]
        self.logger.info("graphs_loaded", path=str(path), graphs=len(graphs))
        return graphs

    def write_graphs(self, graphs: Sequence[Graph], directory: Path) -> Path:
        directory = Path(directory)
        width = max(4, len(str(len(graphs))))
        for i, g in enumerate(graphs):
            self.write_edge_list(g, directory / f"{g.name or 'graph'}_{i:0{width}d}{EDGE_LIST_SUFFIX}")
        return directory

    def write_manifest(self, corpus: Path, kind: str, seed: int, parameters: Dict[str, Any], record_count: int) -> Path:
        manifest = CorpusManifest(
            kind=kind,
            seed=seed,
            parameters=parameters,
            record_count=record_count,
            sha256=corpus_checksum(corpus),
            tool_version=get_settings().app_version,
        )
        target = manifest_path(corpus)
        target.write_text(json.dumps(manifest.model_dump(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        self.logger.info("manifest_written", path=str(target), sha256=manifest.sha256)
        return target

    def read_manifest(self, corpus: Path) -> CorpusManifest:
        target = manifest_path(corpus)
        try:
            return CorpusManifest(**json.loads(target.read_text(encoding="utf-8")))
        except (OSError, ValueError, ValidationError) as e:
            raise DatasetError(f"cannot read manifest {target}: {e}") from e


def manifest_path(corpus: Path) -> Path:
    corpus = Path(corpus)
    return corpus.with_name(corpus.name + MANIFEST_SUFFIX)


def corpus_checksum(corpus: Path) -> str:
    """sha256 of a file, or of a directory's files in name order"""
    corpus = Path(corpus)
    digest = hashlib.sha256()
    files = sorted(p for p in corpus.iterdir() if p.is_file()) if corpus.is_dir() else [corpus]
    for f in files:
        if corpus.is_dir():
            digest.update(f.name.encode("utf-8") + b"\0")
        digest.update(f.read_bytes())
    return digest.hexdigest()


def load_sudoku_csv(path: Path) -> List[SudokuRecord]:
    return CorpusLoader().load_sudoku_csv(path)


def load_graphs(path: Path) -> List[Graph]:
    return CorpusLoader().load_graphs(path)
