"""
Report emission: a text table for people and JSON for CI
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence
import pandas as pd
from src.bench.metrics import RunMetrics
from src.reflection.evaluation import ExampleResult

TABLE_COLUMNS = [
    "label", "examples", "accuracy", "raw_accuracy", "recall", "precision",
    "mean_flagged", "fallback_rate", "timeout_rate", "mean_blanks",
    "mean_network_seconds", "mean_abduction_seconds", "mean_overall_seconds",
    "mean_kb_queries", "approx_ratio",
]


def metrics_frame(rows: Sequence[RunMetrics]) -> pd.DataFrame:
    frame = pd.DataFrame([row.model_dump() for row in rows])
    if frame.empty:
        return pd.DataFrame(columns=TABLE_COLUMNS)
    # columns that are None on every row carry nothing for this table
    return frame[[c for c in TABLE_COLUMNS if frame[c].notna().any()]]


def render_table(rows: Sequence[RunMetrics], title: Optional[str] = None) -> str:
    """Fixed-width text table, one row per RunMetrics"""
    frame = metrics_frame(rows)
    body = frame.to_string(index=False, float_format=lambda v: f"{v:.4f}", na_rep="-")
    return f"{title}\n{body}" if title else body


def report_payload(rows: Sequence[RunMetrics], extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    payload: Dict[str, Any] = {"rows": [row.model_dump() for row in rows]}
    if extra:
        payload.update(extra)
    return payload


def write_report(
    out_dir: Path, name: str, rows: Sequence[RunMetrics], extra: Optional[Dict[str, Any]] = None
) -> Dict[str, Path]:
    """Write <name>.txt and <name>.json under out_dir"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    text_path = out_dir / f"{name}.txt"
    json_path = out_dir / f"{name}.json"
    text_path.write_text(render_table(rows) + "\n", encoding="utf-8")
    json_path.write_text(json.dumps(report_payload(rows, extra), indent=2, default=str) + "\n", encoding="utf-8")
    return {"text": text_path, "json": json_path}


def write_results_jsonl(path: Path, results: Sequence[ExampleResult]) -> Path:
    """Per-example records, one JSON object per line, in input order"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for r in results:
            f.write(r.model_dump_json() + "\n")
    return path


def read_report(path: Path) -> List[RunMetrics]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [RunMetrics(**row) for row in data["rows"]]
