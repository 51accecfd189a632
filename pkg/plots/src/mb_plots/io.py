"""Schema-validated readers for the harness CSV files.

Any deviation from the expected schema raises SchemaError carrying the
offending 1-based line number, which the CLI surfaces verbatim.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

AGGREGATE_HEADER = "t,stability_rate,mean_max_regret,mean_conflicts"
PROXY_HEADER = "t,proxy"


class SchemaError(ValueError):
    def __init__(self, path, line: int, message: str):
        self.path = Path(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


def _read_table(path: Path, header: str) -> np.ndarray:
    path = Path(path)
    n_cols = header.count(",") + 1
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != header:
            raise SchemaError(path, 1, f"expected header {header!r}, got {first!r}")
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != n_cols:
                raise SchemaError(path, line_no, f"expected {n_cols} columns, got {len(parts)}")
            try:
                rows.append([float(x) for x in parts])
            except ValueError:
                raise SchemaError(path, line_no, f"non-numeric value in {line!r}") from None
    if not rows:
        raise SchemaError(path, 2, "no data rows")
    return np.asarray(rows)


def read_aggregate_csv(path) -> dict[str, np.ndarray]:
    table = _read_table(path, AGGREGATE_HEADER)
    return {
        "t": table[:, 0],
        "stability_rate": table[:, 1],
        "mean_max_regret": table[:, 2],
        "mean_conflicts": table[:, 3],
    }


def read_proxy_csv(path) -> dict[str, np.ndarray]:
    table = _read_table(path, PROXY_HEADER)
    return {"t": table[:, 0], "proxy": table[:, 1]}
