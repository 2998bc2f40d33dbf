"""Reader for the tfpp results CSV (schema v1).

Columns: estimand,p,param_json,mean,stderr,n,seed.  Any header deviation is
reported as a column diff; figures are pure functions of these bytes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

EXPECTED_HEADER = ["estimand", "p", "param_json", "mean", "stderr", "n", "seed"]


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class Row:
    estimand: str
    p: float
    params: dict
    mean: float
    stderr: float
    n: int
    seed: int


def read_rows(path) -> list[Row]:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file (no header)")
        if header != EXPECTED_HEADER:
            missing = [c for c in EXPECTED_HEADER if c not in header]
            extra = [c for c in header if c not in EXPECTED_HEADER]
            raise SchemaError(
                f"{path}: header mismatch; missing columns {missing}, "
                f"unexpected columns {extra}")
        rows = []
        for rec in reader:
            if not rec:
                continue
            rows.append(Row(rec[0], float(rec[1]), json.loads(rec[2]),
                            float(rec[3]), float(rec[4]), int(rec[5]),
                            int(rec[6])))
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def select(rows: list[Row], estimand: str) -> list[Row]:
    return [r for r in rows if r.estimand == estimand]
