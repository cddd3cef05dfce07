"""Per-trial records and their persistent forms.

CSV output is byte-identical for a fixed (config, seed) pair no matter
how many worker threads ran the trials: records are keyed and sorted by
trial index, floats are serialized via repr (shortest round-trip), and
wall-clock time is deliberately kept in memory only -- a timing column
would break reproducibility of the artifact files.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import ValidationError

CSV_SCHEMA_LINE = "# perturblab-records schema=1"
CSV_HEADER = "trial,seed,n,sigma_max,sigma_min,kappa,singular,tail_hit"


@dataclass(frozen=True)
class ExperimentRecord:
    trial: int
    seed: int
    n: int
    sigma_max: float
    sigma_min: float
    kappa: float
    singular: bool
    tail_hit: bool
    wall_time: float = 0.0  # in-memory only, never persisted

    def __post_init__(self):
        if math.isfinite(self.kappa) and self.sigma_min > 0.0:
            expected = self.sigma_max / self.sigma_min
            if abs(self.kappa - expected) > 1e-9 * max(1.0, abs(expected)):
                raise ValidationError(
                    f"kappa {self.kappa} inconsistent with sigma ratio {expected}"
                )


def _fmt_float(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def format_records_csv(records: Sequence[ExperimentRecord]) -> str:
    lines = [CSV_SCHEMA_LINE, CSV_HEADER]
    for r in sorted(records, key=lambda r: (r.n, r.trial)):
        lines.append(
            f"{r.trial},{r.seed},{r.n},{_fmt_float(r.sigma_max)},{_fmt_float(r.sigma_min)},"
            f"{_fmt_float(r.kappa)},{int(r.singular)},{int(r.tail_hit)}"
        )
    return "\n".join(lines) + "\n"


def write_records_csv(path: str, records: Sequence[ExperimentRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_records_csv(records))


def format_summary_json(summary: dict) -> str:
    return json.dumps(summary, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_summary_json(path: str, summary: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_summary_json(summary))


def json_safe_float(x: float) -> float | str:
    """JSON has no inf; encode it as a string marker."""
    if math.isinf(x) or math.isnan(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return float(x)


def run_trials(fn: Callable[[int], object], count: int, threads: int) -> list:
    """Run fn(0..count-1), optionally on a thread pool.

    Results come back ordered by trial index, so aggregation does not
    depend on the worker count; each fn call must derive its own seed
    from the trial index alone.
    """
    if threads <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, range(count)))
