"""CSV output for sweeps and time series.

Floats are written with ``repr`` so a read-back reproduces them exactly;
lines end in LF regardless of platform.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import List, Union

from ..engine import TimeSeries
from .sweep import SweepResult

SWEEP_COLUMNS = ("policy", "lambda_total", "replication", "mean_total_queue_pkts", "slope", "stable",
                 "mean_probed_fraction", "frontier_flag")
TIMESERIES_COLUMNS = ("slot", "scheduled_user", "served_bits", "cost_units", "total_queue_bits")


class CSVWriteError(OSError):
    pass


def _sweep_rows(results):
    for res in results:
        fi = res.frontier_index
        for r in res.runs:
            yield (res.policy, repr(res.grid[r.lam_idx]), r.rep, repr(r.mean_total_queue_pkts),
                   repr(r.verdict.trend_slope), int(r.verdict.stable), repr(r.mean_probed_fraction),
                   int(fi is not None and r.lam_idx == fi))


def _timeseries_rows(ts: TimeSeries):
    for t, (u, s, c, q) in enumerate(zip(ts.scheduled_user.tolist(), ts.served_bits.tolist(),
                                         ts.cost_units.tolist(), ts.total_queue_bits.tolist())):
        yield t, u, repr(s), c, repr(q)


def render_csv(result) -> str:
    """CSV text for a SweepResult, a list of them (one block per policy), or a TimeSeries."""
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    if isinstance(result, TimeSeries):
        w.writerow(TIMESERIES_COLUMNS)
        w.writerows(_timeseries_rows(result))
    else:
        results = [result] if isinstance(result, SweepResult) else list(result)
        w.writerow(SWEEP_COLUMNS)
        w.writerows(_sweep_rows(results))
    return buf.getvalue()


def emit_csv(result, path: Union[str, Path]) -> Path:
    path = Path(path)
    text = render_csv(result)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CSVWriteError(exc.errno, f"cannot write CSV to {path}: {exc.strerror}") from exc
    return path


def read_csv(path: Union[str, Path]) -> List[dict]:
    """Rows as dicts with numeric columns converted back to int/float."""
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise CSVWriteError(exc.errno, f"cannot read CSV {path}: {exc.strerror}") from exc
    ints = {"replication", "stable", "frontier_flag", "slot", "scheduled_user", "cost_units"}
    out = []
    for row in rows:
        out.append({k: (v if k == "policy" else int(v) if k in ints else float(v)) for k, v in row.items()})
    return out
