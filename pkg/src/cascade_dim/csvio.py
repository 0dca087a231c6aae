"""CSV output with ``#``-comment manifests.

Data rows depend only on the inputs; the manifest (which carries the
timestamp) lives in comment lines, so reruns differ only there.
"""

from __future__ import annotations

import csv
import io
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .boxdim import CountSeries, DimEstimate


@dataclass(frozen=True)
class RunManifest:
    command_line: str
    model: str = ""
    seeds: tuple[int, ...] = ()
    depth: int | None = None
    version: str = __version__
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )

    def header_lines(self) -> list[str]:
        return [
            f"# command: {self.command_line}",
            f"# model: {self.model}",
            f"# seeds: {' '.join(map(str, self.seeds))}",
            f"# depth: {'' if self.depth is None else self.depth}",
            f"# version: cascade-dim {self.version}",
            f"# timestamp: {self.timestamp}",
        ]


def format_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        # shortest round-trip form: locale independent, 17 digits at most
        return repr(v)
    return str(v)


def render_csv(header: Sequence[str], rows: Iterable[Sequence], manifest: RunManifest | None = None) -> str:
    buf = io.StringIO()
    if manifest is not None:
        for line in manifest.header_lines():
            buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(target, header: Sequence[str], rows: Iterable[Sequence],
              manifest: RunManifest | None = None) -> None:
    """Write to a path, or to stdout when ``target`` is ``None`` or ``"-"``."""
    text = render_csv(header, rows, manifest)
    if target is None or str(target) == "-":
        sys.stdout.write(text)
    elif hasattr(target, "write"):
        target.write(text)
    else:
        Path(target).write_text(text)


def data_lines(text: str) -> list[str]:
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


def read_csv(source) -> tuple[list[str], list[dict[str, str]]]:
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text()
    reader = csv.reader(data_lines(text))
    header = next(reader)
    return header, [dict(zip(header, row)) for row in reader]


def write_count_series_csv(series: CountSeries, target, manifest: RunManifest | None = None) -> None:
    write_csv(target, ["n", "count"], series.entries, manifest)


def read_count_series_csv(source) -> CountSeries:
    header, rows = read_csv(source)
    if header != ["n", "count"]:
        raise ValueError(f"unexpected count-series header {header}")
    return CountSeries(tuple((int(r["n"]), int(r["count"])) for r in rows))


def write_dim_estimate_csv(est: DimEstimate, target, manifest: RunManifest | None = None) -> None:
    write_csv(target, ["slope", "stderr", "n_lo", "n_hi"],
              [(est.slope, est.stderr, est.window[0], est.window[1])], manifest)


def read_dim_estimate_csv(source) -> dict[str, float]:
    header, rows = read_csv(source)
    if header != ["slope", "stderr", "n_lo", "n_hi"] or len(rows) != 1:
        raise ValueError("not a dimension-estimate file")
    r = rows[0]
    return {"slope": float(r["slope"]), "stderr": float(r["stderr"]),
            "n_lo": int(r["n_lo"]), "n_hi": int(r["n_hi"])}
