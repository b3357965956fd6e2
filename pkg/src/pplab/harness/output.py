"""CSV and SVG emission for sweep rows."""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

from .sweep import CSV_FIELDS, SweepRow

CSV_HEADER = ",".join(CSV_FIELDS)

_INT_FIELDS = {"T", "r", "kappa_star", "lie_count"}
_STR_FIELDS = {"seller", "buyer", "semantics"}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def emit_csv(rows: Sequence[SweepRow], path) -> Path:
    """Write non-skipped rows under the fixed header; floats at 12 significant digits."""
    path = Path(path)
    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(CSV_FIELDS)
            for row in rows:
                if row.skipped is None:
                    w.writerow([_fmt(getattr(row, f)) for f in CSV_FIELDS])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc.strerror or exc}") from exc
    return path


def _parse(name: str, text: str):
    if text == "":
        return None
    if name in _STR_FIELDS:
        return text
    if name in _INT_FIELDS:
        return int(text)
    return float(text)


def read_csv(path) -> list[SweepRow]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_FIELDS:
            raise ValueError(f"{path}: header does not match {CSV_HEADER!r}")
        rows = []
        for rec in reader:
            vals = {k: _parse(k, x) for k, x in zip(CSV_FIELDS, rec)}
            # the semantics column is empty for non-pfs sellers
            vals["semantics"] = vals["semantics"] or ""
            rows.append(SweepRow(**vals))
        return rows


def emit_plot(rows: Sequence[SweepRow], path, axes: str = "log-log",
              series: Sequence[str] | None = None, title: str | None = None) -> Path:
    """Regret against T, one line per seller label, as a standalone SVG."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = [r for r in rows if r.skipped is None and r.regret is not None]
    labels = list(series) if series is not None else sorted({r.seller for r in rows})
    if not labels:
        raise ValueError("nothing to plot: no rows with a regret value")
    missing = [s for s in labels if not any(r.seller == s for r in rows)]
    if missing:
        raise ValueError(f"no rows for series {', '.join(repr(m) for m in missing)}")
    params = {(r.gamma, r.v) for r in rows if r.seller in labels}
    if len(params) != 1:
        raise ValueError(f"rows mix several (gamma, v) settings: {sorted(params)}")
    gamma, v = params.pop()
    if axes not in ("log-log", "linear"):
        raise ValueError(f"axes must be 'log-log' or 'linear', got {axes!r}")

    with matplotlib.rc_context({"svg.hashsalt": "pplab", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(5.0, 4.0))
        for name in labels:
            pts = sorted((r.T, r.regret) for r in rows if r.seller == name)
            xs, ys = zip(*pts)
            if axes == "log-log":
                ys = [max(y, 1e-12) for y in ys]   # regret can be 0 on a log axis
            ax.plot(xs, ys, marker="o", markersize=3, label=name)
        if axes == "log-log":
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel("T (rounds)")
        ax.set_ylabel("strategic regret")
        ax.set_title(title or f"gamma = {gamma:g}, v = {v:g}")
        ax.legend()
        ax.grid(True, which="both", alpha=0.3)
        fig.tight_layout()
        path = Path(path)
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
