"""SVG plots of a run record: log10 error curves and the E_T / E_asymp ratio."""

from __future__ import annotations

import csv
import math
import warnings
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .run import HEADER  # noqa: E402

FLOOR = 1e-300


def read_record(path) -> dict:
    """Columns of a record CSV as float lists (missing residual kinds become None)."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != HEADER:
        raise ValueError(f"{path}: not a run record (bad header)")
    cols: dict = {h: [] for h in HEADER}
    for n, r in enumerate(rows[1:], 2):
        if len(r) != len(HEADER):
            raise ValueError(f"{path}:{n}: expected {len(HEADER)} cells, got {len(r)}")
        for h, cell in zip(HEADER, r):
            try:
                cols[h].append(float(cell) if cell != "" else None)
            except ValueError:
                raise ValueError(f"{path}:{n}: bad number {cell!r} in column {h}") from None
    if not cols["epoch"]:
        raise ValueError(f"{path}: no data rows")
    return cols


def _et_total(cols) -> list:
    out = []
    for i in range(len(cols["epoch"])):
        vals = [cols[h][i] for h in HEADER if h.startswith("ET_") and cols[h][i] is not None]
        out.append(math.fsum(vals))
    return out


def _log10(name, values) -> list:
    bad = [v for v in values if v is None or v <= 0]
    if bad:
        warnings.warn(f"{name}: {len(bad)} non-positive values clamped to {FLOOR:g}", RuntimeWarning)
    return [math.log10(v if v is not None and v > 0 else FLOOR) for v in values]


def curves(cols) -> dict:
    return {
        "E": _log10("E_true", cols["E_true"]),
        "E_T": _log10("E_T", _et_total(cols)),
        "E_exact": _log10("E_exact", cols["E_exact"]),
        "E_asymp": _log10("E_asymp", cols["E_asymp"]),
    }


def ratio(cols) -> list:
    return [e / a if a else math.inf for e, a in zip(_et_total(cols), cols["E_asymp"])]


def emit_plots(csv_path, outdir=None, title: str | None = None) -> tuple:
    """Writes ``<stem>_curves.svg`` and ``<stem>_ratio.svg``; returns both paths."""
    csv_path = Path(csv_path)
    cols = read_record(csv_path)
    out = Path(outdir) if outdir is not None else csv_path.parent
    out.mkdir(parents=True, exist_ok=True)
    ep = cols["epoch"]
    title = title or csv_path.stem

    fig, ax = plt.subplots(figsize=(6, 4))
    for name, ys in curves(cols).items():
        ax.plot(ep, ys, label=f"lg({name})")
    ax.set_xlabel("epoch")
    ax.set_ylabel("log10")
    ax.set_title(title)
    ax.legend()
    p1 = out / f"{csv_path.stem}_curves.svg"
    fig.savefig(p1, format="svg")
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ep, ratio(cols), label="E_T / E_asymp")
    ax.set_xlabel("epoch")
    ax.set_ylabel("ratio")
    ax.set_title(title)
    ax.legend()
    p2 = out / f"{csv_path.stem}_ratio.svg"
    fig.savefig(p2, format="svg")
    plt.close(fig)
    return p1, p2
