"""Result serialization and static SVG charts."""
from __future__ import annotations

import csv
import json
import re
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from .scenario import ScenarioResult

CSV_COLUMNS = ["scenario", "N_U", "N_S", "N_D", "N_CP", "se_bits_s_hz", "phi_fs_pct",
               "phi_svd_pct", "mu_tx", "mu_rx", "r2_block"]

_SVG_RC = {"svg.hashsalt": "mmimmo", "svg.fonttype": "path"}


def _csv_row(r: ScenarioResult):
    def num(x):
        return "" if x is None else repr(float(x))
    return [r.name, r.n_u, r.n_s, r.n_d, r.n_cp, num(r.se), num(r.phi_fs), num(r.phi_svd),
            num(r.mu_tx), num(r.mu_rx), num(r.r2_block)]


def emit_results(results, fmt: str, path) -> Path:
    path = Path(path)
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for r in results:
                w.writerow(_csv_row(r))
    elif fmt == "json":
        with path.open("w") as fh:
            json.dump([r.to_dict() for r in results], fh, indent=2)
            fh.write("\n")
    else:
        raise ValueError(f"unknown result format {fmt!r}")
    return path


def read_json_results(path) -> list[ScenarioResult]:
    return [ScenarioResult.from_dict(d) for d in json.loads(Path(path).read_text())]


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name.replace("*", "s")) or "scenario"


def _save(fig: Figure, path: Path):
    with matplotlib.rc_context(_SVG_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})


def emit_plots(results, out_dir) -> list[Path]:
    """One total-SE bar chart plus one per-stream SIR profile per scenario."""
    results = list(results)
    if not results:
        raise ValueError("no results to plot")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []

    fig = Figure(figsize=(max(4.0, 0.6 * len(results) + 2), 3.5))
    ax = fig.add_subplot()
    x = np.arange(len(results))
    ax.bar(x - 0.2, [r.se for r in results], 0.4, label="scheme")
    ax.bar(x + 0.2, [r.se_svd for r in results], 0.4, label="SVD")
    ax.set_xticks(x, [r.name for r in results])
    ax.set_ylabel("spectral efficiency (bits/s/Hz)")
    ax.legend()
    fig.tight_layout()
    p = out_dir / "se_summary.svg"
    _save(fig, p)
    paths.append(p)

    for i, r in enumerate(results):
        fig = Figure(figsize=(5, 3))
        ax = fig.add_subplot()
        sir = np.asarray(r.sir, dtype=float)
        finite = np.isfinite(sir)
        sir_db = np.full(sir.shape, np.nan)
        sir_db[finite & (sir > 0)] = 10 * np.log10(sir[finite & (sir > 0)])
        streams = np.arange(1, len(sir) + 1)
        ax.plot(streams, sir_db, marker=".", linestyle="-")
        if np.any(~finite):
            top = np.nanmax(sir_db) if np.any(np.isfinite(sir_db)) else 0.0
            ax.plot(streams[~finite], np.full((~finite).sum(), top + 10), "^", label="interference-free")
            ax.legend()
        ax.set_xlabel("stream")
        ax.set_ylabel("SIR (dB)")
        ax.set_title(f"{r.name}: s = {r.se:.1f} bits/s/Hz")
        fig.tight_layout()
        p = out_dir / f"sir_{i:03d}_{_slug(r.name)}.svg"
        _save(fig, p)
        paths.append(p)
    return paths
