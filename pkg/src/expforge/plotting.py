"""Figures and CSV tables for certification reports. Uses the Agg backend."""

from __future__ import annotations

import csv
import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed metadata keeps PNG bytes stable across runs
_PNG_META = {"Software": None}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=100, metadata=_PNG_META)
    plt.close(fig)
    return path


def write_csv(path, rows: list[dict], columns: list[str] | None = None) -> Path:
    """One row per dict; list values are joined with spaces."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = columns or (list(rows[0]) if rows else [])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([" ".join(map(str, r[c])) if isinstance(r.get(c), (list, tuple)) else r.get(c, "")
                    for c in columns])
    path.write_text(buf.getvalue())
    return path


def plot_profile(path, profile: list[dict], key: str = "min_ratio", label: str = "min |UN(S)|/|S|",
                 reference: float | None = None, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    sizes = [p["size"] for p in profile]
    vals = [p[key] for p in profile]
    ax.plot(sizes, vals, "o-", color="C0", label=label)
    for s, v, p in zip(sizes, vals, profile):
        if p.get("mode") == "sampled":
            ax.plot([s], [v], "s", mfc="none", color="C3")
    if reference is not None:
        ax.axhline(reference, ls="--", color="gray", lw=1, label=f"threshold {reference:g}")
    ax.set_xlabel("|S|")
    ax.set_ylabel(label)
    ax.set_xticks(sizes)
    if title:
        ax.set_title(title)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_spectrum(path, eigenvalues, marks: dict | None = None, title: str = "") -> Path:
    """Histogram of adjacency eigenvalues with optional vertical reference lines."""
    ev = np.sort(np.asarray(eigenvalues, dtype=float))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.hist(ev, bins=min(60, max(5, len(ev) // 4)), color="C0", alpha=0.8)
    for i, (name, x) in enumerate(sorted((marks or {}).items())):
        ax.axvline(x, ls="--", lw=1, color=f"C{i + 1}", label=f"{name} = {x:.4g}")
    ax.set_xlabel("eigenvalue")
    ax.set_ylabel("count")
    if title:
        ax.set_title(title)
    if marks:
        ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_skeleton_sets(path, rows: list[dict], title: str = "") -> Path:
    """Induced top eigenvalue of sampled skeleton sets against their size."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    x = [r["size"] for r in rows]
    ax.scatter(x, [r["lambda_U"] for r in rows], s=12, color="C0", label="lambda_max(G[U])")
    ax.scatter(x, [r["comparison_bound"] for r in rows], s=12, marker="x", color="C1",
               label="lambda_2 + |U| d_max / n")
    ax.set_xlabel("|U|")
    ax.set_ylabel("eigenvalue")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return _save(fig, path)
