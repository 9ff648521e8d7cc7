"""Report figures rendered next to the delimited output files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["render_density_figure", "render_rounds_figure", "render_timing_figure"]


def render_density_figure(rows, out_path, *, title: str) -> Path:
    """rows: (z_squared, density) pairs, one per ratio guess."""
    out_path = Path(out_path)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if rows:
        zs = [r[0] for r in rows]
        ds = [r[1] for r in rows]
        ax.plot(zs, ds, marker="o", lw=1.0, ms=3.5)
        ax.set_xscale("log")
    ax.set_xlabel("size-ratio guess $z^2$")
    ax.set_ylabel("recounted density")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def render_rounds_figure(rows, out_path, *, title: str) -> Path:
    """rows: dicts with guess_D, guess_z, phase, rounds (cumulative plot)."""
    out_path = Path(out_path)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if rows:
        by_cell: dict[tuple, list] = {}
        for r in rows:
            by_cell.setdefault((r["guess_D"], r["guess_z"]), []).append(r)
        for (d, z), cell_rows in by_cell.items():
            cell_rows.sort(key=lambda r: r["phase"])
            xs = [r["phase"] for r in cell_rows]
            total = 0
            ys = []
            for r in cell_rows:
                total += r["rounds"]
                ys.append(total)
            ax.plot(xs, ys, lw=0.8, alpha=0.5)
    ax.set_xlabel("phase")
    ax.set_ylabel("cumulative rounds")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def render_timing_figure(rows, out_path, *, title: str) -> Path:
    """rows: dicts with batch_index, nanos_per_edge_max, nanos_per_edge_mean."""
    out_path = Path(out_path)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if rows:
        xs = [r["batch_index"] for r in rows]
        ax.plot(xs, [r["nanos_per_edge_max"] for r in rows],
                lw=0.9, label="max ns/edge")
        ax.plot(xs, [r["nanos_per_edge_mean"] for r in rows],
                lw=0.9, label="mean ns/edge")
        ax.set_yscale("log")
        ax.legend(fontsize=8)
    ax.set_xlabel("batch")
    ax.set_ylabel("per-edge update time (ns)")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path
