"""Figures written next to the CSV/JSON reports (matplotlib, Agg backend)."""

from __future__ import annotations

from typing import Any, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

CHAIN_KEYS = ("lhs_sq", "absolute_value", "refined", "improved", "cotlar_stein")


def _finish(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_gap(rows: Sequence[Any], path) -> None:
    """Left: both bounds against n. Right: their ratio with an n/4 guide."""
    n = np.array([r.n for r in rows], dtype=float)
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(9, 3.6))
    ax0.plot(n, [r.cotlar_stein for r in rows], "o-", label="row-sum bound")
    ax0.plot(n, [r.improved for r in rows], "s-", label="spectral bound")
    ax0.plot(n, [r.lhs_sq for r in rows], "k:", label=r"$\|\sum T_k\|^2$")
    ax0.set_xlabel("n")
    ax0.set_ylabel("squared norm bound")
    ax0.legend(frameon=False, fontsize=8)

    ax1.plot(n, [r.ratio_cs_over_improved for r in rows], "o-", label="ratio")
    ax1.plot(n, n / 4, "k--", lw=0.8, label="n/4")
    ax1.set_xlabel("n")
    ax1.set_ylabel("row-sum / spectral")
    ax1.legend(frameon=False, fontsize=8)
    if len(n) > 1 and n.max() / n.min() >= 8:
        for ax in (ax0, ax1):
            ax.set_xscale("log", base=2)
            ax.set_yscale("log")
    _finish(fig, path)


def plot_chain(flat: dict[str, Any], path) -> None:
    """Bar chart of the bound chain from a flat report."""
    values = [flat[k] for k in CHAIN_KEYS]
    fig, ax = plt.subplots(figsize=(6, 3.2))
    ax.bar(range(len(values)), values, color=["0.3"] + ["C0"] * (len(values) - 1))
    ax.set_xticks(range(len(values)), CHAIN_KEYS, rotation=20, fontsize=8)
    ax.set_ylabel("squared scale")
    ax.set_title(flat.get("label") or "bound chain", fontsize=9)
    _finish(fig, path)
