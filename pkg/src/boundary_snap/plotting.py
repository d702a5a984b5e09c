"""Kill-matrix figure for campaign runs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

from .mutator import KillMatrix, format_score, mutation_scores  # noqa: E402

# PNG metadata would otherwise embed the matplotlib version
_METADATA = {"Software": None}

_KILL_COLORS = ListedColormap(["#d9d9d9", "#2b8cbe"])


def plot_kill_matrix(m: KillMatrix, path) -> None:
    """Grid of targets against the two detectors; filled cells are kills."""
    n = max(m.mutants, 1)
    fig, ax = plt.subplots(figsize=(5.5, 0.9 + 0.28 * n))
    grid = [[int(r.killed_by_tests), int(r.killed_by_snapshots)] for r in m.rows] or [[0, 0]]
    ax.imshow(grid, cmap=_KILL_COLORS, vmin=0, vmax=1, aspect="auto")
    ax.set_xticks([0, 1])
    ax.set_xticklabels(["tests", "snapshots"])
    ax.set_yticks(range(len(m.rows)))
    ax.set_yticklabels([r.target for r in m.rows], fontsize=7)
    ax.set_xticks([0.5], minor=True)
    ax.set_yticks([i + 0.5 for i in range(len(m.rows))], minor=True)
    ax.grid(which="minor", color="white", linewidth=1.5)
    ax.tick_params(which="minor", length=0)
    if m.mutants:
        tests, snaps = mutation_scores(m)
        ax.set_title(f"{m.mutants} mutants ({m.mode} defaults): tests {format_score(tests)}, "
                     f"snapshots {format_score(snaps)}", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, metadata=_METADATA)
    plt.close(fig)

