"""Figures for the report paths of the CLI: causal graphs and validation summaries."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .causal import TOP_NODE, EquationalState, build_causal_graph  # noqa: E402

__all__ = ["layered_layout", "draw_causal_graph", "plot_validation_summary"]


def layered_layout(parents: dict[str, Iterable[str]]) -> dict[str, tuple[float, float]]:
    """Place nodes in rows by longest path from a root; rows are centred."""
    depth: dict[str, int] = {}

    def level(n: str) -> int:
        if n not in depth:
            ps = list(parents.get(n, ()))
            depth[n] = 0  # guards against cycles
            depth[n] = 1 + max((level(p) for p in ps), default=-1)
        return depth[n]

    for n in parents:
        level(n)
    rows: dict[int, list[str]] = {}
    for n, d in depth.items():
        rows.setdefault(d, []).append(n)
    pos = {}
    for d, names in rows.items():
        names.sort()
        width = len(names) - 1
        for k, n in enumerate(names):
            pos[n] = (k - width / 2, -float(d))
    return pos


def draw_causal_graph(state: EquationalState, path: str | Path,
                      highlight: Iterable[str] = (), effect_atoms: Iterable[str] = (),
                      title: str | None = None) -> Path:
    """Draw the causal graph; true atoms are filled, cause atoms ringed, effect atoms boxed."""
    graph = build_causal_graph(state)
    parents = {n: set(ps) for n, ps in graph.parents.items()}
    pos = layered_layout(parents)
    highlight, effect_atoms = set(highlight), set(effect_atoms)
    fig, ax = plt.subplots(figsize=(1.6 + 1.2 * max(len(pos) ** 0.5, 2), 4.5))
    for parent, child in graph.edges():
        (x0, y0), (x1, y1) = pos[parent], pos[child]
        ax.annotate("", xy=(x1, y1 + 0.12), xytext=(x0, y0 - 0.12),
                    arrowprops=dict(arrowstyle="-|>", color="0.35", lw=1.1, shrinkA=6, shrinkB=6))
    for node, (x, y) in pos.items():
        true = node == TOP_NODE or node in state.valuation
        edge = "tab:red" if node in highlight else "black"
        box = "square,pad=0.35" if node in effect_atoms else "circle,pad=0.3"
        ax.text(x, y, node, ha="center", va="center", fontsize=11,
                color="white" if true else "black",
                bbox=dict(boxstyle=box, fc="tab:blue" if true else "white", ec=edge,
                          lw=2.4 if node in highlight else 1.0))
    xs = [x for x, _ in pos.values()] or [0.0]
    ys = [y for _, y in pos.values()] or [0.0]
    ax.set_xlim(min(xs) - 0.8, max(xs) + 0.8)
    ax.set_ylim(min(ys) - 0.6, max(ys) + 0.6)
    ax.axis("off")
    if title:
        ax.set_title(title, fontsize=10)
    path = Path(path)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_validation_summary(results: Sequence, path: str | Path) -> Path:
    """Horizontal bars of instance counts per suite, coloured by outcome, with runtimes."""
    names = [r.name for r in results]
    counts = [max(r.instances, 1) for r in results]
    colors = ["tab:green" if r.passed else "tab:red" for r in results]
    fig, ax = plt.subplots(figsize=(7, 0.5 * len(results) + 1.2))
    ys = range(len(results))
    ax.barh(list(ys), counts, color=colors)
    ax.set_xscale("log")
    ax.set_yticks(list(ys), names)
    ax.invert_yaxis()
    ax.set_xlabel("instances checked")
    for y, r in zip(ys, results):
        label = f"{'pass' if r.passed else 'FAIL'}  {r.seconds:.2f}s"
        ax.text(max(r.instances, 1) * 1.05, y, label, va="center", fontsize=8)
    ax.set_xlim(right=max(counts) * 8)
    path = Path(path)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path
