"""Matplotlib renderings of the analytics reports."""
from __future__ import annotations

from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .analytics import StatsReport


def render_predicate_frequencies(
    report: StatsReport, path: Union[str, Path], top: int = 30
) -> Path:
    """Horizontal bar chart of the most frequent predicates."""
    path = Path(path)
    items = list(report.predicate_frequencies.items())[:top]
    fig, ax = plt.subplots(figsize=(8, max(2.5, 0.3 * len(items) + 1)))
    if items:
        labels, counts = zip(*items)
        positions = range(len(items))
        ax.barh(positions, counts, color="#4878a8")
        ax.set_yticks(positions)
        ax.set_yticklabels(labels)
        ax.invert_yaxis()
    ax.set_xlabel("occurrences")
    ax.set_title("Predicate frequencies")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_task_totals(report: StatsReport, path: Union[str, Path]) -> Path:
    """Bar chart of unique-triple counts per task partition."""
    path = Path(path)
    tasks = [task.value for task in report.per_task]
    totals = [bucket.unique_triples for bucket in report.per_task.values()]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(tasks, totals, color="#4878a8")
    ax.set_ylabel("unique triples")
    ax.set_title("Unique triples per task")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
