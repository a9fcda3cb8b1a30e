"""Report rendering: probe series as CSV plus one matplotlib figure per
probe, and a message-count CSV, written into an output directory."""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .engine import RunResult


def write_report(result: RunResult, out_dir: str) -> list[str]:
    """Write probes.csv, messages.csv and <probe>.png files; returns the
    paths written, in a deterministic order."""
    os.makedirs(out_dir, exist_ok=True)
    written: list[str] = []
    stats = result.stats

    probes = sorted(stats.probe_series)
    probe_path = os.path.join(out_dir, "probes.csv")
    with open(probe_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tick", *probes])
        if probes:
            length = len(stats.probe_series[probes[0]])
            for t in range(length):
                writer.writerow([t, *(stats.probe_series[p][t] for p in probes)])
    written.append(probe_path)

    msg_path = os.path.join(out_dir, "messages.csv")
    with open(msg_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["op", "count"])
        for op, count in sorted(stats.message_counts.items()):
            writer.writerow([op, count])
    written.append(msg_path)

    aggregates = stats.probe_aggregates()
    for name in probes:
        series = stats.probe_series[name]
        fig, ax = plt.subplots(figsize=(8, 3))
        ax.plot(range(len(series)), series, linewidth=0.8)
        mean = aggregates[name]["mean"]
        ax.axhline(mean, color="tab:red", linewidth=0.8, linestyle="--",
                   label=f"mean {mean:.3f}")
        ax.set_xlabel("tick")
        ax.set_ylabel(name)
        ax.set_title(f"{name} (seed {stats.seed}, {stats.ticks} ticks)")
        ax.legend(loc="upper right")
        fig.tight_layout()
        fig_path = os.path.join(out_dir, f"{name.replace('.', '_')}.png")
        fig.savefig(fig_path, dpi=120)
        plt.close(fig)
        written.append(fig_path)
    return written
