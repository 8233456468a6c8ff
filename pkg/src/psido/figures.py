"""PNG rendering of suite data tables.

Each table written by the report path gets one figure built from the same
rows as the CSV, so the pictures never disagree with the delimited data.
Rendering is headless (Agg) and file-only.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_tables(report, out_dir: str) -> list:
    """Render every table of the report; returns the written file names."""
    written = []
    for name, (header, rows) in sorted(report.tables.items()):
        renderer = _RENDERERS.get(name, _render_generic)
        fig = plt.figure(figsize=(6.0, 4.0))
        try:
            renderer(fig, header, rows)
            fig.suptitle(name)
            filename = name + ".png"
            fig.savefig(os.path.join(out_dir, filename), dpi=120)
            written.append(filename)
        finally:
            plt.close(fig)
    return written


def _columns(header, rows):
    if not rows:
        return {key: np.array([]) for key in header}
    arr = np.asarray(rows, dtype=float)
    return {key: arr[:, i] for i, key in enumerate(header)}


def _render_decay(fig, header, rows):
    cols = _columns(header, rows)
    ax = fig.add_subplot(111)
    for key in header[1:]:
        ax.loglog(cols[header[0]], cols[key], marker="o", label=key)
    ax.set_xlabel("mode window")
    ax.set_ylabel("mid-band defect norm")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)


def _render_chern(fig, header, rows):
    cols = _columns(header, rows)
    ax = fig.add_subplot(111)
    m = cols["degree"]
    ax.plot(m, cols["normalized_real"], "o", label="normalized pairing")
    if m.size:
        ax.plot(m, m, "-", alpha=0.5, label="bundle degree")
    ax.set_xlabel("bundle degree")
    ax.set_ylabel("pairing")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)


def _render_histogram(column):
    def render(fig, header, rows):
        cols = _columns(header, rows)
        ax = fig.add_subplot(111)
        values = cols[column]
        positive = values[values > 0]
        if positive.size:
            ax.hist(np.log10(positive), bins=20)
        ax.set_xlabel("log10 " + column)
        ax.set_ylabel("count")
    return render


def _render_connections(fig, header, rows):
    cols = _columns(header, rows)
    ax = fig.add_subplot(111)
    values = cols["pairing_abs"]
    ax.bar(np.arange(values.size), np.where(values > 0, values, np.nan))
    ax.set_yscale("log")
    ax.set_xlabel("run (last bar: refined grid)")
    ax.set_ylabel("|residue pairing|")
    ax.grid(True, axis="y", alpha=0.3)


def _render_multiplication(fig, header, rows):
    cols = _columns(header, rows)
    ax = fig.add_subplot(111)
    ax.plot(cols["degree"], cols["pairing_abs"], "o")
    ax.set_xlabel("bundle degree")
    ax.set_ylabel("|residue pairing|")
    ax.grid(True, alpha=0.3)


def _render_loop_metric(fig, header, rows):
    cols = _columns(header, rows)
    ax = fig.add_subplot(111)
    ax.semilogy(cols["sobolev_order"], cols["value_real"], "o", label="measured")
    ax.semilogy(cols["sobolev_order"], cols["expected"], "x", label="closed form")
    ax.set_xlabel("Sobolev order")
    ax.set_ylabel("metric value")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)


def _render_generic(fig, header, rows):
    ax = fig.add_subplot(111)
    cols = _columns(header, rows)
    if len(header) >= 2:
        ax.plot(cols[header[0]], cols[header[1]], "o")
        ax.set_xlabel(header[0])
        ax.set_ylabel(header[1])
    ax.grid(True, alpha=0.3)


_RENDERERS = {
    "defect-decay": _render_decay,
    "chern-pairings": _render_chern,
    "trace-commutator": _render_histogram("residue_over_scale"),
    "norm-continuity": _render_histogram("ratio"),
    "residue-connections": _render_connections,
    "residue-multiplication": _render_multiplication,
    "loop-metric": _render_loop_metric,
}
