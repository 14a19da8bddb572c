"""SVG figures rendered with matplotlib, with the plotted data embedded as a comment.

The data block sits right after the XML prolog:

    <!-- fkmixer-data
    x,y
    1,2.5
    -->
"""
from __future__ import annotations

import io
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_RC = {
    "svg.hashsalt": "fkmixer",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _cell(x) -> str:
    if isinstance(x, float):
        return f"{x:.10g}" if math.isfinite(x) else str(x)
    return str(x)


def data_comment(header, rows) -> str:
    lines = [",".join(header)] + [",".join(_cell(x) for x in r) for r in rows]
    body = "\n".join(lines).replace("--", "- -")
    return f"<!-- fkmixer-data\n{body}\n-->\n"


def _save(fig, path, header, rows) -> None:
    buf = io.StringIO()
    with plt.rc_context(_RC):
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    svg = buf.getvalue()
    cut = svg.index("?>") + 2 if svg.startswith("<?xml") else 0
    with open(path, "w") as fh:
        fh.write(svg[:cut] + "\n" + data_comment(header, rows) + svg[cut:].lstrip("\n"))


def read_data_comment(path) -> tuple[list, list]:
    """Header and rows (as strings) of the data block of an SVG written here."""
    text = open(path).read()
    start = text.index("<!-- fkmixer-data\n") + len("<!-- fkmixer-data\n")
    end = text.index("\n-->", start)
    lines = text[start:end].split("\n")
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


def line_plot(path, xs, ys, xlabel: str, ylabel: str, title: str = "", logx: bool = False,
              logy: bool = False, err=None, censored=None) -> None:
    """Points joined by a line; ``censored`` marks lower-bound points with open markers."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        ax.plot(xs, ys, "-", color="0.6", lw=1)
        if err is not None:
            ax.errorbar(xs, ys, yerr=err, fmt="none", ecolor="0.3", capsize=2, lw=0.8)
        if censored is None:
            ax.plot(xs, ys, "o", color="C0", ms=4)
        else:
            full = [(x, y) for x, y, c in zip(xs, ys, censored) if not c]
            cens = [(x, y) for x, y, c in zip(xs, ys, censored) if c]
            if full:
                ax.plot(*zip(*full), "o", color="C0", ms=4)
            if cens:
                ax.plot(*zip(*cens), "^", mfc="none", color="C3", ms=5, label="censored")
                ax.legend(frameon=False)
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        fig.tight_layout()
    header = [xlabel, ylabel] + (["err"] if err is not None else []) + (["censored"] if censored is not None else [])
    cols = [list(xs), list(ys)] + ([list(err)] if err is not None else []) + ([[int(c) for c in censored]] if censored is not None else [])
    _save(fig, path, header, list(zip(*cols)))


def histogram_plot(path, sizes, counts, xlabel: str = "cluster size", ylabel: str = "count",
                   title: str = "") -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        ax.bar(sizes, counts, width=0.8, color="C0")
        ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        fig.tight_layout()
    _save(fig, path, [xlabel, ylabel], list(zip(sizes, counts)))
