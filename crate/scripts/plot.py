"""Render figures from the CSV files written by `nmgn`.

Usage: python3 scripts/plot.py OUT_DIR
Draws whichever of trace.csv, stability.csv and scaling.csv are present into
OUT_DIR/*.png. Needs matplotlib.
"""

import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def rows(path):
    with open(path) as f:
        return list(csv.DictReader(line for line in f if not line.startswith("#")))


def loglog(ax, xs, ys, label):
    pts = [(float(x), float(y)) for x, y in zip(xs, ys) if y]
    ax.loglog([p[0] for p in pts], [p[1] for p in pts], "o-", label=label)


def main(out):
    out = Path(out)
    if (out / "trace.csv").exists():
        r = rows(out / "trace.csv")
        fig, ax = plt.subplots()
        ax.semilogy([int(x["k"]) for x in r], [float(x["residual_F"]) for x in r], "o-")
        ax.set_xlabel("k")
        ax.set_ylabel("residual")
        fig.savefig(out / "trace.png", dpi=120)
    if (out / "stability.csv").exists():
        r = rows(out / "stability.csv")
        fig, ax = plt.subplots()
        loglog(ax, [x["iota"] for x in r], [x["error"] for x in r], "error")
        ax.set_xlabel("iota")
        ax.set_ylabel("sup error")
        fig.savefig(out / "stability.png", dpi=120)
    if (out / "scaling.csv").exists():
        r = rows(out / "scaling.csv")
        fig, ax = plt.subplots()
        for regime in sorted({x["regime"] for x in r}):
            sub = [x for x in r if x["regime"] == regime]
            loglog(ax, [x["mu"] for x in sub], [x["error"] for x in sub], regime)
        ax.set_xlabel("mu")
        ax.set_ylabel("sup error")
        ax.legend()
        fig.savefig(out / "scaling.png", dpi=120)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "out")
