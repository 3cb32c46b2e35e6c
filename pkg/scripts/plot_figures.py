"""Plot the CSVs written by ``latsched bench-runtime`` and ``latsched bench-rho``.

    python scripts/plot_figures.py --runtime runtime.csv --rho rho.csv --outdir figures
"""

from __future__ import annotations

import argparse
import csv
import statistics
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return [r for r in csv.DictReader(fh) if not r.get("error")]


def plot_runtime(rows, out: Path) -> None:
    """Mean analysis runtime against task count, one surface over density."""
    cells = defaultdict(list)
    for r in rows:
        cells[(int(r["n"]), float(r["density"]))].append(float(r["runtime_us"]))
    ns = sorted({n for n, _ in cells})
    ds = sorted({d for _, d in cells})
    fig = plt.figure()
    ax = fig.add_subplot(projection="3d")
    for d in ds:
        xs = [n for n in ns if (n, d) in cells]
        ax.plot(xs, [d] * len(xs), [statistics.mean(cells[(n, d)]) for n in xs], marker="o")
    ax.set_xlabel("tasks")
    ax.set_ylabel("density")
    ax.set_zlabel("runtime (us)")
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)


def plot_rho(rows, out: Path) -> None:
    """Median rho per processor count; the allocation's own count is labelled ``m``."""
    groups = defaultdict(list)
    for r in rows:
        if r["optimal"] != "True":
            continue
        key = "m" if r["at_m"] == "True" else r["procs"]
        groups[key].extend([float(r["rho1"]), float(r["rho2"])])
    keys = ["m"] + sorted((k for k in groups if k != "m"), key=int, reverse=True)
    keys = [k for k in keys if k in groups]
    fig, ax = plt.subplots()
    ax.boxplot([groups[k] for k in keys], tick_labels=keys)
    ax.set_xlabel("processors")
    ax.set_ylabel("rho = L_opt / L_lb")
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--runtime")
    p.add_argument("--rho")
    p.add_argument("--outdir", default=".")
    args = p.parse_args(argv)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.runtime:
        plot_runtime(read(args.runtime), outdir / "runtime.png")
    if args.rho:
        plot_rho(read(args.rho), outdir / "rho.png")


if __name__ == "__main__":
    main()
