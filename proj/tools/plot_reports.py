#!/usr/bin/env python3
"""Static PNG plots from the CSV tables written by the gwmlve suites."""

import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def slice_bounds(out, rows):
    fig, ax = plt.subplots(figsize=(6, 4))
    for m in sorted({r["M"] for r in rows}):
        sel = [r for r in rows if r["M"] == m]
        j = [int(r["j"]) for r in sel]
        ax.plot(j, [float(r["c_low"]) for r in sel], "o-", label=f"M={m} lower")
        ax.plot(j, [float(r["c_high"]) for r in sel], "s--", label=f"M={m} upper")
    ax.axhspan(0.5, 2.0, color="0.9", zorder=0)
    ax.set_xlabel("slice j")
    ax.set_ylabel("realized constant")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out / "slice_bounds.png", dpi=120)
    plt.close(fig)


def q_kernel(out, rows):
    fig, ax = plt.subplots(figsize=(6, 4))
    omega = [int(r["omega"]) for r in rows]
    ax.plot(omega, [float(r["norm_constant"]) for r in rows], ".", label="norm M^j/rho")
    ax.plot(omega, [float(r["trace_constant"]) for r in rows], ".", label="|trace|/rho")
    ax.set_xscale("symlog")
    ax.set_xlabel("omega")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "q_kernel.png", dpi=120)
    plt.close(fig)


def resum(out, rows):
    fig, ax = plt.subplots(figsize=(5, 5))
    sc = ax.scatter([float(r["lambda_re"]) for r in rows], [float(r["lambda_im"]) for r in rows],
                    c=[max(float(r["abs_error"]), 1e-18) for r in rows], norm=matplotlib.colors.LogNorm())
    fig.colorbar(sc, label="|resummed - log Z|")
    ax.set_xlabel("Re lambda")
    ax.set_ylabel("Im lambda")
    fig.tight_layout()
    fig.savefig(out / "resum.png", dpi=120)
    plt.close(fig)


def slice_testing(out, rows):
    fig, ax = plt.subplots(figsize=(6, 4))
    ratio = [float(r["diff_numeric"]) / float(r["diff_numeric_se"]) if float(r["diff_numeric_se"]) > 0 else 0.0
             for r in rows]
    ax.bar(range(len(rows)), ratio)
    ax.axhline(3.0, color="k", ls="--")
    ax.set_xticks(range(len(rows)),
                  [f'{r["order"]}:{r["omega1"]}{"," + r["omega2"] if r["omega2"] else ""}' for r in rows],
                  rotation=60, fontsize=7)
    ax.set_ylabel("|renormalized - finite difference| / SE")
    fig.tight_layout()
    fig.savefig(out / "slice_testing.png", dpi=120)
    plt.close(fig)


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "reports")
    plots = {
        "slice_bounds.csv": slice_bounds,
        "q_kernel.csv": q_kernel,
        "resum.csv": resum,
        "slice_testing.csv": slice_testing,
    }
    for name, fn in plots.items():
        path = out / name
        if path.exists():
            rows = read(path)
            if rows:
                fn(out, rows)


if __name__ == "__main__":
    main()
