#!/usr/bin/env python3
"""Plot a trace CSV produced by `dlsq run --out`.

Usage: plot_trace.py trace.csv [out.png]

Top panel: node estimates x_i. Bottom panel (when present): frequency
estimates omega_hat_i.
"""
import csv
import sys


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__)
        return 2
    path = sys.argv[1]
    out = sys.argv[2] if len(sys.argv) > 2 else path.rsplit(".", 1)[0] + ".png"

    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(c) for c in row] for row in reader]
    if not rows:
        print("empty trace")
        return 1

    cols = {name: [r[i] for r in rows] for i, name in enumerate(header)}
    t = cols["t"]
    x_names = [n for n in header if n.startswith("x_")]
    w_names = [n for n in header if n.startswith("omega_hat_")]

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(2 if w_names else 1, 1, figsize=(9, 7), sharex=True, squeeze=False)
    ax = axes[0][0]
    for name in x_names:
        ax.plot(t, cols[name], lw=0.8, label=name)
    ax.set_ylabel("x components")
    ax.legend(ncol=4, fontsize=7)
    ax.grid(alpha=0.3)

    if w_names:
        axw = axes[1][0]
        for name in w_names:
            axw.plot(t, cols[name], lw=0.8, label=name)
        axw.set_ylabel("frequency estimates")
        axw.legend(ncol=4, fontsize=7)
        axw.grid(alpha=0.3)

    axes[-1][0].set_xlabel("t [s]")
    fig.tight_layout()
    fig.savefig(out, dpi=130)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
