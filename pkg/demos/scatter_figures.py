"""Write the two scatter datasets (reconstruction vs teleportation fidelity,
reconstruction fidelity vs CHSH value) with their boundary lines.

Plots with matplotlib when it is installed, otherwise leaves CSV files.

    python demos/scatter_figures.py [outdir]
"""

import pathlib
import sys

from qss import analysis

LABELS = {"rf_vs_tf": "F_max", "rf_vs_bell": "S_max"}


def main(outdir="figures", n=20_000, seed=7):
    out = pathlib.Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    figs = {}
    for kind in analysis.FIGURE_KINDS:
        fig = analysis.figure_data(kind, n, seed, include_phase=True)
        with open(out / f"{kind}.csv", "w", newline="") as fh:
            analysis.write_figure_csv(fig, fh)
        with open(out / f"{kind}.boundary.csv", "w", newline="") as fh:
            analysis.write_boundary_csv(fig, fh)
        figs[kind] = fig
        print(f"wrote {out / kind}.csv and boundary")
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return
    for kind, fig in figs.items():
        c = fig.columns
        ax = plt.figure(figsize=(5, 4)).gca()
        ss = c["secret_shareable"]
        ax.scatter(c["x"][~ss], c["y"][~ss], s=1, c="0.7", label="other")
        ax.scatter(c["x"][ss], c["y"][ss], s=1, c="tab:blue", label="secret-shareable")
        ax.plot(fig.boundary[:, 0], fig.boundary[:, 1], "r-", label="bound")
        ax.set_xlabel(LABELS[kind])
        ax.set_ylabel("F_CSR")
        ax.legend(markerscale=5)
        plt.savefig(out / f"{kind}.png", dpi=120, bbox_inches="tight")
        print(f"wrote {out / kind}.png")


if __name__ == "__main__":
    main(*sys.argv[1:2])
