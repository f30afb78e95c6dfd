"""Plot the plotdata/*.csv series written by the report step.

Needs matplotlib, which is not a package dependency:

    python scripts/plot_figures.py results/matrix
"""
import csv
import sys
from collections import defaultdict
from pathlib import Path


def main(result_dir):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plot_dir = Path(result_dir) / "plotdata"
    for path in sorted(plot_dir.glob("*.csv")):
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        series = defaultdict(list)
        for row in rows:
            label = f"{row['algorithm']}/{row['provider']}/mu{row['mu']}"
            series[label].append((row["scenario"], float(row["mean_usd"])))
        fig, ax = plt.subplots(figsize=(6, 4))
        for label, pts in series.items():
            xs, ys = zip(*pts)
            ax.plot(xs, ys, marker="o", label=label)
        ax.set_ylabel("mean cost (USD)")
        ax.set_title(path.stem)
        ax.legend(fontsize=7)
        fig.tight_layout()
        fig.savefig(path.with_suffix(".png"), dpi=120)
        plt.close(fig)
        print(path.with_suffix(".png"))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "results/matrix")
