"""Write the data behind the five entropy-curve figures as CSV files.

    python scripts/reproduce_figures.py [OUTDIR]

Each figure gets one file per plotted variant, with the figure's critical
parameters added to the grid.
"""

import sys
from pathlib import Path

from altentropy.cli import CurveRequest, emit_curve, to_csv

FIGURES = [
    ("h1-gauss", (0.05, 3.0, 200), None),
    ("h123-gauss", (0.05, 3.0, 200), None),
    ("h123-exp", (0.05, 4.0, 200), None),
    ("renyi-gauss", (0.05, 3.0, 200), 0.5),
    ("renyi-gauss", (0.05, 3.0, 200), 1.5),
    ("renyi-exp", (0.05, 4.0, 200), 0.5),
    ("renyi-exp", (0.05, 4.0, 200), 1.5),
]


def main(outdir: Path):
    outdir.mkdir(parents=True, exist_ok=True)
    for figure, (lo, hi, steps), alpha in FIGURES:
        tables = emit_curve(CurveRequest(figure, lo, hi, steps, alpha))
        suffix = f"-alpha{alpha:g}" if alpha is not None else ""
        for variant, table in tables.items():
            path = outdir / f"{figure}{suffix}-{variant}.csv"
            path.write_text(to_csv(table))
            values = [r[1] for r in table.rows]
            i = min(range(len(values)), key=values.__getitem__)
            print(f"{path.name:32} min {values[i]:.6f} at {table.columns[0]}={table.rows[i][0]:.6f}")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path("figures"))
