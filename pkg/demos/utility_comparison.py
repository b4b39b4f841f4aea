"""Utility versus dataset size for each privacy regime, end to end.

Runs the experiment grid at a reduced seed count, prints the aggregated
test log-likelihoods, and writes the three artifacts the command-line
tool would produce: a per-cell results CSV, a summary CSV, and an SVG
chart.  The full-scale setting (20 seeds) is a single CLI call:

    dpirls --iters 20 --weight-cap 5 --delta-f 1e-5 --out-svg chart.svg
"""

from pathlib import Path

from dpirls import ExperimentGrid, aggregate, emit_csv, run_grid
from dpirls.charts import emit_svg_chart

OUT_DIR = Path(__file__).resolve().parent / "output"


def main():
    grid = ExperimentGrid(
        n_values=(500, 1000, 2000, 5000, 10000),
        d=10,
        epsilon=0.9,
        iterations=20,
        weight_cap=5.0,
        delta_f=1e-5,
        n_seeds=5,
        base_seed=0,
    )
    print(f"running {len(grid.n_values) * len(grid.mechanisms) * grid.n_seeds} cells ...")
    rows = run_grid(grid)
    summary = aggregate(rows)

    print(f"\n{'mechanism':>16} " + " ".join(f"{n:>9}" for n in grid.n_values))
    for mech in grid.mechanisms:
        means = [s.mean_loglik for s in summary if s.mechanism == mech]
        print(f"{mech:>16} " + " ".join(f"{m:>9.3f}" for m in means))

    OUT_DIR.mkdir(exist_ok=True)
    results_path = OUT_DIR / "comparison_results.csv"
    summary_path = OUT_DIR / "comparison_summary.csv"
    chart_path = OUT_DIR / "comparison.svg"
    emit_csv(rows, results_path)
    emit_csv(summary, summary_path)
    emit_svg_chart(summary, chart_path, title="test log-likelihood per point vs N")
    print(f"\nwrote {results_path}")
    print(f"wrote {summary_path}")
    print(f"wrote {chart_path}")
    print("\nreading the curves: the concentrated-accountant runs (cdp-*) climb toward")
    print("the non-private ceiling as N grows; the strong- and basic-composition runs")
    print("need far more data for the same likelihood, which is the whole point of")
    print("accounting privacy loss tightly.")


if __name__ == "__main__":
    main()
