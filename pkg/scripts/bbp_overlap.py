"""Mean PCA overlap and top eigenvalue across the spectral threshold.

    python3 scripts/bbp_overlap.py --n 600 --trials 40 --out results/bbp
"""

import argparse
from pathlib import Path

import numpy as np

from synclab.experiments import pca_experiment
from synclab.model import ModelParams
from synclab.plot import emit_plot
from synclab.records import RunRecord, records_to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=600)
    ap.add_argument("--trials", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--lambdas", default=",".join(f"{v:.2f}" for v in np.arange(0.25, 2.51, 0.25)))
    ap.add_argument("--out", default="results/bbp")
    a = ap.parse_args()

    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    records = []
    for lam in (float(v) for v in a.lambdas.split(",")):
        m = pca_experiment(ModelParams(a.n, 1, lam, a.seed), a.trials, solver="lanczos")
        records.append(RunRecord("pca", {"n": a.n, "L": 1, "lambda": lam, "seed": a.seed, "trials": a.trials}, m))
        # asymptotic overlap max(0, 1 - 1/lam^2) for reference
        print(f"lambda={lam:.2f} overlap={m['mean_overlap']:.3f} (limit {max(0.0, 1 - lam**-2):.3f}) "
              f"top/sqrt(n)={m['mean_top_eig']:.3f}")
    csv_path = out / "bbp.csv"
    records_to_csv(records, csv_path)
    emit_plot(csv_path, out / "overlap.svg", "lambda", "mean_overlap", err="overlap_stderr")
    emit_plot(csv_path, out / "top_eig.svg", "lambda", "mean_top_eig", err="top_eig_stderr")


if __name__ == "__main__":
    main()
