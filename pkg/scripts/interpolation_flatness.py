"""F_t along the interpolation path, normalized by the Gaussian endpoint.

    python3 scripts/interpolation_flatness.py --n 2048 --L 4 --samples 20000
"""

import argparse
from pathlib import Path

from synclab.interpolation import interpolation_path
from synclab.model import ModelParams
from synclab.plot import emit_plot
from synclab.records import RunRecord, records_to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2048)
    ap.add_argument("--L", type=int, default=4)
    ap.add_argument("--D", type=int, default=6)
    ap.add_argument("--lambda", dest="lam", type=float, default=0.9)
    ap.add_argument("--points", type=int, default=9)
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/interp")
    a = ap.parse_args()

    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    ts = sorted({round(k * a.n / (a.points - 1)) for k in range(a.points)})
    pts = interpolation_path(ModelParams(a.n, a.L, a.lam, a.seed), a.D, ts, a.samples)
    f_n = pts[-1].f_t
    records = []
    for pt in pts:
        params = {"n": a.n, "L": a.L, "lambda": a.lam, "D": a.D, "seed": a.seed, "trials": a.samples}
        records.append(RunRecord("interpolation", params, {"f_t": pt.f_t / f_n, "stderr": pt.stderr / f_n},
                                 extra={"t": pt.t}))
        print(f"t={pt.t:5d} F_t/F_n={pt.f_t / f_n:.4f} +/- {pt.stderr / f_n:.4f}")
    csv_path = out / "interpolation.csv"
    records_to_csv(records, csv_path)
    emit_plot(csv_path, out / "interpolation.svg", "t", "f_t")


if __name__ == "__main__":
    main()
