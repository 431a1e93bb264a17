"""Regression slopes at a high lambda for a few seeds; the midpoint is the session dimension."""
import argparse
import json
import time

from apollonian.curvature import CurvatureVector
from apollonian.dimension import estimate_dimension

SEEDS = {
    "2,3,6": CurvatureVector(2, 3, 6, 6),
    "1,1,1": CurvatureVector.from_triple(1.0, 1.0, 1.0),
    "0,1,1": CurvatureVector(0, 1, 1, 1),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambda-max", type=float, default=1e8)
    args = ap.parse_args()
    rows = {}
    for name, g in SEEDS.items():
        t0 = time.perf_counter()
        est = estimate_dimension(g, args.lambda_max)
        rows[name] = {**est.summary(), "seconds": round(time.perf_counter() - t0, 1)}
        print(name, f"d_hat={est.d_hat:.5f} +- {est.stderr:.1e}",
              "slopes", [round(s[2], 4) for s in est.local_slopes], flush=True)
    vals = [r["d_hat"] for r in rows.values()]
    lo, hi = min(vals), max(vals)
    print(json.dumps({"bracket": [lo, hi], "midpoint": (lo + hi) / 2}, indent=1))


if __name__ == "__main__":
    main()
