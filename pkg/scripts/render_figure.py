"""Draw the two reference pictures: a bounded gasket and one with a half-plane member."""
import argparse
from pathlib import Path

from apollonian.geometry import RenderSpec, canonical_triple, render_svg

CASES = {"gasket_2_3_6.svg": (2, 3, 6), "gasket_half_plane.svg": (1, 1, 0)}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="figures")
    ap.add_argument("--cutoff", type=float, default=1000.0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, curv in CASES.items():
        doc = render_svg(canonical_triple(curv), RenderSpec(cutoff=args.cutoff, output=str(out / name)))
        print(out / name, doc.count("<circle"), "circles")


if __name__ == "__main__":
    main()
