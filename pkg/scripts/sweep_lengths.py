"""Cylinder torsion against the half-length for a point and a circle cross-section."""
import argparse

from torsion_bench.model_spaces import Circle, PointSet
from torsion_bench.torsion_engine import Mode, theorem23_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lengths", default="0.25,0.5,1,2,4")
    ap.add_argument("--mode", default=Mode.DIRECT_SPECTRAL.value)
    args = ap.parse_args()
    lengths = [float(x) for x in args.lengths.split(",")]
    for cs in (PointSet(1), PointSet(1, 2), Circle()):
        rep = theorem23_sweep(cs, lengths, Mode.parse(args.mode))
        print(cs)
        for l, ar, aa in rep.rows:
            print(f"  l={l:<5g} T_ar={ar:+.10f} T_aa={aa:+.10f}")
        print(f"  a/r spread {rep.ar_spread:.1e}; a/a slope in log l {rep.slope:+.6f} "
              f"(fit residual {rep.fit_residual:.1e}); stated slope {rep.predicted_slope:+g}")


if __name__ == "__main__":
    main()
