"""Torsion of every catalog fiber by both routes, with the route gap."""
import argparse
import math
import time

from torsion_bench.model_spaces import Circle, Cylinder, Interval, PointSet
from torsion_bench.torsion_engine import calibrate, torsion_by_definition, torsion_by_zeta

CATALOG = [
    Interval(1.0, "a/r"),
    Interval(1.0, "a/a"),
    Interval(0.5, "r/r"),
    Interval(0.5, "r/a"),
    Interval(2.0, "a/a", 2),
    Circle(),
    Circle(1.0, math.pi),
    Circle(3.0, 1.0),
    Cylinder(PointSet(3), 1.0, "a/r"),
    Cylinder(Circle(), 1.0, "a/r"),
    Cylinder(Circle(), 1.0, "a/a"),
    Cylinder(Circle(), 0.5, "r/r"),
    Cylinder(Circle(2.0, math.pi), 1.0, "a/a"),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.parse_args()
    cal = calibrate()
    print(f"calibration kappa={cal.kappa:g} applied_to={cal.applied_to.value}")
    worst = 0.0
    for fiber in CATALOG:
        t0 = time.perf_counter()
        d = torsion_by_definition(fiber, cal).value
        ms = 1e3 * (time.perf_counter() - t0)
        z = torsion_by_zeta(fiber, cal).value
        worst = max(worst, abs(d - z))
        print(f"{d:+.12f}  {z:+.12f}  gap {abs(d - z):.1e}  {ms:6.1f} ms  {fiber}")
    print(f"max route gap {worst:.2e} over {len(CATALOG)} fibers")


if __name__ == "__main__":
    main()
