"""Volume growth of three complex curves in C^2 and their Stoll verdicts.

Compares the measured area of w = z^2 with the closed form
pi (2 r^2 - s), s + s^2 = r^2, and prints V(r) / r^2 for all three curves.
"""

import argparse
import math

import numpy as np

from tamevol import catalog
from tamevol.growth import default_radii, growth_curve, stoll_classify
from tamevol.hausdorff import QuadratureConfig


def parabola_area(r):
    s = (-1 + math.sqrt(1 + 4 * r * r)) / 2
    return math.pi * (2 * r * r - s)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=1 << 15)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cfg = QuadratureConfig(samples=args.samples, seed=args.seed, workers=4)

    radii = default_radii(1, 100, 9)
    curves = {name: growth_curve(catalog.load(name), radii, cfg, d=2) for name in ("complex-line", "complex-parabola", "complex-exp")}
    print(f"{'r':>8s} {'line':>10s} {'z^2':>10s} {'z^2 exact':>10s} {'e^z':>12s}   (V / r^2)")
    for k, r in enumerate(radii):
        row = [curves[n].ratios[k] for n in curves]
        print(f"{r:8.3f} {row[0]:10.4f} {row[1]:10.4f} {parabola_area(r) / r**2:10.4f} {row[2]:12.4f}")
    print()
    for name, span in [("complex-line", radii), ("complex-parabola", radii), ("complex-exp", default_radii(5, 50, 16))]:
        v = stoll_classify(catalog.load(name), 1, span, cfg)
        print(f"{name:18s} alpha={v.growth.alpha:.3f}  C_hat={v.growth.C_hat:.4f}  -> {v.verdict}")
    print(f"reference: pi = {np.pi:.4f}, 2 pi = {2 * np.pi:.4f}")


if __name__ == "__main__":
    main()
