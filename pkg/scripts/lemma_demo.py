"""Graph-versus-projection volume ratios and a Gauss-map cover of the sphere."""

import argparse
import math

from tamevol import catalog
from tamevol.grassmann import cover_grassmannian, tau_max
from tamevol.growth import gauss_cover_decompose_set, verify_projection_bound
from tamevol.hausdorff import QuadratureConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cfg = QuadratureConfig(seed=args.seed)

    for name in catalog.LEMMA_SUITE:
        cell = catalog.load(name).cells[0]
        rep = verify_projection_bound(cell, cfg=cfg)
        worst = max(row.ratio for row in rep.rows)
        print(f"{name:14s} tau={rep.tau:.4f} max slope={rep.max_slope:.4f} max ratio={worst:.5f} ok={rep.ok}")

    print()
    for d, n in [(1, 2), (1, 3), (2, 3), (2, 4)]:
        centers = cover_grassmannian(d, n, tau_max(d), seed=args.seed)
        print(f"Gr({d},{n}) at tau={tau_max(d):.4f}: {len(centers)} centers")

    print()
    decs = gauss_cover_decompose_set(catalog.load("sphere2"), cfg=cfg, r=10.0)
    for i, dec in enumerate(decs):
        vols = ", ".join(f"{p.volume.value:.4f}" for p in dec.pieces)
        print(f"hemisphere {i}: {len(dec.pieces)} pieces [{vols}] total {dec.total.value:.5f}")
    total = sum(dec.total.value for dec in decs)
    print(f"sphere area {total:.5f} vs 4 pi = {4 * math.pi:.5f}")


if __name__ == "__main__":
    main()
