"""Write a striped Gaussian-blob test volume as three raw band volumes with sidecars."""

import argparse
from pathlib import Path

import numpy as np

from odc.imageio import write_volume
from odc.synthetic import blob_volume


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", type=Path)
    ap.add_argument("--slices", type=int, default=8)
    ap.add_argument("--size", type=int, default=64, help="slice height and width")
    ap.add_argument("--blobs", type=int, default=3)
    ap.add_argument("--sigma", type=float, default=0.03)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    slices, means = blob_volume(n_slices=args.slices, height=args.size, width=args.size, n_blobs=args.blobs,
                                sigma=args.sigma, seed=args.seed)
    args.outdir.mkdir(parents=True, exist_ok=True)
    stack = np.stack([s.pixels for s in slices])
    for b, name in enumerate(("pd", "t1", "t2")):
        write_volume(args.outdir / f"{name}.txt", stack[..., b])
    np.savetxt(args.outdir / "means.txt", means, fmt="%.17g")
    print(f"wrote {args.slices} slices of {args.size}x{args.size} to {args.outdir}")


if __name__ == "__main__":
    main()
