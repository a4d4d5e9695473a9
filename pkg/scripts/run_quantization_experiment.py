"""Train KO, CM, KM and ODC on a three-band volume, quantize every slice and compare fidelity.

The volume directory must hold pd.txt, t1.txt and t2.txt sidecars (see README).
Writes the models, fidelity.csv, comparisons.csv and report.txt to --outdir.
The two closing checks are the BrainWeb-scale expectations and are only meaningful on BrainWeb.
"""

import argparse
import csv
import logging
from pathlib import Path

from odc import experiment, fidelity
from odc.cli import compare_tables, format_report
from odc.imageio import load_multispectral_volume
from odc.modelfile import save_model


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("volume_dir", type=Path)
    ap.add_argument("--outdir", type=Path, default=Path("experiment_out"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-train-pixels", type=int, default=50000,
                    help="random training subsample, 0 keeps every pixel")
    ap.add_argument("--slices", default=None, help="A:B half-open slice range")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    slices = load_multispectral_volume([args.volume_dir / f"{b}.txt" for b in ("pd", "t1", "t2")])
    if args.slices:
        a, b = (int(x) for x in args.slices.split(":"))
        slices = slices[a:b]
    cfg = experiment.ExperimentConfig(seed=args.seed, max_train_pixels=args.max_train_pixels)
    models = experiment.train_models(experiment.pooled_dataset(slices, cfg), cfg)

    args.outdir.mkdir(parents=True, exist_ok=True)
    for name, model in models.items():
        save_model(args.outdir / f"{name}.txt", model)
    rows = experiment.fidelity_rows(slices, models)
    fidelity.write_rows(args.outdir / "fidelity.csv", rows)

    summary, comps = compare_tables(experiment.by_method(rows))
    text = format_report(summary, comps, 0.95, "mad")
    checks = experiment.ordering_check(summary)
    text += "\nODC final poles: %d\n" % models["ODC"].n_poles
    text += "".join(f"check {k}: {'ok' if v else 'FAILED'}\n" for k, v in checks.items())
    (args.outdir / "report.txt").write_text(text)
    with open(args.outdir / "comparisons.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method_pair", "index_name", "degree_of_similarity"])
        w.writerows([p, k, repr(v)] for p, k, v in comps)
    print(text)


if __name__ == "__main__":
    main()
