"""Command-line driver: ``odc train | quantize | compare | classify``.

Exit codes: 0 success, 1 usage or parameter error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import baselines, dialectics, fidelity, imageio, stats
from .core import Dataset, normalize, spawn_rngs
from .modelfile import load_model, save_model

log = logging.getLogger("odc")

METHODS = ("odc", "km", "cm-classical", "cm-maxent", "ko")

# name -> (type, default, help); defaults are the published experiment settings
PARAMS = {
    "seed": (int, 0, "master seed fanned out to every random stream"),
    "poles": (int, 14, "ODC: initial number of poles"),
    "phases": (int, 2, "ODC: number of historical phases"),
    "phase_len": (int, 150, "ODC: sweeps over the data per historical phase"),
    "eta0": (float, 0.1, "initial step size"),
    "f_min": (float, 0.05, "ODC: minimum normalized force"),
    "delta_min": (float, 0.01, "ODC: minimum contradiction"),
    "delta_max": (float, 0.98, "ODC: maximum contradiction"),
    "chi_max": (float, 0.35, "ODC: maximum crisis (noise scale)"),
    "n_main": (int, 1, "ODC: principal contradictions used for synthesis"),
    "eta_schedule": (str, "linear", "ODC: step-size law, linear or constant"),
    "crisis_noise": (str, "per-coordinate", "ODC: crisis noise, per-coordinate or scalar"),
    "outputs": (int, 13, "KM/CM/KO: number of outputs"),
    "max_iters": (int, 200, "KM/CM/KO: maximum iterations"),
    "sigma0": (float, 2.0, "KO: initial neighbourhood width on the ring"),
    "fuzzifier": (float, 2.0, "classical CM: fuzzifier m"),
    "max_train_pixels": (int, 0, "random subsample of training pixels, 0 keeps all"),
}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def read_config(path) -> dict:
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in PARAMS and key != "generation":
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        out[key] = value
    return out


def resolve_params(args) -> dict:
    """Flags override the config file, which overrides the built-in defaults."""
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    out = {}
    for name, (typ, default, _) in PARAMS.items():
        value = getattr(args, name, None)
        if value is None:
            value = cfg.get(name, default)
        try:
            out[name] = typ(value)
        except ValueError:
            raise UsageError(f"invalid {name}: {value!r}") from None
    gen = getattr(args, "generation", None)
    if gen is None:
        gen = str(cfg.get("generation", "false")).lower() in ("1", "true", "yes")
    out["generation"] = bool(gen)
    return out


def _add_inputs(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--volume", nargs="+", metavar="SIDECAR",
                   help="raw volumes, one sidecar header per band, in band order")
    g.add_argument("--bands", nargs="+", action="append", metavar="FILE",
                   help="PNG/PGM band files of one slice; repeat the flag for more slices")
    p.add_argument("--slices", default=None, metavar="A:B",
                   help="restrict to volume slices A..B-1 (default: all)")


def _add_params(p, names):
    for name in names:
        typ, default, text = PARAMS[name]
        p.add_argument(_flag(name), dest=name, type=typ, default=None,
                       help=f"{text} (default: {default})")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="odc", description="Dialectical and baseline quantizers for multispectral images.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="train a model on a volume or band files")
    p.add_argument("--method", choices=METHODS, default="odc", help="classifier (default: odc)")
    _add_inputs(p)
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--report", default=None, help="training report path (default: <out>.report.txt)")
    p.add_argument("--config", default=None, help="flat key = value file of parameters")
    p.add_argument("--generation", dest="generation", action="store_true", default=None,
                   help="ODC: enable pole synthesis at crises (default: off)")
    _add_params(p, list(PARAMS))

    p = sub.add_parser("quantize", help="quantize slices with one or more models")
    p.add_argument("--model", action="append", required=True, metavar="[LABEL=]PATH",
                   help="model file; repeat for several methods")
    _add_inputs(p)
    p.add_argument("--outdir", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1, help="parallel slice workers (default: 1)")

    p = sub.add_parser("compare", help="tabulate fidelity CSVs and run F / chi-square comparisons")
    p.add_argument("csv", nargs="+", metavar="[LABEL=]CSV",
                   help="fidelity CSVs; a LABEL= prefix renames every method in that file")
    p.add_argument("--outdir", default=None, help="write summary.csv, comparisons.csv, report.txt here")
    p.add_argument("--reference", default=None,
                   help="method paired with every other (default: ODC if present, else the first)")
    p.add_argument("--confidence", type=float, default=0.95, help="confidence level (default: 0.95)")
    p.add_argument("--deviation", choices=("mad", "std"), default="mad",
                   help="spread statistic: mean absolute deviation or standard deviation (default: mad)")

    p = sub.add_parser("classify", help="classify a single pixel vector")
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--vector", required=True, help="comma-separated band values")
    p.add_argument("--normalized", action="store_true", help="values are already in [0, 1]")
    p.add_argument("--l-max", dest="l_max", type=int, default=255, help="gamut ceiling (default: 255)")
    return parser


# ---------------------------------------------------------------- inputs

def _slice_range(spec, count):
    if spec is None:
        return range(count)
    try:
        a, b = spec.split(":")
        r = range(int(a or 0), int(b) if b else count)
    except ValueError:
        raise UsageError(f"invalid --slices {spec!r}") from None
    if r.start < 0 or r.stop > count or len(r) == 0:
        raise DataError(f"--slices {spec} outside 0..{count}")
    return r


def load_inputs(args) -> list[tuple[int, imageio.MultispectralImage]]:
    if args.volume:
        images = imageio.load_multispectral_volume(args.volume)
    else:
        images = [imageio.load_bands(group) for group in args.bands]
    return [(i, images[i]) for i in _slice_range(args.slices, len(images))]


def training_data(images, p) -> Dataset:
    l_max = images[0][1].l_max
    pts = np.concatenate([img.normalized() for _, img in images])
    if p["max_train_pixels"] and len(pts) > p["max_train_pixels"]:
        rng = spawn_rngs(p["seed"], 4)[3]
        pts = pts[np.sort(rng.choice(len(pts), p["max_train_pixels"], replace=False))]
    return Dataset(pts, l_max)


# ---------------------------------------------------------------- commands

def _odc_system(p) -> dict:
    return dict(n_phases=p["phases"], phase_len=p["phase_len"], eta0=p["eta0"], f_min=p["f_min"],
                delta_min=p["delta_min"], delta_max=p["delta_max"], chi_max=p["chi_max"],
                n_main=p["n_main"], generation_enabled=p["generation"], rng_seed=p["seed"],
                eta_schedule=p["eta_schedule"], crisis_noise=p["crisis_noise"])


def _validate(method, p):
    if p["max_train_pixels"] < 0:
        raise UsageError(f"invalid max_train_pixels: {p['max_train_pixels']}")
    try:
        if method == "odc":
            if p["poles"] < 1:
                raise ValueError(f"invalid poles: {p['poles']}")
            dialectics.DialecticalSystem(np.zeros((1, 1)), **_odc_system(p)).validate()
        else:
            _baseline_config(p).validate()
    except ValueError as e:
        raise UsageError(str(e)) from None


def _baseline_config(p):
    return baselines.BaselineConfig(n_outputs=p["outputs"], max_iters=p["max_iters"], eta0=p["eta0"],
                                    seed=p["seed"], som_sigma0=p["sigma0"], fcm_fuzzifier=p["fuzzifier"])


def cmd_train(args) -> int:
    p = resolve_params(args)
    _validate(args.method, p)
    images = load_inputs(args)
    data = training_data(images, p)
    log.info("training %s on %d pixels of dimension %d", args.method, len(data), data.dim)
    report_text = None
    if args.method == "odc":
        system = dialectics.init_system(data, p["poles"], **_odc_system(p))
        model, report = dialectics.train(data, system)
        report_text = report.to_text()
    else:
        cfg = _baseline_config(p)
        if args.method == "km":
            model = baselines.kmeans_train(data, cfg)
        elif args.method == "ko":
            model = baselines.som_train(data, cfg)
        else:
            model = baselines.fcm_train(data, cfg, "classical" if args.method == "cm-classical" else "max_entropy")
        report_text = f"method = {model.method_tag}\noutputs = {len(model)}\n"
    save_model(args.out, model)
    Path(args.report or f"{args.out}.report.txt").write_text(report_text)
    return 0


def _labelled(spec: str) -> tuple[str | None, str]:
    if "=" in spec:
        label, path = spec.split("=", 1)
        return label, path
    return None, spec


def _save_quantized(base: Path, img: imageio.MultispectralImage) -> None:
    if img.bands in (1, 3) and img.l_max <= 255:
        imageio.save_image(base.with_name(base.name + ".png"), img)
    else:
        imageio.save_bands([base.with_name(f"{base.name}_b{b}.pgm") for b in range(img.bands)], img)


def cmd_quantize(args) -> int:
    models = []
    for spec in args.model:
        label, path = _labelled(spec)
        model = load_model(path)
        models.append((label or model.method_tag, model))
    images = load_inputs(args)
    outdir = Path(args.outdir)
    for label, model in models:
        if model.centroids.shape[1] != images[0][1].bands:
            raise DataError(f"model {label} has dimension {model.centroids.shape[1]}, "
                            f"images have {images[0][1].bands} bands")
        (outdir / label).mkdir(parents=True, exist_ok=True)

    def work(job):
        (label, model), (sid, img) = job
        quant, labels = imageio.quantize(img, model)
        _save_quantized(outdir / label / f"slice_{sid:03d}_quant", quant)
        imageio.save_image(outdir / label / f"slice_{sid:03d}_labels.png", imageio.render_labels(labels))
        return sid, label, fidelity.fidelity(quant, img)

    jobs = [(m, s) for s in images for m in models]
    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        rows = list(pool.map(work, jobs))
    fidelity.write_rows(outdir / "fidelity.csv", rows)
    log.info("wrote %d fidelity rows", len(rows))
    return 0


def _collect(paths) -> dict[str, dict[str, fidelity.FidelityReport]]:
    by_method: dict[str, dict[str, fidelity.FidelityReport]] = {}
    for spec in paths:
        label, path = _labelled(spec)
        try:
            rows = fidelity.read_rows(path)
        except (OSError, ValueError) as e:
            raise DataError(str(e)) from None
        for sid, method, rep in rows:
            by_method.setdefault(label or method, {})[sid] = rep
    return by_method


def compare_tables(by_method, reference=None, confidence=0.95, deviation="mad"):
    """Per-method summaries, per-index F similarities and global chi-square adherence."""
    methods = list(by_method)
    if len(methods) < 2:
        raise DataError("need at least two methods to compare")
    slice_sets = {m: set(v) for m, v in by_method.items()}
    first = slice_sets[methods[0]]
    for m in methods[1:]:
        if slice_sets[m] != first:
            raise DataError(f"slice sets of {methods[0]} and {m} differ")
    summary = {}
    for m in methods:
        reps = list(by_method[m].values())
        summary[m] = {k: stats.summarize([getattr(r, k) for r in reps], deviation) for k in fidelity.INDEX_NAMES}
    if reference is None:
        reference = "ODC" if "ODC" in methods else methods[0]
    if reference not in methods:
        raise DataError(f"reference method {reference!r} not among {methods}")
    pairs = [(reference, m) for m in methods if m != reference]
    rows = []
    for a, b in pairs:
        for k in stats.ADHERENCE_INDEXES:
            rows.append((f"{a}-{b}", k, stats.f_test_similarity(summary[a][k], summary[b][k], confidence)))
        obs = stats.adherence_sequence(summary[a])
        exp = stats.adherence_sequence(summary[b])
        try:
            rows.append((f"{a}-{b}", "global_chi2", stats.chi2_adherence(obs, exp)))
        except ValueError as e:
            raise DataError(f"{a}-{b}: {e}") from None
    return summary, rows


def format_report(summary, rows, confidence, deviation) -> str:
    methods = list(summary)
    if deviation == "mad":
        out = ["Fidelity indexes: mean +/- mean absolute deviation "
               "(F test assumes normality: sigma = mean deviation * sqrt(pi/2))"]
    else:
        out = ["Fidelity indexes: mean +/- standard deviation"]
    out.append("index".ljust(8) + "".join(m.rjust(22) for m in methods))
    for k in fidelity.INDEX_NAMES:
        cells = [f"{summary[m][k].mean:.4g} +/- {summary[m][k].mean_dev:.3g}" for m in methods]
        out.append(k.upper().ljust(8) + "".join(c.rjust(22) for c in cells))
    out.append("")
    out.append(f"F-test degrees of similarity (p-values, {confidence:.0%} confidence)")
    pairs = list(dict.fromkeys(r[0] for r in rows))
    out.append("pair".ljust(14) + "".join(k.upper().rjust(10) for k in stats.ADHERENCE_INDEXES))
    table = {(r[0], r[1]): r[2] for r in rows}
    for pair in pairs:
        out.append(pair.ljust(14) + "".join(f"{table[(pair, k)]:.2f}".rjust(10) for k in stats.ADHERENCE_INDEXES))
    out.append("")
    out.append("Global chi-square adherence (p-values)")
    out.append("".join(pair.rjust(14) for pair in pairs))
    out.append("".join(f"{table[(pair, 'global_chi2')]:.2f}".rjust(14) for pair in pairs))
    return "\n".join(out) + "\n"


def cmd_compare(args) -> int:
    if not 0.0 < args.confidence < 1.0:
        raise UsageError(f"invalid confidence: {args.confidence}")
    by_method = _collect(args.csv)
    summary, rows = compare_tables(by_method, args.reference, args.confidence, args.deviation)
    text = format_report(summary, rows, args.confidence, args.deviation)
    sys.stdout.write(text)
    if args.outdir:
        outdir = Path(args.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        with open(outdir / "summary.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method", "index_name", "mean", "mean_dev", "n"])
            for m, per in summary.items():
                for k, s in per.items():
                    w.writerow([m, k, repr(s.mean), repr(s.mean_dev), s.n])
        with open(outdir / "comparisons.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method_pair", "index_name", "degree_of_similarity"])
            for pair, k, v in rows:
                w.writerow([pair, k, repr(v)])
        (outdir / "report.txt").write_text(text)
    return 0


def cmd_classify(args) -> int:
    model = load_model(args.model)
    try:
        vals = [float(v) for v in args.vector.split(",")]
    except ValueError:
        raise UsageError(f"invalid --vector {args.vector!r}") from None
    x = np.array(vals) if args.normalized else normalize(np.array(vals), args.l_max)
    if len(x) != model.centroids.shape[1]:
        raise DataError(f"vector has {len(x)} values, model expects {model.centroids.shape[1]}")
    k = int(model.classify_many(x)[0])
    print(k)
    return 0


COMMANDS = {"train": cmd_train, "quantize": cmd_quantize, "compare": cmd_compare, "classify": cmd_classify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"odc: error: {e}", file=sys.stderr)
        return 1
    except (DataError, ValueError, OSError) as e:
        print(f"odc: data error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
