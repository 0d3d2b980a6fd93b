"""Command-line interface.

Commands: ``detect``, ``evaluate``, ``perturb``, ``dump`` (alias
``scatter-dump`` for scattering planes) and ``segment``.  Failures print one
JSON object on standard error and exit with status 1.
"""

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import dump as dumps
from .candidate import baseline_score, load_candidate
from .config import RunConfig, format_config, load_config
from .dataset import candidate_index, find_splits, split_triples
from .dtcwt import forward
from .errors import ConfigError, DecodeError, FilterBankError
from .fusion import detect
from .imaging import (
    box_blur,
    decode_raw,
    encode_image,
    encode_netpbm,
    nonzero_mask,
    read_image,
    resize_bilinear,
    to_grayscale,
)
from .metrics import aggregate, image_report
from .scattering import scatter_image
from .segmentation import segment_image

SCHEMA_VERSION = 1
WORKERS_ENV = "INPAINTDET_WORKERS"
DEFAULT_RESIZE = 0.7
DEFAULT_BLUR_RADIUS = 5


class CliError(Exception):
    """Error with an optional offending path, reported as one JSON line."""

    def __init__(self, message, path=None):
        super().__init__(message)
        self.path = path


# ---------------------------------------------------------------- helpers


def _write_atomic(path, data):
    """Write bytes so that ``path`` either holds the full content or is untouched."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _json_bytes(obj):
    return (json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n").encode("utf-8")


def _config(args):
    return load_config(args.config, args.set or ())


def _read(path):
    path = Path(path)
    if not path.is_file():
        raise CliError(f"no such file: {path}", str(path))
    try:
        return read_image(path)
    except DecodeError as exc:
        raise CliError(f"cannot decode {path}: {exc}", str(path)) from None


def _workers(args):
    if args.workers is not None:
        n = args.workers
    else:
        raw = os.environ.get(WORKERS_ENV, "1")
        try:
            n = int(raw)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"worker count must be >= 1, got {n}")
    return n


def _candidate_for(img, cfg, path=None):
    if path is None:
        return baseline_score(img, cfg.baseline_radius, cfg.baseline_z, cfg.filter_bank())
    return load_candidate(path, img.shape[:2])


# ---------------------------------------------------------------- detect


def cmd_detect(args):
    cfg = _config(args)
    img = _read(args.image)
    if args.baseline:
        cand = _candidate_for(img, cfg)
    else:
        cpath = Path(args.candidate)
        if not cpath.is_file():
            raise CliError(f"no such file: {cpath}", str(cpath))
        cand = _candidate_for(img, cfg, cpath)
    mask, explanation = detect(img, cand, cfg)
    out = Path(args.out_dir)
    stem = Path(args.image).stem
    written = {"mask": str(_write_atomic(out / f"{stem}_mask.pgm", encode_netpbm(mask)))}
    if args.explain:
        explanation = dict(explanation, image=str(args.image), config=cfg.as_dict())
        written["explanation"] = str(
            _write_atomic(out / f"{stem}_explain.json", _json_bytes(explanation))
        )
    print(json.dumps(written, sort_keys=True))
    return 0


# ---------------------------------------------------------------- evaluate


def _evaluate_one(job):
    """Evaluate one triple; returns ``("ok", record)`` or ``("skip", reason)``."""
    triple, cand_path, use_baseline, cfg = job
    try:
        read_image(triple.original)
        img = read_image(triple.inpainted)
        truth_img = read_image(triple.mask)
        if truth_img.ndim != 2:
            return "skip", f"mask {triple.mask.name} is not single-channel"
        truth = nonzero_mask(truth_img)
        if truth.shape != img.shape[:2]:
            return "skip", f"mask is {truth.shape}, inpainted image is {img.shape[:2]}"
        if not use_baseline and cand_path is None:
            return "skip", "no candidate file"
        cand = _candidate_for(img, cfg, None if use_baseline else cand_path)
        refined, _ = detect(img, cand, cfg)
    except (OSError, ValueError) as exc:
        return "skip", f"{type(exc).__name__}: {exc}"
    record = image_report(triple.stem, refined, truth, cfg.image_fraction)
    cand_record = image_report(triple.stem, cand > cfg.threshold, truth, cfg.image_fraction)
    record["candidate"] = {
        "metrics": cand_record["metrics"],
        "confusion": cand_record["confusion"],
    }
    return "ok", record


def evaluate_dataset(root, cfg, candidates=None, splits=None, workers=1):
    """Evaluation report for a dataset root (see :mod:`inpaintdet.dataset`)."""
    split_dirs = find_splits(root)
    if splits:
        wanted = set(splits)
        missing = wanted - {d.name for d in split_dirs}
        if missing:
            raise CliError(f"unknown split(s): {', '.join(sorted(missing))}", str(root))
        split_dirs = [d for d in split_dirs if d.name in wanted]
    if not split_dirs:
        raise CliError(f"no splits with an inpainted/ folder under {root}", str(root))

    plan = []
    for sdir in split_dirs:
        triples, skipped = split_triples(sdir)
        if not triples and not skipped:
            raise CliError(f"split {sdir.name!r} has no images", str(sdir))
        index = {} if candidates is None else candidate_index(candidates, sdir.name)
        jobs = [(t, index.get(t.stem), candidates is None, cfg) for t in triples]
        plan.append((sdir.name, jobs, skipped))

    all_jobs = [job for _, jobs, _ in plan for job in jobs]
    if workers > 1 and len(all_jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_one, all_jobs, chunksize=1))
    else:
        results = [_evaluate_one(job) for job in all_jobs]

    out_splits, pos = [], 0
    for name, jobs, skipped in plan:
        per_image = []
        skipped = [s.as_dict() for s in skipped]
        for job in jobs:
            status, payload = results[pos]
            pos += 1
            if status == "ok":
                per_image.append(payload)
            else:
                skipped.append({"split": name, "stem": job[0].stem, "reason": payload})
        skipped.sort(key=lambda s: s["stem"])
        entry = {
            "split": name,
            "threshold": cfg.threshold,
            "per_image": per_image,
            "skipped": skipped,
            "aggregate": None,
            "undefined_counts": None,
            "candidate_aggregate": None,
        }
        if per_image:
            agg = aggregate(per_image, name)
            entry["aggregate"] = agg
            entry["undefined_counts"] = agg["undefined_counts"]
            entry["candidate_aggregate"] = aggregate(
                [r["candidate"] for r in per_image], name
            )
        out_splits.append(entry)
    return {
        "schema_version": SCHEMA_VERSION,
        "candidate_source": "baseline" if candidates is None else str(candidates),
        "config": cfg.as_dict(),
        "splits": out_splits,
    }


def cmd_evaluate(args):
    cfg = _config(args)
    if args.candidates is not None and not Path(args.candidates).is_dir():
        raise CliError(f"no such candidate directory: {args.candidates}", str(args.candidates))
    if not Path(args.root).is_dir():
        raise CliError(f"no such dataset root: {args.root}", str(args.root))
    report = evaluate_dataset(
        args.root,
        cfg,
        None if args.baseline else args.candidates,
        args.split,
        _workers(args),
    )
    data = _json_bytes(report)
    if args.output:
        _write_atomic(args.output, data)
    else:
        sys.stdout.write(data.decode("utf-8"))
    return 0


# ---------------------------------------------------------------- perturb


def perturb(img, op, factor=DEFAULT_RESIZE, radius=DEFAULT_BLUR_RADIUS):
    """Apply the post-processing perturbation ``op`` (resize, blur or both)."""
    if op not in ("resize", "blur", "both"):
        raise ValueError(f"unknown perturbation {op!r}")
    if op in ("resize", "both"):
        img = resize_bilinear(img, factor)
    if op in ("blur", "both"):
        img = box_blur(img, radius)
    return img


def cmd_perturb(args):
    path = Path(args.image)
    if not path.is_file():
        raise CliError(f"no such file: {path}", str(path))
    try:
        _, maxval = decode_raw(path.read_bytes())
        img = read_image(path)
    except DecodeError as exc:
        raise CliError(f"cannot decode {path}: {exc}", str(path)) from None
    out = perturb(img, args.op, args.factor, args.radius)
    output = Path(args.output)
    depth = 16 if maxval > 255 else 8
    _write_atomic(output, encode_image(out, output.suffix or "png", depth))
    print(json.dumps({"output": str(output), "width": out.shape[1], "height": out.shape[0]}))
    return 0


# ---------------------------------------------------------------- dumps


def cmd_dump(args):
    cfg = _config(args)
    img = _read(args.image)
    out = Path(args.out_dir)
    if args.what == "dtcwt":
        gray = to_grayscale(img)
        manifest = dumps.dump_pyramid(forward(gray, cfg.levels, cfg.filter_bank()), out)
    elif args.what == "scatter":
        manifest = dumps.dump_scattering(
            scatter_image(img, cfg.scattering(), cfg.filter_bank()), out
        )
    else:
        seg, discarded = _segments(img, cfg)
        manifest = dumps.dump_segments(seg, out, discarded)
    print(json.dumps({"manifest": str(manifest)}))
    return 0


def _segments(img, cfg):
    return segment_image(
        img,
        cfg.slic_count,
        cfg.compactness,
        cfg.merge_threshold,
        cfg.min_segment_fraction,
        cfg.seed,
    )


def cmd_scatter_dump(args):
    args.what = "scatter"
    return cmd_dump(args)


def cmd_segment(args):
    args.what = "segments"
    return cmd_dump(args)


def cmd_config(args):
    sys.stdout.write(format_config(_config(args)))
    return 0


# ---------------------------------------------------------------- parser


def _add_config_options(p):
    p.add_argument("--config", metavar="FILE", help="key = value configuration file")
    p.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override one configuration value (repeatable; wins over --config)",
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="inpaintdet",
        description="Wavelet-based inpainting forgery refinement and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="refine a candidate mask for one image")
    p.add_argument("image")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--candidate", metavar="MASK", help="candidate probability mask file")
    src.add_argument("--baseline", action="store_true", help="use the scattering baseline")
    p.add_argument("--out-dir", default=".", help="output directory (default: .)")
    p.add_argument("--explain", action="store_true", help="also write the explanation JSON")
    _add_config_options(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("evaluate", help="evaluate over dataset splits")
    p.add_argument("root", help="dataset root with <split>/{originals,masks,inpainted}")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--candidates", metavar="DIR", help="candidate masks as DIR/<split>/<stem>.*")
    src.add_argument("--baseline", action="store_true", help="use the scattering baseline")
    p.add_argument("--split", action="append", help="evaluate only this split (repeatable)")
    p.add_argument(
        "--workers",
        type=int,
        default=None,
        help=f"worker processes (default: ${WORKERS_ENV} or 1)",
    )
    p.add_argument("--output", metavar="FILE", help="write the report here instead of stdout")
    _add_config_options(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("perturb", help="apply resize and/or box-blur post-processing")
    p.add_argument("image")
    p.add_argument("--op", choices=("resize", "blur", "both"), required=True)
    p.add_argument("--factor", type=float, default=DEFAULT_RESIZE, help="resize factor (0.7)")
    p.add_argument("--radius", type=int, default=DEFAULT_BLUR_RADIUS, help="blur radius (5)")
    p.add_argument("--output", required=True, help="output file; format from the suffix")
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("dump", help="write diagnostic planes and a manifest")
    p.add_argument("image")
    p.add_argument("--what", choices=("dtcwt", "scatter", "segments"), required=True)
    p.add_argument("--out-dir", required=True)
    _add_config_options(p)
    p.set_defaults(func=cmd_dump)

    p = sub.add_parser("scatter-dump", help="same as dump --what scatter")
    p.add_argument("image")
    p.add_argument("--out-dir", required=True)
    _add_config_options(p)
    p.set_defaults(func=cmd_scatter_dump)

    p = sub.add_parser("segment", help="write the segment label map and area table")
    p.add_argument("image")
    p.add_argument("--out-dir", required=True)
    _add_config_options(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("config", help="print the effective configuration")
    _add_config_options(p)
    p.set_defaults(func=cmd_config)
    return parser


def _report_error(exc):
    payload = {"error": type(exc).__name__, "message": str(exc)}
    path = getattr(exc, "path", None) or getattr(exc, "filename", None)
    if path is not None:
        payload["path"] = str(path)
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ConfigError, DecodeError, FilterBankError, OSError, ValueError) as exc:
        _report_error(exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
