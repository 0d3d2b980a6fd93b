"""Diagnostic dumps: viewable NetPBM planes, raw-value sidecars and a JSON manifest.

Every plane is written as an 8-bit PGM stretched to the full range of that
plane (a flat plane becomes all zeros).  Exact values live in ``raw.npz``.
"""

import json
from pathlib import Path

import numpy as np

from .dtcwt import ORIENTATIONS, DtcwtPyramid
from .imaging import encode_netpbm

DUMP_SCHEMA = 1
MANIFEST = "manifest.json"
RAW = "raw.npz"


def stretch(plane):
    """Affine map of ``plane`` onto [0, 1] for viewing."""
    plane = np.asarray(plane, dtype=np.float64)
    lo, hi = float(plane.min()), float(plane.max())
    if not hi > lo:
        return np.zeros_like(plane)
    return (plane - lo) / (hi - lo)


def _write_plane(outdir, name, plane):
    path = outdir / f"{name}.pgm"
    path.write_bytes(encode_netpbm(stretch(plane)))
    return {
        "name": name,
        "file": path.name,
        "shape": list(plane.shape),
        "min": float(np.min(plane)),
        "max": float(np.max(plane)),
    }


def _write_manifest(outdir, manifest):
    path = outdir / MANIFEST
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def dump_pyramid(pyr, outdir):
    """Write one magnitude plane per subband, the lowpass and the complex sidecar."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    planes, raw = [], {"lowpass": pyr.lowpass}
    for j, bands in enumerate(pyr.highpasses, start=1):
        raw[f"level{j}"] = bands
        for k, theta in enumerate(ORIENTATIONS):
            entry = _write_plane(outdir, f"level{j}_{theta:03d}deg", np.abs(bands[k]))
            entry.update(level=j, orientation=theta, kind="magnitude")
            planes.append(entry)
    entry = _write_plane(outdir, "lowpass", pyr.lowpass)
    entry.update(kind="lowpass")
    planes.append(entry)
    np.savez(outdir / RAW, **raw)
    return _write_manifest(
        outdir,
        {
            "schema_version": DUMP_SCHEMA,
            "kind": "dtcwt",
            "levels": pyr.levels,
            "orientations": list(ORIENTATIONS),
            "original_shape": list(pyr.original_shape),
            "level_pads": [list(p) for p in pyr.level_pads],
            "planes": planes,
            "raw": RAW,
        },
    )


def load_pyramid(outdir):
    """Rebuild a :class:`DtcwtPyramid` from :func:`dump_pyramid` output."""
    outdir = Path(outdir)
    manifest = json.loads((outdir / MANIFEST).read_text(encoding="utf-8"))
    if manifest.get("kind") != "dtcwt":
        raise ValueError(f"{outdir} does not hold a DTCWT dump")
    with np.load(outdir / manifest["raw"]) as raw:
        highs = tuple(raw[f"level{j}"] for j in range(1, manifest["levels"] + 1))
        return DtcwtPyramid(
            highs,
            raw["lowpass"],
            tuple(manifest["original_shape"]),
            tuple(tuple(p) for p in manifest["level_pads"]),
        )


def dump_scattering(smap, outdir):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    planes = []
    for i, (plane, path) in enumerate(zip(smap.channels, smap.layout)):
        entry = _write_plane(outdir, f"channel{i:03d}", plane)
        entry.update(path.as_dict())
        planes.append(entry)
    np.savez(outdir / RAW, channels=smap.channels)
    return _write_manifest(
        outdir,
        {
            "schema_version": DUMP_SCHEMA,
            "kind": "scattering",
            "channels": len(smap),
            "shape": list(smap.shape),
            "planes": planes,
            "raw": RAW,
        },
    )


def dump_segments(seg, outdir, discarded=()):
    """16-bit label PGM plus a JSON area table."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if seg.k > 65536:
        raise ValueError(f"{seg.k} segments do not fit a 16-bit label map")
    labels_path = outdir / "labels.pgm"
    labels_path.write_bytes(encode_netpbm(seg.labels.astype(np.uint16), bit_depth=16))
    areas = seg.areas
    return _write_manifest(
        outdir,
        {
            "schema_version": DUMP_SCHEMA,
            "kind": "segments",
            "shape": list(seg.shape),
            "k": seg.k,
            "labels": labels_path.name,
            "segments": [
                {"id": i, "area": int(areas[i]), "discarded": i in discarded}
                for i in range(seg.k)
            ],
        },
    )
