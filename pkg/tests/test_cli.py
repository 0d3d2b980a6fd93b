import json
import subprocess
import sys

import numpy as np
import pytest

from inpaintdet.cli import main
from inpaintdet.dump import load_pyramid
from inpaintdet.dtcwt import forward
from inpaintdet.imaging import decode_raw, read_image, write_image
from inpaintdet.synthetic import blur_forgery


def run(args, capsys):
    code = main([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, out, err


def _error(err):
    lines = err.strip().splitlines()
    assert len(lines) == 1
    return json.loads(lines[0])


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    """Two splits of synthetic triples plus candidate folders."""
    root = tmp_path_factory.mktemp("data")
    for split, seeds in (("lama", (0, 1)), ("mat", (2,))):
        for part in ("originals", "masks", "inpainted"):
            (root / "data" / split / part).mkdir(parents=True)
        for seed in seeds:
            f = blur_forgery(seed)
            stem = f"img{seed}"
            write_image(root / "data" / split / "originals" / f"{stem}.png", f.image)
            write_image(root / "data" / split / "inpainted" / f"{stem}.png", f.image)
            write_image(root / "data" / split / "masks" / f"{stem}.pgm", f.truth)
            for kind, cand in (("truth", f.truth), ("dilated", f.candidate), ("flipped", ~f.truth)):
                d = root / kind / split
                d.mkdir(parents=True, exist_ok=True)
                write_image(d / f"{stem}.pgm", cand)
    return root


# ---- detect


def test_detect_zero_candidate_writes_empty_mask(tmp_path, capsys):
    f = blur_forgery(3)
    write_image(tmp_path / "im.png", f.image)
    write_image(tmp_path / "zero.pgm", np.zeros(f.truth.shape))
    code, out, _ = run(["detect", tmp_path / "im.png", "--candidate", tmp_path / "zero.pgm", "--out-dir", tmp_path / "o"], capsys)
    assert code == 0
    written = json.loads(out)
    assert not read_image(written["mask"]).any()
    assert "explanation" not in written


def test_detect_rerun_bitwise_identical(tmp_path, capsys):
    f = blur_forgery(4)
    write_image(tmp_path / "im.png", f.image)
    write_image(tmp_path / "c.pgm", f.candidate)
    blobs = []
    for out_dir in ("a", "b"):
        args = ["detect", tmp_path / "im.png", "--candidate", tmp_path / "c.pgm", "--out-dir", tmp_path / out_dir, "--explain"]
        assert run(args, capsys)[0] == 0
        blobs.append([(tmp_path / out_dir / name).read_bytes() for name in ("im_mask.pgm", "im_explain.json")])
    assert blobs[0] == blobs[1]
    expl = json.loads(blobs[0][1])
    assert expl["schema_version"] == 1 and expl["config"]["slic_count"] == 32


def test_detect_baseline(tmp_path, capsys):
    write_image(tmp_path / "im.png", blur_forgery(5).image)
    assert run(["detect", tmp_path / "im.png", "--baseline", "--out-dir", tmp_path], capsys)[0] == 0
    assert (tmp_path / "im_mask.pgm").exists()


def test_detect_missing_file_names_path(tmp_path, capsys):
    missing = tmp_path / "nope.png"
    code, out, err = run(["detect", missing, "--baseline"], capsys)
    assert code == 1 and out == ""
    assert _error(err)["path"] == str(missing)


def test_detect_candidate_shape_mismatch(tmp_path, capsys):
    write_image(tmp_path / "im.png", np.zeros((20, 20)))
    write_image(tmp_path / "c.pgm", np.zeros((20, 19)))
    code, _, err = run(["detect", tmp_path / "im.png", "--candidate", tmp_path / "c.pgm", "--out-dir", tmp_path], capsys)
    assert code == 1
    assert _error(err)["error"] == "ValueError"
    assert not (tmp_path / "im_mask.pgm").exists()


def test_bad_override_is_config_error(tmp_path, capsys):
    write_image(tmp_path / "im.png", np.zeros((20, 20)))
    code, _, err = run(["detect", tmp_path / "im.png", "--baseline", "--set", "slic_cuont=3"], capsys)
    assert code == 1 and _error(err)["error"] == "ConfigError"


def test_error_line_from_subprocess(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "inpaintdet", "perturb", str(tmp_path / "x.png"), "--op", "blur", "--output", str(tmp_path / "y.png")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1
    assert json.loads(proc.stderr)["path"].endswith("x.png")


# ---- evaluate


def _evaluate(dataset, capsys, *extra):
    code, out, err = run(["evaluate", dataset / "data", *extra], capsys)
    assert code == 0, err
    return json.loads(out)


def test_evaluate_truth_candidates_score_one(dataset, capsys):
    report = _evaluate(dataset, capsys, "--candidates", dataset / "truth")
    assert report["schema_version"] == 1
    assert [s["split"] for s in report["splits"]] == ["lama", "mat"]
    for split in report["splits"]:
        assert split["candidate_aggregate"]["mean"]["iou"] == 1.0
        assert split["threshold"] == 0.5
        assert [r["image"] for r in split["per_image"]] == sorted(r["image"] for r in split["per_image"])


def test_evaluate_mean_of_one_and_zero(dataset, tmp_path, capsys):
    cands = tmp_path / "mixed" / "lama"
    cands.mkdir(parents=True)
    (cands / "img0.pgm").write_bytes((dataset / "truth" / "lama" / "img0.pgm").read_bytes())
    (cands / "img1.pgm").write_bytes((dataset / "flipped" / "lama" / "img1.pgm").read_bytes())
    report = _evaluate(dataset, capsys, "--candidates", tmp_path / "mixed", "--split", "lama")
    (split,) = report["splits"]
    assert [r["candidate"]["metrics"]["iou"] for r in split["per_image"]] == [1.0, 0.0]
    assert split["candidate_aggregate"]["mean"]["iou"] == 0.5


def test_evaluate_refines_dilated_candidates(dataset, capsys):
    report = _evaluate(dataset, capsys, "--candidates", dataset / "dilated")
    records = [r for split in report["splits"] for r in split["per_image"]]
    refined = np.mean([r["metrics"]["iou"] for r in records])
    candidate = np.mean([r["candidate"]["metrics"]["iou"] for r in records])
    assert refined > candidate


def test_evaluate_worker_count_does_not_change_report(dataset, tmp_path, capsys, monkeypatch):
    outs = []
    for workers in ("1", "3"):
        path = tmp_path / f"r{workers}.json"
        code, _, _ = run(["evaluate", dataset / "data", "--candidates", dataset / "dilated", "--workers", workers, "--output", path], capsys)
        assert code == 0
        outs.append(path.read_bytes())
    monkeypatch.setenv("INPAINTDET_WORKERS", "2")
    path = tmp_path / "env.json"
    assert run(["evaluate", dataset / "data", "--candidates", dataset / "dilated", "--output", path], capsys)[0] == 0
    outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_evaluate_bad_worker_env(dataset, capsys, monkeypatch):
    monkeypatch.setenv("INPAINTDET_WORKERS", "many")
    code, _, err = run(["evaluate", dataset / "data", "--baseline"], capsys)
    assert code == 1 and "INPAINTDET_WORKERS" in _error(err)["message"]


def test_evaluate_skips_bad_triples(dataset, tmp_path, capsys):
    root = tmp_path / "ds"
    split = root / "s"
    for part in ("originals", "masks", "inpainted"):
        (split / part).mkdir(parents=True)
    f = blur_forgery(6)
    for stem in ("good", "corrupt", "badmask", "nocand"):
        write_image(split / "originals" / f"{stem}.png", f.image)
        write_image(split / "inpainted" / f"{stem}.png", f.image)
        write_image(split / "masks" / f"{stem}.pgm", f.truth)
    (split / "inpainted" / "corrupt.png").write_bytes(b"\x89PNG\r\n\x1a\ntruncated")
    write_image(split / "masks" / "badmask.pgm", f.truth[:-1])
    write_image(split / "inpainted" / "orphan.png", f.image)
    cands = tmp_path / "c" / "s"
    cands.mkdir(parents=True)
    for stem in ("good", "corrupt", "badmask"):
        write_image(cands / f"{stem}.pgm", f.candidate)
    code, out, err = run(["evaluate", root, "--candidates", tmp_path / "c"], capsys)
    assert code == 0, err
    (rep,) = json.loads(out)["splits"]
    assert [r["image"] for r in rep["per_image"]] == ["good"]
    reasons = {s["stem"]: s["reason"] for s in rep["skipped"]}
    assert set(reasons) == {"badmask", "corrupt", "nocand", "orphan"}
    assert "DecodeError" in reasons["corrupt"]
    assert "originals" in reasons["orphan"]


def test_evaluate_empty_split_is_error(tmp_path, capsys):
    (tmp_path / "ds" / "empty" / "inpainted").mkdir(parents=True)
    code, _, err = run(["evaluate", tmp_path / "ds", "--baseline"], capsys)
    assert code == 1 and "no images" in _error(err)["message"]


def test_evaluate_unknown_split(dataset, capsys):
    code, _, err = run(["evaluate", dataset / "data", "--baseline", "--split", "zits"], capsys)
    assert code == 1 and "zits" in _error(err)["message"]


# ---- perturb


def _perturb(src, dst, capsys, *args):
    code, out, err = run(["perturb", src, "--output", dst, *args], capsys)
    assert code == 0, err
    return json.loads(out)


def test_perturb_identities(tmp_path, capsys):
    img = np.random.default_rng(0).integers(0, 256, (30, 20, 3)) / 255
    write_image(tmp_path / "in.png", img)
    _perturb(tmp_path / "in.png", tmp_path / "r.png", capsys, "--op", "resize", "--factor", "1.0")
    _perturb(tmp_path / "in.png", tmp_path / "b.png", capsys, "--op", "blur", "--radius", "0")
    for name in ("r.png", "b.png"):
        np.testing.assert_array_equal(read_image(tmp_path / name), img)


def test_perturb_default_resize_dims(tmp_path, capsys):
    write_image(tmp_path / "in.pgm", np.zeros((80, 100)))
    out = _perturb(tmp_path / "in.pgm", tmp_path / "out.pgm", capsys, "--op", "resize")
    assert (out["width"], out["height"]) == (70, 56)
    assert read_image(tmp_path / "out.pgm").shape == (56, 70)


def test_perturb_both_is_resize_then_blur(tmp_path, capsys):
    from inpaintdet.imaging import box_blur, resize_bilinear

    img = np.random.default_rng(1).random((40, 40))
    write_image(tmp_path / "in.png", img, bit_depth=16)
    _perturb(tmp_path / "in.png", tmp_path / "out.png", capsys, "--op", "both")
    raw, maxval = decode_raw((tmp_path / "out.png").read_bytes())
    assert maxval == 65535  # 16-bit input stays 16-bit
    expected = box_blur(resize_bilinear(read_image(tmp_path / "in.png"), 0.7), 5)
    np.testing.assert_allclose(raw / 65535, expected, atol=1 / 65535)


def test_perturb_decode_failure(tmp_path, capsys):
    (tmp_path / "bad.png").write_bytes(b"garbage")
    code, _, err = run(["perturb", tmp_path / "bad.png", "--op", "blur", "--output", tmp_path / "o.png"], capsys)
    assert code == 1 and _error(err)["path"].endswith("bad.png")
    assert not (tmp_path / "o.png").exists()


# ---- dumps


def test_dtcwt_dump_layout(tmp_path, capsys):
    img = np.random.default_rng(2).random((40, 36))
    write_image(tmp_path / "in.png", img, bit_depth=16)
    code, out, _ = run(["dump", tmp_path / "in.png", "--what", "dtcwt", "--out-dir", tmp_path / "d"], capsys)
    assert code == 0
    manifest = json.loads((tmp_path / "d" / "manifest.json").read_text())
    kinds = [p["kind"] for p in manifest["planes"]]
    assert kinds.count("magnitude") == 12 and kinds.count("lowpass") == 1
    assert len(list((tmp_path / "d").glob("*.pgm"))) == 13
    pyr = load_pyramid(tmp_path / "d")
    ref = forward(read_image(tmp_path / "in.png"), 2)
    for a, b in zip(pyr.highpasses, ref.highpasses):
        np.testing.assert_array_equal(a, b)


def test_constant_scatter_dump_is_flat(tmp_path, capsys):
    write_image(tmp_path / "in.png", np.full((32, 32), 0.5))
    assert run(["scatter-dump", tmp_path / "in.png", "--out-dir", tmp_path / "s"], capsys)[0] == 0
    manifest = json.loads((tmp_path / "s" / "manifest.json").read_text())
    assert manifest["channels"] == 12 + 36
    for plane in manifest["planes"]:
        assert not read_image(tmp_path / "s" / plane["file"]).any()
    with np.load(tmp_path / "s" / "raw.npz") as raw:
        assert raw["channels"].max() <= 1e-9


def test_segments_dump(tmp_path, capsys):
    write_image(tmp_path / "in.png", blur_forgery(7).image)
    assert run(["segment", tmp_path / "in.png", "--out-dir", tmp_path / "g"], capsys)[0] == 0
    manifest = json.loads((tmp_path / "g" / "manifest.json").read_text())
    labels, maxval = decode_raw((tmp_path / "g" / "labels.pgm").read_bytes())
    assert maxval == 65535
    assert np.unique(labels).size == manifest["k"]
    assert sum(s["area"] for s in manifest["segments"]) == labels.size


def test_config_command(capsys):
    code, out, _ = run(["config", "--set", "levels=3"], capsys)
    assert code == 0 and "levels = 3\n" in out
