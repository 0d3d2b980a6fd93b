"""Dataset discovery for evaluation runs.

Expected layout::

    <root>/<split>/originals/<stem>.<ext>
    <root>/<split>/masks/<stem>.<ext>
    <root>/<split>/inpainted/<stem>.<ext>

Files are matched by stem.  A candidate directory mirrors the splits with
``<candidates>/<split>/<stem>.<ext>``.
"""

from dataclasses import dataclass
from pathlib import Path

IMAGE_SUFFIXES = (".png", ".pgm", ".ppm", ".pnm", ".pbm")
PARTS = ("originals", "masks", "inpainted")


@dataclass(frozen=True)
class DatasetTriple:
    split: str
    stem: str
    original: Path
    mask: Path
    inpainted: Path


@dataclass(frozen=True)
class Skipped:
    split: str
    stem: str
    reason: str

    def as_dict(self):
        return {"split": self.split, "stem": self.stem, "reason": self.reason}


def _images_by_stem(folder):
    found = {}
    if folder.is_dir():
        for path in sorted(folder.iterdir()):
            if path.is_file() and path.suffix.lower() in IMAGE_SUFFIXES:
                found.setdefault(path.stem, path)
    return found


def find_splits(root):
    """Split directories of ``root`` that contain an ``inpainted`` folder, sorted by name."""
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset root {root} is not a directory")
    return sorted(p for p in root.iterdir() if p.is_dir() and (p / "inpainted").is_dir())


def split_triples(split_dir):
    """Triples of one split plus the stems that could not be matched.

    Returns
    -------
    triples : list of DatasetTriple
        Sorted by stem.
    skipped : list of Skipped
    """
    split_dir = Path(split_dir)
    name = split_dir.name
    parts = {part: _images_by_stem(split_dir / part) for part in PARTS}
    triples, skipped = [], []
    for stem in sorted(parts["inpainted"]):
        missing = [p for p in ("originals", "masks") if stem not in parts[p]]
        if missing:
            skipped.append(Skipped(name, stem, f"no matching file in {', '.join(missing)}"))
            continue
        triples.append(
            DatasetTriple(
                name,
                stem,
                parts["originals"][stem],
                parts["masks"][stem],
                parts["inpainted"][stem],
            )
        )
    return triples, skipped


def candidate_index(candidates, split):
    """Map of stem to candidate file for one split of a candidate directory."""
    return _images_by_stem(Path(candidates) / split)
