"""Grayscale image decoding, face-database directory scanning, train/test splits.

Images are numpy float64 arrays of shape (height, width) with values in [0, 1].
A database directory holds one subdirectory per class: <root>/<class>/<image>.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class DatasetError(Exception):
    """Raised for decode failures, layout violations, and bad split specs."""


@dataclass(frozen=True)
class LoadedImage:
    pixels: np.ndarray
    path: Path


@dataclass
class FaceDatabase:
    classes: list[str]
    images: dict[str, list[LoadedImage]] = field(default_factory=dict)

    @property
    def image_shape(self) -> tuple[int, int]:
        first = self.images[self.classes[0]][0].pixels
        return first.shape

    def class_count(self) -> int:
        return len(self.classes)

    def total_images(self) -> int:
        return sum(len(v) for v in self.images.values())


@dataclass(frozen=True)
class SplitSpec:
    n_train_per_class: int
    selection: str = "first-n"  # or "seeded-random"
    seed: int = 0

    def __post_init__(self):
        if self.n_train_per_class < 1:
            raise DatasetError("n_train_per_class must be >= 1")
        if self.selection not in ("first-n", "seeded-random"):
            raise DatasetError(f"unknown selection {self.selection!r}")


def _read_pgm(data: bytes, path: Path) -> np.ndarray:
    # Tokenized P5 header: magic, width, height, maxval. '#' starts a comment
    # that runs to end of line. Exactly one whitespace byte follows maxval.
    pos = 0

    def fail(msg: str, at: int):
        raise DatasetError(f"{path}: {msg} at byte {at}")

    def next_token():
        nonlocal pos
        while pos < len(data):
            c = data[pos:pos + 1]
            if c == b"#":
                nl = data.find(b"\n", pos)
                if nl < 0:
                    fail("unterminated comment", pos)
                pos = nl + 1
            elif c.isspace():
                pos += 1
            else:
                break
        if pos >= len(data):
            fail("unexpected end of header", pos)
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        return data[start:pos], start

    magic, at = next_token()
    if magic != b"P5":
        fail(f"not a binary PGM (magic {magic!r})", at)
    dims = []
    for name in ("width", "height", "maxval"):
        tok, at = next_token()
        if not tok.isdigit():
            fail(f"non-numeric {name} {tok!r}", at)
        dims.append(int(tok))
    width, height, maxval = dims
    if width < 1 or height < 1:
        fail("non-positive dimensions", at)
    if not 0 < maxval <= 255:
        fail(f"unsupported maxval {maxval}", at)
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        fail("missing whitespace after maxval", pos)
    pos += 1
    need = width * height
    payload = data[pos:pos + need]
    if len(payload) < need:
        fail(f"truncated payload ({len(payload)} of {need} bytes)", pos + len(payload))
    raw = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return raw.astype(np.float64) / float(maxval)


def _read_png(path: Path) -> np.ndarray:
    from PIL import Image

    with Image.open(path) as im:
        if im.mode != "L":
            raise DatasetError(
                f"{path}: unsupported PNG mode {im.mode!r} (8-bit grayscale only)")
        raw = np.asarray(im, dtype=np.uint8)
    return raw.astype(np.float64) / 255.0


def load_gray_image(path) -> np.ndarray:
    """Decode a binary PGM (P5, maxval <= 255) or 8-bit grayscale PNG."""
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"{path}: no such file")
    data = path.read_bytes()
    if data[:2] == b"P5":
        return _read_pgm(data, path)
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return _read_png(path)
    raise DatasetError(f"{path}: unrecognized format (want P5 PGM or grayscale PNG)")


def write_pgm(path, image: np.ndarray, maxval: int = 255) -> None:
    """Write a [0,1] gray array as binary PGM."""
    path = Path(path)
    if not 0 < maxval <= 255:
        raise DatasetError(f"unsupported maxval {maxval}")
    arr = np.asarray(image, dtype=np.float64)
    raw = np.rint(np.clip(arr, 0.0, 1.0) * maxval).astype(np.uint8)
    h, w = raw.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n{maxval}\n".encode("ascii"))
        f.write(raw.tobytes())


_IMAGE_SUFFIXES = (".pgm", ".png")


def scan_database(root) -> FaceDatabase:
    """Load <root>/<class>/<image> into memory; classes and files sorted by name."""
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"{root}: not a directory")
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not class_dirs:
        raise DatasetError(f"{root}: no class subdirectories")
    db = FaceDatabase(classes=[])
    shape = None
    for cdir in class_dirs:
        files = sorted(p for p in cdir.iterdir()
                       if p.is_file() and p.suffix.lower() in _IMAGE_SUFFIXES)
        if not files:
            raise DatasetError(f"{cdir}: class directory holds no images")
        loaded = []
        for f in files:
            img = load_gray_image(f)
            if shape is None:
                shape = img.shape
            elif img.shape != shape:
                raise DatasetError(
                    f"{f}: dimensions {img.shape[1]}x{img.shape[0]} do not match "
                    f"database {shape[1]}x{shape[0]}")
            loaded.append(LoadedImage(img, f))
        db.classes.append(cdir.name)
        db.images[cdir.name] = loaded
    return db


def split(db: FaceDatabase, spec: SplitSpec) -> tuple[FaceDatabase, FaceDatabase]:
    """Partition every class into n_train training images and the rest as test."""
    n = spec.n_train_per_class
    for cls in db.classes:
        if n >= len(db.images[cls]):
            raise DatasetError(
                f"class {cls!r}: n_train={n} leaves no test images "
                f"(class size {len(db.images[cls])})")
    train = FaceDatabase(classes=list(db.classes))
    test = FaceDatabase(classes=list(db.classes))
    for cls in db.classes:
        items = db.images[cls]
        if spec.selection == "first-n":
            picked = set(range(n))
        else:
            rng = random.Random(f"{spec.seed}/{cls}")
            picked = set(rng.sample(range(len(items)), n))
        train.images[cls] = [im for i, im in enumerate(items) if i in picked]
        test.images[cls] = [im for i, im in enumerate(items) if i not in picked]
    return train, test
