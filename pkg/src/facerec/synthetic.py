"""Built-in 5-class Lambertian bump-surface benchmark.

Each class is a fixed smooth surface (a dome plus class-specific Gaussian
bumps); each image renders that surface under its own light direction and is
quantized to 8 bits, so the in-memory database matches what a PGM round trip
would produce. The first images of a class (the usual training slice) use the
mildest slants.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .dataset import FaceDatabase, LoadedImage, write_pgm
from .sfs import LightDirection, render_lambertian

CLASS_COUNT = 5
IMAGES_PER_CLASS = 8
SIZE = 64
_MAX_SLANT = 0.07


def class_surface(class_index: int, size: int = SIZE, seed: int = 0) -> np.ndarray:
    """Deterministic depth map for one class: central dome + 4 random bumps."""
    if not 0 <= class_index < CLASS_COUNT:
        raise ValueError(f"class_index {class_index} outside [0, {CLASS_COUNT})")
    rng = np.random.default_rng((seed, class_index))
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    c = (size - 1) / 2.0
    dome_r = 0.42 * size
    d2 = (xs - c) ** 2 + (ys - c) ** 2
    z = np.sqrt(np.maximum(0.0, dome_r ** 2 - d2)) * 0.35
    for _ in range(4):
        bx = rng.uniform(0.25 * size, 0.75 * size)
        by = rng.uniform(0.25 * size, 0.75 * size)
        sigma = rng.uniform(0.06 * size, 0.12 * size)
        height = rng.uniform(2.5, 6.0) * rng.choice([-1.0, 1.0])
        z += height * np.exp(-((xs - bx) ** 2 + (ys - by) ** 2) / (2 * sigma ** 2))
    return z - z.min()


# slant fractions ordered so the leading images (the training slice under a
# first-n split) already span the full range; test images then interpolate
_SLANT_ORDER_8 = (0, 4, 7, 2, 5, 1, 6, 3)


def _slant_steps(n: int) -> list[int]:
    if n == 8:
        return list(_SLANT_ORDER_8)
    # same intent for other counts: frontal, strongest, middle first, so any
    # leading slice spans the range; remaining fractions in index order
    steps = []
    for v in [0, n - 1, (n - 1) // 2] + list(range(n)):
        if v not in steps:
            steps.append(v)
    return steps


def _lights(n: int, varied: bool) -> list[LightDirection]:
    if not varied:
        return [LightDirection(0.0, 0.0)] * n
    steps = _slant_steps(n)
    out = []
    for i in range(n):
        slant = _MAX_SLANT * steps[i] / max(n - 1, 1)
        tilt = (2.4 * i) % (2 * np.pi)
        out.append(LightDirection(slant, tilt))
    return out


def build_synthetic_database(varied_illumination: bool = True,
                             images_per_class: int = IMAGES_PER_CLASS,
                             size: int = SIZE, seed: int = 0) -> FaceDatabase:
    db = FaceDatabase(classes=[])
    lights = _lights(images_per_class, varied_illumination)
    for ci in range(CLASS_COUNT):
        surface = class_surface(ci, size=size, seed=seed)
        name = f"c{ci + 1}"
        items = []
        for ii, light in enumerate(lights):
            image = render_lambertian(surface, light)
            image = np.rint(image * 255.0) / 255.0  # match 8-bit storage
            items.append(LoadedImage(image, Path(f"synthetic/{name}/{ii + 1:02d}.pgm")))
        db.classes.append(name)
        db.images[name] = items
    return db


def write_synthetic_tree(root, varied_illumination: bool = True,
                         images_per_class: int = IMAGES_PER_CLASS,
                         size: int = SIZE, seed: int = 0) -> None:
    """Materialize the benchmark as <root>/<class>/<n>.pgm files."""
    root = Path(root)
    db = build_synthetic_database(varied_illumination, images_per_class, size, seed)
    for name in db.classes:
        cdir = root / name
        cdir.mkdir(parents=True, exist_ok=True)
        for ii, item in enumerate(db.images[name]):
            write_pgm(cdir / f"{ii + 1:02d}.pgm", item.pixels)
