"""Shared fixtures and small image-manipulation oracles for the test suite."""
import time

import numpy as np
import pytest

from facerec.pipeline import ExperimentConfig, run_experiment


def rotate_bilinear(img: np.ndarray, degrees: float) -> np.ndarray:
    """Rotate about the image center, bilinear sampling, zero outside."""
    h, w = img.shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    phi = np.deg2rad(degrees)
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    dx, dy = xs - cx, ys - cy
    sx = cx + np.cos(phi) * dx + np.sin(phi) * dy
    sy = cy - np.sin(phi) * dx + np.cos(phi) * dy
    x0 = np.floor(sx).astype(int)
    y0 = np.floor(sy).astype(int)
    fx, fy = sx - x0, sy - y0
    out = np.zeros_like(img, dtype=np.float64)
    for oy, ox, wgt in ((0, 0, (1 - fx) * (1 - fy)), (0, 1, fx * (1 - fy)),
                        (1, 0, (1 - fx) * fy), (1, 1, fx * fy)):
        yy, xx = y0 + oy, x0 + ox
        ok = (yy >= 0) & (yy < h) & (xx >= 0) & (xx < w)
        out[ok] += wgt[ok] * img[np.clip(yy, 0, h - 1), np.clip(xx, 0, w - 1)][ok]
    return out


def hemisphere(n: int = 64, radius: float = 20.0) -> np.ndarray:
    ys, xs = np.mgrid[0:n, 0:n].astype(np.float64)
    c = (n - 1) / 2.0
    d2 = (xs - c) ** 2 + (ys - c) ** 2
    return np.sqrt(np.maximum(0.0, radius ** 2 - d2))


def pearson(a: np.ndarray, b: np.ndarray, mask=None) -> float:
    if mask is not None:
        a, b = a[mask], b[mask]
    a = a.ravel() - a.mean()
    b = b.ravel() - b.mean()
    return float((a @ b) / (np.linalg.norm(a) * np.linalg.norm(b)))


def rel_l2(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) /
                 max(np.linalg.norm(a), np.linalg.norm(b), 1e-12))


@pytest.fixture(scope="session")
def small_tree(tmp_path_factory):
    """A reduced on-disk copy of the synthetic benchmark for fast
    pipeline/CLI tests: 5 classes, 4 images each, 32x32."""
    from facerec.synthetic import write_synthetic_tree

    root = tmp_path_factory.mktemp("db") / "faces"
    write_synthetic_tree(root, images_per_class=4, size=32)
    return root


@pytest.fixture(scope="session")
def synthetic_runs():
    """Both algorithms on the varied-illumination synthetic benchmark at
    package defaults, plus the fixed-illumination reference run. Shared so
    the expensive end-to-end runs happen once per session."""
    t0 = time.perf_counter()
    alg1 = run_experiment(ExperimentConfig(
        database="synthetic", algorithm="coif-packet", n_train=3))
    alg2 = run_experiment(ExperimentConfig(
        database="synthetic", algorithm="radon-dft", n_train=3))
    elapsed_varied = time.perf_counter() - t0
    alg1_fixed = run_experiment(ExperimentConfig(
        database="synthetic-fixed", algorithm="coif-packet", n_train=3))
    return {"alg1": alg1, "alg2": alg2, "alg1_fixed": alg1_fixed,
            "elapsed_varied": elapsed_varied}
