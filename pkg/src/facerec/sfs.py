"""Relative depth from a single gray image under a Lambertian model.

The estimator solves the irradiance equation per pixel with monotone upwind
differences and propagates depth along anti-diagonal sweeps in all four
traversal directions. One iteration = one round of the four sweeps. Depth is
recovered up to an additive constant and gauged so its minimum is 0; pixels
the sweeps never constrain (shadow, E=0) are filled with the gauge value.

The renderer uses backward differences p = Z(x,y) - Z(x-1,y),
q = Z(x,y) - Z(x,y-1) with p=q=0 on the top/left border, and the estimator
reads brightness from the pixel that owns each one-sided step under that
stencil, so render -> estimate round trips are near fixed points.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_INF = np.inf


@dataclass(frozen=True)
class LightDirection:
    slant: float = 0.0  # radians, [0, pi/2)
    tilt: float = 0.0   # radians, [0, 2*pi)

    def __post_init__(self):
        if not 0.0 <= self.slant < np.pi / 2:
            raise ValueError(f"slant {self.slant} outside [0, pi/2)")
        if not 0.0 <= self.tilt < 2 * np.pi:
            raise ValueError(f"tilt {self.tilt} outside [0, 2*pi)")

    @property
    def vector(self) -> np.ndarray:
        return np.array([np.cos(self.tilt) * np.sin(self.slant),
                         np.sin(self.tilt) * np.sin(self.slant),
                         np.cos(self.slant)])


@dataclass(frozen=True)
class SfsConfig:
    iterations: int = 10
    light: LightDirection = field(default_factory=LightDirection)

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


def _backward_gradients(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = np.zeros_like(z)
    q = np.zeros_like(z)
    p[:, 1:] = z[:, 1:] - z[:, :-1]
    q[1:, :] = z[1:, :] - z[:-1, :]
    return p, q


def render_lambertian(depth: np.ndarray, light: LightDirection) -> np.ndarray:
    """Image of a depth map: E = max(0, n.s), clamped to [0, 1]."""
    z = np.asarray(depth, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise ValueError("depth map must be finite")
    s = light.vector
    p, q = _backward_gradients(z)
    norm = np.sqrt(1.0 + p * p + q * q)
    return np.clip((-p * s[0] - q * s[1] + s[2]) / norm, 0.0, 1.0)


def _solve_two_sided(e, zx, zy, ex, ey, sx, sy, sz):
    """Smallest valid root of E^2(1+p^2+q^2) = (sz - sx*p - sy*q)^2 with
    p = ex*(z-zx), q = ey*(z-zy). Validity: z >= zx, z >= zy (upwind
    causality) and a lit-side linear form. Returns INF where nothing holds."""
    ax = sx * ex
    ay = sy * ey
    c1 = -(ax + ay)
    c0 = sz + ax * zx + ay * zy
    e2 = e * e
    A = 2.0 * e2 - c1 * c1
    B = -2.0 * e2 * (zx + zy) - 2.0 * c0 * c1
    C = e2 * (1.0 + zx * zx + zy * zy) - c0 * c0
    disc = B * B - 4.0 * A * C
    out = np.full_like(e, _INF)
    ok = (disc >= 0.0) & (np.abs(A) > 1e-30)
    sq = np.sqrt(np.where(ok, disc, 0.0))
    for sign in (+1.0, -1.0):
        root = (-B + sign * sq) / np.where(ok, 2.0 * A, 1.0)
        p = ex * (root - zx)
        q = ey * (root - zy)
        valid = (ok & (root >= zx) & (root >= zy)
                 & (sz - sx * p - sy * q >= -1e-12))
        out = np.where(valid & (root < out), root, out)
    lin = (~(np.abs(A) > 1e-30)) & (np.abs(B) > 1e-30)
    if np.any(lin):
        root = -C / np.where(lin, B, 1.0)
        p = ex * (root - zx)
        q = ey * (root - zy)
        valid = lin & (root >= zx) & (root >= zy) & (sz - sx * p - sy * q >= -1e-12)
        out = np.where(valid & (root < out), root, out)
    return out


def _solve_one_sided(e, zn, eta, s_axis, sz):
    """One-neighbor fallback: E^2(1+u^2) = (sz - s_axis*eta*u)^2, u = z-zn >= 0."""
    a = s_axis * eta
    e2 = e * e
    A = e2 - a * a
    B = 2.0 * sz * a
    C = e2 - sz * sz
    disc = B * B - 4.0 * A * C
    out = np.full_like(e, _INF)
    ok = (disc >= 0.0) & (np.abs(A) > 1e-30)
    sq = np.sqrt(np.where(ok, disc, 0.0))
    for sign in (+1.0, -1.0):
        u = (-B + sign * sq) / np.where(ok, 2.0 * A, 1.0)
        valid = ok & (u >= 0.0) & (sz - a * u >= -1e-12)
        root = zn + u
        out = np.where(valid & (root < out), root, out)
    lin = (~(np.abs(A) > 1e-30)) & (np.abs(B) > 1e-30)
    if np.any(lin):
        u = -C / np.where(lin, B, 1.0)
        valid = lin & (u >= 0.0) & (sz - a * u >= -1e-12)
        root = zn + u
        out = np.where(valid & (root < out), root, out)
    return out


def _sweep(z, e, sx, sy, sz, flipx, flipy):
    """One top-left to bottom-right pass over the (possibly mirrored) arrays,
    vectorized along anti-diagonals. flipx/flipy say whether the axes are
    mirrored, which decides which neighbor's brightness owns each one-sided
    step under the backward-difference stencil (the eastern/southern pixel
    of the pair in original coordinates)."""
    h, w = e.shape
    for k in range(2, h + w - 1):
        y0 = max(1, k - (w - 1))
        y1 = min(h - 1, k - 1)
        if y0 > y1:
            continue
        ys = np.arange(y0, y1 + 1)
        xs = k - ys
        zL = z[ys, xs - 1]
        zU = z[ys - 1, xs]
        has_r = xs + 1 <= w - 1
        has_d = ys + 1 <= h - 1
        xr = np.minimum(xs + 1, w - 1)
        yd = np.minimum(ys + 1, h - 1)
        zR = np.where(has_r, z[ys, xr], _INF)
        zD = np.where(has_d, z[yd, xs], _INF)
        zx = np.minimum(zL, zR)
        ex = np.where(zL <= zR, 1.0, -1.0)
        zy = np.minimum(zU, zD)
        ey = np.where(zU <= zD, 1.0, -1.0)
        e_own = e[ys, xs]
        if flipx:
            e_x = np.where(ex > 0, e[ys, xs - 1], e_own)
        else:
            e_x = np.where(ex > 0, e_own, e[ys, xr])
        if flipy:
            e_y = np.where(ey > 0, e[ys - 1, xs], e_own)
        else:
            e_y = np.where(ey > 0, e_own, e[yd, xs])
        e_2d = np.minimum(e_x, e_y)
        cand = np.full_like(e_own, _INF)
        both = np.isfinite(zx) & np.isfinite(zy) & (e_2d > 0.0)
        if np.any(both):
            cand = np.where(both, _solve_two_sided(
                e_2d, np.where(both, zx, 0.0), np.where(both, zy, 0.0),
                ex, ey, sx, sy, sz), cand)
        fx = np.isfinite(zx) & (e_x > 0.0)
        c1 = np.where(fx, _solve_one_sided(np.maximum(e_x, 1e-12),
                                           np.where(fx, zx, 0.0), ex, sx, sz), _INF)
        fy = np.isfinite(zy) & (e_y > 0.0)
        c2 = np.where(fy, _solve_one_sided(np.maximum(e_y, 1e-12),
                                           np.where(fy, zy, 0.0), ey, sy, sz), _INF)
        cand = np.minimum(cand, np.minimum(c1, c2))
        lit = e_own > 0.0
        z[ys, xs] = np.where(lit, np.minimum(z[ys, xs], cand), z[ys, xs])
    return z


def _gauge(z: np.ndarray, shape) -> np.ndarray:
    fin = np.isfinite(z)
    if np.any(fin):
        m = z[fin].min()
        return np.where(fin, z, m) - m
    return np.zeros(shape)


def _mean_residual(z, image, s):
    p, q = _backward_gradients(z)
    norm = np.sqrt(1.0 + p * p + q * q)
    r = np.clip((-p * s[0] - q * s[1] + s[2]) / norm, 0.0, 1.0)
    return float(np.abs(image - r).mean())


_FLIPS = ((False, False), (True, False), (False, True), (True, True))


def estimate_depth(image: np.ndarray, cfg: SfsConfig = SfsConfig()) -> np.ndarray:
    """Recover a relative depth map (min gauged to 0) from a gray image."""
    e = np.asarray(image, dtype=np.float64)
    if e.ndim != 2 or min(e.shape) < 2:
        raise ValueError(f"image must be 2-D with extent >= 2, got {e.shape}")
    if e.min() < 0.0 or e.max() > 1.0:
        raise ValueError("image intensities must lie in [0, 1]")
    s = cfg.light.vector
    h, w = e.shape
    z = np.full((h, w), _INF)
    z[0, :] = 0.0
    z[:, 0] = 0.0
    best = np.inf
    for _ in range(cfg.iterations):
        z_prev = z.copy()
        for fx, fy in _FLIPS:
            zz, img, sx, sy = z, e, s[0], s[1]
            if fx:
                zz = zz[:, ::-1]
                img = img[:, ::-1]
                sx = -sx
            if fy:
                zz = zz[::-1, :]
                img = img[::-1, :]
                sy = -sy
            zz = _sweep(np.ascontiguousarray(zz), np.ascontiguousarray(img),
                        sx, sy, s[2], fx, fy)
            if fy:
                zz = zz[::-1, :]
            if fx:
                zz = zz[:, ::-1]
            z = zz
        # sweeps only lower z, so the residual normally falls; if a round
        # ever raised it, keep the previous iterate and stop
        res = _mean_residual(_gauge(z, e.shape), e, s)
        if res > best + 1e-15:
            z = z_prev
            break
        best = res
        if np.array_equal(z, z_prev):
            break
    return _gauge(z, e.shape)


def illumination_invariance_gap(depth_a: np.ndarray, depth_b: np.ndarray) -> float:
    """Relative L2 distance between two depth maps after gauging both."""
    a = np.asarray(depth_a, dtype=np.float64)
    b = np.asarray(depth_b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"extent mismatch: {a.shape} vs {b.shape}")
    a = a - a.min()
    b = b - b.min()
    return float(np.linalg.norm(a - b) /
                 max(np.linalg.norm(a), np.linalg.norm(b), 1e-12))


def depth_to_pgm(path, depth: np.ndarray) -> None:
    """Debug dump: affinely map depth to 0..255 and write a binary PGM."""
    from .dataset import write_pgm

    z = np.asarray(depth, dtype=np.float64)
    span = z.max() - z.min()
    scaled = (z - z.min()) / span if span > 0 else np.zeros_like(z)
    write_pgm(path, scaled)
