"""Scatter matrices, regularized discriminant fitting, projection, and
per-class constancy diagnostics.

The generalized eigenproblem S_B w = lambda (S_W + mu I) w is solved through
a Cholesky reduction to an ordinary symmetric eigenproblem. Columns of W are
normalized to w' (S_W + mu I) w = 1 and sign-canonicalized so results are
reproducible bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

_EPS_CONSTANCY = 1e-12


@dataclass(frozen=True)
class LabeledFeatures:
    features: np.ndarray  # (n, d)
    labels: np.ndarray    # (n,) ints in [0, class_count)

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        labs = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labs)
        if feats.ndim != 2 or len(labs) != len(feats):
            raise ValueError("features must be (n, d) with parallel labels")
        if not np.all(np.isfinite(feats)):
            raise ValueError("non-finite feature value")
        if labs.min(initial=0) < 0:
            raise ValueError("negative class label")
        c = int(labs.max()) + 1 if len(labs) else 0
        present = np.unique(labs)
        if len(present) != c:
            missing = sorted(set(range(c)) - set(present.tolist()))
            raise ValueError(f"classes {missing} have no samples")

    @property
    def class_count(self) -> int:
        return int(self.labels.max()) + 1

    @property
    def dim(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class ScatterPair:
    s_b: np.ndarray          # (d, d) between-class scatter
    s_w: np.ndarray          # (d, d) within-class scatter
    class_means: np.ndarray  # (c, d)
    global_mean: np.ndarray  # (d,)
    class_counts: np.ndarray  # (c,)


def scatter_matrices(data: LabeledFeatures) -> ScatterPair:
    """S_B = sum_i N_i (mu_i - mu)(mu_i - mu)', S_W = sum_i sum_k (x - mu_i)(x - mu_i)'."""
    x = data.features
    labels = data.labels
    c = data.class_count
    d = data.dim
    global_mean = x.mean(axis=0)
    class_means = np.empty((c, d))
    class_counts = np.empty(c, dtype=np.int64)
    s_b = np.zeros((d, d))
    s_w = np.zeros((d, d))
    for i in range(c):
        xi = x[labels == i]
        class_counts[i] = len(xi)
        mu_i = xi.mean(axis=0)
        class_means[i] = mu_i
        dm = mu_i - global_mean
        s_b += len(xi) * np.outer(dm, dm)
        centered = xi - mu_i
        s_w += centered.T @ centered
    s_b = 0.5 * (s_b + s_b.T)
    s_w = 0.5 * (s_w + s_w.T)
    return ScatterPair(s_b, s_w, class_means, global_mean, class_counts)


@dataclass(frozen=True)
class LdaModel:
    W: np.ndarray                 # (d, m), columns w_1..w_m
    eigenvalues: np.ndarray | None  # (m,) nonincreasing, None after load
    projected_means: np.ndarray   # (c, m)
    pooled_cov: np.ndarray        # (m, m) projected within-class covariance
    mu_reg: float

    @property
    def dim(self) -> int:
        return self.W.shape[0]

    @property
    def subspace_dim(self) -> int:
        return self.W.shape[1]

    @property
    def class_count(self) -> int:
        return self.projected_means.shape[0]


def _canonical_signs(w: np.ndarray) -> np.ndarray:
    # force the largest-magnitude entry of each column positive
    picks = np.argmax(np.abs(w), axis=0)
    signs = np.sign(w[picks, np.arange(w.shape[1])])
    signs[signs == 0] = 1.0
    return w * signs


def fit_lda(sp: ScatterPair, mu_scale: float = 1e-3, m: int | None = None,
            pooled_dof: int | None = None) -> LdaModel:
    """Top-m discriminant directions of S_B w = lambda (S_W + mu I) w.

    mu = mu_scale * trace(S_W)/d, or mu_scale itself when the trace is 0.
    pooled_dof divides W'S_W W into a covariance (defaults to a plain
    average over the max(n - c, 1) within-class deviations when given).
    """
    if mu_scale <= 0.0:
        raise ValueError("mu_scale must be > 0")
    c = len(sp.class_means)
    d = sp.s_w.shape[0]
    if c < 2:
        raise ValueError("discriminant fitting needs at least 2 classes")
    if m is None:
        m = c - 1
    if not 1 <= m <= c - 1:
        raise ValueError(f"m={m} outside [1, {c - 1}] for {c} classes")
    trace = float(np.trace(sp.s_w))
    mu_reg = mu_scale * trace / d if trace > 0.0 else mu_scale
    a = sp.s_w + mu_reg * np.eye(d)
    try:
        chol = np.linalg.cholesky(a)
        reduced = np.linalg.solve(chol, np.linalg.solve(chol, sp.s_b.T).T)
        reduced = 0.5 * (reduced + reduced.T)
        eigvals, eigvecs = np.linalg.eigh(reduced)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(
            f"eigen solver failed ({exc}); |S_B|={np.linalg.norm(sp.s_b):.6g}, "
            f"|S_W + mu I|={np.linalg.norm(a):.6g}") from None
    order = np.argsort(eigvals, kind="stable")[::-1][:m]
    lam = np.maximum(eigvals[order], 0.0)
    y = eigvecs[:, order]
    w = np.linalg.solve(chol.T, y)
    # y orthonormal already gives w'(S_W + mu I)w = 1; renormalize anyway
    norms = np.sqrt(np.einsum("ij,ij->j", w, a @ w))
    w = _canonical_signs(w / norms)
    return _finalize(w, lam, sp, mu_reg, pooled_dof)


def _finalize(w, lam, sp: ScatterPair, mu_reg, pooled_dof):
    n = int(sp.class_counts.sum())
    c = len(sp.class_counts)
    dof = pooled_dof if pooled_dof is not None else max(n - c, 1)
    pooled = (w.T @ sp.s_w @ w) / dof
    pooled = 0.5 * (pooled + pooled.T)
    return LdaModel(W=w, eigenvalues=lam, projected_means=sp.class_means @ w,
                    pooled_cov=pooled, mu_reg=float(mu_reg))


def fit_discriminant(data: LabeledFeatures, mu_scale: float = 1e-3,
                     m: int | None = None, pca_first: bool = False) -> LdaModel:
    """Fit on labeled features; optionally pre-project onto the principal
    subspace spanning the total scatter (its numerical rank) before the
    discriminant step, composing both maps into a single W."""
    sp = scatter_matrices(data)
    if not pca_first:
        return fit_lda(sp, mu_scale=mu_scale, m=m)
    s_t = sp.s_b + sp.s_w
    eigvals, eigvecs = np.linalg.eigh(0.5 * (s_t + s_t.T))
    tol = eigvals.max(initial=0.0) * s_t.shape[0] * np.finfo(np.float64).eps
    keep = np.where(eigvals > tol)[0][::-1]
    if len(keep) == 0:
        raise ValueError("total scatter has rank 0; nothing to discriminate")
    basis = _canonical_signs(eigvecs[:, keep])
    inner = LabeledFeatures(data.features @ basis, data.labels)
    model = fit_lda(scatter_matrices(inner), mu_scale=mu_scale, m=m)
    w = basis @ model.W
    return LdaModel(W=w, eigenvalues=model.eigenvalues,
                    projected_means=sp.class_means @ w,
                    pooled_cov=model.pooled_cov, mu_reg=model.mu_reg)


def project(model: LdaModel, x: np.ndarray) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.shape != (model.dim,):
        raise ValueError(f"feature dimension {v.shape} does not match ({model.dim},)")
    return model.W.T @ v


def class_constancy(model: LdaModel, data: LabeledFeatures) -> list[list[float]]:
    """Per class, each sample's relative distance from its projected mean."""
    errors: list[list[float]] = [[] for _ in range(model.class_count)]
    for x, label in zip(data.features, data.labels):
        p = project(model, x)
        mean = model.projected_means[label]
        err = float(np.linalg.norm(p - mean) / (np.linalg.norm(mean) + _EPS_CONSTANCY))
        errors[int(label)].append(err)
    return errors


def save_model(model: LdaModel, path) -> None:
    """Plain text: d, m, c, mu_reg on header lines, then W row-major, then
    projected means, then pooled covariance, 17 significant digits."""
    lines = [str(model.dim), str(model.subspace_dim), str(model.class_count),
             format(model.mu_reg, ".17g")]
    for matrix in (model.W, model.projected_means, model.pooled_cov):
        for row in matrix:
            lines.append(" ".join(format(v, ".17g") for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def load_model(path) -> LdaModel:
    lines = Path(path).read_text(encoding="ascii").splitlines()
    d, m, c = (int(v) for v in lines[:3])
    mu_reg = float(lines[3])

    def block(start, rows, cols):
        rows_data = [np.array([float(v) for v in lines[start + r].split()])
                     for r in range(rows)]
        out = np.vstack(rows_data)
        if out.shape != (rows, cols):
            raise ValueError(f"{path}: malformed block at line {start + 1}")
        return out

    w = block(4, d, m)
    means = block(4 + d, c, m)
    pooled = block(4 + d + c, m, m)
    return LdaModel(W=w, eigenvalues=None, projected_means=means,
                    pooled_cov=pooled, mu_reg=mu_reg)
