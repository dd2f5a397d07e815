"""End-to-end recognition experiments, benchmark grids, and CSV reports.

Both recognition algorithms share one orchestrator: depth estimation, feature
extraction (the only stage that differs), discriminant fitting, projection,
and k-NN decisions. Any stage failure aborts the run with the stage name and
the offending image path.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import classify, dataset, radon, sfs, subspace, synthetic, wavelet

ALGORITHMS = ("coif-packet", "radon-dft")
SYNTHETIC_ROOTS = {
    "synthetic": True,        # varied illumination (the benchmark setting)
    "synthetic-fixed": False,  # every image lit frontally
}


@dataclass(frozen=True)
class ExperimentConfig:
    database: str = "synthetic"
    algorithm: str = "coif-packet"
    family: str = "coiflet-2"
    levels: int = 4
    radon_mode: str = "axis-only"
    radon_transform: str = "dft"
    sfs_iterations: int = 10
    sfs_slant: float = 0.0
    sfs_tilt: float = 0.0
    n_train: int = 3
    selection: str = "first-n"
    seed: int = 0
    metric: str = "l1"
    mu_scale: float = 1e-3
    k: int = 1
    pca_first: bool = False
    out: str = ""

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        if self.metric not in ("l1", "mahalanobis"):
            raise ValueError("metric must be l1 or mahalanobis")

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if isinstance(value, float):
                value = repr(value)
            lines.append(f"{f.name}={value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        fields = {f.name: f for f in dataclasses.fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            val = val.strip()
            if key not in fields:
                raise ValueError(f"line {lineno}: unknown key {key!r}")
            ftype = fields[key].type
            if ftype == "int":
                values[key] = int(val)
            elif ftype == "float":
                values[key] = float(val)
            elif ftype == "bool":
                if val not in ("True", "False"):
                    raise ValueError(f"line {lineno}: {key} must be True or False")
                values[key] = val == "True"
            else:
                values[key] = val
        return cls(**values)


@dataclass(frozen=True)
class TestRecord:
    path: str
    true_label: int
    predicted_label: int
    distance: float


@dataclass
class RecognitionReport:
    config: ExperimentConfig
    recognition_percent: float
    records: list[TestRecord]
    duration_ms: float
    constancy: list[list[float]]  # per class, training images in order
    class_names: list[str]


class StageError(Exception):
    def __init__(self, stage: str, path: str, message: str):
        self.stage = stage
        self.path = path
        super().__init__(f"[{stage}] {path}: {message}")


def load_database(root: str) -> dataset.FaceDatabase:
    if root in SYNTHETIC_ROOTS:
        return synthetic.build_synthetic_database(SYNTHETIC_ROOTS[root])
    return dataset.scan_database(root)


def _extractor(cfg: ExperimentConfig):
    if cfg.algorithm == "coif-packet":
        fb = wavelet.FilterBank.for_family(cfg.family)

        def extract(depth: np.ndarray) -> np.ndarray:
            return wavelet.packet_features(
                wavelet.packet_decompose(depth, fb, cfg.levels))
    else:
        def extract(depth: np.ndarray) -> np.ndarray:
            return radon.radon_features(depth, mode=cfg.radon_mode,
                                        transform=cfg.radon_transform)
    return extract


def _depth_features(items, sfs_cfg, extract):
    feats = []
    for item in items:
        try:
            depth = sfs.estimate_depth(item.pixels, sfs_cfg)
        except Exception as exc:
            raise StageError("sfs", str(item.path), str(exc)) from exc
        try:
            feats.append(extract(depth))
        except Exception as exc:
            raise StageError("features", str(item.path), str(exc)) from exc
    return feats


def run_experiment(cfg: ExperimentConfig) -> RecognitionReport:
    start = time.perf_counter()
    try:
        db = load_database(cfg.database)
    except Exception as exc:
        raise StageError("dataset", cfg.database, str(exc)) from exc
    try:
        train, test = dataset.split(
            db, dataset.SplitSpec(cfg.n_train, cfg.selection, cfg.seed))
    except Exception as exc:
        raise StageError("split", cfg.database, str(exc)) from exc

    sfs_cfg = sfs.SfsConfig(cfg.sfs_iterations,
                            sfs.LightDirection(cfg.sfs_slant, cfg.sfs_tilt))
    extract = _extractor(cfg)

    train_feats, train_labels = [], []
    for label, name in enumerate(train.classes):
        items = train.images[name]
        train_feats.extend(_depth_features(items, sfs_cfg, extract))
        train_labels.extend([label] * len(items))

    try:
        data = subspace.LabeledFeatures(np.vstack(train_feats), train_labels)
        model = subspace.fit_discriminant(data, mu_scale=cfg.mu_scale,
                                          pca_first=cfg.pca_first)
    except Exception as exc:
        raise StageError("lda", cfg.database, str(exc)) from exc

    try:
        projected = data.features @ model.W
        gallery = classify.Gallery.build(
            projected, data.labels, metric=cfg.metric,
            covariance=model.pooled_cov if cfg.metric == "mahalanobis" else None,
            k=cfg.k)
    except Exception as exc:
        raise StageError("gallery", cfg.database, str(exc)) from exc

    records = []
    correct = 0
    for label, name in enumerate(test.classes):
        items = test.images[name]
        feats = _depth_features(items, sfs_cfg, extract)
        for item, feat in zip(items, feats):
            try:
                query = subspace.project(model, feat)
                predicted, dists = classify.knn_classify(gallery, query)
            except Exception as exc:
                raise StageError("classify", str(item.path), str(exc)) from exc
            records.append(TestRecord(str(item.path), label, predicted,
                                      float(dists[0])))
            correct += int(predicted == label)

    percent = 100.0 * correct / len(records) if records else 0.0
    constancy = subspace.class_constancy(model, data)
    duration_ms = (time.perf_counter() - start) * 1000.0
    return RecognitionReport(cfg, percent, records, duration_ms, constancy,
                             list(db.classes))


def run_algorithm1(cfg: ExperimentConfig) -> RecognitionReport:
    if cfg.algorithm != "coif-packet":
        raise ValueError(f"run_algorithm1 needs algorithm=coif-packet, "
                         f"got {cfg.algorithm}")
    return run_experiment(cfg)


def run_algorithm2(cfg: ExperimentConfig) -> RecognitionReport:
    if cfg.algorithm != "radon-dft":
        raise ValueError(f"run_algorithm2 needs algorithm=radon-dft, "
                         f"got {cfg.algorithm}")
    return run_experiment(cfg)


GRID_COLUMNS = ("database", "algorithm", "family", "n_train", "metric",
                "recognition_percent", "duration_ms", "error")


def grid_rows(configs) -> list[dict]:
    """One row per config; a failing config yields an error row and the grid
    continues."""
    rows = []
    for cfg in configs:
        row = {"database": cfg.database, "algorithm": cfg.algorithm,
               "family": cfg.family, "n_train": str(cfg.n_train),
               "metric": cfg.metric, "recognition_percent": "",
               "duration_ms": "", "error": ""}
        try:
            report = run_experiment(cfg)
        except (StageError, ValueError) as exc:
            row["error"] = str(exc)
        else:
            row["recognition_percent"] = f"{report.recognition_percent:.1f}"
            row["duration_ms"] = str(int(round(report.duration_ms)))
        rows.append(row)
    return rows


def write_grid_csv(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=GRID_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def run_grid(configs, path) -> list[dict]:
    rows = grid_rows(configs)
    write_grid_csv(rows, path)
    return rows


def report_csv(report: RecognitionReport) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=GRID_COLUMNS, lineterminator="\n")
    writer.writeheader()
    cfg = report.config
    writer.writerow({"database": cfg.database, "algorithm": cfg.algorithm,
                     "family": cfg.family, "n_train": str(cfg.n_train),
                     "metric": cfg.metric,
                     "recognition_percent": f"{report.recognition_percent:.1f}",
                     "duration_ms": str(int(round(report.duration_ms))),
                     "error": ""})
    return buf.getvalue()


def parse_grid_configs(text: str) -> list[ExperimentConfig]:
    """Grid file: key=value blocks separated by blank lines."""
    configs = []
    block: list[str] = []
    for raw in text.splitlines() + [""]:
        if raw.strip() and not raw.strip().startswith("#"):
            block.append(raw)
        elif not raw.strip() and block:
            configs.append(ExperimentConfig.from_text("\n".join(block)))
            block = []
    return configs


def emit_constancy(report: RecognitionReport, path) -> None:
    """CSV of (class, image_index, relative_error) for the training samples,
    sorted by class then image index."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["class", "image_index", "relative_error"])
        for ci, errors in enumerate(report.constancy):
            name = report.class_names[ci] if ci < len(report.class_names) else str(ci)
            for ii, err in enumerate(errors):
                writer.writerow([name, str(ii), format(err, ".10g")])
