"""Face recognition from single-image depth maps.

Two pipelines over shape-from-shading depth: wavelet-packet energy features
and Radon/DFT directional features, each followed by regularized discriminant
projection and k-NN matching. See the README for the CLI and data layout.
"""
from .classify import Gallery, knn_classify, l1_distance, mahalanobis_distance
from .dataset import (DatasetError, FaceDatabase, SplitSpec, load_gray_image,
                      scan_database, split, write_pgm)
from .pipeline import (ExperimentConfig, RecognitionReport, StageError,
                       emit_constancy, run_algorithm1, run_algorithm2,
                       run_experiment, run_grid)
from .radon import (PrincipalAxis, RadonProfile, principal_axis,
                    radon_features, radon_projection)
from .sfs import (LightDirection, SfsConfig, estimate_depth,
                  illumination_invariance_gap, render_lambertian)
from .subspace import (LabeledFeatures, LdaModel, ScatterPair, class_constancy,
                       fit_discriminant, fit_lda, load_model, project,
                       save_model, scatter_matrices)
from .synthetic import build_synthetic_database, write_synthetic_tree
from .wavelet import (FAMILIES, FilterBank, PacketTree, dwt2, idwt2,
                      image_packet_features, packet_decompose,
                      packet_features)

__version__ = "0.1.0"

__all__ = [
    "DatasetError", "ExperimentConfig", "FAMILIES", "FaceDatabase",
    "FilterBank", "Gallery", "LabeledFeatures", "LdaModel", "LightDirection",
    "PacketTree", "PrincipalAxis", "RadonProfile", "RecognitionReport",
    "ScatterPair", "SfsConfig", "SplitSpec", "StageError",
    "build_synthetic_database", "class_constancy", "dwt2", "emit_constancy",
    "estimate_depth", "fit_discriminant", "fit_lda", "idwt2",
    "illumination_invariance_gap", "image_packet_features", "knn_classify",
    "l1_distance", "load_gray_image", "load_model", "mahalanobis_distance",
    "packet_decompose", "packet_features", "principal_axis", "project",
    "radon_features", "radon_projection", "render_lambertian",
    "run_algorithm1", "run_algorithm2", "run_experiment", "run_grid",
    "save_model", "scan_database", "scatter_matrices", "split", "write_pgm",
    "write_synthetic_tree",
]
