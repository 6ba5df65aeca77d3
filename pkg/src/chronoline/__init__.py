"""Chronological timelines in vector-embedding spaces.

Fit an explicit timeline (a high-degree Bezier curve through per-year
anchor embeddings, optionally in a cosine-kernel KPCA subspace) and predict
the year of first appearance of query embeddings, with a dot-product
probing baseline and rank/accuracy metrics.
"""

from .errors import ChronolineError
from .kpca import Projector, fit, project_all, transform
from .metrics import (
    EvalReport,
    TaiConfig,
    evaluate,
    kendall,
    mae,
    mndl,
    ranking_metrics,
    spearman,
    tai,
)
from .probing import ProbeResult, probe, probe_batch
from .store import (
    EmbeddingRecord,
    EmbeddingSet,
    ExternalProjection1D,
    TimeAnchorSet,
    anchors_to_embedding_set,
    load_embeddings,
    load_projection_1d,
    normalize,
    save_embeddings,
    to_anchor_set,
)
from .synthetic import SyntheticSpec, generate
from .timeline import (
    BezierCurve,
    TimelineModel,
    TimePrediction,
    decasteljau,
    fit_timeline,
    load_model,
    map_to_curve,
    predict_batch,
    predict_interp,
    predict_nn,
    save_model,
    select_control_points,
)

__all__ = [
    "ChronolineError",
    "Projector",
    "fit",
    "transform",
    "project_all",
    "EvalReport",
    "TaiConfig",
    "evaluate",
    "kendall",
    "mae",
    "mndl",
    "ranking_metrics",
    "spearman",
    "tai",
    "ProbeResult",
    "probe",
    "probe_batch",
    "EmbeddingRecord",
    "EmbeddingSet",
    "ExternalProjection1D",
    "TimeAnchorSet",
    "anchors_to_embedding_set",
    "load_embeddings",
    "load_projection_1d",
    "normalize",
    "save_embeddings",
    "to_anchor_set",
    "SyntheticSpec",
    "generate",
    "BezierCurve",
    "TimelineModel",
    "TimePrediction",
    "decasteljau",
    "fit_timeline",
    "load_model",
    "map_to_curve",
    "predict_batch",
    "predict_interp",
    "predict_nn",
    "save_model",
    "select_control_points",
]

__version__ = "0.1.0"
