from .boosting import BoostedModel
from .common import (
    FAMILIES,
    FAMILY_ALIASES,
    IIDMetrics,
    ModelSpec,
    TrainedModel,
    canonical_family,
    default_spec,
    evaluate_iid,
    load_model,
    model_from_dict,
    model_to_dict,
    save_model,
    train,
)
from .forest import ForestModel
from .logistic import LogisticModel

__all__ = [
    "FAMILIES",
    "FAMILY_ALIASES",
    "IIDMetrics",
    "ModelSpec",
    "TrainedModel",
    "BoostedModel",
    "ForestModel",
    "LogisticModel",
    "canonical_family",
    "default_spec",
    "evaluate_iid",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "save_model",
    "train",
]
