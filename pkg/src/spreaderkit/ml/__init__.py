from .cv import evaluate, stratified_kfold
from .metrics import (accuracy, auc_trapezoid, confusion_matrix,
                      per_class_metrics, roc_auc, roc_curve, weighted_f1)
from .models import ModelSpec, make_model
from .resample import smote, undersample

__all__ = [
    "ModelSpec", "make_model", "evaluate", "stratified_kfold",
    "smote", "undersample", "confusion_matrix", "per_class_metrics",
    "accuracy", "weighted_f1", "roc_curve", "roc_auc", "auc_trapezoid",
]
