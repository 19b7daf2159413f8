from .base import AnomalyLabeling, FeatureMatrix, LabeledDataset
from .dbscan import DbscanParams, dbscan_label
from .dtree import DecisionTree, DecisionTreeParams, dtree_fit
from .iforest import IsolationForest, IsolationForestParams, iforest_fit
from .logreg import LogisticRegression, LogRegParams, logreg_fit
from .ocsvm import OcsvmParams, OneClassSvm, ocsvm_fit
from .svm import SupportVectorMachine, SvmParams, svm_fit

import numpy as np

_CLASSIFIERS = {
    "dtree": DecisionTree,
    "logreg": LogisticRegression,
    "svm": SupportVectorMachine,
}


def predict_proba(model, X: FeatureMatrix) -> np.ndarray:
    return model.predict_proba(X)


def predict_label(model, X: FeatureMatrix, threshold: float = 0.5) -> np.ndarray:
    return model.predict_proba(X) > threshold


def classifier_from_dict(doc: dict):
    kind = doc.get("model")
    if kind not in _CLASSIFIERS:
        raise ValueError(f"unknown classifier kind {kind!r}")
    return _CLASSIFIERS[kind].from_dict(doc)


__all__ = [
    "AnomalyLabeling",
    "FeatureMatrix",
    "LabeledDataset",
    "DbscanParams",
    "dbscan_label",
    "DecisionTree",
    "DecisionTreeParams",
    "dtree_fit",
    "IsolationForest",
    "IsolationForestParams",
    "iforest_fit",
    "LogisticRegression",
    "LogRegParams",
    "logreg_fit",
    "OcsvmParams",
    "OneClassSvm",
    "ocsvm_fit",
    "SupportVectorMachine",
    "SvmParams",
    "svm_fit",
    "predict_proba",
    "predict_label",
    "classifier_from_dict",
]
