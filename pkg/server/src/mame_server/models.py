"""Model artifacts: loading, prediction, and demo training.

Two artifact flavors are served:

* ``*.json`` — a plain linear model ``{"kind": "linear", "w": [...],
  "b": ..., "n_features": ...}`` (the protocol's reference model).
* anything else — a joblib-pickled scikit-learn estimator with a JSON
  sidecar ``<artifact>.meta.json`` carrying task, feature width, class
  count, and the training seed.

Classification models answer with the predicted probability of one
designated class, so every response is a single scalar per instance.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

REGRESSION = "regression"
CLASSIFICATION = "classification"


class ModelError(Exception):
    """Unloadable artifact or an invalid prediction request."""


@dataclass
class ServedModel:
    """A loaded artifact plus the serving configuration."""

    predictor: object  # sklearn estimator or (w, b) tuple
    kind: str  # "linear" or "sklearn"
    task: str
    n_features: int
    class_index: int | None = None
    n_classes: int | None = None

    def predict(self, instances: np.ndarray) -> np.ndarray:
        if instances.size == 0:
            return np.empty(0)
        if instances.shape[1] != self.n_features:
            raise ModelError(
                f"expected {self.n_features} features, got {instances.shape[1]}"
            )
        if self.kind == "linear":
            w, b = self.predictor
            return instances @ w + b
        if self.task == CLASSIFICATION:
            idx = self.class_index if self.class_index is not None else 0
            proba = self.predictor.predict_proba(instances)
            if not 0 <= idx < proba.shape[1]:
                raise ModelError(
                    f"class_index {idx} out of range for "
                    f"{proba.shape[1]} classes"
                )
            return proba[:, idx]
        return np.asarray(self.predictor.predict(instances), dtype=float)


def _meta_path(model_path: str | Path) -> Path:
    return Path(str(model_path) + ".meta.json")


def load_model(
    model_path: str | Path, class_index: int | None = None
) -> ServedModel:
    """Load a JSON linear artifact or a joblib estimator with its sidecar."""
    path = Path(model_path)
    if not path.exists():
        raise ModelError(f"model artifact not found: {path}")
    if path.suffix == ".json":
        spec = json.loads(path.read_text())
        if spec.get("kind") != "linear":
            raise ModelError(f"unsupported JSON artifact kind {spec.get('kind')!r}")
        w = np.asarray(spec["w"], dtype=float)
        return ServedModel(
            predictor=(w, float(spec["b"])),
            kind="linear",
            task=REGRESSION,
            n_features=int(spec.get("n_features", w.size)),
        )
    import joblib

    meta_file = _meta_path(path)
    if not meta_file.exists():
        raise ModelError(f"missing sidecar {meta_file}")
    meta = json.loads(meta_file.read_text())
    predictor = joblib.load(path)
    idx = class_index if class_index is not None else meta.get("class_index")
    return ServedModel(
        predictor=predictor,
        kind="sklearn",
        task=meta["task"],
        n_features=int(meta["n_features"]),
        class_index=idx,
        n_classes=meta.get("n_classes"),
    )


def _read_csv(path: str | Path, target_col: str | None):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ModelError(f"{path}: need a header row and data")
    header, data = rows[0], rows[1:]
    if target_col is None:
        target_col = header[-1]
    if target_col not in header:
        raise ModelError(f"target column {target_col!r} not in header")
    t = header.index(target_col)
    try:
        M = np.array([[float(c) for c in row] for row in data])
    except ValueError as exc:
        raise ModelError(f"{path}: non-numeric cell ({exc})") from exc
    X = np.delete(M, t, axis=1)
    y = M[:, t]
    return X, y


def train_demo(
    dataset_csv: str | Path,
    task: str,
    out_model_path: str | Path,
    model_type: str = "forest",
    target_col: str | None = None,
    seed: int = 0,
) -> Path:
    """Train a demo forest or small multilayer network and save the artifact.

    Writes ``out_model_path`` (joblib) plus the metadata sidecar and returns
    the artifact path. Retraining with the same seed reproduces the sidecar
    byte for byte.
    """
    import joblib

    if task not in (REGRESSION, CLASSIFICATION):
        raise ModelError(f"unknown task {task!r}")
    X, y = _read_csv(dataset_csv, target_col)
    if model_type == "forest":
        from sklearn.ensemble import (
            RandomForestClassifier,
            RandomForestRegressor,
        )

        cls = (
            RandomForestRegressor
            if task == REGRESSION
            else RandomForestClassifier
        )
        model = cls(n_estimators=200, random_state=seed)
    elif model_type == "mlp":
        from sklearn.neural_network import MLPClassifier, MLPRegressor

        cls = MLPRegressor if task == REGRESSION else MLPClassifier
        model = cls(
            hidden_layer_sizes=(32, 32), random_state=seed, max_iter=2000
        )
    else:
        raise ModelError(f"unknown model type {model_type!r}")
    if task == CLASSIFICATION:
        y = y.astype(int)
    model.fit(X, y)
    out = Path(out_model_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    joblib.dump(model, out)
    meta = {
        "task": task,
        "model_type": model_type,
        "n_features": int(X.shape[1]),
        "n_classes": int(np.unique(y).size) if task == CLASSIFICATION else None,
        "class_index": 0 if task == CLASSIFICATION else None,
        "seed": seed,
    }
    _meta_path(out).write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")
    return out
