"""Confusion-matrix evaluation with per-class precision and recall."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .generators import FAMILIES


@dataclass(frozen=True)
class EvalReport:
    """Per-class precision/recall over a fixed label set.

    ``confusion[i, j]`` counts items of true class ``i`` predicted as class
    ``j``. Precision and recall are ``None`` where the denominator is zero
    (class never predicted, or absent from the split).
    """

    labels: tuple[str, ...]
    confusion: np.ndarray
    precision: dict[str, float | None] = field(init=False)
    recall: dict[str, float | None] = field(init=False)

    def __post_init__(self):
        c = np.asarray(self.confusion, dtype=np.int64)
        if c.shape != (len(self.labels), len(self.labels)) or (c < 0).any():
            raise ValueError(f"confusion matrix shape {c.shape} does not fit "
                             f"{len(self.labels)} labels")
        c.flags.writeable = False
        object.__setattr__(self, "confusion", c)
        diag = np.diag(c)
        object.__setattr__(self, "precision", {
            label: (float(diag[j] / col) if col else None)
            for j, (label, col) in enumerate(zip(self.labels, c.sum(axis=0)))})
        object.__setattr__(self, "recall", {
            label: (float(diag[i] / row) if row else None)
            for i, (label, row) in enumerate(zip(self.labels, c.sum(axis=1)))})

    @property
    def accuracy(self) -> float | None:
        total = int(self.confusion.sum())
        return int(np.trace(self.confusion)) / total if total else None

    @property
    def macro_accuracy(self) -> float | None:
        """Mean per-class recall over the classes present in the split."""
        present = [v for v in self.recall.values() if v is not None]
        return float(np.mean(present)) if present else None

    def to_text(self) -> str:
        def cell(value):
            return "n/a" if value is None else f"{100 * value:.1f}%"

        width = max(8, *(len(label) + 2 for label in self.labels))
        rows = ["".join(["           "] + [label.rjust(width) for label in self.labels])]
        for name, values in (("Precision", self.precision), ("Recall", self.recall)):
            rows.append("".join([name.ljust(11)]
                                + [cell(values[label]).rjust(width)
                                   for label in self.labels]))
        rows.append(f"Accuracy   {cell(self.accuracy)}")
        return "\n".join(rows)

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "confusion": self.confusion.tolist(),
            "precision": {k: (None if v is None else float(v))
                          for k, v in self.precision.items()},
            "recall": {k: (None if v is None else float(v))
                       for k, v in self.recall.items()},
            "accuracy": self.accuracy,
            "macro_accuracy": self.macro_accuracy,
        }


def confusion_counts(y_true: np.ndarray, y_pred: np.ndarray,
                     labels: tuple[str, ...] = FAMILIES) -> np.ndarray:
    """Count matrix with rows as true labels, columns as predicted labels."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ValueError("y_true and y_pred must be 1-d arrays of equal length")
    lookup = {label: i for i, label in enumerate(labels)}
    k = len(labels)
    try:
        flat = np.array([k * lookup[str(t)] + lookup[str(p)]
                         for t, p in zip(y_true, y_pred)], dtype=np.int64)
    except KeyError as exc:
        raise ValueError(f"label {exc} not in {labels}") from exc
    return np.bincount(flat, minlength=k * k).reshape(k, k)


def evaluate(clf, X, y, labels: tuple[str, ...] = FAMILIES) -> EvalReport:
    """Predict ``X`` with a fitted classifier and score against ``y``."""
    y_pred = clf.predict(X)
    return EvalReport(labels=tuple(labels),
                      confusion=confusion_counts(y, y_pred, tuple(labels)))
