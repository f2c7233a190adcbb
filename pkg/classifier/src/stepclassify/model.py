"""Bag-of-words linear classifier over the key-object labels."""

from __future__ import annotations

import json
import pickle
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

from sklearn.feature_extraction.text import CountVectorizer
from sklearn.linear_model import LogisticRegression
from sklearn.pipeline import Pipeline

from .dataset import LabeledCorpus
from .labeling import LABELS


@dataclass
class Metrics:
    accuracy: float
    confusion: list[list[int]]  # rows: true label, cols: predicted, label order
    labels: list[str]

    def to_json(self) -> str:
        return json.dumps(
            {"accuracy": self.accuracy, "labels": self.labels, "confusion": self.confusion},
            indent=2,
        )


def train_model(train: LabeledCorpus, seed: int = 0) -> Pipeline:
    texts = [t for t, _ in train.rows]
    labels = [l for _, l in train.rows]
    if len(set(labels)) < 2:
        raise ValueError("training data must contain at least two classes")
    model = Pipeline(
        [
            ("bow", CountVectorizer(lowercase=True)),
            ("clf", LogisticRegression(max_iter=2000, random_state=seed)),
        ]
    )
    model.fit(texts, labels)
    return model


def evaluate_model(model: Pipeline, test: LabeledCorpus) -> Metrics:
    texts = [t for t, _ in test.rows]
    truth = [l for _, l in test.rows]
    predicted = model.predict(texts)
    index = {label: i for i, label in enumerate(LABELS)}
    confusion = [[0] * len(LABELS) for _ in LABELS]
    correct = 0
    for t, p in zip(truth, predicted):
        confusion[index[t]][index[p]] += 1
        correct += int(t == p)
    return Metrics(
        accuracy=correct / len(truth) if truth else 0.0,
        confusion=confusion,
        labels=list(LABELS),
    )


def rank_labels(model: Pipeline, text: str) -> list[tuple[str, float]]:
    """All labels ordered by probability, which sums to 1."""
    probs = model.predict_proba([text])[0]
    ranked = sorted(zip(model.classes_, probs), key=lambda lp: (-lp[1], lp[0]))
    return [(str(label), float(p)) for label, p in ranked]


def predict_tsv(model: Pipeline, steps: Sequence[tuple[str, str]]) -> str:
    """Ranked predictions in the TSV protocol the authoring pipeline reads."""
    if set(model.classes_) != set(LABELS):
        raise ValueError(
            f"model vocabulary {sorted(model.classes_)} does not match the expected labels"
        )
    lines = ["step_id\tlabel\tconfidence"]
    for step_id, text in steps:
        for label, p in rank_labels(model, text):
            lines.append(f"{step_id}\t{label}\t{p!r}")
    return "\n".join(lines) + "\n"


def save_model(model: Pipeline, path: Union[str, Path]) -> None:
    with open(path, "wb") as fh:
        pickle.dump(model, fh)


def load_model(path: Union[str, Path]) -> Pipeline:
    with open(path, "rb") as fh:
        model = pickle.load(fh)
    if not hasattr(model, "predict_proba"):
        raise ValueError(f"{path} does not hold a probability classifier")
    return model
