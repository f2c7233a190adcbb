"""Balanced dataset construction and class-preserving splits."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .labeling import LABELS, rule_label


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledCorpus:
    rows: tuple[tuple[str, str], ...]  # (text, label)

    def __len__(self) -> int:
        return len(self.rows)

    def by_label(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {label: [] for label in LABELS}
        for text, label in self.rows:
            out[label].append(text)
        return out


@dataclass(frozen=True)
class SplitSpec:
    train: float = 0.8
    val: float = 0.1
    test: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if abs(self.train + self.val + self.test - 1.0) > 1e-9:
            raise DatasetError("split fractions must sum to 1")


def build_dataset(
    lines: Sequence[str], per_class: int, seed: int, labels: Sequence[str] = LABELS
) -> LabeledCorpus:
    """Rule-label a line-per-step corpus and sample a balanced dataset.

    Only lines matching exactly one vocabulary entry are eligible; the
    matched keyword stays in the text.  Duplicate lines count once.
    """
    pools: dict[str, list[str]] = {label: [] for label in labels}
    seen: set[str] = set()
    for line in lines:
        text = line.strip()
        if not text or text in seen:
            continue
        seen.add(text)
        label = rule_label(text)
        if label in pools:
            pools[label].append(text)
    rng = np.random.Generator(np.random.Philox(seed))
    rows: list[tuple[str, str]] = []
    for label in labels:
        pool = pools[label]
        if len(pool) < per_class:
            raise DatasetError(
                f"corpus has only {len(pool)} usable steps for {label!r}, need {per_class}"
            )
        picked = rng.choice(len(pool), size=per_class, replace=False)
        rows.extend((pool[i], label) for i in sorted(picked))
    return LabeledCorpus(rows=tuple(rows))


def split_dataset(
    data: LabeledCorpus, spec: SplitSpec
) -> tuple[LabeledCorpus, LabeledCorpus, LabeledCorpus]:
    """Shuffled train/val/test split with per-class counts preserved."""
    rng = np.random.Generator(np.random.Philox(spec.seed))
    train_rows: list[tuple[str, str]] = []
    val_rows: list[tuple[str, str]] = []
    test_rows: list[tuple[str, str]] = []
    for label, texts in data.by_label().items():
        if not texts:
            continue
        order = rng.permutation(len(texts))
        n = len(texts)
        n_train = round(spec.train * n)
        n_val = round(spec.val * n)
        for rank, idx in enumerate(order):
            row = (texts[idx], label)
            if rank < n_train:
                train_rows.append(row)
            elif rank < n_train + n_val:
                val_rows.append(row)
            else:
                test_rows.append(row)
    return LabeledCorpus(tuple(train_rows)), LabeledCorpus(tuple(val_rows)), LabeledCorpus(tuple(test_rows))


def write_dataset(data: LabeledCorpus, path: Union[str, Path]) -> None:
    with open(path, "w") as fh:
        fh.write("text\tlabel\n")
        for text, label in data.rows:
            fh.write(f"{text}\t{label}\n")


def read_dataset(path: Union[str, Path]) -> LabeledCorpus:
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DatasetError(f"dataset line {lineno}: expected 2 tab-separated fields")
        if lineno == 1 and parts == ["text", "label"]:
            continue
        rows.append((parts[0], parts[1]))
    return LabeledCorpus(rows=tuple(rows))


def read_steps(path: Union[str, Path]) -> list[tuple[str, str]]:
    """Steps to predict: (id, text) pairs.

    Accepts a document-profile JSON (the authoring pipeline's file format)
    or a TSV of step_id and text.
    """
    p = Path(path)
    if p.suffix == ".json":
        data = json.loads(p.read_text())
        return [(s["id"], s["text"]) for s in data["steps"]]
    out = []
    for lineno, line in enumerate(p.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DatasetError(f"steps line {lineno}: expected 2 tab-separated fields")
        if lineno == 1 and parts == ["step_id", "text"]:
            continue
        out.append((parts[0], parts[1]))
    return out
