"""Instruction authoring: segmentation, editing, labeling, serialization.

A document profile is an ordered list of instruction steps, each optionally
tagged with the key object it belongs to.  Tags come from an exact-word
rule, from classifier predictions constrained to the available objects, or
from the author; edits invalidate tags so they can be re-predicted.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .geometry import Vec3

SOURCES = ("rule", "model", "manual", "unassigned")


class DocumentError(ValueError):
    """Raised when a document profile operation violates its contract."""


@dataclass(frozen=True)
class LabelVocabulary:
    labels: tuple[str, ...]
    aliases: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if any(l != l.lower() for l in self.labels):
            raise DocumentError("vocabulary labels must be lowercase")
        if len(set(self.labels)) != len(self.labels):
            raise DocumentError("vocabulary labels must be unique")
        for label in self.aliases:
            if label not in self.labels:
                raise DocumentError(f"alias defined for unknown label {label!r}")

    def terms(self, label: str) -> tuple[str, ...]:
        return (label,) + tuple(self.aliases.get(label, ()))


KITCHEN_VOCABULARY = LabelVocabulary(
    labels=(
        "blender",
        "cabinet",
        "coffee maker",
        "countertop",
        "fridge",
        "microwave",
        "oven",
        "sink",
        "toaster",
    ),
    aliases={"coffee maker": ("coffee machine",)},
)


def load_vocabulary(path: Union[str, Path]) -> LabelVocabulary:
    data = json.loads(Path(path).read_text())
    aliases = {k: tuple(v) for k, v in data.get("aliases", {}).items()}
    return LabelVocabulary(labels=tuple(data["labels"]), aliases=aliases)


@dataclass(frozen=True)
class InstructionStep:
    id: str
    text: str
    key_object: Optional[str] = None
    confidence: float = 0.0
    source: str = "unassigned"
    p_pref: Optional[Vec3] = None

    def __post_init__(self):
        if not self.text.strip():
            raise DocumentError(f"step {self.id!r} has empty text")
        if self.source not in SOURCES:
            raise DocumentError(f"step {self.id!r} has unknown source {self.source!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise DocumentError(f"step {self.id!r} confidence outside [0, 1]")


@dataclass(frozen=True)
class DocumentProfile:
    title: str
    steps: tuple[InstructionStep, ...]
    available_key_objects: frozenset[str]

    def __post_init__(self):
        ids = [s.id for s in self.steps]
        if len(set(ids)) != len(ids):
            raise DocumentError("duplicate step ids in document profile")
        for s in self.steps:
            if s.key_object is not None and s.key_object not in self.available_key_objects:
                raise DocumentError(
                    f"step {s.id!r} tagged {s.key_object!r}, not an available key object"
                )

    def step(self, step_id: str) -> InstructionStep:
        for s in self.steps:
            if s.id == step_id:
                return s
        raise DocumentError(f"no step {step_id!r} in profile {self.title!r}")

    def index_of(self, step_id: str) -> int:
        for i, s in enumerate(self.steps):
            if s.id == step_id:
                return i
        raise DocumentError(f"no step {step_id!r} in profile {self.title!r}")


# ---------------------------------------------------------------------------
# Segmentation

_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")


def _normalize(text: str) -> str:
    return " ".join(text.split())


def segment_document(text: str, mode: str = "paragraph") -> list[str]:
    """Split raw instruction text into step texts.

    Paragraph mode cuts at blank lines; sentence mode additionally cuts at
    sentence terminators followed by whitespace (decimal points like "1.5"
    never match, having no trailing whitespace).
    """
    if mode not in ("paragraph", "sentence"):
        raise DocumentError(f"unknown segmentation mode {mode!r}")
    if not text.strip():
        raise DocumentError("document text is empty")
    paragraphs = [_normalize(p) for p in re.split(r"\n\s*\n", text) if p.strip()]
    if mode == "paragraph":
        return paragraphs
    out: list[str] = []
    for p in paragraphs:
        out.extend(s for s in _SENTENCE_SPLIT.split(p) if s.strip())
    return out


def new_profile(
    title: str,
    texts: Sequence[str],
    available: Iterable[str],
) -> DocumentProfile:
    steps = tuple(
        InstructionStep(id=f"s{i:02d}", text=_normalize(t)) for i, t in enumerate(texts, start=1)
    )
    if not steps:
        raise DocumentError("document has no steps")
    return DocumentProfile(title=title, steps=steps, available_key_objects=frozenset(available))


def _next_id(profile: DocumentProfile, offset: int = 0) -> str:
    numbers = [0]
    for s in profile.steps:
        m = re.fullmatch(r"s(\d+)", s.id)
        if m:
            numbers.append(int(m.group(1)))
    return f"s{max(numbers) + 1 + offset:02d}"


# ---------------------------------------------------------------------------
# Rule-based labeling

def _term_pattern(term: str) -> re.Pattern:
    words = [re.escape(w) for w in term.split()]
    return re.compile(r"\b" + r"\s+".join(words) + r"\b", re.IGNORECASE)


def rule_label(
    text: str, vocab: LabelVocabulary = KITCHEN_VOCABULARY
) -> tuple[Optional[str], frozenset[str]]:
    """Label from an exact whole-word vocabulary match.

    Aliases count as their canonical label.  A label is returned only when
    exactly one distinct vocabulary entry matches; the full match set is
    always reported.
    """
    matched = frozenset(
        label
        for label in vocab.labels
        if any(_term_pattern(term).search(text) for term in vocab.terms(label))
    )
    if len(matched) == 1:
        return next(iter(matched)), matched
    return None, matched


def author_profile(
    title: str,
    text: str,
    vocab: LabelVocabulary = KITCHEN_VOCABULARY,
    mode: str = "paragraph",
    available: Optional[Iterable[str]] = None,
) -> DocumentProfile:
    """Segment text and apply rule labels restricted to available objects."""
    availset = frozenset(available) if available is not None else frozenset(vocab.labels)
    profile = new_profile(title, segment_document(text, mode), availset)
    steps = []
    for s in profile.steps:
        label, _ = rule_label(s.text, vocab)
        if label is not None and label in availset:
            s = replace(s, key_object=label, confidence=1.0, source="rule")
        steps.append(s)
    return replace(profile, steps=tuple(steps))


# ---------------------------------------------------------------------------
# Editing (all operations return a new profile)

def _invalidate(step: InstructionStep, text: str, keep_pref: bool = False) -> InstructionStep:
    return InstructionStep(
        id=step.id,
        text=text,
        key_object=None,
        confidence=0.0,
        source="unassigned",
        p_pref=step.p_pref if keep_pref else None,
    )


def edit_text(profile: DocumentProfile, step_id: str, new_text: str) -> DocumentProfile:
    idx = profile.index_of(step_id)
    step = profile.steps[idx]
    new_text = _normalize(new_text)
    if not new_text:
        raise DocumentError("edited step text is empty")
    if new_text == step.text:
        return profile
    steps = list(profile.steps)
    steps[idx] = _invalidate(step, new_text, keep_pref=True)
    return replace(profile, steps=tuple(steps))


def split_step(profile: DocumentProfile, step_id: str, at: int) -> DocumentProfile:
    idx = profile.index_of(step_id)
    step = profile.steps[idx]
    head, tail = _normalize(step.text[:at]), _normalize(step.text[at:])
    if not head or not tail:
        raise DocumentError(f"split of step {step_id!r} at {at} leaves an empty half")
    first = InstructionStep(id=_next_id(profile), text=head)
    second = InstructionStep(id=_next_id(profile, offset=1), text=tail)
    steps = list(profile.steps)
    steps[idx : idx + 1] = [first, second]
    return replace(profile, steps=tuple(steps))


def merge_steps(profile: DocumentProfile, first_id: str, second_id: str) -> DocumentProfile:
    i, j = profile.index_of(first_id), profile.index_of(second_id)
    if j != i + 1:
        raise DocumentError(f"steps {first_id!r} and {second_id!r} are not adjacent")
    merged = InstructionStep(
        id=_next_id(profile),
        text=profile.steps[i].text + " " + profile.steps[j].text,
    )
    steps = list(profile.steps)
    steps[i : j + 1] = [merged]
    return replace(profile, steps=tuple(steps))


def delete_step(profile: DocumentProfile, step_id: str) -> DocumentProfile:
    idx = profile.index_of(step_id)
    if len(profile.steps) == 1:
        raise DocumentError("deleting the only step would leave an empty profile")
    steps = list(profile.steps)
    del steps[idx]
    return replace(profile, steps=tuple(steps))


def assign_key_object(
    profile: DocumentProfile, step_id: str, label: Optional[str], source: str = "manual"
) -> DocumentProfile:
    if label is not None and label not in profile.available_key_objects:
        raise DocumentError(f"{label!r} is not an available key object")
    idx = profile.index_of(step_id)
    steps = list(profile.steps)
    steps[idx] = replace(
        steps[idx],
        key_object=label,
        confidence=1.0 if label is not None else 0.0,
        source=source if label is not None else "unassigned",
    )
    return replace(profile, steps=tuple(steps))


# ---------------------------------------------------------------------------
# Classifier predictions

Predictions = Mapping[str, Sequence[tuple[str, float]]]


def apply_predictions(profile: DocumentProfile, predictions: Predictions) -> DocumentProfile:
    """Fill unassigned/model steps with the best available predicted label.

    The highest-confidence label that is also an available key object wins;
    rule and manual assignments are never overwritten.
    """
    if not profile.available_key_objects:
        raise DocumentError("profile has no available key objects")
    steps = []
    for s in profile.steps:
        if s.source in ("unassigned", "model") and s.id in predictions:
            ranked = sorted(predictions[s.id], key=lambda lc: (-lc[1], lc[0]))
            chosen = next(
                ((label, conf) for label, conf in ranked if label in profile.available_key_objects),
                None,
            )
            if chosen is not None:
                s = replace(s, key_object=chosen[0], confidence=chosen[1], source="model")
        steps.append(s)
    return replace(profile, steps=tuple(steps))


def read_predictions_tsv(path: Union[str, Path]) -> dict[str, list[tuple[str, float]]]:
    """Parse ranked predictions: step_id, label, confidence per line."""
    out: dict[str, list[tuple[str, float]]] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise DocumentError(f"predictions line {lineno}: expected 3 tab-separated fields")
        step_id, label, conf = parts
        if lineno == 1 and (step_id, label, conf) == ("step_id", "label", "confidence"):
            continue
        try:
            value = float(conf)
        except ValueError as exc:
            raise DocumentError(f"predictions line {lineno}: bad confidence {conf!r}") from exc
        out.setdefault(step_id, []).append((label, value))
    return out


# ---------------------------------------------------------------------------
# Profile files

def dump_document_profile(profile: DocumentProfile) -> str:
    data = {
        "title": profile.title,
        "available_key_objects": sorted(profile.available_key_objects),
        "steps": [
            {
                "id": s.id,
                "text": s.text,
                "key_object": s.key_object,
                "confidence": s.confidence,
                "source": s.source,
                "pref_pos": list(s.p_pref.as_tuple()) if s.p_pref else None,
            }
            for s in profile.steps
        ],
    }
    return json.dumps(data, indent=2)


def load_document_profile(raw: Union[bytes, str]) -> DocumentProfile:
    try:
        data = json.loads(raw)
        steps = tuple(
            InstructionStep(
                id=s["id"],
                text=s["text"],
                key_object=s["key_object"],
                confidence=float(s["confidence"]),
                source=s["source"],
                p_pref=Vec3.from_seq(s["pref_pos"]) if s.get("pref_pos") else None,
            )
            for s in data["steps"]
        )
        return DocumentProfile(
            title=data["title"],
            steps=steps,
            available_key_objects=frozenset(data["available_key_objects"]),
        )
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DocumentError(f"malformed document profile: {exc}") from exc


def read_document_profile(path: Union[str, Path]) -> DocumentProfile:
    return load_document_profile(Path(path).read_bytes())


def write_document_profile(profile: DocumentProfile, path: Union[str, Path]) -> None:
    Path(path).write_text(dump_document_profile(profile) + "\n")
