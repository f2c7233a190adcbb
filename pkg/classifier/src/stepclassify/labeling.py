"""Exact-word rule labeling over the kitchen key-object vocabulary.

A step is labeled only when exactly one distinct vocabulary entry occurs as
a whole word (multi-word entries match as phrases, aliases count as their
canonical label).  Anything else abstains, mirroring the labeling protocol
of the authoring pipeline that consumes our predictions.
"""

from __future__ import annotations

import re
from typing import Optional

LABELS = (
    "blender",
    "cabinet",
    "coffee maker",
    "countertop",
    "fridge",
    "microwave",
    "oven",
    "sink",
    "toaster",
)

ALIASES = {"coffee maker": ("coffee machine",)}


def _pattern(term: str) -> re.Pattern:
    words = [re.escape(w) for w in term.split()]
    return re.compile(r"\b" + r"\s+".join(words) + r"\b", re.IGNORECASE)


_PATTERNS = {
    label: [_pattern(label)] + [_pattern(a) for a in ALIASES.get(label, ())] for label in LABELS
}


def matched_labels(text: str) -> frozenset[str]:
    return frozenset(
        label for label, pats in _PATTERNS.items() if any(p.search(text) for p in pats)
    )


def rule_label(text: str) -> Optional[str]:
    """The single matching label, or None when zero or several match."""
    matches = matched_labels(text)
    if len(matches) == 1:
        return next(iter(matches))
    return None
