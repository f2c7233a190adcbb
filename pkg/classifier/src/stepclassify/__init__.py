"""Key-object step classifier: balanced dataset building, training, ranked predictions."""

from .dataset import (
    DatasetError,
    LabeledCorpus,
    SplitSpec,
    build_dataset,
    read_dataset,
    read_steps,
    split_dataset,
    write_dataset,
)
from .labeling import ALIASES, LABELS, matched_labels, rule_label
from .model import (
    Metrics,
    evaluate_model,
    load_model,
    predict_tsv,
    rank_labels,
    save_model,
    train_model,
)

__version__ = "0.1.0"
