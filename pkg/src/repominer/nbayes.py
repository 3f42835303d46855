"""Multinomial Naive Bayes: training, prediction, stratified cross-validation.

The model keeps class log-priors and Laplace-smoothed per-slot
log-likelihoods. Ties at prediction time resolve to the benign class,
which keeps malware-class precision conservative.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from math import log
from pathlib import Path

import numpy as np

from .featurize import BENIGN, CLASSES, DegenerateCorpus, FeatureVector, MALWARE


class InvalidAlpha(ValueError):
    """Smoothing constant must be strictly positive."""


class WidthMismatch(ValueError):
    """Vector width differs from the model's feature width."""


class TooFewExamples(ValueError):
    """Not enough examples for the requested fold count."""


class VocabularyMismatch(ValueError):
    """Persisted model was trained against a different vocabulary."""


@dataclass
class NaiveBayesModel:
    classes: tuple[str, str]
    log_prior: np.ndarray        # shape (2,)
    log_likelihood: np.ndarray   # shape (2, width)
    alpha: float
    vocabulary_sha: str = ""
    config_hash: str = ""

    @property
    def width(self) -> int:
        return self.log_likelihood.shape[1]

    def to_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "log_prior": self.log_prior.tolist(),
            "log_likelihood": self.log_likelihood.tolist(),
            "alpha": self.alpha,
            "vocabulary_sha": self.vocabulary_sha,
            "config_hash": self.config_hash,
        }

    def save(self, path: Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: Path, expected_vocabulary_sha: str | None = None) -> "NaiveBayesModel":
        raw = json.loads(Path(path).read_text())
        model = cls(
            classes=tuple(raw["classes"]),
            log_prior=np.asarray(raw["log_prior"], dtype=float),
            log_likelihood=np.asarray(raw["log_likelihood"], dtype=float),
            alpha=float(raw["alpha"]),
            vocabulary_sha=raw.get("vocabulary_sha", ""),
            config_hash=raw.get("config_hash", ""),
        )
        if expected_vocabulary_sha is not None and model.vocabulary_sha != expected_vocabulary_sha:
            raise VocabularyMismatch(
                f"model at {path} was trained against vocabulary {model.vocabulary_sha[:12]}..., "
                f"current vocabulary is {expected_vocabulary_sha[:12]}..."
            )
        return model


def train(examples, alpha: float = 1.0) -> NaiveBayesModel:
    """Fit priors and smoothed multinomial likelihoods from labeled vectors.

    log_prior_c = ln(n_c / n); log_likelihood_{c,i} =
    ln((count_{c,i} + alpha) / (sum_j count_{c,j} + alpha * W)).
    """
    if not alpha > 0:
        raise InvalidAlpha(f"alpha must be > 0, got {alpha}")
    examples = list(examples)
    labels = {label for _, label in examples}
    if not labels >= set(CLASSES):
        raise DegenerateCorpus(f"need both classes to train, got {sorted(labels)}")
    width = len(examples[0][0].values)
    for vec, _ in examples:
        if len(vec.values) != width:
            raise WidthMismatch(f"vector {vec.repo_name!r} has width {len(vec.values)}, expected {width}")

    n = len(examples)
    log_prior = np.empty(2)
    log_likelihood = np.empty((2, width))
    for ci, cls in enumerate(CLASSES):
        class_vectors = [vec.values for vec, label in examples if label == cls]
        log_prior[ci] = log(len(class_vectors) / n)
        totals = np.sum(class_vectors, axis=0)
        denom = totals.sum() + alpha * width
        log_likelihood[ci] = np.log((totals + alpha) / denom)
    return NaiveBayesModel(
        classes=CLASSES, log_prior=log_prior, log_likelihood=log_likelihood, alpha=alpha
    )


def predict(model: NaiveBayesModel, vector: FeatureVector) -> tuple[str, dict[str, float]]:
    """Argmax of log_prior_c + sum_i v_i * log_likelihood_{c,i}; ties go benign."""
    values = np.asarray(vector.values, dtype=float)
    if values.shape != (model.width,):
        raise WidthMismatch(f"vector width {values.shape[0]} != model width {model.width}")
    posteriors = model.log_prior + model.log_likelihood @ values
    by_class = {cls: float(posteriors[i]) for i, cls in enumerate(model.classes)}
    if by_class[MALWARE] > by_class[BENIGN]:
        return MALWARE, by_class
    return BENIGN, by_class


@dataclass
class ClassMetrics:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    degenerate: bool = False

    def to_dict(self) -> dict:
        return self.__dict__.copy()


@dataclass
class EvalReport:
    n: int
    accuracy: float
    per_class: dict[str, ClassMetrics]
    folds: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "accuracy": self.accuracy,
            "per_class": {cls: m.to_dict() for cls, m in self.per_class.items()},
            "folds": self.folds,
        }


def compute_metrics(confusion: dict[str, dict[str, int]]) -> dict[str, ClassMetrics]:
    """Precision/recall/F1 per class; a zero denominator yields 0 plus a flag."""
    out = {}
    for cls, counts in confusion.items():
        m = ClassMetrics(tp=counts["tp"], fp=counts["fp"], tn=counts["tn"], fn=counts["fn"])
        if m.tp + m.fp > 0:
            m.precision = m.tp / (m.tp + m.fp)
        else:
            m.degenerate = True
        if m.tp + m.fn > 0:
            m.recall = m.tp / (m.tp + m.fn)
        else:
            m.degenerate = True
        if m.precision + m.recall > 0:
            m.f1 = 2 * m.precision * m.recall / (m.precision + m.recall)
        out[cls] = m
    return out


def stratified_folds(labels: list[str], folds: int, seed: int) -> list[list[int]]:
    """Deal indices of each class round-robin into seeded, shuffled folds."""
    rng = random.Random(seed)
    buckets: list[list[int]] = [[] for _ in range(folds)]
    for cls in CLASSES:
        indices = [i for i, label in enumerate(labels) if label == cls]
        rng.shuffle(indices)
        for pos, idx in enumerate(indices):
            buckets[pos % folds].append(idx)
    return buckets


def cross_validate(examples, folds: int = 10, alpha: float = 1.0, seed: int = 0) -> EvalReport:
    """Stratified k-fold evaluation with pooled confusion counts."""
    examples = list(examples)
    if folds < 2:
        raise TooFewExamples(f"folds must be >= 2, got {folds}")
    if len(examples) < folds:
        raise TooFewExamples(f"{len(examples)} examples cannot fill {folds} folds")
    labels = [label for _, label in examples]
    buckets = stratified_folds(labels, folds, seed)

    pooled = {cls: {"tp": 0, "fp": 0, "tn": 0, "fn": 0} for cls in CLASSES}
    fold_summaries = []
    for fold_id, test_idx in enumerate(buckets):
        test_set = set(test_idx)
        train_part = [ex for i, ex in enumerate(examples) if i not in test_set]
        model = train(train_part, alpha=alpha)
        fold_counts = {cls: {"tp": 0, "fp": 0, "tn": 0, "fn": 0} for cls in CLASSES}
        for i in sorted(test_set):
            vec, truth = examples[i]
            predicted, _ = predict(model, vec)
            for cls in CLASSES:
                if truth == cls and predicted == cls:
                    key = "tp"
                elif truth != cls and predicted == cls:
                    key = "fp"
                elif truth == cls and predicted != cls:
                    key = "fn"
                else:
                    key = "tn"
                fold_counts[cls][key] += 1
                pooled[cls][key] += 1
        fold_metrics = compute_metrics(fold_counts)
        fold_summaries.append(
            {
                "fold": fold_id,
                "test_size": len(test_set),
                "per_class": {cls: m.to_dict() for cls, m in fold_metrics.items()},
            }
        )

    per_class = compute_metrics(pooled)
    any_cls = pooled[MALWARE]
    n = sum(any_cls.values())
    accuracy = (any_cls["tp"] + any_cls["tn"]) / n if n else 0.0
    return EvalReport(n=n, accuracy=accuracy, per_class=per_class, folds=fold_summaries)
