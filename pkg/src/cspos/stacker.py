"""Stacked combination of two taggers' outputs (tags + confidences).

The learner is an averaged online multiclass classifier that updates whenever
the gold class fails to beat the best rival by a unit margin.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import (
    CsposError,
    EmptyTraining,
    OutputMismatch,
    TAG_ORDER,
    TaggerOutput,
    UPosTag,
    sort_tags,
)

FORMAT_VERSION = 1
NONE = "NONE"
LOW_MID = 0.5
MID_HIGH = 0.8


class TooFewSentences(CsposError, ValueError):
    pass


def confidence_bin(c: float) -> str:
    if c < LOW_MID:
        return "low"
    if c < MID_HIGH:
        return "mid"
    return "high"


def build_features(out1: TaggerOutput, out2: TaggerOutput, index: int,
                   context: bool = True) -> frozenset:
    """Indicator features for one token.

    With ``context=False`` only the two tags, their agreement, their
    conjunction and the confidence buckets are produced.
    """
    if len(out1) != len(out2):
        raise OutputMismatch(f"tagger outputs differ in length ({len(out1)} vs {len(out2)})")
    if not 0 <= index < len(out1):
        raise IndexError(f"token index {index} out of range")
    t1, t2 = out1.tags[index].value, out2.tags[index].value
    feats = {
        f"t1={t1}",
        f"t2={t2}",
        f"t1t2={t1}|{t2}",
        f"agree={int(t1 == t2)}",
        f"c1_bin={confidence_bin(out1.confidence[index])}",
        f"c2_bin={confidence_bin(out2.confidence[index])}",
    }
    if context:
        n = len(out1)
        for name, out in (("t1", out1), ("t2", out2)):
            prev = out.tags[index - 1].value if index > 0 else NONE
            nxt = out.tags[index + 1].value if index + 1 < n else NONE
            feats.add(f"prev_{name}={prev}")
            feats.add(f"next_{name}={nxt}")
    return frozenset(feats)


def sentence_features(out1, out2, context=True) -> list[frozenset]:
    return [build_features(out1, out2, i, context) for i in range(len(out1))]


def make_folds(items: Sequence, k: int, seed: int) -> list[list]:
    """Seeded shuffle then contiguous split into ``k`` folds differing in size by <= 1.

    Larger folds come last.
    """
    if k < 2:
        raise ValueError("need at least 2 folds")
    if len(items) < k:
        raise TooFewSentences(f"{len(items)} sentences cannot fill {k} folds")
    order = list(range(len(items)))
    random.Random(seed).shuffle(order)
    q, r = divmod(len(items), k)
    sizes = [q] * (k - r) + [q + 1] * r
    folds, pos = [], 0
    for size in sizes:
        folds.append([items[i] for i in order[pos:pos + size]])
        pos += size
    return folds


@dataclass
class StackModel:
    classes: list[UPosTag]
    weights: dict[str, dict[str, float]]
    epochs: int = 0
    seed: int = 0
    context: bool = True
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self._col = {c.value: j for j, c in enumerate(self.classes)}
        self._row = {f: i for i, f in enumerate(sorted(self.weights))}
        self._w = np.zeros((len(self._row), len(self.classes)))
        for f, i in self._row.items():
            for c, v in self.weights[f].items():
                if c in self._col:
                    self._w[i, self._col[c]] = v

    def score_vector(self, features: Iterable[str]) -> np.ndarray:
        rows = [self._row[f] for f in features if f in self._row]
        if not rows:
            return np.zeros(len(self.classes))
        return self._w[rows].sum(axis=0)

    def scores(self, features: Iterable[str]) -> dict[UPosTag, float]:
        return dict(zip(self.classes, self.score_vector(features).tolist()))

    def to_dict(self) -> dict:
        return {
            "format": "cspos.stacker",
            "version": FORMAT_VERSION,
            "classes": [c.value for c in self.classes],
            "epochs": self.epochs,
            "seed": self.seed,
            "context": self.context,
            "meta": self.meta,
            "weights": {f: dict(sorted(r.items())) for f, r in sorted(self.weights.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StackModel":
        if d.get("format") != "cspos.stacker" or d.get("version") != FORMAT_VERSION:
            raise ValueError("not a version-1 stacker model")
        return cls([UPosTag(c) for c in d["classes"]], d["weights"], d["epochs"],
                   d["seed"], d["context"], d.get("meta", {}))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "StackModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def predict(model: StackModel, features) -> UPosTag:
    """Highest-scoring class; ties go to the class earliest in UPosTag order."""
    return model.classes[int(np.argmax(model.score_vector(features)))]


def train_stacker(labeled, epochs: int = 10, seed: int = 0, margin: float = 1.0,
                  context: bool = True) -> StackModel:
    """Train on ``(features, gold_tag)`` pairs; returns averaged weights."""
    labeled = list(labeled)
    if not labeled:
        raise EmptyTraining("no stacker training examples")
    classes = sort_tags(g for _, g in labeled)
    col = {c: j for j, c in enumerate(classes)}
    names = sorted({f for feats, _ in labeled for f in feats})
    row = {f: i for i, f in enumerate(names)}
    data = [(np.array(sorted(row[f] for f in feats), dtype=np.int64), col[g]) for feats, g in labeled]

    C = len(classes)
    w = np.zeros((len(names), C))
    # averaging trick: avg = w - u / steps, u accumulates step-weighted updates
    u = np.zeros_like(w)
    step = 1
    rng = random.Random(seed)
    order = list(range(len(data)))
    for _ in range(epochs):
        rng.shuffle(order)
        for i in order:
            ids, gold = data[i]
            if C > 1:
                sc = w[ids].sum(axis=0)
                gold_score = sc[gold]
                sc[gold] = -np.inf
                rival = int(np.argmax(sc))
                if gold_score - sc[rival] < margin:
                    w[ids, gold] += 1.0
                    w[ids, rival] -= 1.0
                    u[ids, gold] += step
                    u[ids, rival] -= step
            step += 1
    avg = w - u / step
    weights = {}
    for f, i in row.items():
        r = {classes[j].value: float(avg[i, j]) for j in range(C) if avg[i, j] != 0.0}
        if r:
            weights[f] = r
    return StackModel(classes, weights, epochs, seed, context)


def predict_sentence(model: StackModel, out1: TaggerOutput, out2: TaggerOutput) -> TaggerOutput:
    feats = sentence_features(out1, out2, model.context)
    tags = tuple(predict(model, f) for f in feats)
    return TaggerOutput(tags, (1.0,) * len(tags))
