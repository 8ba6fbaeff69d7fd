"""The seven tagging conditions over a bundle of trained resources.

COMB1  LID, then each maximal same-language chunk tagged alone by its tagger.
COMB2  both taggers on the whole sentence, then per token pick by LID label.
COMB3  both taggers on the whole sentence, per token keep the more confident.
COMB4  both taggers on the whole sentence, a trained stacker picks the tag.
INT1-3 one tagger trained on CS data, merged monolingual data, or both.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from .core import (
    EmptyTraining,
    LangLabel,
    MissingResource,
    Sentence,
    TaggerOutput,
)
from .corpus import Corpus, concat
from .lid import LidModel, label_sentence
from .stacker import StackModel, predict_sentence
from .tagger import TaggerModel, TagSpan, tag_span, viterbi_tag


class ConditionId(enum.Enum):
    COMB1 = "COMB1"
    COMB2 = "COMB2"
    COMB3 = "COMB3"
    COMB4 = "COMB4"
    INT1 = "INT1"
    INT2 = "INT2"
    INT3 = "INT3"

    @classmethod
    def parse(cls, name: str) -> "ConditionId":
        try:
            return cls(name.upper())
        except ValueError:
            raise ValueError(f"unknown condition {name!r}; expected one of "
                             f"{', '.join(c.value for c in cls)}") from None

    @property
    def is_integrated(self) -> bool:
        return self.value.startswith("INT")


# row labels used in reports
CONDITION_NAMES = {
    ConditionId.COMB1: "COMB1:LID-MonoLT",
    ConditionId.COMB2: "COMB2:MonoLT-LID",
    ConditionId.COMB3: "COMB3:MonoLT-Conf",
    ConditionId.COMB4: "COMB4:MonoLT-SVM",
    ConditionId.INT1: "INT1:CSD",
    ConditionId.INT2: "INT2:AllMonoData",
    ConditionId.INT3: "INT3:AllMonoData+CSD",
}

BUNDLE_FILES = {
    "tagger_l1": "tagger_l1.json",
    "tagger_l2": "tagger_l2.json",
    "lid": "lid.json",
    "stacker": "stacker.json",
    ConditionId.INT1: "int1.json",
    ConditionId.INT2: "int2.json",
    ConditionId.INT3: "int3.json",
}


@dataclass
class ResourceBundle:
    tagger_l1: TaggerModel
    tagger_l2: TaggerModel
    lid: Optional[LidModel] = None
    stacker: Optional[StackModel] = None
    integrated_taggers: dict = field(default_factory=dict)
    # where OTHER-labelled tokens go in COMB1/COMB2
    other_to: LangLabel = LangLabel.L1

    def save(self, directory) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        self.tagger_l1.save(d / BUNDLE_FILES["tagger_l1"])
        self.tagger_l2.save(d / BUNDLE_FILES["tagger_l2"])
        if self.lid is not None:
            self.lid.save(d / BUNDLE_FILES["lid"])
        if self.stacker is not None:
            self.stacker.save(d / BUNDLE_FILES["stacker"])
        for cond, model in self.integrated_taggers.items():
            model.save(d / BUNDLE_FILES[cond])

    @classmethod
    def load(cls, directory) -> "ResourceBundle":
        d = Path(directory)
        for key in ("tagger_l1", "tagger_l2"):
            if not (d / BUNDLE_FILES[key]).exists():
                raise MissingResource(f"bundle {d} has no {BUNDLE_FILES[key]}")
        lid_path, stack_path = d / BUNDLE_FILES["lid"], d / BUNDLE_FILES["stacker"]
        ints = {c: TaggerModel.load(d / BUNDLE_FILES[c])
                for c in (ConditionId.INT1, ConditionId.INT2, ConditionId.INT3)
                if (d / BUNDLE_FILES[c]).exists()}
        return cls(
            TaggerModel.load(d / BUNDLE_FILES["tagger_l1"]),
            TaggerModel.load(d / BUNDLE_FILES["tagger_l2"]),
            LidModel.load(lid_path) if lid_path.exists() else None,
            StackModel.load(stack_path) if stack_path.exists() else None,
            ints,
        )


def _route(label, other_to):
    return other_to if label.is_other else label


def language_spans(labels, other_to=LangLabel.L1) -> list[TagSpan]:
    """Maximal runs of identical (routed) language labels."""
    spans = []
    start = 0
    routed = [_route(lab, other_to) for lab in labels]
    for i in range(1, len(routed) + 1):
        if i == len(routed) or routed[i] is not routed[start]:
            spans.append(TagSpan(start, i, routed[start]))
            start = i
    return spans


def _lid_labels(bundle, sentence, lid_labels):
    if lid_labels is not None:
        return list(lid_labels)
    if bundle.lid is None:
        raise MissingResource("COMB1/COMB2 need a language identifier in the bundle")
    return label_sentence(bundle.lid, sentence).labels


def comb1(bundle: ResourceBundle, sentence, lid_labels=None) -> TaggerOutput:
    labels = _lid_labels(bundle, sentence, lid_labels)
    tags, conf = [], []
    for span in language_spans(labels, bundle.other_to):
        model = bundle.tagger_l1 if span.lang is LangLabel.L1 else bundle.tagger_l2
        out = tag_span(model, sentence, span)
        tags.extend(out.tags)
        conf.extend(out.confidence)
    return TaggerOutput(tuple(tags), tuple(conf))


def comb2(bundle, sentence, lid_labels=None, outputs=None) -> TaggerOutput:
    out1, out2 = outputs or (viterbi_tag(bundle.tagger_l1, sentence),
                             viterbi_tag(bundle.tagger_l2, sentence))
    labels = _lid_labels(bundle, sentence, lid_labels)
    pick = [(out1 if _route(lab, bundle.other_to) is LangLabel.L1 else out2, i)
            for i, lab in enumerate(labels)]
    return TaggerOutput(tuple(o.tags[i] for o, i in pick), tuple(o.confidence[i] for o, i in pick))


def comb3(bundle, sentence, outputs=None, ties=None) -> TaggerOutput:
    """Per token, the tag of the more confident tagger; exact ties go to tagger_l1.

    ``ties`` (a one-element list) is incremented for every exact tie between
    disagreeing tags.
    """
    out1, out2 = outputs or (viterbi_tag(bundle.tagger_l1, sentence),
                             viterbi_tag(bundle.tagger_l2, sentence))
    tags, conf = [], []
    for t1, c1, t2, c2 in zip(out1.tags, out1.confidence, out2.tags, out2.confidence):
        if c2 > c1:
            tags.append(t2)
            conf.append(c2)
        else:
            if c1 == c2 and t1 is not t2 and ties is not None:
                ties[0] += 1
            tags.append(t1)
            conf.append(c1)
    return TaggerOutput(tuple(tags), tuple(conf))


def run_combined(bundle: ResourceBundle, strategy, sentence, lid_labels=None) -> TaggerOutput:
    """Run COMB1, COMB2 or COMB3 on one sentence.

    ``lid_labels`` substitutes an external (e.g. gold) language labelling.
    """
    strategy = ConditionId.parse(strategy) if isinstance(strategy, str) else strategy
    if strategy is ConditionId.COMB1:
        return comb1(bundle, sentence, lid_labels)
    if strategy is ConditionId.COMB2:
        return comb2(bundle, sentence, lid_labels)
    if strategy is ConditionId.COMB3:
        return comb3(bundle, sentence)
    raise ValueError(f"{strategy.value} is not a COMB1-3 strategy")


def run_stacked(bundle: ResourceBundle, sentence, outputs=None) -> TaggerOutput:
    """COMB4. Confidence is reported as 1.0: the stacker emits labels only."""
    if bundle.stacker is None:
        raise MissingResource("COMB4 needs a trained stacker in the bundle")
    out1, out2 = outputs or (viterbi_tag(bundle.tagger_l1, sentence),
                             viterbi_tag(bundle.tagger_l2, sentence))
    return predict_sentence(bundle.stacker, out1, out2)


def select_training_data(condition, mono_l1: Corpus, mono_l2: Corpus, cs: Corpus) -> Corpus:
    condition = ConditionId.parse(condition) if isinstance(condition, str) else condition
    if condition is ConditionId.INT1:
        parts = [cs]
    elif condition is ConditionId.INT2:
        parts = [mono_l1, mono_l2]
    elif condition is ConditionId.INT3:
        parts = [mono_l1, mono_l2, cs]
    else:
        raise ValueError(f"{condition.value} is not an integrated condition")
    out = concat(parts, condition.value)
    if not len(out):
        raise EmptyTraining(f"{condition.value} selects no training sentences")
    return out


def run_integrated(bundle: ResourceBundle, condition, sentence) -> TaggerOutput:
    condition = ConditionId.parse(condition) if isinstance(condition, str) else condition
    model = bundle.integrated_taggers.get(condition)
    if model is None:
        raise MissingResource(f"no {condition.value} tagger in the bundle")
    return viterbi_tag(model, sentence)


def run_condition(bundle: ResourceBundle, condition, sentence) -> TaggerOutput:
    condition = ConditionId.parse(condition) if isinstance(condition, str) else condition
    if condition is ConditionId.COMB4:
        return run_stacked(bundle, sentence)
    if condition.is_integrated:
        return run_integrated(bundle, condition, sentence)
    return run_combined(bundle, condition, sentence)
