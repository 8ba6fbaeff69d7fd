"""Shared vocabulary: universal tags, language labels, tokens, sentences."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union


class CsposError(Exception):
    """Base class for every error raised by this package."""


class LabelMissing(CsposError, ValueError):
    pass


class ParseError(CsposError, ValueError):
    def __init__(self, path, lineno, content, reason):
        self.path = path
        self.lineno = lineno
        self.content = content
        super().__init__(f"{path}:{lineno}: {reason}: {content!r}")


class DuplicateId(CsposError, ValueError):
    pass


class EmptyTraining(CsposError, ValueError):
    pass


class BadOrder(EmptyTraining):
    pass


class EmptySentence(CsposError, ValueError):
    pass


class BadSpan(CsposError, IndexError):
    pass


class OutputMismatch(CsposError, ValueError):
    pass


class MissingResource(CsposError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class BadConfig(CsposError, ValueError):
    pass


class UPosTag(enum.Enum):
    """The 17 universal POS tags. Enumeration order is the global tie-break order."""

    NOUN = "NOUN"
    PROPN = "PROPN"
    VERB = "VERB"
    AUX = "AUX"
    ADJ = "ADJ"
    ADV = "ADV"
    PRON = "PRON"
    DET = "DET"
    ADP = "ADP"
    NUM = "NUM"
    CCONJ = "CCONJ"
    SCONJ = "SCONJ"
    PART = "PART"
    INTJ = "INTJ"
    PUNCT = "PUNCT"
    SYM = "SYM"
    X = "X"

    @classmethod
    def parse(cls, name: str) -> "UPosTag":
        try:
            return cls(name)
        except ValueError:
            raise ValueError(f"unknown universal tag {name!r}") from None

    def __str__(self):
        return self.value


TAG_ORDER = {t: i for i, t in enumerate(UPosTag)}


def sort_tags(tags: Iterable[UPosTag]) -> list[UPosTag]:
    return sorted(set(tags), key=TAG_ORDER.__getitem__)


class LangLabel(enum.Enum):
    L1 = "L1"
    L2 = "L2"
    OTHER_NE = "OTHER:NE"
    OTHER_FOREIGN = "OTHER:FW"
    OTHER_UNKNOWN = "OTHER:UNK"

    @classmethod
    def parse(cls, name: str) -> "LangLabel":
        try:
            return cls(name)
        except ValueError:
            raise ValueError(f"unknown language label {name!r}") from None

    @property
    def is_other(self) -> bool:
        return self not in (LangLabel.L1, LangLabel.L2)

    def __str__(self):
        return self.value


class PurityClass(enum.Enum):
    PURE_L1 = "PureL1"
    PURE_L2 = "PureL2"
    CODE_SWITCHED = "CodeSwitched"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class TaggedToken:
    text: str
    gold_lang: Optional[LangLabel] = None
    # a str here means an unmapped source-tagset tag (see tagmap.map_corpus)
    gold_tag: Union[UPosTag, str, None] = None

    def __post_init__(self):
        if not self.text or any(c.isspace() for c in self.text):
            raise ValueError(f"token text must be non-empty without whitespace: {self.text!r}")


@dataclass(frozen=True)
class Sentence:
    id: str
    tokens: tuple[TaggedToken, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise EmptySentence(f"sentence {self.id!r} has no tokens")

    def __len__(self):
        return len(self.tokens)

    @property
    def words(self) -> list[str]:
        return [t.text for t in self.tokens]

    @property
    def langs(self) -> list[Optional[LangLabel]]:
        return [t.gold_lang for t in self.tokens]

    @property
    def tags(self) -> list:
        return [t.gold_tag for t in self.tokens]


@dataclass(frozen=True)
class TaggerOutput:
    tags: tuple[UPosTag, ...]
    confidence: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "tags", tuple(self.tags))
        object.__setattr__(self, "confidence", tuple(float(c) for c in self.confidence))
        if len(self.tags) != len(self.confidence):
            raise OutputMismatch("tags and confidences differ in length")
        for c in self.confidence:
            if not 0.0 <= c <= 1.0:
                raise ValueError(f"confidence {c} outside [0, 1]")

    def __len__(self):
        return len(self.tags)


def purity_of(labels: Union[Sentence, Sequence[Optional[LangLabel]]]) -> PurityClass:
    """Classify a sentence from its token language labels.

    Accepts a Sentence (uses gold_lang) or a plain label sequence, e.g. LID output.
    OTHER:* labels never vote.
    """
    if isinstance(labels, Sentence):
        labels = labels.langs
    has_l1 = has_l2 = False
    for i, lab in enumerate(labels):
        if lab is None:
            raise LabelMissing(f"token {i} has no language label")
        has_l1 |= lab is LangLabel.L1
        has_l2 |= lab is LangLabel.L2
    if has_l1 and has_l2:
        return PurityClass.CODE_SWITCHED
    if has_l1:
        return PurityClass.PURE_L1
    if has_l2:
        return PurityClass.PURE_L2
    return PurityClass.INDETERMINATE
