"""First-order generative POS tagger.

Transitions P(tag | previous tag) with START/STOP and emissions P(word | tag)
are Witten-Bell smoothed. Unknown words are scored through a suffix model
built from rare training words with successive abstraction: the tag
distribution for the longest known suffix is interpolated with every shorter
one, weighted by the spread of the rare-word tag prior.

The model keeps raw counts only; all probability tables are derived from
them, which makes serialization exact and training deterministic.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import chain
from .core import (
    BadSpan,
    EmptySentence,
    EmptyTraining,
    LabelMissing,
    LangLabel,
    Sentence,
    TaggerOutput,
    UPosTag,
    sort_tags,
)

START = "<S>"
STOP = "</S>"
UNKNOWN_WORD = "<UNK>"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class TagSpan:
    start: int
    end: int
    lang: Optional[LangLabel] = None


class TaggerModel:
    def __init__(self, trans_counts, emit_counts, suffix_counts, suffix_max=4,
                 rare_threshold=2):
        self.trans_counts = trans_counts
        self.emit_counts = emit_counts
        self.suffix_counts = suffix_counts
        self.suffix_max = suffix_max
        self.rare_threshold = rare_threshold
        self.tags = sort_tags(UPosTag(t) for t in emit_counts)
        if not self.tags:
            raise EmptyTraining("tagger has no tags")
        self._build()
        self._emit_cache: dict[str, np.ndarray] = {}

    # -- derived tables -------------------------------------------------

    def _build(self):
        names = [t.value for t in self.tags]
        S = len(names)
        self.tag_index = {t: i for i, t in enumerate(self.tags)}

        # unigram over tags + STOP from transition targets (all counts > 0)
        uni = Counter()
        for row in self.trans_counts.values():
            uni.update(row)
        events = names + [STOP]
        total = sum(uni[e] for e in events)
        self.unigram = np.array([uni[e] / total for e in events])

        table = np.empty((S + 1, S + 1))
        for r, prev in enumerate([START] + names):
            row = self.trans_counts.get(prev, {})
            n, t = sum(row.values()), len(row)
            if n == 0:
                table[r] = self.unigram
            else:
                table[r] = [(row.get(e, 0) + t * self.unigram[j]) / (n + t)
                            for j, e in enumerate(events)]
        self.trans_prob = table
        log_table = np.log(table)
        self.log_start = log_table[0, :S]
        self.log_trans = log_table[1:, :S]
        self.log_stop = log_table[1:, S]

        # emissions: interpolate each tag's row with an add-one word unigram
        # over vocab + UNKNOWN_WORD
        self.word_counts = Counter()
        for row in self.emit_counts.values():
            self.word_counts.update(row)
        self.vocab = frozenset(self.word_counts)
        self._n_words = sum(self.word_counts.values())
        self._base_denom = self._n_words + len(self.vocab) + 1
        self._tag_nt = np.array([[sum(self.emit_counts[n].values()), len(self.emit_counts[n])]
                                 for n in names], dtype=float)

        # suffix model
        base = np.array([self.suffix_counts.get("", {}).get(n, 0) for n in names], dtype=float)
        n_rare = base.sum()
        ml = base / n_rare if n_rare else np.full(S, 1.0 / S)
        self.theta = float(np.std(ml, ddof=1)) if S > 1 else 0.0
        self.suffix_prior = (base + 1.0) / (n_rare + S)

    def emission_prob(self, word: str) -> np.ndarray:
        """P(word | tag) for every tag; unknown words map to the UNKNOWN_WORD event."""
        n, t = self._tag_nt[:, 0], self._tag_nt[:, 1]
        if word in self.vocab:
            pb = (self.word_counts[word] + 1.0) / self._base_denom
            c = np.array([self.emit_counts[tg.value].get(word, 0) for tg in self.tags], dtype=float)
        else:
            pb = 1.0 / self._base_denom
            c = np.zeros(len(self.tags))
        return (c + t * pb) / (n + t)

    def suffix_distribution(self, word: str) -> np.ndarray:
        """P(tag | suffix of word) by successive abstraction over known suffixes."""
        p = self.suffix_prior
        for i in range(1, min(self.suffix_max, len(word)) + 1):
            row = self.suffix_counts.get(word[-i:])
            if row is None:
                break
            n = sum(row.values())
            ml = np.array([row.get(tg.value, 0) / n for tg in self.tags])
            p = (ml + self.theta * p) / (1.0 + self.theta)
        return p

    def log_emission(self, word: str) -> np.ndarray:
        cached = self._emit_cache.get(word)
        if cached is not None:
            return cached
        e = self.emission_prob(word)
        with np.errstate(divide="ignore"):
            if word in self.vocab:
                out = np.log(e)
            else:
                out = np.log(e) + np.log(self.suffix_distribution(word)) - np.log(self.suffix_prior)
        self._emit_cache[word] = out
        return out

    def potentials(self, words):
        emit = np.array([self.log_emission(w) for w in words])
        return self.log_start, self.log_trans, emit, self.log_stop

    # -- serialization --------------------------------------------------

    def to_dict(self) -> dict:
        def srt(d):
            return {k: dict(sorted(v.items())) for k, v in sorted(d.items())}

        return {
            "format": "cspos.tagger",
            "version": FORMAT_VERSION,
            "suffix_max": self.suffix_max,
            "rare_threshold": self.rare_threshold,
            "transitions": srt(self.trans_counts),
            "emissions": srt(self.emit_counts),
            "suffixes": srt(self.suffix_counts),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_dict(cls, d: dict) -> "TaggerModel":
        if d.get("format") != "cspos.tagger" or d.get("version") != FORMAT_VERSION:
            raise ValueError("not a version-1 tagger model")
        return cls(d["transitions"], d["emissions"], d["suffixes"],
                   d["suffix_max"], d["rare_threshold"])

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "TaggerModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def train_tagger(corpus, suffix_max: int = 4, rare_threshold: int = 2) -> TaggerModel:
    trans: dict[str, dict[str, int]] = {}
    emit: dict[str, dict[str, int]] = {}
    n_sent = 0
    for s in corpus:
        prev = START
        for i, tok in enumerate(s.tokens):
            if not isinstance(tok.gold_tag, UPosTag):
                raise LabelMissing(f"sentence {s.id!r} token {i} has no universal gold tag")
            tag = tok.gold_tag.value
            row = trans.setdefault(prev, {})
            row[tag] = row.get(tag, 0) + 1
            er = emit.setdefault(tag, {})
            er[tok.text] = er.get(tok.text, 0) + 1
            prev = tag
        row = trans.setdefault(prev, {})
        row[STOP] = row.get(STOP, 0) + 1
        n_sent += 1
    if not n_sent:
        raise EmptyTraining("cannot train a tagger on an empty corpus")

    freq = Counter()
    for row in emit.values():
        freq.update(row)
    rare = {w for w, c in freq.items() if c <= rare_threshold} or set(freq)
    suffixes: dict[str, dict[str, int]] = {}
    for tag, row in emit.items():
        for w, c in row.items():
            if w not in rare:
                continue
            for i in range(0, min(suffix_max, len(w)) + 1):
                sr = suffixes.setdefault(w[len(w) - i:] if i else "", {})
                sr[tag] = sr.get(tag, 0) + c
    return TaggerModel(trans, emit, suffixes, suffix_max, rare_threshold)


def _words(sentence) -> list[str]:
    words = sentence.words if isinstance(sentence, Sentence) else list(sentence)
    if not words:
        raise EmptySentence("cannot tag an empty sentence")
    return words


def token_posteriors(model: TaggerModel, sentence) -> np.ndarray:
    """Per-token marginals, shape ``[n, len(model.tags)]``."""
    post, _, _ = chain.forward_backward(*model.potentials(_words(sentence)))
    return post


def viterbi_tag(model: TaggerModel, sentence) -> TaggerOutput:
    """Best tag sequence. Ties go to the tag earlier in UPosTag order.

    Each confidence is the posterior marginal of the emitted tag.
    """
    pots = model.potentials(_words(sentence))
    path, _ = chain.viterbi(*pots)
    post, _, _ = chain.forward_backward(*pots)
    conf = [min(1.0, max(0.0, float(post[i, j]))) for i, j in enumerate(path)]
    return TaggerOutput(tuple(model.tags[j] for j in path), tuple(conf))


def tag_span(model: TaggerModel, sentence, span: TagSpan) -> TaggerOutput:
    """Tag a chunk as if it were a whole sentence (START/STOP at the chunk edges)."""
    words = _words(sentence)
    if not 0 <= span.start < span.end <= len(words):
        raise BadSpan(f"span [{span.start}, {span.end}) outside sentence of length {len(words)}")
    return viterbi_tag(model, words[span.start:span.end])
