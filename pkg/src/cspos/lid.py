"""Token-level language identification with character n-gram models.

Each token is scored independently by two Witten-Bell smoothed character
LMs; neighbouring tokens interact only through a two-state label chain that
charges ``switch_penalty`` (in nats) whenever the language changes.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from . import chain
from .core import BadOrder, CsposError, EmptySentence, EmptyTraining, LangLabel, Sentence, purity_of

# Boundary and unknown-character symbols; control characters cannot collide
# with ordinary token text.
BOS = "\x02"
EOS = "\x03"
UNK = "\x00"

FORMAT_VERSION = 1


class LidError(CsposError, RuntimeError):
    pass


class CharLM:
    """Interpolated Witten-Bell character n-gram model.

    ``counts[h][c]`` holds continuation counts for every history length
    0..order-1. The base distribution is uniform over the alphabet, the end
    symbol and one reserved slot that absorbs every unseen character.
    """

    def __init__(self, order: int, counts: dict, alphabet: Iterable[str]):
        if order < 1:
            raise BadOrder(f"order must be >= 1, got {order}")
        self.order = order
        self.counts = counts
        self.alphabet = frozenset(alphabet)
        self.vocab_size = len(self.alphabet) + 2
        self._totals = {h: (sum(c.values()), len(c)) for h, c in counts.items()}
        self._cache: dict[str, float] = {}

    def events(self):
        """Every predictable symbol, including EOS and the unknown slot."""
        return sorted(self.alphabet) + [EOS, UNK]

    def _norm(self, ch: str) -> str:
        return ch if ch in self.alphabet or ch == EOS or ch == BOS else UNK

    def prob(self, symbol: str, context: str) -> float:
        """P(symbol | context); context is the preceding symbols (BOS-padded)."""
        symbol = self._norm(symbol)
        context = "".join(self._norm(c) for c in context[-(self.order - 1):]) if self.order > 1 else ""
        p = 1.0 / self.vocab_size
        for k in range(self.order):
            if k > len(context):
                break
            h = context[len(context) - k:] if k else ""
            if h not in self.counts:
                continue
            n, t = self._totals[h]
            p = (self.counts[h].get(symbol, 0) + t * p) / (n + t)
        return p

    def padded(self, token: str) -> str:
        return BOS * (self.order - 1) + token

    def token_log_score(self, token: str) -> float:
        """Mean log-probability per predicted symbol (characters plus end)."""
        if not token:
            raise ValueError("empty token")
        cached = self._cache.get(token)
        if cached is not None:
            return cached
        seq = self.padded(token)
        pad = self.order - 1
        total = 0.0
        for i, ch in enumerate(token + EOS):
            total += math.log(self.prob(ch, seq[: pad + i]))
        score = total / (len(token) + 1)
        self._cache[token] = score
        return score

    def to_dict(self) -> dict:
        return {
            "format": "cspos.charlm",
            "version": FORMAT_VERSION,
            "order": self.order,
            "alphabet": "".join(sorted(self.alphabet)),
            "counts": {h: dict(sorted(c.items())) for h, c in sorted(self.counts.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CharLM":
        if d.get("format") != "cspos.charlm" or d.get("version") != FORMAT_VERSION:
            raise ValueError("not a version-1 character LM")
        return cls(d["order"], {h: dict(c) for h, c in d["counts"].items()}, d["alphabet"])


def train_char_lm(tokens: Iterable[str], order: int = 6) -> CharLM:
    if order < 1:
        raise BadOrder(f"order must be >= 1, got {order}")
    counts: dict[str, dict[str, int]] = {}
    alphabet = set()
    pad = BOS * (order - 1)
    n_tokens = 0
    for tok in tokens:
        if not tok:
            continue
        n_tokens += 1
        alphabet.update(tok)
        seq = pad + tok + EOS
        for i in range(order - 1, len(seq)):
            sym = seq[i]
            for k in range(order):
                h = seq[i - k:i] if k else ""
                row = counts.setdefault(h, {})
                row[sym] = row.get(sym, 0) + 1
    if not n_tokens:
        raise EmptyTraining("no tokens to train a character LM on")
    return CharLM(order, counts, alphabet)


@dataclass
class LidResult:
    labels: list[LangLabel]
    p_l1: np.ndarray

    @property
    def posteriors(self) -> np.ndarray:
        """Posterior of the chosen label per token."""
        return np.where([lab is LangLabel.L1 for lab in self.labels], self.p_l1, 1.0 - self.p_l1)


@dataclass
class LidModel:
    lm1: CharLM
    lm2: CharLM
    prior_l1: float = 0.5
    switch_penalty: float = math.log(2)

    def __post_init__(self):
        if not 0.0 < self.prior_l1 < 1.0:
            raise ValueError("prior_l1 must lie strictly between 0 and 1")
        if self.switch_penalty < 0:
            raise ValueError("switch_penalty must be non-negative")

    def potentials(self, words):
        emit = np.empty((len(words), 2))
        lp1, lp2 = math.log(self.prior_l1), math.log1p(-self.prior_l1)
        for i, w in enumerate(words):
            emit[i, 0] = self.lm1.token_log_score(w) + lp1
            emit[i, 1] = self.lm2.token_log_score(w) + lp2
        trans = np.array([[0.0, -self.switch_penalty], [-self.switch_penalty, 0.0]])
        zero = np.zeros(2)
        return zero, trans, emit, zero

    def to_dict(self) -> dict:
        return {"format": "cspos.lid", "version": FORMAT_VERSION,
                "prior_l1": self.prior_l1, "switch_penalty": self.switch_penalty,
                "lm1": self.lm1.to_dict(), "lm2": self.lm2.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "LidModel":
        if d.get("format") != "cspos.lid" or d.get("version") != FORMAT_VERSION:
            raise ValueError("not a version-1 LID model")
        return cls(CharLM.from_dict(d["lm1"]), CharLM.from_dict(d["lm2"]),
                   d["prior_l1"], d["switch_penalty"])

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "LidModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def train_lid(l1_tokens, l2_tokens, order: int = 6, prior_l1: float = 0.5,
              switch_penalty: float = math.log(2)) -> LidModel:
    return LidModel(train_char_lm(l1_tokens, order), train_char_lm(l2_tokens, order),
                    prior_l1, switch_penalty)


def _words(sentence) -> list[str]:
    words = sentence.words if isinstance(sentence, Sentence) else list(sentence)
    if not words:
        raise EmptySentence("cannot label an empty sentence")
    return words


def label_sentence(model: LidModel, sentence) -> LidResult:
    """Jointly decode L1/L2 labels; ties prefer L1."""
    words = _words(sentence)
    try:
        start, trans, emit, stop = model.potentials(words)
        path, _ = chain.viterbi(start, trans, emit, stop)
        post, _, _ = chain.forward_backward(start, trans, emit, stop)
    except (ValueError, FloatingPointError) as e:
        raise LidError(f"language identification failed: {e}") from e
    labels = [LangLabel.L1 if s == 0 else LangLabel.L2 for s in path]
    return LidResult(labels, post[:, 0])


def sentence_language_class(model: LidModel, sentence):
    return purity_of(label_sentence(model, sentence).labels)
