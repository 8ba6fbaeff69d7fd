"""Three-column TSV corpora (token, lang, tag), statistics and purity splits.

File format: one token per line as ``token<TAB>lang<TAB>tag``, ``_`` for an
absent gold field, sentences separated by blank lines. Lines starting with
``#`` are comments; ``# sent_id = X`` names the following sentence, otherwise
sentences are numbered ``s1, s2, ...`` by position. Other comments are
dropped on write.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .core import (
    DuplicateId,
    LangLabel,
    ParseError,
    PurityClass,
    Sentence,
    TaggedToken,
    UPosTag,
    purity_of,
)

ABSENT = "_"
SENT_ID_PREFIX = "# sent_id = "


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[Sentence, ...]
    name: str = "corpus"

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        seen = set()
        for s in self.sentences:
            if s.id in seen:
                raise DuplicateId(f"duplicate sentence id {s.id!r} in corpus {self.name!r}")
            seen.add(s.id)

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, i):
        return self.sentences[i]

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)


@dataclass(frozen=True)
class CorpusStats:
    n_sentences: int
    n_words: int
    n_types: int
    pct_cs: float

    def to_json(self) -> str:
        return json.dumps(
            {"n_sentences": self.n_sentences, "n_words": self.n_words,
             "n_types": self.n_types, "pct_cs": self.pct_cs},
            sort_keys=True)

    def to_tsv(self) -> str:
        return ("n_sentences\tn_words\tn_types\tpct_cs\n"
                f"{self.n_sentences}\t{self.n_words}\t{self.n_types}\t{self.pct_cs:.2f}\n")


def concat(corpora: Iterable[Corpus], name: str) -> Corpus:
    """Concatenate corpora, re-numbering ids only when they collide."""
    out, seen = [], set()
    for c in corpora:
        for s in c:
            sid = s.id
            if sid in seen:
                sid = f"{c.name}:{s.id}"
                k = 2
                while sid in seen:
                    sid = f"{c.name}:{s.id}#{k}"
                    k += 1
                s = Sentence(sid, s.tokens)
            seen.add(sid)
            out.append(s)
    return Corpus(tuple(out), name)


def _parse_token(path, lineno, line, raw_tags):
    parts = line.split("\t")
    if len(parts) != 3:
        raise ParseError(path, lineno, line, f"expected 3 tab-separated fields, got {len(parts)}")
    text, lang, tag = parts
    if not text or any(c.isspace() for c in text):
        raise ParseError(path, lineno, line, "token is empty or contains whitespace")
    try:
        gold_lang = None if lang == ABSENT else LangLabel.parse(lang)
    except ValueError as e:
        raise ParseError(path, lineno, line, str(e)) from None
    if tag == ABSENT:
        gold_tag = None
    elif raw_tags:
        if any(c.isspace() for c in tag):
            raise ParseError(path, lineno, line, "tag contains whitespace")
        gold_tag = tag
    else:
        try:
            gold_tag = UPosTag.parse(tag)
        except ValueError as e:
            raise ParseError(path, lineno, line, str(e)) from None
    return TaggedToken(text, gold_lang, gold_tag)


def parse_text(text: str, path="<string>", name: Optional[str] = None,
               raw_tags: bool = False) -> Corpus:
    """Parse corpus text. With ``raw_tags`` the tag column is kept as a plain
    string (source tagset, before mapping)."""
    sentences = []
    ids = {}
    pending_id = None
    pending_line = None
    tokens = []

    def flush():
        nonlocal tokens, pending_id, pending_line
        if not tokens:
            return
        sid = pending_id if pending_id is not None else f"s{len(sentences) + 1}"
        if sid in ids:
            raise DuplicateId(f"{path}:{pending_line}: duplicate sentence id {sid!r} "
                              f"(first used at line {ids[sid]})")
        ids[sid] = pending_line
        sentences.append(Sentence(sid, tuple(tokens)))
        tokens, pending_id, pending_line = [], None, None

    for lineno, line in enumerate(text.split("\n"), 1):
        if line.endswith("\r"):
            line = line[:-1]
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            if line.startswith(SENT_ID_PREFIX):
                if tokens:
                    raise ParseError(path, lineno, line, "sent_id inside a sentence")
                pending_id = line[len(SENT_ID_PREFIX):].strip()
                pending_line = lineno
            continue
        if pending_line is None:
            pending_line = lineno
        tokens.append(_parse_token(path, lineno, line, raw_tags))
    flush()
    return Corpus(tuple(sentences), name if name is not None else Path(str(path)).stem)


def parse_corpus(path, raw_tags: bool = False) -> Corpus:
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        return parse_text(f.read(), path, path.stem, raw_tags)


def format_corpus(corpus: Corpus) -> str:
    lines = []
    for i, s in enumerate(corpus.sentences, 1):
        if s.id != f"s{i}":
            lines.append(SENT_ID_PREFIX + s.id)
        for t in s.tokens:
            lang = ABSENT if t.gold_lang is None else t.gold_lang.value
            tag = ABSENT if t.gold_tag is None else str(t.gold_tag)
            lines.append(f"{t.text}\t{lang}\t{tag}")
        lines.append("")
    return "".join(line + "\n" for line in lines)


def write_corpus(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(format_corpus(corpus))


def corpus_stats(corpus: Corpus) -> CorpusStats:
    n_words = 0
    types = set()
    n_cs = 0
    for s in corpus:
        n_words += len(s)
        types.update(s.words)
        if purity_of(s) is PurityClass.CODE_SWITCHED:
            n_cs += 1
    n = len(corpus)
    return CorpusStats(n, n_words, len(types), 100.0 * n_cs / n if n else 0.0)


def split_by_purity(corpus: Corpus, labels=None) -> dict[PurityClass, Corpus]:
    """Partition sentences by purity class, preserving order.

    ``labels`` optionally supplies one label sequence per sentence (e.g. LID
    predictions) in place of the gold labels.
    """
    buckets = {p: [] for p in PurityClass}
    for i, s in enumerate(corpus):
        p = purity_of(s if labels is None else labels[i])
        buckets[p].append(s)
    return {p: Corpus(tuple(v), f"{corpus.name}.{p.value}") for p, v in buckets.items()}
