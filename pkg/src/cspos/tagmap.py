"""Declarative source-tagset -> universal tag mapping tables.

Table file format, one rule per line::

    pattern<TAB>TARGET[<TAB>word,word,...]

``pattern`` is an exact tag or a prefix ending in ``*``. The optional third
column restricts the rule to the listed surface words (case-insensitive).
A bare ``*`` pattern sets the table default. ``#`` starts a comment line.
First matching rule wins.
"""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .core import CsposError, Sentence, TaggedToken, UPosTag
from .corpus import Corpus

BUILTIN_TABLES = ("bw_to_universal", "bangor_to_universal")


class DuplicateRule(CsposError, ValueError):
    pass


class BadTarget(CsposError, ValueError):
    pass


class UnmappedTag(CsposError, KeyError):
    def __init__(self, tag, where):
        self.tag = tag
        self.where = where
        super().__init__(f"no mapping rule for tag {tag!r} at {where}")

    def __str__(self):
        return self.args[0]


@dataclass(frozen=True)
class Rule:
    pattern: str
    target: UPosTag
    words: Optional[frozenset] = None

    def matches(self, tag: str, word: Optional[str] = None) -> bool:
        if self.words is not None and (word is None or word.lower() not in self.words):
            return False
        if self.pattern.endswith("*"):
            return tag.startswith(self.pattern[:-1])
        return tag == self.pattern


@dataclass(frozen=True)
class MappingTable:
    name: str
    rules: tuple[Rule, ...]
    default: Optional[UPosTag] = None

    def __post_init__(self):
        seen = set()
        for r in self.rules:
            key = (r.pattern, r.words)
            if key in seen:
                raise DuplicateRule(f"{self.name}: duplicate pattern {r.pattern!r}")
            seen.add(key)

    def lookup(self, tag: str, word: Optional[str] = None) -> Optional[UPosTag]:
        for r in self.rules:
            if r.matches(tag, word):
                return r.target
        return self.default

    @classmethod
    def identity(cls) -> "MappingTable":
        return cls("identity", tuple(Rule(t.value, t) for t in UPosTag))


def parse_mapping(text: str, name: str = "table") -> MappingTable:
    rules = []
    default = None
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.rstrip("\r").split("\t")
        if len(parts) not in (2, 3):
            raise ValueError(f"{name}:{lineno}: expected pattern<TAB>TARGET[<TAB>words]: {line!r}")
        pattern, target = parts[0].strip(), parts[1].strip()
        try:
            target = UPosTag.parse(target)
        except ValueError:
            raise BadTarget(f"{name}:{lineno}: unknown target tag {target!r}") from None
        if pattern == "*":
            if default is not None:
                raise DuplicateRule(f"{name}:{lineno}: default given twice")
            default = target
            continue
        words = None
        if len(parts) == 3:
            words = frozenset(w.strip().lower() for w in parts[2].split(",") if w.strip())
        rule = Rule(pattern, target, words)
        if any((r.pattern, r.words) == (rule.pattern, rule.words) for r in rules):
            raise DuplicateRule(f"{name}:{lineno}: duplicate pattern {pattern!r}")
        rules.append(rule)
    return MappingTable(name, tuple(rules), default)


def load_mapping(path) -> MappingTable:
    """Load a table from a file, or a built-in table by name."""
    if str(path) in BUILTIN_TABLES:
        text = resources.files("cspos.data").joinpath(f"{path}.tsv").read_text(encoding="utf-8")
        return parse_mapping(text, str(path))
    path = Path(path)
    return parse_mapping(path.read_text(encoding="utf-8"), path.stem)


def map_corpus(corpus: Corpus, table: MappingTable) -> Corpus:
    out = []
    for s in corpus:
        toks = []
        for i, t in enumerate(s.tokens):
            src = t.gold_tag
            if src is None:
                raise UnmappedTag(None, f"{corpus.name}/{s.id}[{i}] (no source tag)")
            target = table.lookup(str(src), t.text)
            if target is None:
                raise UnmappedTag(str(src), f"{corpus.name}/{s.id}[{i}] ({t.text!r})")
            toks.append(TaggedToken(t.text, t.gold_lang, target))
        out.append(Sentence(s.id, tuple(toks)))
    return Corpus(tuple(out), corpus.name)
