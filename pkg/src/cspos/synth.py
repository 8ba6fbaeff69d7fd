"""Deterministic synthetic code-switched corpora.

Two artificial languages share a tagset but differ in letter inventory,
tag-specific suffixes, vocabulary and tag-transition tables. A fraction
``homograph_rate`` of L2's word forms are borrowed from L1, half keeping the
L1 tag and half under a different one; this is the knob for how close the
pair is.
"""
from __future__ import annotations

import json
import random
from bisect import bisect
from dataclasses import asdict, dataclass, field, replace
from itertools import accumulate

from .core import BadConfig, LangLabel, PurityClass, Sentence, TaggedToken, UPosTag, sort_tags
from .corpus import Corpus, corpus_stats

# most frequent tags first; a tagset of size k takes the first k
TAG_PREFERENCE = [
    UPosTag.NOUN, UPosTag.VERB, UPosTag.DET, UPosTag.ADJ, UPosTag.ADP, UPosTag.PRON,
    UPosTag.ADV, UPosTag.CCONJ, UPosTag.PUNCT, UPosTag.PROPN, UPosTag.AUX, UPosTag.NUM,
    UPosTag.PART, UPosTag.SCONJ, UPosTag.INTJ, UPosTag.SYM, UPosTag.X,
]
CLOSED = {UPosTag.DET, UPosTag.ADP, UPosTag.PRON, UPosTag.CCONJ, UPosTag.PUNCT,
          UPosTag.AUX, UPosTag.PART, UPosTag.SCONJ, UPosTag.SYM}

PHONOLOGY = {
    LangLabel.L1: ("ptkmnslrfh", "aiu"),
    LangLabel.L2: ("bdgmnlrvzj", "eoa"),
}

PRESETS = {
    "close-pair": {"homograph_rate": 0.25, "mono_convention_shift": 3},
    "far-pair": {"homograph_rate": 0.02, "mono_convention_shift": 3},
}

TRAIN_FRACTION = 0.8
# share of borrowed forms that keep their L1 tag; the rest are false friends
COGNATE_SHARE = 0.5


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    n_sentences: int = 10000
    vocab_per_lang: int = 2000
    tagset_size: int = 12
    cs_sentence_rate: float = 0.2
    within_cs_switch_rate: float = 0.2
    homograph_rate: float = 0.02
    mean_sentence_len: int = 10
    # share of pure sentences (and CS starting language) that is L1
    l1_share: float = 0.5
    # tags per language that the monolingual training sentences annotate
    # under a coarser convention (merged into another tag)
    mono_convention_shift: int = 0

    def validate(self) -> None:
        for name in ("cs_sentence_rate", "within_cs_switch_rate", "homograph_rate", "l1_share"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise BadConfig(f"{name} must lie in [0, 1], got {v}")
        for name in ("n_sentences", "vocab_per_lang", "tagset_size", "mean_sentence_len"):
            if getattr(self, name) < 1:
                raise BadConfig(f"{name} must be >= 1")
        if self.tagset_size > len(UPosTag):
            raise BadConfig(f"tagset_size must be <= {len(UPosTag)}")
        if self.vocab_per_lang < 2 * self.tagset_size:
            raise BadConfig("vocab_per_lang must be at least twice tagset_size")
        if self.tagset_size == 1 and self.homograph_rate > 0:
            raise BadConfig("homographs need a second tag to diverge to")
        if not 0 <= self.mono_convention_shift < self.tagset_size:
            raise BadConfig("mono_convention_shift must be in [0, tagset_size)")

    @classmethod
    def preset(cls, name: str, **overrides) -> "SynthConfig":
        if name not in PRESETS:
            raise BadConfig(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
        return cls(**{**PRESETS[name], **overrides})


@dataclass
class Language:
    label: LangLabel
    start: list          # cumulative start-tag weights
    trans: dict          # tag -> cumulative next-tag weights
    words: dict          # tag -> list of forms
    word_cum: dict       # tag -> cumulative Zipf weights


@dataclass
class SynthResult:
    train: Corpus
    test: Corpus
    tags: list
    train_cs_flags: list
    test_cs_flags: list
    vocab: dict = field(default_factory=dict)
    conventions: dict = field(default_factory=dict)

    def manifest(self, config: SynthConfig) -> dict:
        tr, te = corpus_stats(self.train), corpus_stats(self.test)
        train_types = {w for s in self.train for w in s.words}
        test_types = {w for s in self.test for w in s.words}
        v1, v2 = set(self.vocab[LangLabel.L1]), set(self.vocab[LangLabel.L2])
        return {
            "config": asdict(config),
            "tagset": [t.value for t in self.tags],
            "train": asdict(tr),
            "test": asdict(te),
            "test_types": len(test_types),
            "test_types_seen_in_train": len(test_types & train_types),
            "vocab_l1": len(v1),
            "vocab_l2": len(v2),
            "shared_forms": len(v1 & v2),
            "mono_conventions": {lab.value: {a.value: b.value for a, b in m.items()}
                                 for lab, m in self.conventions.items()},
        }


def _dirichlet(rng, alpha, k):
    g = [rng.gammavariate(alpha, 1.0) for _ in range(k)]
    s = sum(g)
    return [x / s for x in g]


def _cum(weights):
    return list(accumulate(weights))


def _draw(rng, cum):
    return bisect(cum, rng.random() * cum[-1])


def _make_form(rng, consonants, vowels, syllables):
    return "".join(rng.choice(consonants) + rng.choice(vowels) for _ in range(syllables))


def _vocab_sizes(tags, total):
    closed = [t for t in tags if t in CLOSED]
    open_ = [t for t in tags if t not in CLOSED]
    closed_size = max(2, total // 100)
    if not open_:
        base, extra = divmod(total, len(tags))
        return {t: base + (i < extra) for i, t in enumerate(tags)}
    sizes = {t: closed_size for t in closed}
    rest = total - closed_size * len(closed)
    # open classes: NOUN largest, then by preference order
    weights = [1.0 / (i + 1) for i in range(len(open_))]
    ws = sum(weights)
    alloc = [max(2, int(rest * w / ws)) for w in weights]
    alloc[0] += rest - sum(alloc)
    sizes.update(zip(open_, alloc))
    return sizes


def _build_language(streams, label, tags, sizes, taken, borrow=None, homograph_rate=0.0):
    consonants, vowels = PHONOLOGY[label]
    k = len(tags)
    grammar = streams(f"grammar/{label.value}")
    start = _dirichlet(grammar, 0.5, k)
    trans = {t: _cum(_dirichlet(grammar, 0.3, k)) for t in tags}
    lex = streams(f"lexicon/{label.value}")
    homograph = streams(f"homograph/{label.value}")
    suffix_pool = [_make_form(lex, consonants, vowels, 1) for _ in range(2 * k)]
    words, word_cum = {}, {}
    own = set()
    for t in tags:
        suffixes = lex.sample(suffix_pool, 3)
        forms = []
        for _ in range(sizes[t]):
            form = None
            for _attempt in range(1000):
                if t in CLOSED:
                    cand = _make_form(lex, consonants, vowels, lex.randint(1, 2))
                else:
                    cand = _make_form(lex, consonants, vowels, lex.randint(1, 2)) + lex.choice(suffixes)
                if cand not in own and cand not in taken:
                    form = cand
                    break
            else:
                raise BadConfig("vocabulary too large for the synthetic phonology")
            # a borrowed form replaces the native one drawn above, so the
            # lexicon stream advances identically whatever the rate
            if borrow is not None and homograph.random() < homograph_rate:
                same, diff = borrow[t]
                cands = same if homograph.random() < COGNATE_SHARE else diff
                while cands:
                    cand = cands.pop()
                    if cand not in own:
                        form = cand
                        break
            own.add(form)
            forms.append(form)
        words[t] = forms
        word_cum[t] = _cum([1.0 / (r + 1) for r in range(len(forms))])
    return Language(label, _cum(start), trans, words, word_cum)


def _sentence_length(rng, mean):
    # geometric with the given mean, clamped to [3, 2 * mean]
    p = 1.0 / max(mean, 1)
    n = 1
    while rng.random() > p and n < 2 * mean:
        n += 1
    return max(3, min(n, 2 * mean))


def _sentence(rng, langs_of_tokens, languages, tags, sid):
    toks = []
    prev = None
    for lab in langs_of_tokens:
        lang = languages[lab]
        tag = tags[_draw(rng, lang.start if prev is None else lang.trans[prev])]
        forms = lang.words[tag]
        toks.append(TaggedToken(forms[_draw(rng, lang.word_cum[tag])], lab, tag))
        prev = tag
    return Sentence(sid, tuple(toks))


def _conventions(rng, tags, k):
    """Per language, ``k`` tags merged into another tag; never a chain A->B->C."""
    maps = {}
    for lab in (LangLabel.L1, LangLabel.L2):
        sources = rng.sample(tags, k)
        targets = [t for t in tags if t not in sources]
        maps[lab] = {src: rng.choice(targets) for src in sorted(sources, key=tags.index)}
    return maps


def _relabel(sentence, mapping):
    return Sentence(sentence.id, tuple(
        TaggedToken(t.text, t.gold_lang, mapping.get(t.gold_tag, t.gold_tag)) for t in sentence.tokens))


def generate_full(config: SynthConfig) -> SynthResult:
    config.validate()

    def streams(name):
        # independent, named random streams: changing one knob does not
        # reshuffle the draws of unrelated components
        return random.Random(f"{config.seed}/{name}")

    tags = sort_tags(TAG_PREFERENCE[: config.tagset_size])
    sizes = _vocab_sizes(tags, config.vocab_per_lang)

    l1 = _build_language(streams, LangLabel.L1, tags, sizes, taken=set())
    l1_forms = {w for ws in l1.words.values() for w in ws}
    # candidate L1 forms an L2 tag may borrow: cognates of the same tag,
    # false friends of any other
    borrow = {}
    pick = streams("borrow")
    for t in tags:
        same = sorted(l1.words[t])
        diff = sorted(w for t2, ws in l1.words.items() if t2 is not t for w in ws)
        pick.shuffle(same)
        pick.shuffle(diff)
        borrow[t] = (same, diff)
    l2 = _build_language(streams, LangLabel.L2, tags, sizes, taken=l1_forms,
                         borrow=borrow, homograph_rate=config.homograph_rate)
    languages = {LangLabel.L1: l1, LangLabel.L2: l2}

    rng = streams("layout")
    sentences, flags = [], []
    other = {LangLabel.L1: LangLabel.L2, LangLabel.L2: LangLabel.L1}
    for _ in range(config.n_sentences):
        n = _sentence_length(rng, config.mean_sentence_len)
        is_cs = rng.random() < config.cs_sentence_rate
        lab = LangLabel.L1 if rng.random() < config.l1_share else LangLabel.L2
        labels = [lab] * n
        if is_cs:
            for i in range(1, n):
                if rng.random() < config.within_cs_switch_rate:
                    lab = other[lab]
                labels[i] = lab
            if len(set(labels)) == 1:
                j = rng.randint(1, n - 1)
                labels[j:] = [other[labels[0]]] * (n - j)
        sentences.append(labels)
        flags.append(is_cs)

    n_train = int(round(TRAIN_FRACTION * config.n_sentences))
    rng = streams("tokens")
    train = [_sentence(rng, labs, languages, tags, f"s{i + 1}")
             for i, labs in enumerate(sentences[:n_train])]
    conventions = _conventions(streams("conventions"), tags, config.mono_convention_shift)
    if config.mono_convention_shift:
        # monolingual training data follows its own language's convention
        train = [s if flags[i] else _relabel(s, conventions[s.tokens[0].gold_lang])
                 for i, s in enumerate(train)]
    test = [_sentence(rng, labs, languages, tags, f"s{i + 1}")
            for i, labs in enumerate(sentences[n_train:])]
    vocab = {lab: [w for ws in lang.words.values() for w in ws] for lab, lang in languages.items()}
    return SynthResult(Corpus(tuple(train), "train"), Corpus(tuple(test), "test"), tags,
                       flags[:n_train], flags[n_train:], vocab, conventions)


def generate(config: SynthConfig) -> tuple[Corpus, Corpus]:
    r = generate_full(config)
    return r.train, r.test


def manifest_json(result: SynthResult, config: SynthConfig) -> str:
    return json.dumps(result.manifest(config), indent=2, sort_keys=True) + "\n"
