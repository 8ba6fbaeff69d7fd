import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cspos.core import LangLabel, Sentence, TaggedToken, UPosTag  # noqa: E402
from cspos.corpus import Corpus  # noqa: E402

L1, L2 = LangLabel.L1, LangLabel.L2
T = UPosTag


def sent(sid, *triples):
    return Sentence(sid, tuple(TaggedToken(w, lang, tag) for w, lang, tag in triples))


@pytest.fixture
def toy_corpus():
    rows = [
        [("the", L1, T.DET), ("bird", L1, T.NOUN), ("sings", L1, T.VERB)],
        [("a", L1, T.DET), ("dog", L1, T.NOUN), ("runs", L1, T.VERB)],
        [("the", L1, T.DET), ("dog", L1, T.NOUN), ("flies", L1, T.VERB)],
        [("a", L1, T.DET), ("bird", L1, T.NOUN), ("barks", L1, T.VERB)],
        [("the", L1, T.DET), ("cat", L1, T.NOUN), ("sleeps", L1, T.VERB)],
    ]
    return Corpus(tuple(sent(f"s{i + 1}", *r) for i, r in enumerate(rows)), "toy")


@pytest.fixture(scope="session")
def small_synth():
    from cspos.synth import SynthConfig, generate_full
    cfg = SynthConfig(seed=3, n_sentences=600, vocab_per_lang=200, tagset_size=8,
                      mono_convention_shift=1)
    return cfg, generate_full(cfg)


@pytest.fixture(scope="session")
def small_bundle(small_synth):
    from cspos.pipeline import TrainConfig, train_bundle
    return train_bundle(small_synth[1].train, TrainConfig(folds=3, epochs=3))


# verdict lines from test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
