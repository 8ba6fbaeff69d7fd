"""Acceptance criteria, one printed PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` (about ten minutes on one
core: seventeen full synthetic benchmarks) or ``python3 tests/test_acceptance.py``.
Set ``CSPOS_BANGOR`` to a directory holding ``train.tsv`` and ``test.tsv``
to exercise the optional real-corpus ordering check.
"""
import itertools
import math
import os
import statistics
import sys
import time
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cspos import chain  # noqa: E402
from cspos.cli import main as cli_main  # noqa: E402
from cspos.core import LangLabel, UPosTag  # noqa: E402
from cspos.lid import label_sentence, train_char_lm, train_lid  # noqa: E402
from cspos.pipeline import TrainConfig, run_bench, train_bundle, evaluate_all, ROW_KEYS  # noqa: E402
from cspos.synth import SynthConfig  # noqa: E402
from cspos.tagger import train_tagger  # noqa: E402
from conftest import ACCEPTANCE_LINES  # noqa: E402
from oracles import brute_argmax, brute_marginals  # noqa: E402

SEEDS = range(5)
RATES = (0.02, 0.1, 0.25)
N_SENTENCES = 10000
BENCH_LIMIT_S = 300.0

pytestmark = pytest.mark.slow


def emit(name, ok, detail="", status=None):
    line = f"{status or ('PASS' if ok else 'FAIL')}  {name}" + (f"  [{detail}]" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


@lru_cache(maxsize=None)
def bench(seed, homograph_rate):
    cfg = SynthConfig.preset("far-pair", seed=seed, n_sentences=N_SENTENCES,
                             cs_sentence_rate=0.2, homograph_rate=homograph_rate)
    t0 = time.perf_counter()
    res = run_bench(cfg)
    return res, time.perf_counter() - t0


def averaged(rate):
    runs = [bench(s, rate)[0].overall() for s in SEEDS]
    return {k: statistics.fmean(r[k] for r in runs) for k in ROW_KEYS}


# -- oracle equivalence --------------------------------------------------

def _lid_model():
    l1 = ["pata", "kimu", "sula", "nari", "tupa", "mika", "fasu", "hilu", "rapi", "kuna"]
    l2 = ["bedo", "gove", "zola", "jemo", "vado", "drego", "lobe", "mezo", "gaveo", "jobe"]
    return train_lid(l1, l2, order=4), l1 + l2 + ["pado", "zeta", "mobe", "kaze"]


def test_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    n_models = 1200
    vit_bad = marg_err = 0.0
    for _ in range(n_models):
        n, S = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        m = (rng.normal(0, 2, S), rng.normal(0, 2, (S, S)), rng.normal(0, 2, (n, S)), rng.normal(0, 2, S))
        path, best = chain.viterbi(*m)
        ref_path, ref = brute_argmax(*m)
        vit_bad += path != ref_path or abs(best - ref) > 1e-9
        post, _, _ = chain.forward_backward(*m)
        ref_post, _ = brute_marginals(*m)
        marg_err = max(marg_err, float(np.max(np.abs(post - np.array(ref_post)))))

    lid, pool = _lid_model()
    lid_bad = lid_cases = 0
    for n in range(1, 13):
        for _ in range(4):
            words = [pool[i] for i in rng.integers(0, len(pool), n)]
            start, trans, em, stop = lid.potentials(words)
            best, arg = -math.inf, None
            for p in itertools.product((0, 1), repeat=n):
                v = start[p[0]] + em[0, p[0]] + stop[p[-1]] + sum(
                    trans[p[i - 1], p[i]] + em[i, p[i]] for i in range(1, n))
                if v > best + 1e-12:
                    best, arg = v, p
            got = [0 if lab is LangLabel.L1 else 1 for lab in label_sentence(lid, words).labels]
            lid_bad += got != list(arg)
            lid_cases += 1
    elapsed = time.perf_counter() - t0
    ok = vit_bad == 0 and marg_err < 1e-9 and lid_bad == 0 and elapsed < 60
    emit("oracle equivalence", ok,
         f"{n_models} models, viterbi mismatches {int(vit_bad)}, max marginal error {marg_err:.1e}, "
         f"LID {lid_cases} sentences n<=12 mismatches {lid_bad}, {elapsed:.1f}s")
    assert ok


# -- normalization ---------------------------------------------------------

def test_normalization_suites():
    worst = 0.0
    checked = 0
    toks = ["ab", "ba", "abc", "cab", "a"]
    for order in (1, 2, 3):
        lm = train_char_lm(toks, order)
        syms = sorted(lm.alphabet) + ["q"]
        for k in range(order):
            for ctx in itertools.product(syms, repeat=k):
                total = sum(lm.prob(e, lm.padded("".join(ctx))) for e in lm.events())
                worst = max(worst, abs(total - 1.0))
                checked += 1

    from cspos.corpus import Corpus
    from conftest import sent
    T, L1 = UPosTag, LangLabel.L1
    rows = [[("the", T.DET), ("dog", T.NOUN), ("runs", T.VERB)],
            [("a", T.DET), ("cat", T.NOUN), ("sings", T.VERB), ("loudly", T.ADV)],
            [("cats", T.NOUN), ("run", T.VERB)]]
    m = train_tagger(Corpus(tuple(sent(f"s{i}", *[(w, L1, t) for w, t in r]) for i, r in enumerate(rows))))
    worst = max(worst, float(np.max(np.abs(m.trans_prob.sum(axis=1) - 1.0))))
    col = sum(m.emission_prob(w) for w in m.vocab) + m.emission_prob("<unseen>")
    worst = max(worst, float(np.max(np.abs(col - 1.0))))
    for w in ("runs", "zzz", "s", "dogs", "ly", "x"):
        worst = max(worst, abs(float(m.suffix_distribution(w).sum()) - 1.0))
    worst = max(worst, abs(float(m.suffix_prior.sum()) - 1.0), abs(float(m.unigram.sum()) - 1.0))
    checked += len(m.trans_prob) + len(m.tags) + 8
    ok = worst <= 1e-9
    emit("normalization suites", ok, f"{checked} distributions, max |sum - 1| = {worst:.1e}")
    assert ok


# -- synthetic trend reproduction -------------------------------------------

def test_trend_reproduction():
    avg = averaged(0.02)
    comb = [avg[k] for k in ("COMB1", "COMB2", "COMB3")]
    a = max(avg["BASE-L1"], avg["BASE-L2"]) <= avg["COMB4"] - 15
    b = avg["COMB4"] >= max(comb)
    c = all(avg[k] >= min(comb) for k in ("INT1", "INT2", "INT3"))
    slowest = max(bench(s, 0.02)[1] for s in SEEDS)
    fast = slowest < BENCH_LIMIT_S
    ok = a and b and c and fast
    emit("trend reproduction (far-pair, 5 seeds)", ok,
         " ".join(f"{k}={v:.2f}" for k, v in avg.items())
         + f"; (a)={a} (b)={b} (c)={c}; slowest bench {slowest:.0f}s")
    assert ok


def test_similarity_effect():
    avgs = {h: averaged(h) for h in RATES}
    base = {h: max(a["BASE-L1"], a["BASE-L2"]) for h, a in avgs.items()}
    gap = {h: avgs[h]["COMB4"] - base[h] for h in RATES}
    # walk from the closest pair to the farthest
    steps = list(zip(RATES[::-1], RATES[::-1][1:]))
    ok = all(gap[lo] > gap[hi] or base[lo] < base[hi] for hi, lo in steps)
    emit("similarity effect", ok,
         "; ".join(f"h={h}: best baseline {base[h]:.2f}, gap {gap[h]:.2f}" for h in RATES))
    assert ok


def test_chunk_degradation():
    res, _ = bench(0, SynthConfig.preset("close-pair").homograph_rate)
    differs = res.info["comb1_comb2_differing_sentences"]
    n = res.info["test_sentences"]
    ok = differs * 1000 >= n
    emit("chunk degradation (close-pair)", ok,
         f"COMB1 and COMB2 differ on {differs} of {n} sentences ({1000 * differs / n:.1f} per 1000)")
    assert ok


def test_bench_determinism(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        with open(os.devnull, "w") as null:
            saved, sys.stdout = sys.stdout, null
            try:
                code = cli_main(["bench", "--preset", "far-pair", "--seed", "0", "--out-dir", str(d)])
            finally:
                sys.stdout = saved
        assert code == 0
        outs.append(((d / "report.txt").read_bytes(), (d / "report.json").read_bytes()))
    ok = outs[0] == outs[1]
    emit("bench determinism", ok, "report.txt and report.json byte-identical across two runs")
    assert ok


# -- optional real corpus -----------------------------------------------------

EXPECTED_ORDER = ["COMB4", "INT1", "INT3", "INT2", "COMB1", "COMB3", "COMB2"]


def test_bangor_ordering():
    root = os.environ.get("CSPOS_BANGOR")
    if not root:
        emit("Bangor ordering (optional)", True, "CSPOS_BANGOR not set", status="SKIP")
        pytest.skip("CSPOS_BANGOR not set")
    from cspos.corpus import parse_corpus
    train, test = parse_corpus(Path(root) / "train.tsv"), parse_corpus(Path(root) / "test.tsv")
    rows, _ = evaluate_all(train_bundle(train, TrainConfig()), test)
    acc = {k: float(r.accuracy("overall")) for k, r in zip(ROW_KEYS, rows)}
    pairs = list(zip(EXPECTED_ORDER, EXPECTED_ORDER[1:]))
    ok = all(acc[a] >= acc[b] if (a, b) == ("COMB1", "COMB3") else acc[a] > acc[b] for a, b in pairs)
    emit("Bangor ordering (optional)", ok, " ".join(f"{k}={acc[k]:.2f}" for k in EXPECTED_ORDER))
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
