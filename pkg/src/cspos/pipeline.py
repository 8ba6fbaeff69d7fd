"""End-to-end experiment: train every resource, run all conditions, evaluate."""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .core import LangLabel, PurityClass
from .corpus import Corpus
from .corpus import split_by_purity
from .evaluation import EvalRow, breakdown, render_report, report_dict
from .lid import label_sentence, train_lid
from .stacker import make_folds, predict, sentence_features, train_stacker
from .strategies import (
    CONDITION_NAMES,
    ConditionId,
    ResourceBundle,
    comb1,
    comb2,
    comb3,
    run_stacked,
    select_training_data,
)
from .synth import SynthConfig, generate_full
from .tagger import train_tagger, viterbi_tag

BASELINE_NAMES = ("BASE:MonoLT-L1", "BASE:MonoLT-L2")
ROW_KEYS = ("BASE-L1", "BASE-L2") + tuple(c.value for c in ConditionId)


@dataclass(frozen=True)
class TrainConfig:
    lid_order: int = 6
    prior_l1: float = 0.5
    switch_penalty: float = math.log(2)
    suffix_max: int = 4
    rare_threshold: int = 2
    folds: int = 10
    epochs: int = 10
    stack_seed: int = 0
    paper_features_only: bool = False


def stack_examples(tagger_l1, tagger_l2, corpus, context=True):
    """Per-sentence lists of (features, gold tag) from both taggers' full-sentence output."""
    out = []
    for s in corpus:
        o1, o2 = viterbi_tag(tagger_l1, s), viterbi_tag(tagger_l2, s)
        out.append(list(zip(sentence_features(o1, o2, context), s.tags)))
    return out


def train_stacker_cv(tagger_l1, tagger_l2, cs: Corpus, folds=10, epochs=10, seed=0,
                     context=True):
    """Cross-validate the stacker over ``cs`` and return (final model, fold accuracies).

    The returned model is retrained on every fold.
    """
    per_sentence = stack_examples(tagger_l1, tagger_l2, cs, context)
    accs = []
    if len(per_sentence) >= folds >= 2:
        split = make_folds(list(range(len(per_sentence))), folds, seed)
        for k, held in enumerate(split):
            held_set = set(held)
            train = [ex for i, exs in enumerate(per_sentence) if i not in held_set for ex in exs]
            test = [ex for i in held for ex in per_sentence[i]]
            model = train_stacker(train, epochs, seed, context=context)
            correct = sum(predict(model, f) is g for f, g in test)
            accs.append(100.0 * correct / len(test))
    model = train_stacker([ex for exs in per_sentence for ex in exs], epochs, seed, context=context)
    model.meta = {"folds": folds, "cv_accuracy": accs}
    return model, accs


def train_bundle(train: Corpus, cfg: TrainConfig = TrainConfig()) -> ResourceBundle:
    """Train both monolingual taggers, the LID, the stacker and INT1-3 from gold-labelled data.

    Monolingual resources come from the pure sentences, the stacker and INT1
    from the code-switched ones.
    """
    parts = split_by_purity(train)
    mono1, mono2 = parts[PurityClass.PURE_L1], parts[PurityClass.PURE_L2]
    cs = parts[PurityClass.CODE_SWITCHED]
    kw = dict(suffix_max=cfg.suffix_max, rare_threshold=cfg.rare_threshold)
    t1, t2 = train_tagger(mono1, **kw), train_tagger(mono2, **kw)
    lid = train_lid((w for s in mono1 for w in s.words), (w for s in mono2 for w in s.words),
                    cfg.lid_order, cfg.prior_l1, cfg.switch_penalty)
    stacker, _ = train_stacker_cv(t1, t2, cs, cfg.folds, cfg.epochs, cfg.stack_seed,
                                  context=not cfg.paper_features_only)
    ints = {c: train_tagger(select_training_data(c, mono1, mono2, cs), **kw)
            for c in (ConditionId.INT1, ConditionId.INT2, ConditionId.INT3)}
    return ResourceBundle(t1, t2, lid, stacker, ints)


def _predict_chunk(bundle, sentences):
    preds = {k: [] for k in ROW_KEYS}
    ties = [0]
    comb_differs = 0
    for s in sentences:
        o1, o2 = viterbi_tag(bundle.tagger_l1, s), viterbi_tag(bundle.tagger_l2, s)
        labels = label_sentence(bundle.lid, s).labels
        preds["BASE-L1"].append(o1)
        preds["BASE-L2"].append(o2)
        c1 = comb1(bundle, s, labels)
        c2 = comb2(bundle, s, labels, (o1, o2))
        comb_differs += c1.tags != c2.tags
        preds["COMB1"].append(c1)
        preds["COMB2"].append(c2)
        preds["COMB3"].append(comb3(bundle, s, (o1, o2), ties))
        preds["COMB4"].append(run_stacked(bundle, s, (o1, o2)))
        for c in (ConditionId.INT1, ConditionId.INT2, ConditionId.INT3):
            preds[c.value].append(viterbi_tag(bundle.integrated_taggers[c], s))
    return preds, ties[0], comb_differs


def threads() -> int:
    try:
        return max(1, int(os.environ.get("CSPOS_THREADS", "1")))
    except ValueError:
        return 1


def predict_all(bundle: ResourceBundle, test: Corpus, workers: int | None = None):
    """Predictions of the two baselines and all seven conditions, in fixed row order."""
    workers = threads() if workers is None else workers
    sents = list(test)
    if workers <= 1 or len(sents) < 2 * workers:
        return _predict_chunk(bundle, sents)
    size = math.ceil(len(sents) / workers)
    chunks = [sents[i:i + size] for i in range(0, len(sents), size)]
    with ProcessPoolExecutor(workers) as ex:
        results = list(ex.map(_predict_chunk, [bundle] * len(chunks), chunks))
    preds = {k: [] for k in ROW_KEYS}
    ties = differs = 0
    for p, t, d in results:
        for k in ROW_KEYS:
            preds[k].extend(p[k])
        ties += t
        differs += d
    return preds, ties, differs


def evaluate_all(bundle, test: Corpus, workers=None):
    preds, ties, differs = predict_all(bundle, test, workers)
    names = dict(zip(("BASE-L1", "BASE-L2"), BASELINE_NAMES))
    names.update({c.value: CONDITION_NAMES[c] for c in ConditionId})
    rows = [breakdown(test, preds[k], names[k], ties if k == "COMB3" else None) for k in ROW_KEYS]
    return rows, {"comb1_comb2_differing_sentences": differs}


@dataclass
class BenchResult:
    rows: list
    info: dict

    def overall(self) -> dict:
        return {k: float(r.accuracy("overall")) for k, r in zip(ROW_KEYS, self.rows)}

    def report_json(self) -> str:
        return json.dumps({"info": self.info, "rows": report_dict(self.rows)},
                          indent=2, sort_keys=True) + "\n"

    def report_text(self) -> str:
        return render_report(self.rows)


def run_bench(synth: SynthConfig, cfg: TrainConfig = TrainConfig(), workers=None,
              save_bundle=None) -> BenchResult:
    data = generate_full(synth)
    bundle = train_bundle(data.train, cfg)
    if save_bundle:
        bundle.save(save_bundle)
    rows, extra = evaluate_all(bundle, data.test, workers)
    info = {
        "synth": asdict(synth),
        "train": asdict(cfg),
        "stacker_cv_accuracy": bundle.stacker.meta["cv_accuracy"],
        "test_sentences": len(data.test),
        "test_tokens": data.test.n_tokens,
        **extra,
    }
    return BenchResult(rows, info)
