"""Command-line entry point: ``cspos <subcommand> ...``.

Every subcommand also accepts ``--config FILE``, a ``key=value`` file whose
keys are long option names (``switch-penalty=0.5``); flags given on the
command line win.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import fields
from pathlib import Path

from .core import CsposError, OutputMismatch, Sentence, TaggedToken, TaggerOutput
from .corpus import Corpus, corpus_stats, parse_corpus, write_corpus
from .evaluation import breakdown, render_report, report_json
from .lid import train_lid
from .pipeline import TrainConfig, run_bench, train_stacker_cv
from .strategies import ConditionId, ResourceBundle, run_condition
from .synth import PRESETS, SynthConfig, generate_full, manifest_json
from .tagger import TaggerModel, train_tagger
from .tagmap import load_mapping, map_corpus

log = logging.getLogger("cspos")

SYNTH_FLAGS = [f.name for f in fields(SynthConfig) if f.name != "seed"]


def read_config(path) -> dict:
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def _synth_args(p, seed_default=0):
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--seed", type=int, default=seed_default)
    for f in fields(SynthConfig):
        if f.name == "seed":
            continue
        p.add_argument("--" + f.name.replace("_", "-"), type=type(f.default), default=None)


def _synth_config(args) -> SynthConfig:
    over = {k: getattr(args, k) for k in SYNTH_FLAGS if getattr(args, k) is not None}
    if args.preset:
        return SynthConfig.preset(args.preset, seed=args.seed, **over)
    return SynthConfig(seed=args.seed, **over)


def _tagger_args(p):
    p.add_argument("--suffix-max", type=int, default=4)
    p.add_argument("--rare-threshold", type=int, default=2)


def _lid_args(p):
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--prior-l1", type=float, default=0.5)
    p.add_argument("--switch-penalty", type=float, default=math.log(2))


def _stack_args(p):
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--stack-seed", "--seed", dest="stack_seed", type=int, default=0)
    p.add_argument("--paper-features-only", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="cspos", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    def add(name, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--config", help="key=value defaults file")
        subs[name] = p
        return p

    p = add("synth", "generate a synthetic code-switched corpus")
    _synth_args(p)
    p.add_argument("--out-dir", default=".")

    p = add("stats", "corpus statistics")
    p.add_argument("--input", required=True)
    p.add_argument("--json", action="store_true")

    p = add("map-tags", "map a source tagset to universal tags")
    p.add_argument("--input", required=True)
    p.add_argument("--table", required=True, help="table file or built-in name "
                   "(bw_to_universal, bangor_to_universal)")
    p.add_argument("--output", required=True)

    p = add("train-lid", "train the character-LM language identifier")
    p.add_argument("--l1", required=True, help="L1 corpus")
    p.add_argument("--l2", required=True, help="L2 corpus")
    _lid_args(p)
    p.add_argument("--output", required=True)

    p = add("train-tagger", "train a sequence tagger")
    p.add_argument("--input", required=True)
    _tagger_args(p)
    p.add_argument("--output", required=True)

    p = add("train-stacker", "train the COMB4 stacker with k-fold validation")
    p.add_argument("--tagger-l1", required=True)
    p.add_argument("--tagger-l2", required=True)
    p.add_argument("--input", required=True, help="code-switched training corpus")
    _stack_args(p)
    p.add_argument("--output", required=True)

    p = add("run", "tag a corpus under one condition")
    p.add_argument("--condition", required=True, type=str.upper,
                   choices=[c.value for c in ConditionId])
    p.add_argument("--bundle", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)

    p = add("evaluate", "accuracy breakdown of predictions against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--name", default="pred")
    p.add_argument("--json-out")

    p = add("bench", "full pipeline on synthetic data, all conditions")
    _synth_args(p, seed_default=0)
    _tagger_args(p)
    _lid_args(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--paper-features-only", action="store_true")
    p.add_argument("--out-dir")
    p.add_argument("--save-bundle")
    return parser, subs


def _apply_config(parser, subs, argv):
    """Pre-parse to find --config, then install its values as defaults."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    values = read_config(known.config)
    cmd = next((a for a in argv if a in subs), None)
    if cmd is None:
        return
    sp = subs[cmd]
    actions = {a.dest: a for a in sp._actions}
    defaults = {}
    for k, v in values.items():
        if k not in actions:
            parser.error(f"unknown config key {k!r} for {cmd}")
        a = actions[k]
        if isinstance(a, argparse._StoreTrueAction):
            defaults[k] = v.lower() in ("1", "true", "yes", "on")
        else:
            defaults[k] = a.type(v) if a.type else v
        a.required = False
    sp.set_defaults(**defaults)


def cmd_synth(args):
    cfg = _synth_config(args)
    res = generate_full(cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_corpus(res.train, out / "train.tsv")
    write_corpus(res.test, out / "test.tsv")
    (out / "manifest.json").write_text(manifest_json(res, cfg), encoding="utf-8")
    print(f"wrote {len(res.train)} train / {len(res.test)} test sentences to {out}")


def cmd_stats(args):
    st = corpus_stats(parse_corpus(args.input))
    sys.stdout.write(st.to_json() + "\n" if args.json else st.to_tsv())


def cmd_map_tags(args):
    corpus = parse_corpus(args.input, raw_tags=True)
    write_corpus(map_corpus(corpus, load_mapping(args.table)), args.output)


def cmd_train_lid(args):
    words = lambda c: (w for s in c for w in s.words)
    model = train_lid(words(parse_corpus(args.l1)), words(parse_corpus(args.l2)),
                      args.order, args.prior_l1, args.switch_penalty)
    model.save(args.output)


def cmd_train_tagger(args):
    train_tagger(parse_corpus(args.input), args.suffix_max, args.rare_threshold).save(args.output)


def cmd_train_stacker(args):
    t1, t2 = TaggerModel.load(args.tagger_l1), TaggerModel.load(args.tagger_l2)
    model, accs = train_stacker_cv(t1, t2, parse_corpus(args.input), args.folds, args.epochs,
                                   args.stack_seed, context=not args.paper_features_only)
    model.save(args.output)
    if accs:
        print(f"{len(accs)}-fold validation accuracy: {sum(accs) / len(accs):.2f}")


def cmd_run(args):
    bundle = ResourceBundle.load(args.bundle)
    corpus = parse_corpus(args.input)
    out = []
    for s in corpus:
        pred = run_condition(bundle, args.condition, s)
        out.append(Sentence(s.id, tuple(TaggedToken(t.text, t.gold_lang, tag)
                                        for t, tag in zip(s.tokens, pred.tags))))
    write_corpus(Corpus(tuple(out), corpus.name), args.output)


def cmd_evaluate(args):
    gold, pred = parse_corpus(args.gold), parse_corpus(args.pred)
    if len(gold) != len(pred):
        raise OutputMismatch(f"{len(pred)} predicted sentences for {len(gold)} gold")
    outs = []
    for g, p in zip(gold, pred):
        if g.words != p.words:
            raise OutputMismatch(f"sentence {g.id!r}: tokens differ between gold and prediction")
        outs.append(TaggerOutput(tuple(p.tags), (1.0,) * len(p)))
    rows = [breakdown(gold, outs, args.name)]
    sys.stdout.write(render_report(rows))
    if args.json_out:
        Path(args.json_out).write_text(report_json(rows), encoding="utf-8")


def cmd_bench(args):
    synth = _synth_config(args)
    cfg = TrainConfig(args.order, args.prior_l1, args.switch_penalty, args.suffix_max,
                      args.rare_threshold, args.folds, args.epochs, 0, args.paper_features_only)
    result = run_bench(synth, cfg, save_bundle=args.save_bundle)
    text = result.report_text()
    sys.stdout.write(text)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(text, encoding="utf-8")
        (out / "report.json").write_text(result.report_json(), encoding="utf-8")


COMMANDS = {
    "synth": cmd_synth,
    "stats": cmd_stats,
    "map-tags": cmd_map_tags,
    "train-lid": cmd_train_lid,
    "train-tagger": cmd_train_tagger,
    "train-stacker": cmd_train_stacker,
    "run": cmd_run,
    "evaluate": cmd_evaluate,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        _apply_config(parser, subs, argv)
    except (OSError, ValueError) as e:
        print(f"cspos: error: {e}", file=sys.stderr)
        return 1
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (CsposError, OSError, ValueError, KeyError) as e:
        print(f"cspos: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
