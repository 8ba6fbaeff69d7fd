"""Token accuracy with the Overall / CS / L1 / L2 breakdown, and report rendering."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal, localcontext
from fractions import Fraction
from typing import Optional, Sequence

from .core import LabelMissing, OutputMismatch, PurityClass, UPosTag, purity_of

CATEGORIES = ("overall", "cs", "l1", "l2")
HEADERS = ("Approach", "Overall", "CS", "L1", "L2")
ABSENT_CELL = "—"

_CATEGORY_OF = {
    PurityClass.CODE_SWITCHED: "cs",
    PurityClass.PURE_L1: "l1",
    PurityClass.PURE_L2: "l2",
    PurityClass.INDETERMINATE: None,
}


def _aligned(gold, preds):
    if len(gold) != len(preds):
        raise OutputMismatch(f"{len(preds)} predictions for {len(gold)} gold sentences")
    for s, p in zip(gold, preds):
        if len(s) != len(p):
            raise OutputMismatch(f"sentence {s.id!r}: {len(p)} predicted tags for {len(s)} tokens")
        yield s, p


def _count(sentence, pred):
    correct = 0
    for i, (tok, tag) in enumerate(zip(sentence.tokens, pred.tags)):
        if tok.gold_tag is None:
            raise LabelMissing(f"sentence {sentence.id!r} token {i} has no gold tag")
        correct += tok.gold_tag is tag or tok.gold_tag == tag
    return correct, len(sentence)


def accuracy(gold, preds) -> float:
    """Token-level accuracy in percent."""
    correct = total = 0
    for s, p in _aligned(gold, preds):
        c, n = _count(s, p)
        correct += c
        total += n
    return 100.0 * correct / total if total else 0.0


@dataclass
class EvalRow:
    name: str
    # category -> (correct, total); categories with no tokens are absent
    counts: dict = field(default_factory=dict)
    ties: Optional[int] = None
    # explicit percentages, for rows not backed by counts
    fixed: dict = field(default_factory=dict)

    def accuracy(self, category: str) -> Optional[Fraction]:
        if category in self.fixed:
            v = self.fixed[category]
            return None if v is None else Fraction(str(v))
        c = self.counts.get(category)
        if c is None or c[1] == 0:
            return None
        return Fraction(100 * c[0], c[1])

    @classmethod
    def from_percentages(cls, name, overall=None, cs=None, l1=None, l2=None) -> "EvalRow":
        return cls(name, fixed={"overall": overall, "cs": cs, "l1": l1, "l2": l2})


def breakdown(gold, preds, name: str = "", ties: Optional[int] = None) -> EvalRow:
    """Accuracy overall and within CS, pure-L1 and pure-L2 sentences (gold labels).

    Indeterminate sentences count toward Overall only.
    """
    tallies = {c: [0, 0] for c in CATEGORIES}
    for s, p in _aligned(gold, preds):
        c, n = _count(s, p)
        cat = _CATEGORY_OF[purity_of(s)]
        for key in ("overall", cat):
            if key is not None:
                tallies[key][0] += c
                tallies[key][1] += n
    counts = {k: tuple(v) for k, v in tallies.items() if v[1]}
    return EvalRow(name, counts, ties)


def round_pct(x) -> Optional[Decimal]:
    """Round half-up to two decimals."""
    if x is None:
        return None
    if not isinstance(x, Fraction):
        x = Fraction(str(x))
    with localcontext() as ctx:
        ctx.prec = 60
        d = Decimal(x.numerator) / Decimal(x.denominator)
        return d.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)


def _cells(row):
    return [round_pct(row.accuracy(c)) for c in CATEGORIES]


def render_report(rows: Sequence[EvalRow]) -> str:
    if not rows:
        raise ValueError("nothing to render")
    table = [list(HEADERS)]
    for row in rows:
        table.append([row.name] + [ABSENT_CELL if v is None else f"{v:.2f}" for v in _cells(row)])
    widths = [max(len(r[i]) for r in table) for i in range(len(HEADERS))]
    lines = []
    for k, r in enumerate(table):
        cells = [r[0].ljust(widths[0])] + [r[i].rjust(widths[i]) for i in range(1, len(r))]
        lines.append(" | ".join(cells).rstrip())
        if k == 0:
            lines.append("-+-".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def report_dict(rows: Sequence[EvalRow]) -> list[dict]:
    out = []
    for row in rows:
        d = {"approach": row.name}
        for cat, v in zip(CATEGORIES, _cells(row)):
            d[cat] = None if v is None else float(v)
        d["counts"] = {k: list(v) for k, v in sorted(row.counts.items())}
        if row.ties is not None:
            d["ties"] = row.ties
        out.append(d)
    return out


def report_json(rows: Sequence[EvalRow]) -> str:
    return json.dumps(report_dict(rows), indent=2, ensure_ascii=False) + "\n"
