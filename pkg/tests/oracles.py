"""Independent reference implementations used as test oracles.

Everything here is deliberately naive: exhaustive enumeration over label
sequences and direct recursion over raw n-gram counts. Nothing is imported
from the package.
"""
from __future__ import annotations

import itertools
import math


def score(start, trans, emit, stop, path):
    s = start[path[0]] + emit[0][path[0]]
    for i in range(1, len(path)):
        s += trans[path[i - 1]][path[i]] + emit[i][path[i]]
    return s + stop[path[-1]]


def all_paths(n, n_states):
    return itertools.product(range(n_states), repeat=n)


def brute_argmax(start, trans, emit, stop):
    n, S = len(emit), len(emit[0])
    best, best_path = -math.inf, None
    for p in all_paths(n, S):
        v = score(start, trans, emit, stop, p)
        if v > best:
            best, best_path = v, list(p)
    return best_path, best


def brute_marginals(start, trans, emit, stop):
    """Posterior marginals [n][S] and log Z by summing over every path."""
    n, S = len(emit), len(emit[0])
    scored = [(p, score(start, trans, emit, stop, p)) for p in all_paths(n, S)]
    m = max(v for _, v in scored)
    z = sum(math.exp(v - m) for _, v in scored)
    post = [[0.0] * S for _ in range(n)]
    for p, v in scored:
        w = math.exp(v - m) / z
        for i, s in enumerate(p):
            post[i][s] += w
    return post, m + math.log(z)


def wb_char_prob(tokens, order, symbol, context, bos="\x02", eos="\x03", unk="\x00"):
    """Interpolated Witten-Bell P(symbol | context), recomputed from raw text.

    Recurses from the longest history down to a uniform base over the
    observed characters plus end and unknown.
    """
    alphabet = sorted({c for t in tokens for c in t})
    norm = lambda c: c if c in alphabet or c in (bos, eos) else unk
    symbol = norm(symbol)
    context = "".join(norm(c) for c in context)
    seqs = [bos * (order - 1) + t + eos for t in tokens]

    def follow(h):
        out = {}
        for s in seqs:
            for i in range(order - 1, len(s)):
                if s[i - len(h):i] == h or not h:
                    out[s[i]] = out.get(s[i], 0) + 1
        return out

    def p(k):
        if k < 0:
            return 1.0 / (len(alphabet) + 2)
        h = context[len(context) - k:] if k else ""
        if k > len(context):
            return p(k - 1)
        f = follow(h)
        if not f:
            return p(k - 1)
        n, t = sum(f.values()), len(f)
        return (f.get(symbol, 0) + t * p(k - 1)) / (n + t)

    return p(min(order - 1, len(context)))
