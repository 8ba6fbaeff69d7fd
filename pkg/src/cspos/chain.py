"""First-order chain decoding in log space.

All functions take log-potentials: ``start[s]``, ``trans[p, s]``,
``emit[i, s]`` and ``stop[s]`` for a sentence of ``n`` positions over ``S``
states. A path scores ``start[y0] + sum emit[i, yi] + sum trans[y(i-1), yi]
+ stop[y(n-1)]``.
"""
from __future__ import annotations

import math

import numpy as np


def logsumexp(a, axis=None):
    a = np.asarray(a, dtype=float)
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(a - m), axis=axis, keepdims=True)) + m
    if axis is None:
        return float(out.reshape(()))
    return np.squeeze(out, axis=axis)


def path_score(start, trans, emit, stop, path) -> float:
    score = start[path[0]] + emit[0, path[0]]
    for i in range(1, len(path)):
        score += trans[path[i - 1], path[i]] + emit[i, path[i]]
    return float(score + stop[path[-1]])


def viterbi(start, trans, emit, stop):
    """Best path and its score. Ties go to the lower state index."""
    n, S = emit.shape
    delta = start + emit[0]
    back = np.zeros((n, S), dtype=np.int64)
    for i in range(1, n):
        cand = delta[:, None] + trans
        back[i] = np.argmax(cand, axis=0)
        delta = cand[back[i], np.arange(S)] + emit[i]
    delta = delta + stop
    last = int(np.argmax(delta))
    path = [last]
    for i in range(n - 1, 0, -1):
        last = int(back[i, last])
        path.append(last)
    path.reverse()
    return path, float(delta[path[-1]])


def forward_backward(start, trans, emit, stop):
    """Posterior marginals ``[n, S]`` plus the log-partition from each pass.

    Runs in probability space with per-position rescaling; emissions are
    shifted by their row maximum before exponentiation.
    """
    n, S = emit.shape
    shift = np.max(emit, axis=1, keepdims=True)
    shift = np.where(np.isfinite(shift), shift, 0.0)
    E = np.exp(emit - shift)
    A = np.exp(trans)
    s0, sf = np.exp(start), np.exp(stop)

    alpha = np.empty((n, S))
    scale = np.empty(n)
    a = s0 * E[0]
    for i in range(n):
        if i:
            a = (alpha[i - 1] @ A) * E[i]
        scale[i] = a.sum()
        alpha[i] = a / scale[i]
    end = float(alpha[n - 1] @ sf)

    beta = np.empty((n, S))
    beta[n - 1] = sf
    for i in range(n - 2, -1, -1):
        beta[i] = A @ (E[i + 1] * beta[i + 1]) / scale[i + 1]
    first = float((s0 * E[0]) @ beta[0])

    total_shift = float(shift.sum())
    log_scale = float(np.log(scale).sum())
    log_z_fwd = log_scale + math.log(end) + total_shift
    log_z_bwd = float(np.log(scale[1:]).sum()) + math.log(first) + total_shift
    post = alpha * beta / end
    return post, log_z_fwd, log_z_bwd
