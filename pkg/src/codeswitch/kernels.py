"""Hot numeric kernels for the linear victim model.

Two interchangeable implementations of each kernel: numba ``@njit`` loops
(the default when numba imports) and a vectorized pure-numpy fallback.
Set ``CODESWITCH_NO_NUMBA=1`` to force the numpy path; it is also selected
automatically when numba is unavailable. ``benchmarks/bench_kernels.py``
times the two side by side.

Sparse layout: a *group* is one softmax site -- a sentence for the intent
head, a token position for the slot head. Feature rows of all groups are
concatenated into ``flat_idx``; group ``g`` owns
``flat_idx[offsets[g]:offsets[g+1]]``. Every group carries at least one
feature (a bias), which the reduceat-based numpy path relies on.

The two paths run the same float64 operations in the same order, but SIMD
transcendentals may differ from scalar libm by an ulp, so cross-path
agreement is close, not bitwise. Each path is individually deterministic.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_OFF = os.environ.get("CODESWITCH_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")

HAVE_NUMBA = False
if not _ENV_OFF:
    try:
        from numba import njit

        HAVE_NUMBA = True
    except ImportError:
        pass


# ---------------------------------------------------------------- numpy path


def group_scores_numpy(W: np.ndarray, flat_idx: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Sum the weight rows of each group's features: (n_groups, n_classes)."""
    n = offsets.shape[0] - 1
    if n == 0:
        return np.zeros((0, W.shape[1]), dtype=W.dtype)
    return np.add.reduceat(W[flat_idx], offsets[:-1], axis=0)


def nll_numpy(scores: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Per-group negative log-likelihood of the given class labels."""
    if scores.shape[0] == 0:
        return np.zeros(0, dtype=np.float64)
    m = scores.max(axis=1)
    lse = m + np.log(np.exp(scores - m[:, None]).sum(axis=1))
    return lse - scores[np.arange(scores.shape[0]), labels]


def softmax_numpy(scores: np.ndarray) -> np.ndarray:
    if scores.shape[0] == 0:
        return scores.copy()
    m = scores.max(axis=1, keepdims=True)
    e = np.exp(scores - m)
    return e / e.sum(axis=1, keepdims=True)


def train_sweep_numpy(
    Wi: np.ndarray,
    Ws: np.ndarray,
    i_flat: np.ndarray,
    i_off: np.ndarray,
    i_lab: np.ndarray,
    s_flat: np.ndarray,
    s_off: np.ndarray,
    pos_off: np.ndarray,
    s_lab: np.ndarray,
    order: np.ndarray,
    batch_size: int,
    lr: float,
    l2: float,
) -> None:
    """One epoch of mini-batch gradient descent, updating weights in place.

    Loss per example: intent NLL plus the mean of per-token slot NLLs. L2 is
    applied as weight decay once per batch, before the gradient step.
    """
    n = order.shape[0]
    decay = 1.0 - lr * l2
    for start in range(0, n, batch_size):
        batch = order[start : start + batch_size]
        b = batch.shape[0]
        coef = lr / b
        if l2 > 0.0:
            Wi *= decay
            Ws *= decay

        # intent head
        i_cat = np.concatenate([i_flat[i_off[e] : i_off[e + 1]] for e in batch])
        i_counts = (i_off[batch + 1] - i_off[batch]).astype(np.int64)
        i_offs = np.zeros(b + 1, dtype=np.int64)
        np.cumsum(i_counts, out=i_offs[1:])
        probs_i = softmax_numpy(group_scores_numpy(Wi, i_cat, i_offs))
        probs_i[np.arange(b), i_lab[batch]] -= 1.0
        probs_i *= coef
        np.subtract.at(Wi, i_cat, np.repeat(probs_i, i_counts, axis=0))

        # slot head
        pos_ids = np.concatenate(
            [np.arange(pos_off[e], pos_off[e + 1], dtype=np.int64) for e in batch]
        )
        n_tok = (pos_off[batch + 1] - pos_off[batch]).astype(np.int64)
        s_cat = np.concatenate([s_flat[s_off[p] : s_off[p + 1]] for p in pos_ids])
        s_counts = (s_off[pos_ids + 1] - s_off[pos_ids]).astype(np.int64)
        s_offs = np.zeros(pos_ids.shape[0] + 1, dtype=np.int64)
        np.cumsum(s_counts, out=s_offs[1:])
        probs_s = softmax_numpy(group_scores_numpy(Ws, s_cat, s_offs))
        probs_s[np.arange(pos_ids.shape[0]), s_lab[pos_ids]] -= 1.0
        # each position's gradient is scaled by 1/len(sentence)
        probs_s *= (coef / n_tok.astype(np.float64)).repeat(n_tok)[:, None]
        np.subtract.at(Ws, s_cat, np.repeat(probs_s, s_counts, axis=0))


# ---------------------------------------------------------------- numba path


def _group_scores_loops(W, flat_idx, offsets):
    n = offsets.shape[0] - 1
    K = W.shape[1]
    out = np.zeros((n, K), dtype=np.float64)
    for g in range(n):
        for p in range(offsets[g], offsets[g + 1]):
            f = flat_idx[p]
            for k in range(K):
                out[g, k] += W[f, k]
    return out


def _nll_loops(scores, labels):
    n = scores.shape[0]
    K = scores.shape[1]
    out = np.zeros(n, dtype=np.float64)
    for g in range(n):
        m = scores[g, 0]
        for k in range(1, K):
            if scores[g, k] > m:
                m = scores[g, k]
        s = 0.0
        for k in range(K):
            s += np.exp(scores[g, k] - m)
        out[g] = m + np.log(s) - scores[g, labels[g]]
    return out


def _softmax_loops(scores):
    n = scores.shape[0]
    K = scores.shape[1]
    out = np.empty((n, K), dtype=np.float64)
    for g in range(n):
        m = scores[g, 0]
        for k in range(1, K):
            if scores[g, k] > m:
                m = scores[g, k]
        s = 0.0
        for k in range(K):
            out[g, k] = np.exp(scores[g, k] - m)
            s += out[g, k]
        for k in range(K):
            out[g, k] /= s
    return out


def _train_sweep_loops(
    Wi, Ws, i_flat, i_off, i_lab, s_flat, s_off, pos_off, s_lab, order, batch_size, lr, l2
):
    n = order.shape[0]
    Ki = Wi.shape[1]
    Ks = Ws.shape[1]
    decay = 1.0 - lr * l2
    for start in range(0, n, batch_size):
        stop = min(start + batch_size, n)
        b = stop - start
        coef = lr / b
        if l2 > 0.0:
            Wi *= decay
            Ws *= decay

        # pass 1: probabilities from the pre-update weights
        probs_i = np.empty((b, Ki), dtype=np.float64)
        for x in range(b):
            e = order[start + x]
            row = np.zeros(Ki, dtype=np.float64)
            for p in range(i_off[e], i_off[e + 1]):
                f = i_flat[p]
                for k in range(Ki):
                    row[k] += Wi[f, k]
            m = row[0]
            for k in range(1, Ki):
                if row[k] > m:
                    m = row[k]
            s = 0.0
            for k in range(Ki):
                row[k] = np.exp(row[k] - m)
                s += row[k]
            for k in range(Ki):
                probs_i[x, k] = row[k] / s

        n_pos = 0
        for x in range(b):
            e = order[start + x]
            n_pos += pos_off[e + 1] - pos_off[e]
        probs_s = np.empty((n_pos, Ks), dtype=np.float64)
        pos_ids = np.empty(n_pos, dtype=np.int64)
        pos_scale = np.empty(n_pos, dtype=np.float64)
        q = 0
        for x in range(b):
            e = order[start + x]
            n_tok = pos_off[e + 1] - pos_off[e]
            for pos in range(pos_off[e], pos_off[e + 1]):
                row = np.zeros(Ks, dtype=np.float64)
                for p in range(s_off[pos], s_off[pos + 1]):
                    f = s_flat[p]
                    for k in range(Ks):
                        row[k] += Ws[f, k]
                m = row[0]
                for k in range(1, Ks):
                    if row[k] > m:
                        m = row[k]
                s = 0.0
                for k in range(Ks):
                    row[k] = np.exp(row[k] - m)
                    s += row[k]
                for k in range(Ks):
                    probs_s[q, k] = row[k] / s
                pos_ids[q] = pos
                pos_scale[q] = coef / n_tok
                q += 1

        # pass 2: apply the accumulated updates
        for x in range(b):
            e = order[start + x]
            y = i_lab[e]
            for p in range(i_off[e], i_off[e + 1]):
                f = i_flat[p]
                for k in range(Ki):
                    g = probs_i[x, k]
                    if k == y:
                        g -= 1.0
                    Wi[f, k] -= coef * g
        for q in range(n_pos):
            pos = pos_ids[q]
            y = s_lab[pos]
            sc = pos_scale[q]
            for p in range(s_off[pos], s_off[pos + 1]):
                f = s_flat[p]
                for k in range(Ks):
                    g = probs_s[q, k]
                    if k == y:
                        g -= 1.0
                    Ws[f, k] -= sc * g


if HAVE_NUMBA:
    group_scores_numba = njit(cache=True)(_group_scores_loops)
    nll_numba = njit(cache=True)(_nll_loops)
    softmax_numba = njit(cache=True)(_softmax_loops)
    train_sweep_numba = njit(cache=True)(_train_sweep_loops)

    group_scores = group_scores_numba
    nll = nll_numba
    softmax = softmax_numba
    train_sweep = train_sweep_numba
    BACKEND = "numba"
else:
    group_scores_numba = None
    nll_numba = None
    softmax_numba = None
    train_sweep_numba = None

    group_scores = group_scores_numpy
    nll = nll_numpy
    softmax = softmax_numpy
    train_sweep = train_sweep_numpy
    BACKEND = "numpy"
