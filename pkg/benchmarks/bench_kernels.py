#!/usr/bin/env python3
"""Time the numba kernels against the pure-numpy fallback.

Run from the repo root:

    python3 benchmarks/bench_kernels.py

The numba column reports post-compilation (warm) timings. Training uses a
synthetic sparse problem shaped like the toy corpus (short sentences, a few
dozen features per softmax site) and a 10x larger one.
"""

import time

import numpy as np

from codeswitch import kernels
from codeswitch.seeding import derive_rng


def make_problem(rng, n_examples, n_feats_i=4000, n_feats_s=6000, ki=4, ks=13):
    i_counts = rng.integers(10, 25, size=n_examples)
    i_off = np.zeros(n_examples + 1, dtype=np.int64)
    np.cumsum(i_counts, out=i_off[1:])
    i_flat = rng.integers(0, n_feats_i, size=int(i_off[-1])).astype(np.int64)
    i_lab = rng.integers(0, ki, size=n_examples).astype(np.int64)

    tok_counts = rng.integers(4, 11, size=n_examples)
    pos_off = np.zeros(n_examples + 1, dtype=np.int64)
    np.cumsum(tok_counts, out=pos_off[1:])
    n_pos = int(pos_off[-1])
    s_counts = rng.integers(10, 16, size=n_pos)
    s_off = np.zeros(n_pos + 1, dtype=np.int64)
    np.cumsum(s_counts, out=s_off[1:])
    s_flat = rng.integers(0, n_feats_s, size=int(s_off[-1])).astype(np.int64)
    s_lab = rng.integers(0, ks, size=n_pos).astype(np.int64)
    order = rng.permutation(n_examples).astype(np.int64)
    Wi = np.zeros((n_feats_i, ki))
    Ws = np.zeros((n_feats_s, ks))
    return Wi, Ws, (i_flat, i_off, i_lab, s_flat, s_off, pos_off, s_lab, order)


def best_of(fn, repeat=5):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_scoring(rng, n_groups):
    W = rng.normal(size=(6000, 13))
    counts = rng.integers(10, 16, size=n_groups)
    offsets = np.zeros(n_groups + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    flat = rng.integers(0, 6000, size=int(offsets[-1])).astype(np.int64)
    labels = rng.integers(0, 13, size=n_groups).astype(np.int64)

    def run_np():
        kernels.nll_numpy(kernels.group_scores_numpy(W, flat, offsets), labels)

    t_np = best_of(run_np)
    t_nb = None
    if kernels.HAVE_NUMBA:
        def run_nb():
            kernels.nll_numba(kernels.group_scores_numba(W, flat, offsets), labels)

        run_nb()  # compile
        t_nb = best_of(run_nb)
    return t_np, t_nb


def bench_training(rng, n_examples, epochs=3):
    def run(sweep):
        Wi, Ws, args = make_problem(rng, n_examples)
        for _ in range(epochs):
            sweep(Wi, Ws, *args, 32, 0.5, 1e-4)

    t_np = best_of(lambda: run(kernels.train_sweep_numpy), repeat=3)
    t_nb = None
    if kernels.HAVE_NUMBA:
        run(kernels.train_sweep_numba)  # compile
        t_nb = best_of(lambda: run(kernels.train_sweep_numba), repeat=3)
    return t_np, t_nb


def row(name, t_np, t_nb):
    if t_nb is None:
        print(f"{name:<34} {t_np * 1e3:>10.2f} {'n/a':>10} {'n/a':>8}")
    else:
        print(f"{name:<34} {t_np * 1e3:>10.2f} {t_nb * 1e3:>10.2f} {t_np / t_nb:>7.1f}x")


def main():
    rng = derive_rng(0, "bench")
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'workload':<34} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    row("score 1k groups", *bench_scoring(rng, 1_000))
    row("score 100k groups", *bench_scoring(rng, 100_000))
    row("train 3 epochs x 500 examples", *bench_training(rng, 500))
    row("train 3 epochs x 5000 examples", *bench_training(rng, 5_000))


if __name__ == "__main__":
    main()
