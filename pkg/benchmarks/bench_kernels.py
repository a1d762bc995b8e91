"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import random
import time

import numpy as np

from hyperdeck import _kernels as K


def random_csr(n: int, p: float, rng: random.Random):
    nbrs = [[] for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p:
                nbrs[a].append(b)
                nbrs[b].append(a)
    indptr = np.zeros(n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(x) for x in nbrs])
    indices = np.array([v for x in nbrs for v in x], dtype=np.int64)
    return indptr, indices, np.zeros(n, dtype=np.int64)


def random_adj(n: int, p: float, rng: random.Random) -> np.ndarray:
    m = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p:
                m[a, b] = m[b, a] = 1
    return m


def best_of(fn, args, repeat: int) -> float:
    fn(*args)  # warm-up (includes JIT compilation for numba)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)

    cases = [
        ("refine_colors n=400", K.refine_colors_numba, K.refine_colors_numpy, random_csr(400, 0.02, rng)),
        ("brute_force_min_mask n=7", K.brute_force_min_mask_numba, K.brute_force_min_mask_numpy,
         (random_adj(7, 0.5, rng),)),
        ("simple_morphisms 4->5", K.simple_morphisms_numba, K.simple_morphisms_numpy,
         (random_adj(4, 0.5, rng), random_adj(5, 0.6, rng))),
    ]
    print(f"{'kernel':<28}{'numba (ms)':>12}{'numpy (ms)':>12}{'speedup':>10}")
    for name, fast, slow, data in cases:
        a = best_of(fast, data, args.repeat)
        b = best_of(slow, data, args.repeat)
        print(f"{name:<28}{a * 1e3:>12.3f}{b * 1e3:>12.3f}{b / a:>9.1f}x")


if __name__ == "__main__":
    main()
