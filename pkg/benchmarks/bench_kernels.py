"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--pairs 2000] [--repeat 5]

Times LCS and the monotone alignment on random token-id sequences with the
length profile of short dialogue utterances, then end-to-end n-gram scoring
with each backend (the backend is chosen at import, so that part runs in a
subprocess per backend).
"""

import argparse
import os
import random
import subprocess
import sys
import timeit

from tstsim import _kernels_py

try:
    from tstsim import _kernels as _kernels_c
except ImportError:
    _kernels_c = None

END_TO_END = """
import time, random
from tstsim.kernels import BACKEND
from tstsim.dataset import TextPair
from tstsim.metrics import ScoringConfig, NGRAM_MEASURES, analyze_pair
from tstsim.ner import Gazetteer
rng = random.Random(0)
vocab = "i want to book a flight from boston to denver on friday the 5th for two people please".split()
pairs = [TextPair(str(k), " ".join(rng.choices(vocab, k=rng.randint(4, 20))),
                  " ".join(rng.choices(vocab, k=rng.randint(4, 20)))) for k in range({n})]
cfg = ScoringConfig(measures=NGRAM_MEASURES, gazetteer=Gazetteer.default())
t = time.perf_counter()
for p in pairs:
    analyze_pair(p, cfg)
print(BACKEND, time.perf_counter() - t)
"""


def make_cases(n, seed=0):
    rng = random.Random(seed)
    cases = []
    for _ in range(n):
        a = [rng.randrange(12) for _ in range(rng.randint(4, 24))]
        b = [rng.randrange(12) for _ in range(rng.randint(4, 24))]
        cases.append((a, b, [x // 2 for x in a], [x // 2 for x in b]))
    return cases


def bench_module(mod, cases, repeat):
    def lcs():
        for a, b, _, _ in cases:
            mod.lcs_length(a, b)

    def align():
        for a, b, la, lb in cases:
            mod.greedy_align(a, b, la, lb)

    return {
        "lcs_length": min(timeit.repeat(lcs, number=1, repeat=repeat)),
        "greedy_align": min(timeit.repeat(align, number=1, repeat=repeat)),
    }


def end_to_end(n, pure):
    env = dict(os.environ)
    env.pop("TSTSIM_PURE_PYTHON", None)
    if pure:
        env["TSTSIM_PURE_PYTHON"] = "1"
    out = subprocess.run(
        [sys.executable, "-c", END_TO_END.format(n=n)], env=env, capture_output=True, text=True, check=True
    ).stdout.split()
    return out[0], float(out[1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    cases = make_cases(args.pairs)
    py = bench_module(_kernels_py, cases, args.repeat)
    print(f"{'kernel':<14} {'python (s)':>11} {'cython (s)':>11} {'speedup':>8}")
    if _kernels_c is None:
        for name, t in py.items():
            print(f"{name:<14} {t:>11.4f} {'n/a':>11} {'':>8}")
        print("compiled extension not built; only the Python backend was timed")
    else:
        c = bench_module(_kernels_c, cases, args.repeat)
        for name in py:
            print(f"{name:<14} {py[name]:>11.4f} {c[name]:>11.4f} {py[name] / c[name]:>7.1f}x")
        for a, b, la, lb in cases:
            assert _kernels_c.lcs_length(a, b) == _kernels_py.lcs_length(a, b)
            assert _kernels_c.greedy_align(a, b, la, lb) == _kernels_py.greedy_align(a, b, la, lb)

    print()
    print(f"end-to-end n-gram scoring, {args.pairs} pairs")
    for pure in (True, False):
        backend, seconds = end_to_end(args.pairs, pure)
        print(f"  {backend:<8} {seconds:.3f}s")


if __name__ == "__main__":
    main()
