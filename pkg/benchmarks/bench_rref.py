"""Time the compiled mod-p RREF kernel against the numpy fallback."""
import argparse
import time

import numpy as np

from stratkit import exactlinalg as el


def best_of(fn, reps):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=32003)
    ap.add_argument("--sizes", type=int, nargs="+", default=[20, 50, 100, 200])
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    print("backend: %s" % el.kernel_backend())
    print("%6s %12s %12s %8s" % ("n", "numpy s", "cython s", "speedup"))
    for n in args.sizes:
        a = rng.integers(0, args.p, size=(n, n + n // 2))
        tp = best_of(lambda: el.rref_modp_python(a, args.p), args.reps)
        if el._kernels is None:
            print("%6d %12.4f %12s %8s" % (n, tp, "-", "-"))
            continue
        r1, p1 = el.rref_modp_python(a, args.p)
        r2, p2 = el.rref_modp_compiled(a, args.p)
        assert p1 == p2 and (r1 == r2).all()
        tc = best_of(lambda: el.rref_modp_compiled(a, args.p), args.reps)
        print("%6d %12.4f %12.4f %8.1f" % (n, tp, tc, tp / tc if tc else float("inf")))


if __name__ == "__main__":
    main()
