"""Compare the compiled and pure-Python series kernels.

    python3 benchmarks/bench_kernel.py [--repeat 3] [--T 24]

Times a raw truncated product of dense series, then the commutator tower
gamma_2 at (a, b) = (0, 1).  Both backends must give identical results.
"""

import argparse
import json
import time

from k3germ import kernel
from k3germ.germs import _letter_germ, gamma_tower
from k3germ.powerseries import Series
from k3germ.surface import SurfaceParams


def dense(T, seed):
    terms = {(i, j): (i * 7 + j * 3 + seed) % 11 - 5 for i in range(T) for j in range(T - i)}
    return Series.from_terms(terms, ("x", "y"), T)


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--T", type=int, default=24, help="truncation order for the raw product")
    ap.add_argument("--tower-T", type=int, default=14)
    args = ap.parse_args()

    f, g = dense(args.T, 1), dense(args.T, 4)
    params = SurfaceParams.parse("0", "1")
    rows, results = [], {}
    for name in kernel.available_backends():
        kernel.set_backend(name)
        t_mul, prod = best_of(lambda: f * g, args.repeat)

        def tower():
            _letter_germ.cache_clear()
            return gamma_tower(2, 4, params, args.tower_T)[-1].forward

        t_tower, top = best_of(tower, args.repeat)
        results[name] = (prod, top)
        rows.append({"backend": name, "mul_s": round(t_mul, 4), "tower_s": round(t_tower, 4)})

    outputs = list(results.values())
    if any(o != outputs[0] for o in outputs):
        raise SystemExit("backends disagree")
    base = next((r for r in rows if r["backend"] == "python"), None)
    for r in rows:
        if base and r is not base:
            r["mul_speedup"] = round(base["mul_s"] / r["mul_s"], 2)
            r["tower_speedup"] = round(base["tower_s"] / r["tower_s"], 2)
    print(json.dumps({"T": args.T, "tower_T": args.tower_T, "results": rows}, indent=2))


if __name__ == "__main__":
    main()
