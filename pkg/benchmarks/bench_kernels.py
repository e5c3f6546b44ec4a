"""Time the numba and numpy backends of the hot kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each kernel is called once per backend before timing, so numba compile time
is excluded; it is reported separately as the warm-up time.
"""

import argparse
import time

import numpy as np

from cyctomo import _kernels
from cyctomo.cyclotomic import CycNum, reduction_matrix
from cyctomo.modelset import ModelSetSpec, generate_patch
from cyctomo.solutions import _fixing_units, quadruple_array
from cyctomo.tomography import point_tables


def case_screen():
    m = 60
    quads = quadruple_array(m)
    red = reduction_matrix(m)
    autos = np.array(_fixing_units(m, 5), dtype=np.int64)
    return "galois_screen m=60", lambda: _kernels.galois_screen(quads, m, red, autos)


def case_fnum():
    m = 48
    quads = quadruple_array(m)[:20000]
    red = reduction_matrix(m)
    return "f_numerators m=48 (20k)", lambda: _kernels.f_numerators(quads, m, red)


def case_patch():
    spec = ModelSetSpec.default(8)
    return "box_scan via patch n=8 R=12", lambda: generate_patch(spec, 12)


def case_convex():
    pts = [CycNum.from_coeffs(4, [x, y]) for x in range(4) for y in range(5)]
    o, bt, lex = point_tables(pts)
    rng = np.random.default_rng(0)
    w = rng.integers(0, 1 << 40, size=len(pts), dtype=np.int64)
    return "enumerate_convex 4x5 grid", lambda: _kernels.enumerate_convex(o, bt, lex, w)


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    cases = [case_screen(), case_fnum(), case_patch(), case_convex()]
    print(f"{'kernel':32s}" + "".join(f"{b:>12s}" for b in backends) + f"{'speedup':>10s}")
    for name, fn in cases:
        row = []
        for b in backends:
            _kernels.set_backend(b)
            t0 = time.perf_counter()
            fn()
            warm = time.perf_counter() - t0
            row.append(timed(fn, args.repeat))
            if b == "numba":
                print(f"  ({name}: numba warm-up {warm:.2f}s)")
        speed = f"{row[0] / row[-1]:9.1f}x" if len(row) > 1 else ""
        print(f"{name:32s}" + "".join(f"{t:11.3f}s" for t in row) + speed)


if __name__ == "__main__":
    main()
