"""Compare the numba and pure-numpy jet kernels.

Run with ``python benchmarks/bench_kernels.py [--points N] [--repeat R]``.
Each backend is timed on raw jet products, on jet composition with a unary
function, and on a full geometry plus Hamiltonian assembly.  Results of the two
backends are also checked against each other.
"""
import argparse
import time

import numpy as np

from curvop import jets
from curvop.dsl import builtin_catalog
from curvop.geometry import sample_geometry
from curvop.operators.assemble import assemble_dresselhaus


def _best(fn, repeat):
    fn()  # warm-up (includes numba compilation)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def run(points=200_000, repeat=5, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((jets.NCOEF, points))
    b = rng.standard_normal((jets.NCOEF, points))
    d = rng.standard_normal((4, points))
    cone = builtin_catalog("cone")

    cases = {
        "mul_coeffs": lambda: jets.mul_coeffs(a, b),
        "compose_coeffs": lambda: jets.compose_coeffs(a, d),
        "geometry 128x128": lambda: sample_geometry(cone, 128, 128)[2].V_g().value,
        "Dresselhaus assembly": lambda: len(assemble_dresselhaus(cone).terms),
    }
    available = ["numpy"] + (["numba"] if jets.HAVE_NUMBA else [])
    original = jets.backend()
    results = {}
    try:
        for name in available:
            jets.set_backend(name)
            results[name] = {case: _best(fn, repeat) for case, fn in cases.items()}
    finally:
        jets.set_backend(original)

    print(f"{'case':<24}" + "".join(f"{n:>12}" for n in available) + ("     speedup" if len(available) > 1 else ""))
    for case in cases:
        row = f"{case:<24}" + "".join(f"{results[n][case][0] * 1e3:>10.2f}ms" for n in available)
        if len(available) > 1:
            row += f"{results['numpy'][case][0] / results['numba'][case][0]:>11.2f}x"
        print(row)
    if len(available) > 1:
        for case in ("mul_coeffs", "compose_coeffs", "geometry 128x128"):
            x, y = results["numpy"][case][1], results["numba"][case][1]
            err = np.max(np.abs(x - y)) / max(1.0, np.max(np.abs(x)))
            print(f"backend agreement {case}: {err:.2e}")
    return results


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not jets.HAVE_NUMBA:
        print("numba unavailable or disabled (CURVOP_NUMBA=0); timing numpy only")
    run(args.points, args.repeat)


if __name__ == "__main__":
    main()
