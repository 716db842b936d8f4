"""Compare the compiled term-arithmetic kernel against the pure fallback.

Runs the same workloads in two subprocesses (BILAX_PURE toggled) and prints
a timing table.  Workloads are the real hot paths: raw polynomial products
at the sizes the double-row pipeline produces, the transfer-commutation
check, and the boundary zero-curvature theorem.

Usage: python benchmarks/bench_kernel.py [--reps 3]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def run_workloads(reps: int) -> dict:
    import bilax
    from bilax.double_row import check_theorem_zc, check_transfer_commutation
    from bilax.toda_models import build_bcn, build_dn

    results = {"kernel": bilax.KERNEL_BACKEND, "rational": bilax.RATIONAL_BACKEND}

    # raw products at transfer-scalar scale
    from bilax.backend import kernel
    from bilax.double_row import double_row_transfer
    from bilax.spectral_matrix import lam

    model = build_bcn(3)
    b = double_row_transfer(model.lax, model.km, model.kp, 3, lam(model.ring))
    terms = b.num.terms
    t0 = time.perf_counter()
    n = 0
    while time.perf_counter() - t0 < 0.05 * reps:
        kernel.mul(terms, terms)
        n += 1
    results["poly_mul_ms"] = (time.perf_counter() - t0) / max(n, 1) * 1e3
    results["poly_terms"] = len(terms)

    def timed(fn):
        best = float("inf")
        for _ in range(reps):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        return best * 1e3

    def bb(builder, n_sites):
        m = builder(n_sites)  # fresh model: no cross-run caching
        check_transfer_commutation(m.ps, m.lax, m.km, m.kp, m.N)

    def theorem(builder, n_sites):
        m = builder(n_sites)
        check_theorem_zc(m.ps, m.lax, m.km, m.kp, m.N)

    results["bb_bcn3_ms"] = timed(lambda: bb(build_bcn, 3))
    results["bb_dn3_ms"] = timed(lambda: bb(build_dn, 3))
    results["theorem_bcn2_ms"] = timed(lambda: theorem(build_bcn, 2))
    results["theorem_dn3_ms"] = timed(lambda: theorem(build_dn, 3))
    return results


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--reps", type=int, default=3)
    parser.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.child:
        print(json.dumps(run_workloads(args.reps)))
        return 0

    rows = []
    for pure in ("0", "1"):
        env = dict(os.environ, BILAX_PURE=pure)
        out = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--child",
             "--reps", str(args.reps)],
            capture_output=True,
            text=True,
            env=env,
            check=True,
        )
        rows.append(json.loads(out.stdout.strip().splitlines()[-1]))

    keys = [k for k in rows[0] if k.endswith("_ms")]
    print("workload comparison (rational backend: %s)" % rows[0]["rational"])
    print("%-18s %12s %12s %9s" % ("workload", rows[0]["kernel"], rows[1]["kernel"], "speedup"))
    for k in keys:
        a, b = rows[0][k], rows[1][k]
        print("%-18s %9.2f ms %9.2f ms %8.2fx" % (k[:-3], a, b, b / a if a else 0.0))
    return 0


if __name__ == "__main__":
    sys.exit(main())
