"""Compare the compiled and numpy kernels on the two hot loops.

    python benchmarks/bench_kernels.py [--n-fock 60] [--steps 400] [--grid 101] [--repeat 3]
"""
import argparse
import timeit

import numpy as np

from gwfql.opensys import CatStateSpec, build_cat_state
from gwfql.opensys import _backend
from gwfql.opensys.states import x_offdiag


def bench(kernels, rho, off, steps, axis, repeat):
    rk4 = min(timeit.repeat(lambda: kernels.rk4_propagate(rho, off, 0.01, 1e-3, steps), number=1, repeat=repeat))
    wig = min(timeit.repeat(lambda: kernels.wigner_grid(rho, axis, axis), number=1, repeat=repeat))
    return rk4, wig


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-fock", type=int, default=60)
    ap.add_argument("--steps", type=int, default=400)
    ap.add_argument("--grid", type=int, default=101)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    rho = np.ascontiguousarray(build_cat_state(CatStateSpec(1.5, n_fock=args.n_fock)).matrix)
    off = x_offdiag(args.n_fock)
    axis = np.linspace(-7.0, 7.0, args.grid)

    results = {name: bench(_backend.load(name), rho, off, args.steps, axis, args.repeat) for name in _backend.available()}
    print(f"N_f={args.n_fock}, rk4 steps={args.steps}, wigner grid={args.grid}x{args.grid}")
    print(f"{'backend':<10}{'rk4 [s]':>12}{'wigner [s]':>12}")
    for name, (rk4, wig) in results.items():
        print(f"{name:<10}{rk4:>12.4f}{wig:>12.4f}")
    if "compiled" in results:
        (r_c, w_c), (r_p, w_p) = results["compiled"], results["python"]
        print(f"{'speedup':<10}{r_p / r_c:>11.1f}x{w_p / w_c:>11.1f}x")


if __name__ == "__main__":
    main()
