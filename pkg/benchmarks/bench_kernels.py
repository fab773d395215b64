"""Compare the compiled eigen kernels with the pure-Python fallback.

Run with ``python3 benchmarks/bench_kernels.py [--sizes 4,8,16] [--repeat 5]``.
Prints best-of-``repeat`` wall times and the speedup per kernel and size,
and checks that both backends agree.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from tetrablock import _pykernels

try:
    from tetrablock import _kernels
except ImportError:
    _kernels = None


def _cases(n: int, rng: np.random.Generator):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    H = A + A.conj().T
    thetas = np.linspace(0.0, 2 * np.pi, 512, endpoint=False)
    return {
        "schur": (A,),
        "eigh": (H,),
        "sweep_max": (A, thetas),
    }


def _best(fn, args, repeat: int) -> float:
    number = 1
    t = min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat))
    return t / number


def _agree(name: str, args) -> float:
    a = getattr(_pykernels, name)(*args)
    b = getattr(_kernels, name)(*args)
    if name == "schur":
        return float(abs(np.sort_complex(np.diag(a[0])) - np.sort_complex(np.diag(b[0]))).max())
    if name == "eigh":
        return float(abs(a[0] - b[0]).max())
    return float(abs(np.asarray(a) - np.asarray(b)).max())


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="4,8,16")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; nothing to compare")
        return
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<10} {'n':>4} {'python [ms]':>12} {'compiled [ms]':>14} {'speedup':>8} {'max diff':>10}")
    for n in (int(s) for s in args.sizes.split(",")):
        for name, fargs in _cases(n, rng).items():
            tp = _best(getattr(_pykernels, name), fargs, args.repeat)
            tc = _best(getattr(_kernels, name), fargs, args.repeat)
            diff = _agree(name, fargs)
            print(f"{name:<10} {n:>4} {tp * 1e3:>12.3f} {tc * 1e3:>14.3f} {tp / tc:>8.1f} {diff:>10.1e}")


if __name__ == "__main__":
    main()
