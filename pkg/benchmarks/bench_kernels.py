"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--L 12 16 20]
"""

import argparse
import timeit

import numpy as np

from foelkit import _kernels_py
from foelkit.basis import hw_configs
from foelkit.chain import uniform_chain

try:
    from foelkit import _kernels
except ImportError:
    _kernels = None


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def _same_triplets(a, b):
    ka = np.array(sorted(zip(*(np.asarray(x).tolist() for x in a))))
    kb = np.array(sorted(zip(*(np.asarray(x).tolist() for x in b))))
    return ka.shape == kb.shape and np.allclose(ka, kb)


def run(lengths, repeat):
    rows = []
    for L in lengths:
        chain = uniform_chain("1/2", L)
        sizes = np.asarray(chain.doubled_spins, dtype=np.int64)
        n_down = L // 2
        states = hw_configs(chain, 0 if L % 2 == 0 else "1/2").astype(np.uint8)
        couplings = np.asarray(chain.couplings, dtype=float)
        work = {
            "enumerate_hw_downs": lambda m: m.enumerate_hw_downs(sizes, n_down),
            "assemble_half": lambda m: m.assemble_half(states, couplings),
            "pair_strands": lambda m: [m.pair_strands(s) for s in states],
        }
        for name, call in work.items():
            t_py = _best(lambda: call(_kernels_py), repeat)
            t_cy = _best(lambda: call(_kernels), repeat) if _kernels else float("nan")
            if _kernels and name == "assemble_half":
                agree = _same_triplets(call(_kernels), call(_kernels_py))
            elif _kernels:
                agree = all(
                    np.array_equal(a, b) for a, b in zip(np.atleast_1d(call(_kernels)), np.atleast_1d(call(_kernels_py)))
                )
            else:
                agree = None
            rows.append((L, len(states), name, t_py, t_cy, agree))
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--L", type=int, nargs="+", default=[12, 16, 20])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    if _kernels is None:
        print("compiled extension not built; only the Python timings are shown")
    print(f"{'L':>3} {'dim':>7} {'kernel':<20} {'python s':>10} {'cython s':>10} {'speedup':>8} agree")
    for L, dim, name, t_py, t_cy, agree in run(args.L, args.repeat):
        print(f"{L:>3} {dim:>7} {name:<20} {t_py:>10.4f} {t_cy:>10.4f} {t_py / t_cy:>8.1f} {agree}")


if __name__ == "__main__":
    main()
