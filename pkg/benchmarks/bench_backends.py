"""Compare the numba and numpy inner loops on growing joint spaces.

    python3 benchmarks/bench_backends.py [--repeat 5] [--states 4 8 16]

Prints one CSV row per (kernel, size, backend) with the best-of-N time in ms.
Both sets of loops are imported side by side, so DECEM_NUMBA does not matter here.
"""
import argparse
import sys
import time

import numpy as np

from decem import _kernels
from decem.estep import tmax_bound
from decem.kernel import build_joint_chain
from decem.model import init_policy, random_model


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best * 1e3


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--states", type=int, nargs="+", default=[4, 8, 16])
    ap.add_argument("--memory", type=int, default=3)
    ap.add_argument("--gamma", type=float, default=0.99)
    ap.add_argument("--epsilon", type=float, default=0.1)
    args = ap.parse_args(argv)

    backends = {"numpy": _kernels.NUMPY}
    if _kernels.NUMBA is not None:
        backends["numba"] = _kernels.NUMBA
    else:
        print("numba unavailable, timing numpy only", file=sys.stderr)

    t_max = tmax_bound(args.gamma, args.epsilon)
    print("kernel,n_joint,backend,ms")
    for nx in args.states:
        model = random_model(0, n_states=nx, discount=args.gamma)
        pol = init_policy(model, args.memory, seed=0)
        ch = build_joint_chain(model, pol)
        kargs = (model.transition, model.observation_fn, pol.joint_pi(), pol.joint_lambda())
        thresh = (1 - args.gamma) * args.epsilon / args.gamma
        for name, ks in backends.items():
            # first call compiles (numba) or warms caches (numpy)
            ks["build_kernel"](*kargs)
            ks["fb_sums"](ch.kernel, ch.initial, ch.scaled_reward, ch.gamma, 1)
            ks["mbem_loop"](ch.kernel, ch.initial, ch.scaled_reward, ch.gamma, ch.initial, ch.scaled_reward, thresh, 1)
            jobs = {
                "build_kernel": lambda: ks["build_kernel"](*kargs),
                "forward_backward": lambda: ks["fb_sums"](ch.kernel, ch.initial, ch.scaled_reward, ch.gamma, t_max),
                "mbem_cold": lambda: ks["mbem_loop"](
                    ch.kernel, ch.initial, ch.scaled_reward, ch.gamma,
                    ch.initial, ch.scaled_reward, thresh, 4 * t_max),
            }
            for job, fn in jobs.items():
                print(f"{job},{ch.size},{name},{best_of(fn, args.repeat):.3f}")


if __name__ == "__main__":
    main()
