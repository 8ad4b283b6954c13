"""Benchmark the compiled coordinate-descent kernel against the NumPy fallback.

Usage: python3 benchmarks/bench_cd.py [--repeats 5]

Times both kernels on the actual workload shape (72 x 63 measurement
matrices from the two-slot model) across the lambda range the harness
uses, and prints the per-solve times and speedup.
"""

import argparse
import statistics
import time

import numpy as np

from coopchan._backend import get_kernel
from coopchan.afsim import amplification_factor, gen_training, simulate_two_slot, to_frequency_model
from coopchan.channel import ChannelSpec, gen_channel
from coopchan.harness import noise_variance
from coopchan.solvers import lambda_default, penalty_weights

N, L = 36, 32


def make_problems(count, snr_db, seed):
    rng = np.random.default_rng(seed)
    noise_var = noise_variance(snr_db)
    beta = amplification_factor(N, N, noise_var)
    sigma = np.sqrt(noise_var)
    lam = penalty_weights(
        "iel",
        L,
        lambda_sel=lambda_default(sigma, N, 2.0),
        lambda_pel=lambda_default(sigma, N, 0.1),
    )
    problems = []
    for _ in range(count):
        h_sd = gen_channel(ChannelSpec(L, 4, "sparse"), rng)
        h_sr = gen_channel(ChannelSpec(L // 2, L // 2, "dense"), rng)
        h_rd = gen_channel(ChannelSpec(L // 2, L // 2, "dense"), rng)
        x = gen_training(N, 1.0, rng, "qpsk_flat")
        obs = simulate_two_slot(h_sd, h_sr, h_rd, x, noise_var, beta, rng)
        m = to_frequency_model(obs, x, L)
        col_norm2 = np.real(np.einsum("ij,ij->j", np.conj(m.X), m.X))
        problems.append((m.X, m.y, lam, col_norm2))
    return problems


def time_kernel(kernel, problems, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        for X, y, lam, n2 in problems:
            kernel(X, y, lam, n2, 1e-8, 10_000)
        times.append((time.perf_counter() - start) / len(problems))
    return min(times), statistics.median(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--problems", type=int, default=50)
    parser.add_argument("--snr-db", type=float, default=10.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    problems = make_problems(args.problems, args.snr_db, args.seed)
    results = {}
    for name in ("python", "cython"):
        try:
            kernel = get_kernel(name)
        except ImportError:
            print(f"{name:>7}: not available (extension not built)")
            continue
        best, med = time_kernel(kernel, problems, args.repeats)
        results[name] = best
        print(f"{name:>7}: {best * 1e3:8.3f} ms/solve (best), {med * 1e3:8.3f} ms (median)")

    if "python" in results and "cython" in results:
        print(f"speedup: {results['python'] / results['cython']:.1f}x")


if __name__ == "__main__":
    main()
