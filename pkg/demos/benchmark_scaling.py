#!/usr/bin/env python3
"""Rough timing of the four combiners as dimensions grow.

Shape check, not a benchmark suite: sample averaging is near-free, the
consensus methods pay for covariance estimation and solves, and the
density-product sampler dominates everything because it evaluates
mixture weights at every iteration.  T is kept small here; production
MCMC output is 5-50x longer, so scale the numbers accordingly.
"""

import time

import numpy as np

import chaincombine as cc

T = 5000
rng = np.random.default_rng(0)

print(f"seconds per combine at T={T} draws/machine")
print("  d   M    sample-avg  consensus-indep  consensus-cov  semiparam-dpe")
for d in (2, 5, 10):
    for M in (5, 10):
        draws = 0.02 * rng.standard_normal((d, T, M))
        bundle = cc.validate_bundle(draws + rng.normal(0, 0.01, size=(d, 1, M)))
        times = []
        for fn in (
            cc.sample_average,
            cc.consensus_independent,
            cc.consensus_covariance,
            lambda b: cc.semiparametric_dpe(b, cc.DpeConfig(seed=1)),
        ):
            t0 = time.perf_counter()
            fn(bundle)
            times.append(time.perf_counter() - t0)
        print(
            f"  {d:2d}  {M:2d}    {times[0]:10.4f}  {times[1]:15.4f}"
            f"  {times[2]:13.4f}  {times[3]:13.2f}"
        )
