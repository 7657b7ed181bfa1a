"""Acceptance suite: one test per release criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  Tolerances are fixed here and match the library's documented
guarantees; Monte Carlo criteria use pinned seeds, so every run is
deterministic.
"""

import json
import math
import time

import numpy as np

from sigkernels import (
    KernelConfig,
    Sequence,
    StaticKernelSpec,
    increment_matrix,
    sig_kernel,
    sig_kernel_levels,
    sig_kernel_pde,
)
from sigkernels.cli import main as cli_main
from sigkernels.gram import gram, min_eigenvalue, nystrom, reconstruct
from sigkernels.mmd import SampleSet, permutation_test
from sigkernels.tensors import enumerate_levels, enumerate_sigkernel, signature_oracle, tensor_inner

LINEAR = StaticKernelSpec("linear")


def _report(name: str) -> None:
    print(f"ACCEPTANCE {name}: PASS")


def _walks(rng, n, segments, dim=1, step=1.0, drift=0.0):
    steps = step * rng.normal(size=(n, segments, dim)) + drift
    paths = np.concatenate([np.zeros((n, 1, dim)), np.cumsum(steps, axis=1)], axis=1)
    return [Sequence(p) for p in paths]


def _relative_levels_gap(got: np.ndarray, want: np.ndarray) -> float:
    return float(np.max(np.abs(got - want) / np.maximum(np.abs(want), 1e-12)))


def test_oracle_equivalence():
    """DP levels match exhaustive enumeration (1e-10 relative per level) and,
    for the linear kernel, the dense tensor oracle, across >= 200 seeded
    instances with d <= 3, L <= 5, M <= 4; all under 60 s.

    A level can cancel to far below the magnitude of its summands, in which
    case any float64 summation carries absolute noise on the summand scale,
    so "relative" is measured against each level's summand mass (its value on
    |nabla|, never below the level value itself).  Observed gaps sit at 1e-16;
    the 1e-10 tolerance has six orders of headroom."""
    rng = np.random.default_rng(1234)
    start = time.perf_counter()
    count = 0
    worst = 0.0
    for trial in range(210):
        family = ("linear", "rbf", "exponential")[trial % 3]
        spec = StaticKernelSpec(
            family,
            bandwidth=float(rng.uniform(0.5, 2.0)),
            scale=float(rng.uniform(0.5, 2.0)),
        )
        d = int(rng.integers(1, 4))
        x = Sequence(rng.normal(size=(int(rng.integers(1, 6)) + 1, d)))
        y = Sequence(rng.normal(size=(int(rng.integers(1, 6)) + 1, d)))
        M = int(rng.integers(0, 5))
        dp = sig_kernel_levels(x, y, spec, M).values
        oracle = enumerate_sigkernel(x, y, spec, M).values
        mass = enumerate_levels(np.abs(increment_matrix(spec, x, y)), M).values
        scale = np.maximum(np.maximum(np.abs(oracle), mass), 1e-12)
        gap = float(np.max(np.abs(dp - oracle) / scale))
        worst = max(worst, gap)
        assert gap <= 1e-10, (trial, family, gap)
        count += 1
    # linear-kernel tensor-oracle cross-check at scale 1
    for trial in range(60):
        d = int(rng.integers(1, 4))
        x = Sequence(rng.normal(size=(int(rng.integers(1, 6)) + 1, d)))
        y = Sequence(rng.normal(size=(int(rng.integers(1, 6)) + 1, d)))
        M = int(rng.integers(0, 5))
        dp = sig_kernel(x, y, LINEAR, M)
        want = tensor_inner(signature_oracle(x, M), signature_oracle(y, M))
        assert abs(dp - want) <= 1e-10 * max(1.0, abs(want)), trial
        count += 1
    elapsed = time.perf_counter() - start
    assert count >= 200
    assert elapsed < 60.0, f"oracle equivalence took {elapsed:.1f}s"
    _report(f"oracle equivalence ({count} instances, worst gap {worst:.1e}, {elapsed:.1f}s)")


def test_closed_forms():
    """Single-segment linear kernels reproduce sum <v,w>^m/(m!)^2 to 1e-12;
    the PDE solver hits the untruncated aligned-unit-segment value 2.2795853
    (independently summed series) within 1e-3 at dyadic order 6 and improves
    monotonically under refinement."""
    rng = np.random.default_rng(99)
    for _ in range(25):
        d = int(rng.integers(1, 4))
        v, w = rng.normal(size=d), rng.normal(size=d)
        x = Sequence(np.vstack([np.zeros(d), v]))
        y = Sequence(np.vstack([np.zeros(d), w]))
        ip = float(v @ w)
        want = np.array([ip**m / math.factorial(m) ** 2 for m in range(7)])
        got = sig_kernel_levels(x, y, LINEAR, 6).values
        assert _relative_levels_gap(got, want) <= 1e-12

    series = sum(1.0 / math.factorial(m) ** 2 for m in range(40))  # independent oracle
    unit = Sequence([[0.0], [1.0]])
    at6 = sig_kernel_pde(unit, unit, LINEAR, 6)
    assert abs(at6 - 2.2795853) < 1e-3
    errs = [abs(sig_kernel_pde(unit, unit, LINEAR, q) - series) for q in range(7)]
    assert all(a > b for a, b in zip(errs, errs[1:])), errs
    _report("closed forms (monomial series 1e-12, PDE vs Bessel value 1e-3)")


def test_truncation_bound():
    """|k_{:M+3} - k_{:M}| <= e^C C^(M+1)/(M+1)! for M in 2..8, with C the
    larger Euclidean 1-variation, linear kernel."""
    rng = np.random.default_rng(55)
    checked = 0
    for _ in range(10):
        x = Sequence(0.45 * rng.normal(size=(int(rng.integers(3, 7)) + 1, 2)))
        y = Sequence(0.45 * rng.normal(size=(int(rng.integers(3, 7)) + 1, 2)))
        C = max(x.one_variation(), y.one_variation())
        for M in range(2, 9):
            gap = abs(sig_kernel(x, y, LINEAR, M + 3) - sig_kernel(x, y, LINEAR, M))
            bound = math.exp(C) * C ** (M + 1) / math.factorial(M + 1)
            assert gap <= bound * (1 + 1e-12), (M, gap, bound)
            checked += 1
    _report(f"truncation bound ({checked} (instance, M) pairs)")


_SCALING_BENCH = r"""
import json
import sys
import time

import numpy as np

from sigkernels import Sequence, StaticKernelSpec, sig_kernel_levels

rng = np.random.default_rng(2024)
spec = StaticKernelSpec("rbf", bandwidth=4.0)
pairs = {
    L: (
        Sequence(rng.normal(size=(L + 1, 2)).cumsum(axis=0)),
        Sequence(rng.normal(size=(L + 1, 2)).cumsum(axis=0)),
    )
    for L in (64, 128, 256)
}
for _ in range(2):  # warm-up: jit compilation, allocator, code paths
    for x, y in pairs.values():
        sig_kernel_levels(x, y, spec, 5)
reps = {}
for L, (x, y) in pairs.items():
    t0 = time.perf_counter()
    sig_kernel_levels(x, y, spec, 5)
    once = time.perf_counter() - t0
    # Aim for ~40 ms per timed window so scheduler noise stays below a few
    # percent of each run; one run reports the mean over its repetitions.
    reps[L] = max(1, int(0.04 / max(once, 1e-9)))
times = {L: [] for L in pairs}
for _ in range(5):
    for L, (x, y) in pairs.items():
        t0 = time.perf_counter()
        for _ in range(reps[L]):
            sig_kernel_levels(x, y, spec, 5)
        times[L].append((time.perf_counter() - t0) / reps[L])
print(json.dumps({str(L): sorted(ts)[2] for L, ts in times.items()}))
"""


def test_complexity_scaling():
    """Doubling L multiplies single-kernel DP wall time by a factor in [3, 5]
    at M = 5, L in {64, 128, 256}, median of 5 runs.

    The benchmark runs in a fresh interpreter so allocator and cache state
    left behind by other tests cannot skew the small-instance timings."""
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-c", _SCALING_BENCH], capture_output=True, text=True, check=True
    )
    medians = {int(k): v for k, v in json.loads(proc.stdout).items()}
    r1 = medians[128] / medians[64]
    r2 = medians[256] / medians[128]
    assert 3.0 <= r1 <= 5.0, (r1, medians)
    assert 3.0 <= r2 <= 5.0, (r2, medians)
    _report(f"complexity scaling (ratios {r1:.2f}, {r2:.2f})")


def test_psd_gram_all_variants():
    """Gram matrices of 40 seeded sequences have min eigenvalue
    >= -1e-8 * max diagonal for every exact kernel variant, including robust.

    The PDE method is excluded here: its finite-order output approximates a
    positive definite limit but is not itself PSD to this tolerance (scheme
    error dominates); its accuracy is covered by the convergence criteria."""
    rng = np.random.default_rng(87)
    seqs = [
        Sequence(np.vstack([np.zeros(2), 0.35 * rng.normal(size=(int(rng.integers(3, 8)), 2)).cumsum(axis=0)]))
        for _ in range(40)
    ]
    variants = [
        KernelConfig(family="linear", level=4),
        KernelConfig(family="rbf", bandwidth=1.5, level=4),
        KernelConfig(family="exponential", bandwidth=2.0, level=4),
        KernelConfig(family="linear", level=4, normalize=True, norm_C=4.0, norm_alpha=1.0),
        KernelConfig(family="rbf", bandwidth=1.5, level=4, normalize=True, norm_C=1.5),
        KernelConfig(family="exponential", bandwidth=2.0, level=4, normalize=True, norm_C=1.5),
    ]
    for cfg in variants:
        G = gram(seqs, cfg, workers=2).values
        floor = -1e-8 * float(np.max(np.diag(G)))
        lam = min_eigenvalue(G)
        assert lam >= floor, (cfg.to_dict(), lam, floor)
    _report(f"gram PSD ({len(variants)} kernel variants, 40 sequences)")


def test_robustness():
    """Robust diagonal values never exceed C(1 + 1/alpha); an outlier scaled
    by 10^3 moves the unnormalized MMD at least 10x more than the robust one,
    whose change stays bounded."""
    rng = np.random.default_rng(31)
    plain = KernelConfig(family="linear", level=4)
    robust = KernelConfig(family="linear", level=4, normalize=True, norm_C=4.0, norm_alpha=1.0)
    cap = 4.0 * (1.0 + 1.0 / 1.0)

    for s in (0.1, 1.0, 10.0, 1e3, 1e6):
        x = Sequence(s * rng.normal(size=(5, 2)))
        from sigkernels import kernel_value

        assert kernel_value(x, x, robust) <= cap * (1 + 1e-12)

    X = _walks(rng, 10, 4, dim=2, step=0.5)
    Y = _walks(rng, 10, 4, dim=2, step=0.5)

    def _mmd_for(cfg, ys):
        G = gram(X + ys, cfg).values
        ix, iy = np.arange(10), np.arange(10, 20)
        from sigkernels.mmd import mmd2

        return mmd2(G[np.ix_(ix, ix)], G[np.ix_(iy, iy)], G[np.ix_(ix, iy)])

    base_plain, base_robust = _mmd_for(plain, Y), _mmd_for(robust, Y)
    plain_changes, robust_changes = [], []
    for s in (10.0, 100.0, 1000.0):
        contaminated = Y[:-1] + [Sequence(s * Y[-1].points)]
        plain_changes.append(abs(_mmd_for(plain, contaminated) - base_plain))
        robust_changes.append(abs(_mmd_for(robust, contaminated) - base_robust))
    assert max(robust_changes) <= 4.0 * cap  # bounded uniformly in the scale
    divergence = plain_changes[-1] / max(robust_changes)
    assert divergence >= 10.0, (plain_changes, robust_changes)
    _report(f"robustness (divergence factor {divergence:.1e} at outlier scale 1e3)")


def test_calibration_and_power():
    """200-trial Monte Carlo: null rejection rate within [0.02, 0.09] at
    alpha = 0.05, and power >= 0.8 against a 0.5-sigma-per-step drift at
    m = n = 50, B = 200; all within 10 minutes."""
    cfg = KernelConfig(family="linear", level=4)
    segments, step = 12, 0.25
    start = time.perf_counter()

    null_rejections = 0
    for trial in range(200):
        rng = np.random.default_rng((101, trial))
        X = SampleSet(tuple(_walks(rng, 50, segments, step=step)))
        Y = SampleSet(tuple(_walks(rng, 50, segments, step=step)))
        res = permutation_test(X, Y, cfg, permutations=200, alpha=0.05, seed=trial)
        null_rejections += res.reject
    null_rate = null_rejections / 200.0
    assert 0.02 <= null_rate <= 0.09, null_rate

    power_rejections = 0
    for trial in range(200):
        rng = np.random.default_rng((202, trial))
        X = SampleSet(tuple(_walks(rng, 50, segments, step=step)))
        Y = SampleSet(tuple(_walks(rng, 50, segments, step=step, drift=0.5 * step)))
        res = permutation_test(X, Y, cfg, permutations=200, alpha=0.05, seed=trial)
        power_rejections += res.reject
    power = power_rejections / 200.0
    assert power >= 0.8, power

    elapsed = time.perf_counter() - start
    assert elapsed < 600.0, f"Monte Carlo took {elapsed:.0f}s"
    _report(f"calibration/power (null rate {null_rate:.3f}, power {power:.3f}, {elapsed:.0f}s)")


def test_determinism(tmp_path):
    """Identical config + seed produce byte-identical Gram files (CSV and
    binary) and TestResult JSON across worker counts and re-runs."""
    rng = np.random.default_rng(7)
    from sigkernels import Dataset, save_jsonl

    ds_x = tmp_path / "x.jsonl"
    ds_y = tmp_path / "y.jsonl"
    save_jsonl(Dataset(tuple(_walks(rng, 10, 6, dim=2, step=0.7))), ds_x)
    save_jsonl(Dataset(tuple(_walks(rng, 8, 6, dim=2, step=0.7))), ds_y)

    gram_blobs, test_blobs = [], []
    for run, workers in [(0, "1"), (1, "8"), (2, "1")]:
        csv_path = tmp_path / f"g{run}.csv"
        bin_path = tmp_path / f"g{run}.bin"
        for out in (csv_path, bin_path):
            code = cli_main(
                [
                    "gram", "--data", str(ds_x), "--out", str(out),
                    "--family", "rbf", "--bandwidth", "1.5", "--level", "4",
                    "--normalize", "--seed", "13", "--workers", workers,
                ]
            )
            assert code == 0
        json_path = tmp_path / f"t{run}.json"
        code = cli_main(
            [
                "test2", "--x", str(ds_x), "--y", str(ds_y),
                "--permutations", "60", "--alpha", "0.05",
                "--family", "rbf", "--bandwidth", "1.5", "--level", "4",
                "--seed", "13", "--workers", workers, "--json", str(json_path),
            ]
        )
        assert code == 0
        gram_blobs.append((csv_path.read_bytes(), bin_path.read_bytes()))
        test_blobs.append(json_path.read_bytes())
    assert gram_blobs[0] == gram_blobs[1] == gram_blobs[2]
    assert test_blobs[0] == test_blobs[1] == test_blobs[2]
    json.loads(test_blobs[0])  # stays parseable
    _report("determinism (byte-identical gram files and test reports)")


def test_nystrom_quality():
    """Full-rank Nystrom reconstructs the exact Gram to 1e-8 relative
    Frobenius; the mean error over 10 seeds is non-increasing in the rank."""
    rng = np.random.default_rng(40)
    seqs = [Sequence(rng.normal(size=(int(rng.integers(4, 9)) + 1, 2)).cumsum(axis=0)) for _ in range(40)]
    cfg = KernelConfig(family="rbf", bandwidth=2.0, level=4)
    exact = gram(seqs, cfg, workers=2).values
    norm = float(np.linalg.norm(exact))

    full = reconstruct(nystrom(seqs, cfg, rank=40, seed=0, workers=2))
    assert np.linalg.norm(full - exact) / norm <= 1e-8

    means = []
    for rank in (2, 5, 10, 20, 40):
        errs = [
            float(np.linalg.norm(reconstruct(nystrom(seqs, cfg, rank=rank, seed=seed, workers=2)) - exact))
            / norm
            for seed in range(10)
        ]
        means.append(float(np.mean(errs)))
    assert all(a >= b - 1e-12 for a, b in zip(means, means[1:])), means
    _report(f"nystrom (full-rank exact, mean errors {['%.2e' % m for m in means]})")
