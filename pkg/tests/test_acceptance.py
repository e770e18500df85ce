"""Acceptance criteria 1-10, one test each.

Every test records a PASS/FAIL line (shown in the terminal summary under
"acceptance criteria") and then asserts.
"""
import math
import statistics
import time

import numpy as np
import pytest

import oracles
from anchornys import anchornet, diagnostics, lowdisc, nystrom, selectors
from anchornys.anchornet import LandmarkSet
from anchornys.dataio import Dataset, abalone, make_rng, nonuniform_2d, standardize, stats, synth_clusters
from anchornys.kernels import FAMILIES, KernelSpec
from conftest import record_criterion

EPS = np.finfo(float).eps
pytestmark = pytest.mark.slow


def landmarks(ds, idx):
    idx = np.asarray(idx)
    return LandmarkSet(idx, ds.points[idx].copy(), "manual", idx.size)


def test_criterion_01_theorem_bound_suite():
    t0 = time.perf_counter()
    rng = make_rng(20240101)
    held, worst = 0, 0.0
    for k in range(100):
        family = FAMILIES[k % 4]
        while True:
            n = int(rng.integers(20, 201))
            d = int(rng.integers(1, 6))
            r = int(rng.integers(2, 21))
            ds = Dataset(rng.random((n, d)))
            spec = KernelSpec(family, float(rng.uniform(0.3, 3.0)))
            lm = landmarks(ds, np.sort(rng.choice(n, size=r, replace=False)))
            f = nystrom.factor(ds, lm, spec)
            if f.min_sv > 1e3 * EPS * f.max_sv:
                break
        err, bound, holds = diagnostics.verify_bound(ds, lm, spec)
        held += holds
        worst = max(worst, err / bound if bound > 0 else 0.0)
    elapsed = time.perf_counter() - t0
    ok = held == 100 and elapsed < 60
    record_criterion(1, ok, f"bound held on {held}/100 instances, max err/bound {worst:.3g}, {elapsed:.1f}s")
    assert ok


def test_criterion_02_marking_error_toy():
    ds = Dataset(np.arange(11) / 10)
    spec = KernelSpec("sqdist", 1.0)
    one = diagnostics.marking_errors(ds, landmarks(ds, [10]), spec).e_hat_r
    xs = [(v,) for v in ds.points.ravel()]
    _, oracle = oracles.marking_errors(xs, [0, 10], lambda a, b: (a[0] - b[0]) ** 2)
    two = diagnostics.marking_errors(ds, landmarks(ds, [0, 10]), spec).e_hat_r
    ok = one == 1.0 and abs(two - oracle) <= 1e-12
    record_criterion(2, ok, f"Ehat_1 = {one!r}; Ehat_2 = {two!r} vs oracle {oracle!r} "
                            f"(the quoted 1/(2*sqrt(2)) = {1 / (2 * math.sqrt(2)):.4f} disagrees with both)")
    assert ok


def _grid_boxes(d, rng):
    boxes = [lowdisc.Box.unit(d), lowdisc.Box(np.zeros(d), np.arange(1.0, d + 1))]
    for _ in range(6):
        sides = rng.random(d) * rng.choice([0.0, 1.0], size=d, p=[0.15, 0.85])
        boxes.append(lowdisc.Box(np.zeros(d), sides))
    return boxes


def test_criterion_03_grid_size_bound():
    t0 = time.perf_counter()
    rng = make_rng(3)
    bad = []
    for d in range(1, 11):
        boxes = _grid_boxes(d, rng)
        for p in range(0, 13):
            bound = ((p + d) / d) ** d
            worst = oracles.max_composition_product(p, d)  # every possible grid
            generated = max(lowdisc.grid_size(b, p) for b in boxes)
            if not (generated <= worst <= bound * (1 + 1e-12)):
                bad.append((d, p, "size"))
            if p >= 1 and not bound < math.exp(p):
                bad.append((d, p, "exp"))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 10
    record_criterion(3, ok, f"size <= ((p+d)/d)^d for all d<=10, p<=12 and < e^p for p>=1, "
                            f"{len(bad)} violations, {elapsed:.1f}s; p=0 strict form tested separately")
    assert ok


@pytest.mark.xfail(strict=True, reason="at p = 0 both sides equal 1, so '< e^p' cannot hold")
def test_criterion_03_literal_strict_inequality_at_p0():
    d = 3
    assert ((0 + d) / d) ** d < math.exp(0)


def test_criterion_04_anchor_net_coverage_and_allocation():
    rng = make_rng(44)
    failures = []
    for k in range(50):
        d = int(rng.integers(1, 4))
        spec = [(rng.random(d) * 4, float(rng.uniform(0.05, 1.0)), int(rng.integers(20, 300)))
                for _ in range(int(rng.integers(1, 5)))]
        ds = synth_clusters(spec, seed=k)
        m = int(rng.integers(5, 80))
        net = anchornet.build(ds, m)
        covered = np.zeros(ds.n, bool)
        for box in net.boxes:
            covered |= box.contains(ds.points)
        v = net.volumes
        share = m * v / v.sum() if v.sum() > 0 else np.zeros_like(v)
        gap = net.sizes - share
        pos = v > 0
        if not covered.all():
            failures.append((k, "coverage"))
        if not (np.all(gap[pos] >= 0) and np.all(gap[pos] < 1)):
            failures.append((k, "allocation"))
    ok = not failures
    record_criterion(4, ok, f"50 datasets, coverage and 0 <= M_i - m*vol_i/sum < 1: {len(failures)} failures")
    assert ok


def test_criterion_05_exactness_oracles():
    rng = make_rng(5)
    ds = Dataset(rng.random((150, 3)))
    spec = KernelSpec("gaussian", 0.3)
    f = nystrom.factor(ds, landmarks(ds, np.arange(ds.n)), spec)
    full = nystrom.approx_error(ds, f, spec, "two").relative
    line = Dataset(np.linspace(-1.0, 2.0, 20))
    lin = KernelSpec("linear", 1.0)
    rank1 = max(nystrom.approx_error(line, nystrom.factor(line, landmarks(line, [j]), lin), lin, "max").value
                for j in range(20) if line.points[j, 0] != 0)
    small = Dataset(ds.points[:80])
    ch = nystrom.pivoted_cholesky(small, spec, small.n)
    chol = nystrom.approx_error(small, ch, spec, "fro").relative
    ok = full <= 1e-10 and rank1 <= 1e-12 and chol <= 1e-8
    record_criterion(5, ok, f"S=X rel 2-norm {full:.2e}; rank-1 max err {rank1:.2e}; "
                            f"Cholesky rank n rel fro {chol:.2e}")
    assert ok


def test_criterion_06_selection_scaling():
    t0 = time.perf_counter()
    m, d = 50, 3
    med = {}
    # one cluster layout for every n: only the number of draws changes
    rng = make_rng(6)
    centers, spreads = rng.random((6, d)) * 10, rng.uniform(0.2, 2.0, 6)
    for n in (25_000, 50_000, 100_000):
        spec = [(c, float(s), n // 6 + (n % 6 if i == 0 else 0))
                for i, (c, s) in enumerate(zip(centers, spreads))]
        ds = synth_clusters(spec, seed=n)
        anchornet.select_landmarks(ds, m)  # warm-up
        times = []
        for _ in range(5):
            t = time.perf_counter()
            anchornet.select_landmarks(ds, m)
            times.append(time.perf_counter() - t)
        med[n] = statistics.median(times)
    r1, r2 = med[50_000] / med[25_000], med[100_000] / med[50_000]
    elapsed = time.perf_counter() - t0
    ok = r1 <= 2.5 and r2 <= 2.5 and elapsed < 120
    record_criterion(6, ok, "median select time " + ", ".join(f"n={n}: {t * 1e3:.0f}ms" for n, t in med.items())
                     + f"; ratios {r1:.2f}, {r2:.2f}; {elapsed:.1f}s")
    assert ok


def test_criterion_07_indefinite_kernels_abalone():
    t0 = time.perf_counter()
    ds = standardize(abalone())
    sigma = stats(ds).half_radius
    cells = wins = 0
    details = []
    for family in ("multiquadric", "sigmoid", "thinplate"):
        spec = KernelSpec(family, sigma)
        tgt = nystrom.Target.build(ds, spec)
        for m in (50, 100, 150, 200, 250):
            lm = anchornet.select_landmarks(ds, m)
            ea = nystrom.approx_error(ds, nystrom.factor(ds, lm, spec), spec, "two", target=tgt).value
            eu = np.mean([nystrom.approx_error(ds, nystrom.factor(ds, selectors.uniform(ds, m, seed=s), spec),
                                               spec, "two", target=tgt).value for s in range(10)])
            cells += 1
            wins += ea <= eu
            if ea > eu:
                details.append(f"{family}/{m}")
    elapsed = time.perf_counter() - t0
    frac = wins / cells
    ok = frac >= 0.8 and elapsed < 600
    record_criterion(7, ok, f"anchor net <= mean uniform in {wins}/{cells} cells ({frac:.0%}); "
                            f"losses: {', '.join(details) or 'none'}; {elapsed:.0f}s")
    assert ok


def test_criterion_08_gaussian_instability():
    ds = standardize(abalone())
    spec = KernelSpec("gaussian", 11.8)
    tgt = nystrom.Target.build(ds, spec)
    errs, witness = [], []
    for m in (50, 100, 150, 200, 250, 300):
        lm = anchornet.select_landmarks(ds, m)
        errs.append(nystrom.approx_error(ds, nystrom.factor(ds, lm, spec), spec, "two", target=tgt).value)
        for s in range(10):
            f = nystrom.factor(ds, selectors.uniform(ds, m, seed=s), spec)
            witness.append(f.min_sv / f.max_sv)
    run_min = np.minimum.accumulate(errs)
    monotone = all(e <= 1.5 * r for e, r in zip(errs, run_min))
    unstable = min(witness) < 1e3 * EPS
    ok = monotone and unstable
    record_criterion(8, ok, "anchor-net errors " + ", ".join(f"{e:.2e}" for e in errs)
                     + f"; smallest uniform min_sv/max_sv {min(witness):.1e} (threshold {1e3 * EPS:.1e})")
    assert ok


def test_criterion_09_stabilization_plateau():
    ds = nonuniform_2d(3000, seed=0)
    spec = KernelSpec("sigmoid", 1.0)
    tgt = nystrom.Target.build(ds, spec)
    lm = anchornet.select_landmarks(ds, 200)

    def err(mode, eps, norm):
        return nystrom.approx_error(ds, nystrom.factor(ds, lm, spec, mode, eps), spec, norm, target=tgt)

    e8, e12 = err("pinv-eps", 1e-8, "two").value, err("pinv-eps", 1e-12, "two").value
    rel_max = err("none", 0.0, "max").relative
    digits = -math.log10(rel_max)
    ok = e8 >= e12 and digits >= 8
    record_criterion(9, ok, f"rank {lm.m_actual}: err(1e-8) = {e8:.2e} >= err(1e-12) = {e12:.2e}; "
                            f"unstabilized max-norm digits {digits:.1f}")
    assert ok


def test_criterion_10_discrepancy_suite():
    one = lowdisc.star_discrepancy([[0.5]], method="exact1d").value
    two = lowdisc.star_discrepancy([[0.25], [0.75]], method="exact1d").value
    halton = [lowdisc.star_discrepancy(lowdisc.halton(n, 2), method="exact2d").value for n in (16, 64, 256)]
    decreasing = halton[0] > halton[1] > halton[2]
    below = True
    rng = make_rng(10)
    for k in range(12):
        pts = rng.random((int(rng.integers(5, 120)), 2)) if k % 2 else lowdisc.halton(8 * (k + 1), 2).points
        exact = lowdisc.star_discrepancy(pts, method="exact2d").value
        mc = lowdisc.star_discrepancy(pts, method="monte_carlo", samples=3000, seed=k)
        below &= mc.is_lower_bound and mc.value <= exact + 1e-12
    boxes = [lowdisc.Box([0, 0], [1, 1]), lowdisc.Box([0.5, 0.5], [2, 1.5])]
    pts = rng.random((60, 2)) * [2, 1.5]
    pts = pts[lowdisc.Box([0, 0], [1, 1]).contains(pts) | boxes[1].contains(pts)]
    below &= (lowdisc.star_discrepancy(pts, region=boxes, method="monte_carlo", samples=3000).value
              <= lowdisc.star_discrepancy(pts, region=boxes, method="exact2d").value + 1e-12)
    ok = abs(one - 0.5) < 1e-15 and abs(two - 0.25) < 1e-15 and decreasing and below
    record_criterion(10, ok, f"{{0.5}} -> {one}, {{0.25,0.75}} -> {two}; Halton D* "
                             + " > ".join(f"{h:.4f}" for h in halton) + f"; MC <= exact: {below}")
    assert ok
