"""Acceptance suite: one test per criterion, printing one pass/fail line each.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines as they
print, or ``pytest -v`` for the per-test verdicts.  Tolerances and runtime
budgets are pinned here and nowhere else.
"""

import csv
import itertools
import json
import time

import numpy as np

from lltlab import (BaseLattice1D, CwModel, GaussianDensity, IrwinHallDensity,
                    closed_box, continuous_sup_ratio, counterexample_interval,
                    cw_covariance, cw_magnetization_pmf, fair_coin,
                    iid_sum_pmf, mu_vs_histogram_stat, pointwise_llt_stat,
                    run_study, standard_normal, standardized_iid_sum,
                    sup_ratio_deviation, theoretical_step3_bound,
                    validate_config)
from oracles import (all_spin_patterns, enumerate_cw_masses,
                     enumerate_iid_sum, mesh_sup_oracle_1d,
                     mesh_sup_oracle_product, symmetric_binomial_masses)

ND = standard_normal()
AB = closed_box([-1.0], [1.0])
DICHOTOMY_NS = (2 ** 6, 2 ** 8, 2 ** 10, 2 ** 12)


def report(num, name, ok, detail=""):
    line = f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'} {name}"
    if detail:
        line += f" :: {detail}"
    print(line)
    assert ok, line


def test_criterion_01_convolution_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240810)
    worst = 0.0
    for _ in range(20):
        k = int(rng.integers(2, 5))
        masses = rng.random(k)
        masses /= masses.sum()
        base = BaseLattice1D(offset=float(rng.uniform(-2, 2)),
                             span=float(rng.uniform(0.1, 3.0)),
                             masses=masses, index_lo=int(rng.integers(-5, 5)))
        for n in range(1, 7):
            pmf = iid_sum_pmf(base, n)
            for key, prob in enumerate_iid_sum(base, n).items():
                worst = max(worst, abs(pmf.mass_at_index([key]) - prob))
    elapsed = time.perf_counter() - t0
    report(1, "convolution vs outcome enumeration",
           worst < 1e-12 and elapsed < 5.0,
           f"worst={worst:.2e} time={elapsed:.1f}s")


def _compositions(n):
    for d in range(1, n + 1):
        for cuts in itertools.combinations(range(1, n), d - 1):
            edges = (0, *cuts, n)
            yield [edges[i + 1] - edges[i] for i in range(d)]


def test_criterion_02_curie_weiss_oracle():
    t0 = time.perf_counter()
    worst = 0.0
    cases = 0
    for n in range(1, 13):
        spins = all_spin_patterns(n)
        for sizes in _compositions(n):
            for beta in (0.0, 0.3, 0.7):
                pmf = cw_magnetization_pmf(CwModel(sizes=sizes, beta=beta))
                want = enumerate_cw_masses(
                    sizes, np.full((len(sizes),) * 2, beta), spins)
                worst = max(worst, float(np.max(np.abs(pmf.masses - want))))
                cases += 1
    J = np.array([[0.6, 0.2], [0.2, 0.6]])
    pmf = cw_magnetization_pmf(CwModel(sizes=[7, 5], J=J))
    want = enumerate_cw_masses([7, 5], J)
    worst = max(worst, float(np.max(np.abs(pmf.masses - want))))
    cases += 1
    elapsed = time.perf_counter() - t0
    report(2, "Curie-Weiss vs 2^n spin enumeration",
           worst < 1e-12 and elapsed < 30.0,
           f"{cases} cases worst={worst:.2e} time={elapsed:.1f}s")


def test_criterion_03_beta_zero_decoupling():
    worst = 0.0
    for sizes in ((200, 200), (180, 120)):
        pmf = cw_magnetization_pmf(CwModel(sizes=list(sizes), beta=0.0))
        want = np.outer(symmetric_binomial_masses(sizes[0]),
                        symmetric_binomial_masses(sizes[1]))
        worst = max(worst, float(np.max(np.abs(pmf.masses - want))))
    report(3, "beta=0 equals product of symmetric binomials", worst < 1e-12,
           f"worst={worst:.2e}")


def test_criterion_04_covariance_formulas():
    hom = cw_covariance(CwModel(sizes=[10, 10], beta=0.5))
    err_h = float(np.max(np.abs(hom - np.array([[1.5, 0.5], [0.5, 1.5]]))))
    het = cw_covariance(CwModel(sizes=[10, 10],
                                J=np.array([[0.5, 0.0], [0.0, 0.5]])))
    err_t = float(np.max(np.abs(het - np.diag([4.0 / 3.0, 4.0 / 3.0]))))
    report(4, "covariance closed forms", err_h < 1e-12 and err_t < 1e-12,
           f"homogeneous={err_h:.2e} heterogeneous={err_t:.2e}")


def test_criterion_05_gaussian_box_probabilities():
    phi_sym = ND.box_prob(AB, tol=1e-12)
    err_1d = abs(phi_sym - 0.6826894921370859)
    worst = 0.0
    for d in (2, 3):
        rng = np.random.default_rng(100 + d)
        variances = rng.uniform(0.5, 2.0, size=d)
        gd = GaussianDensity(np.diag(variances))
        oneds = [GaussianDensity([[v]]) for v in variances]
        for _ in range(200):
            lo = rng.uniform(-3.0, 2.0, size=d)
            hi = lo + rng.uniform(0.05, 3.0, size=d)
            want = float(np.prod([o.box_prob(closed_box([l], [h]), tol=1e-12)
                                  for o, l, h in zip(oneds, lo, hi)]))
            got = gd.box_prob(closed_box(lo, hi), tol=1e-9)
            worst = max(worst, abs(got - want))
    report(5, "Gaussian box probabilities", err_1d < 1e-10 and worst < 1e-8,
           f"|Phi(1)-Phi(-1)| err={err_1d:.2e} product err={worst:.2e}")


def test_criterion_06_pointwise_decay():
    t0 = time.perf_counter()
    vals = [pointwise_llt_stat(standardized_iid_sum(fair_coin(), n), ND).value
            for n in (64, 256, 1024, 4096)]
    elapsed = time.perf_counter() - t0
    decreasing = all(b < a for a, b in zip(vals, vals[1:]))
    report(6, "pointwise local-law decay",
           decreasing and vals[-1] < 0.25 * vals[0] and elapsed < 10.0,
           f"values={['%.3e' % v for v in vals]} time={elapsed:.1f}s")


def _dichotomy_sweep():
    out = []
    for n in DICHOTOMY_NS:
        pmf = standardized_iid_sum(fair_coin(), n)
        w = float(pmf.grid.step[0])
        out.append((n, pmf, w, w * np.log(n)))
    return out


def test_criterion_07_interval_law_positive_direction():
    vals = [sup_ratio_deviation(pmf, ND, AB, m).value
            for _, pmf, _, m in _dichotomy_sweep()]
    decreasing = all(b < a for a, b in zip(vals, vals[1:]))
    halved = vals[-1] < 0.5 * vals[0]
    report(7, "interval statistic decreases and halves (m = w ln n)",
           decreasing and halved,
           f"values={['%.4f' % v for v in vals]} "
           f"final/initial={vals[-1] / vals[0]:.3f}")


def test_criterion_08_sharpness_counterexample():
    ratios = []
    for n in DICHOTOMY_NS:
        pmf = standardized_iid_sum(fair_coin(), n)
        _, ratio = counterexample_interval(pmf, ND, AB, 3)
        ratios.append(ratio)
    report(8, "sharpness: counterexample ratio stays away from 1 (m = 3w)",
           all(r <= 0.75 for r in ratios),
           f"ratios={['%.4f' % r for r in ratios]}")


def test_criterion_09_step3_bound_domination():
    ok = True
    details = []
    bounds = ND.density_extremes(AB)
    for _, pmf, w, m in _dichotomy_sweep():
        if np.floor(m / w) < 3:
            continue
        stat = mu_vs_histogram_stat(pmf, ND, AB, m)
        bound = theoretical_step3_bound(bounds, [m], [w])
        ok = ok and stat <= bound
        details.append(f"{stat:.3f}<={bound:.3f}")
    report(9, "histogram-ratio statistic below the closed-form bound", ok,
           " ".join(details))


def test_criterion_10_sup_engine_vs_mesh_oracle():
    t0 = time.perf_counter()
    pmf1 = standardized_iid_sum(fair_coin(), 16)
    res1 = sup_ratio_deviation(pmf1, ND, AB, 0.6)
    oracle1, bound1 = mesh_sup_oracle_1d(pmf1, 1.0, -1.0, 1.0, 0.6)
    ok1 = abs(res1.value - oracle1) <= bound1

    model = CwModel(sizes=[8, 8], beta=0.0)
    pmf2 = cw_magnetization_pmf(model)
    density2 = GaussianDensity(cw_covariance(model))
    ab2 = closed_box([-1.0, -1.0], [1.0, 1.0])
    res2 = sup_ratio_deviation(pmf2, density2, ab2, [0.8, 0.8])
    marginals = [(pmf2.axis_coords(0), pmf2.masses.sum(axis=1)),
                 (pmf2.axis_coords(1), pmf2.masses.sum(axis=0))]
    oracle2, bound2 = mesh_sup_oracle_product(
        marginals, [1.0, 1.0], [-1.0, -1.0], [1.0, 1.0], [0.8, 0.8])
    ok2 = abs(res2.value - oracle2) <= bound2
    elapsed = time.perf_counter() - t0
    report(10, "sup engine matches brute-force mesh oracle",
           ok1 and ok2 and elapsed < 60.0,
           f"d1 diff={abs(res1.value - oracle1):.2e} (bound {bound1:.2e}) "
           f"d2 diff={abs(res2.value - oracle2):.2e} (bound {bound2:.2e}) "
           f"time={elapsed:.1f}s")


def test_criterion_11_continuous_interval_law():
    vals = [continuous_sup_ratio(IrwinHallDensity(n), ND, AB)
            for n in (1, 2, 4, 8, 12)]
    ok_value = abs(vals[0] - 0.2764) < 1e-3
    decreasing = all(b < a for a, b in zip(vals, vals[1:]))
    report(11, "continuous-case supremum (no minimal length)",
           ok_value and decreasing,
           f"values={['%.4f' % v for v in vals]}")


def test_criterion_12_curie_weiss_local_clt():
    t0 = time.perf_counter()
    vals = []
    for n in (32, 128, 512):
        model = CwModel(sizes=[n // 2, n // 2], beta=0.5)
        pmf = cw_magnetization_pmf(model)
        density = GaussianDensity(cw_covariance(model))
        vals.append(pointwise_llt_stat(pmf, density).value)
    elapsed = time.perf_counter() - t0
    decreasing = all(b < a for a, b in zip(vals, vals[1:]))
    report(12, "Curie-Weiss local CLT decay vs N(0,C)",
           decreasing and elapsed < 120.0,
           f"values={['%.3e' % v for v in vals]} time={elapsed:.1f}s")


def test_criterion_13_reproducibility(tmp_path):
    cfg = validate_config(json.dumps({
        "study": "iid_dichotomy",
        "model": {"family": "iid",
                  "base": {"offset": -1.0, "span": 2.0, "masses": [0.5, 0.5]}},
        "n_grid": [64, 256, 1024],
        "box": {"lower": [-1.0], "upper": [1.0]},
        "min_length_rule": {"kind": "w_times_log"},
    }))

    def run(path, threads):
        run_study(cfg, out=path, threads=threads)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        drop = rows[0].index("wall_time_s")
        return [tuple(v for i, v in enumerate(r) if i != drop) for r in rows]

    a = run(tmp_path / "a.csv", 1)
    b = run(tmp_path / "b.csv", 1)
    c = run(tmp_path / "c.csv", 8)
    report(13, "study CSV byte-reproducible across runs and thread counts",
           a == b == c, f"{len(a) - 1} rows compared")
