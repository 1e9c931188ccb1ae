"""Declarative convergence studies emitting deterministic CSV tables.

A study config (JSON) names a model family, an increasing n-grid, a target
box, and a minimal-length rule; running it computes every applicable
statistic per n and writes one CSV row per n.  Reruns byte-reproduce the CSV
except for the wall-time column, which is excluded from reproducibility
comparisons by design.

Column schema per study kind (collected in the README):

* ``iid_dichotomy``: n, w_1, m_1, pointwise_llt, step1, sup_ratio,
  mu_vs_hist, step3_bound, counterexample_l, counterexample_ratio, wall_time_s
* ``cw_local``: n, w_1..w_d, pointwise_llt, step1, wall_time_s
* ``cw_interval``: n, w_1..w_d, m_1..m_d, pointwise_llt, step1, sup_ratio,
  mu_vs_hist, step3_bound, wall_time_s
* ``continuous_llt``: n, continuous_sup_ratio, wall_time_s

``step3_bound`` and ``mu_vs_hist`` cells are empty when floor(m/w) < 3
(the closed-form bound is undefined there).
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .densities import GaussianDensity, IrwinHallDensity, standard_normal
from .errors import BoundDegenerate, ConfigInvalid, LltLabError
from .grids import Box
from .histogram import pointwise_llt_stat, step1_stat
from .intervalsup import (continuous_sup_ratio, counterexample_interval,
                          mu_vs_histogram_stat, sup_ratio_deviation,
                          theoretical_step3_bound)
from .models import (CwModel, base_from_config, cw_covariance, cw_from_config,
                     cw_magnetization_pmf, moments, sizes_from_fractions,
                     standardized_iid_sum)

STUDY_KINDS = ("iid_dichotomy", "cw_local", "cw_interval", "continuous_llt")
RULE_KINDS = ("c_times_w", "w_times_log", "w_times_sqrt_ratio")


@dataclass(frozen=True)
class MinLengthRule:
    """Minimal-length presets m(n) as a function of the grid width.

    ``c_times_w`` keeps m/w bounded (the divergence condition fails, the
    interval statistic need not converge); ``w_times_log`` gives
    m = w * ln n (slow divergence); ``w_times_sqrt_ratio`` gives
    m = w * n^(exponent/2).
    """

    kind: str
    c: float = None
    exponent: float = None

    def lengths(self, w: np.ndarray, n: int) -> np.ndarray:
        w = np.atleast_1d(np.asarray(w, dtype=float))
        if self.kind == "c_times_w":
            return self.c * w
        if self.kind == "w_times_log":
            return w * np.log(n)
        if self.kind == "w_times_sqrt_ratio":
            return w * float(n) ** (self.exponent / 2.0)
        raise ValueError(f"unknown rule kind {self.kind!r}")


@dataclass(frozen=True)
class StudyConfig:
    study: str
    model: dict
    n_grid: tuple
    box: Box
    rule: MinLengthRule = None
    offsets: int = 8
    box_prob_tol: float = 1e-11
    out: str = None


def validate_config(raw: str) -> StudyConfig:
    """Parse and validate a study config, reporting all violations at once.

    Structural problems raise :class:`ConfigInvalid` with machine-readable
    field paths.  A structurally valid Curie-Weiss config whose coupling lies
    outside the high-temperature regime raises RegimeViolation directly.
    """
    violations = []
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid([("", f"not valid JSON: {exc}")]) from exc
    if not isinstance(cfg, dict):
        raise ConfigInvalid([("", "config must be a JSON object")])

    study = cfg.get("study")
    if study not in STUDY_KINDS:
        violations.append(("study", f"must be one of {STUDY_KINDS}"))

    n_grid = cfg.get("n_grid")
    if (not isinstance(n_grid, list) or not n_grid
            or any(not isinstance(v, int) or v < 1 for v in n_grid)):
        violations.append(("n_grid", "must be a nonempty list of positive integers"))
    elif any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        violations.append(("n_grid", "must be strictly increasing"))

    box = None
    box_cfg = cfg.get("box")
    if not isinstance(box_cfg, dict) or "lower" not in box_cfg or "upper" not in box_cfg:
        violations.append(("box", "must provide lower and upper arrays"))
    else:
        try:
            box = Box(np.asarray(box_cfg["lower"], float),
                      np.asarray(box_cfg["upper"], float))
            if not box.is_nondegenerate():
                violations.append(("box", "must be non-degenerate"))
        except Exception as exc:
            violations.append(("box", str(exc)))

    rule = None
    rule_cfg = cfg.get("min_length_rule")
    needs_rule = study in ("iid_dichotomy", "cw_interval")
    if needs_rule and not isinstance(rule_cfg, dict):
        violations.append(("min_length_rule", "required for this study kind"))
    elif isinstance(rule_cfg, dict):
        kind = rule_cfg.get("kind")
        if kind not in RULE_KINDS:
            violations.append(("min_length_rule.kind",
                               f"must be one of {RULE_KINDS}"))
        elif kind == "c_times_w":
            c = rule_cfg.get("c")
            if not isinstance(c, (int, float)) or c <= 0:
                violations.append(("min_length_rule.c", "must be a positive number"))
            else:
                rule = MinLengthRule(kind=kind, c=float(c))
        elif kind == "w_times_sqrt_ratio":
            e = rule_cfg.get("exponent")
            if not isinstance(e, (int, float)) or e <= 0:
                violations.append(("min_length_rule.exponent",
                                   "must be a positive number"))
            else:
                rule = MinLengthRule(kind=kind, exponent=float(e))
        else:
            rule = MinLengthRule(kind=kind)

    model = cfg.get("model")
    probe_model = None
    if not isinstance(model, dict):
        violations.append(("model", "must be a JSON object"))
    else:
        family = model.get("family")
        expected = {"iid_dichotomy": "iid", "cw_local": "cw",
                    "cw_interval": "cw", "continuous_llt": "irwin_hall"}
        if study in expected and family != expected[study]:
            violations.append(("model.family",
                               f"study {study!r} needs family {expected[study]!r}"))
        if family == "iid":
            try:
                base = base_from_config(model.get("base", {}))
                moments(base)
            except Exception as exc:
                violations.append(("model.base", str(exc)))
        elif family == "cw":
            has_fr = isinstance(model.get("fractions"), list)
            has_sz = isinstance(model.get("sizes"), list)
            if not has_fr and not has_sz:
                violations.append(("model", "cw model needs fractions or sizes"))
            if not isinstance(model.get("coupling"), dict):
                violations.append(("model.coupling", "must provide beta or J"))
            if not violations:
                try:
                    probe_model = _cw_model_at(
                        model, n_grid[0] if has_fr else None)
                except Exception as exc:
                    violations.append(("model", str(exc)))

    engine = cfg.get("engine", {})
    offsets = engine.get("offsets", 8)
    tol = engine.get("box_prob_tol", 1e-11)
    if not isinstance(offsets, int) or offsets < 0:
        violations.append(("engine.offsets", "must be a nonnegative integer"))
    if not isinstance(tol, (int, float)) or tol <= 0:
        violations.append(("engine.box_prob_tol", "must be positive"))

    if violations:
        raise ConfigInvalid(violations)
    # Regime problems surface as RegimeViolation, not ConfigInvalid.
    if probe_model is not None:
        probe_model.check_regime()
    return StudyConfig(study=study, model=model, n_grid=tuple(n_grid), box=box,
                       rule=rule, offsets=int(offsets), box_prob_tol=float(tol),
                       out=cfg.get("out"))


def load_config(path) -> StudyConfig:
    return validate_config(Path(path).read_text())


def _cw_model_at(model_cfg: dict, n: int = None) -> CwModel:
    """Concrete CwModel for total spin count n (via fractions) or literal sizes."""
    if isinstance(model_cfg.get("fractions"), list) and n is not None:
        sizes = sizes_from_fractions(np.asarray(model_cfg["fractions"], float), n)
        cfg = dict(model_cfg, sizes=[int(s) for s in sizes])
        return cw_from_config(cfg)
    return cw_from_config(model_cfg)


def model_at(config: StudyConfig, n: int):
    """(pmf, reference density, w vector) of the configured model at n."""
    family = config.model.get("family")
    if family == "iid":
        base = base_from_config(config.model["base"])
        _, var = moments(base)
        pmf = standardized_iid_sum(base, n)
        w = np.array([base.span / np.sqrt(var * n)])
        return pmf, standard_normal(), w
    if family == "cw":
        model = _cw_model_at(config.model, n)
        pmf = cw_magnetization_pmf(model)
        density = GaussianDensity(cw_covariance(model))
        return pmf, density, pmf.grid.step.copy()
    if family == "irwin_hall":
        return None, IrwinHallDensity(n), None
    raise ValueError(f"unknown family {family!r}")


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        return repr(x)
    return str(x)


def compute_row(config: StudyConfig, n: int) -> dict:
    """All applicable statistics of the configured model at one n."""
    t0 = time.perf_counter()
    kind = config.study
    row = {"n": int(n)}
    if kind == "continuous_llt":
        _, density_n, _ = model_at(config, n)
        row["continuous_sup_ratio"] = continuous_sup_ratio(
            density_n, standard_normal(), config.box)
        row["wall_time_s"] = time.perf_counter() - t0
        return row

    pmf, density, w = model_at(config, n)
    d = pmf.dim
    for k in range(d):
        row[f"w_{k + 1}"] = float(w[k])
    m = config.rule.lengths(w, n) if config.rule is not None else None
    if kind in ("iid_dichotomy", "cw_interval"):
        for k in range(d):
            row[f"m_{k + 1}"] = float(m[k])
    row["pointwise_llt"] = pointwise_llt_stat(pmf, density).value
    row["step1"] = step1_stat(pmf, density, config.box).value
    if kind in ("iid_dichotomy", "cw_interval"):
        row["sup_ratio"] = sup_ratio_deviation(
            pmf, density, config.box, m, offsets=config.offsets,
            box_prob_tol=config.box_prob_tol).value
        try:
            bounds = density.density_extremes(config.box)
            bound = theoretical_step3_bound(bounds, m, w, d)
            row["mu_vs_hist"] = mu_vs_histogram_stat(
                pmf, density, config.box, m, offsets=config.offsets)
            row["step3_bound"] = bound
        except BoundDegenerate:
            row["mu_vs_hist"] = ""
            row["step3_bound"] = ""
    if kind == "iid_dichotomy":
        l = max(2, int(np.ceil(float(m[0] / w[0]) - 1e-9)))
        row["counterexample_l"] = l
        _, ratio = counterexample_interval(pmf, density, config.box, l)
        row["counterexample_ratio"] = ratio
    row["wall_time_s"] = time.perf_counter() - t0
    return row


def _row_with_context(config: StudyConfig, n: int) -> dict:
    try:
        return compute_row(config, n)
    except ConfigInvalid:
        raise
    except LltLabError as exc:
        raise type(exc)(f"while computing the row for n={n}: {exc}") from exc


def run_study(config: StudyConfig, out=None, threads: int = 1) -> list[dict]:
    """Compute one row per n (optionally in parallel) and write the CSV.

    Rows are written in n order regardless of completion order, so output is
    deterministic for a fixed config apart from the wall-time column.  Model
    and engine errors are re-raised annotated with the offending n.
    """
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda n: _row_with_context(config, n),
                                 config.n_grid))
    else:
        rows = [_row_with_context(config, n) for n in config.n_grid]
    out = out or config.out
    if out:
        write_rows_csv(rows, out)
    return rows


def write_rows_csv(rows: list[dict], path) -> None:
    if not rows:
        raise ValueError("no rows to write")
    header = list(rows[0].keys())
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            if list(row.keys()) != header:
                raise ValueError("inconsistent row schema")
            writer.writerow([_fmt(v) for v in row.values()])
