"""Seeded Monte Carlo experiments over perturbed matrices.

Every trial derives its own seed from (master seed, experiment label,
size, trial index), so the record stream is identical no matter how many
worker threads run and rerunning a config reproduces its outputs byte
for byte.  Gaussian baseline noise is generated by Box-Muller from the
same seeded uniform stream rather than a library normal sampler, so the
baseline is reproducible from the seed alone as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .config import ExperimentConfig
from .errors import ResourceError, ValidationError
from .linalg import (
    IntegerMatrix,
    RealMatrix,
    matrix_from_spec,
    perturb,
    svd,
)
from .noise import DiscreteDistribution, distribution_from_spec, sample_iid_matrix
from .records import ExperimentRecord, json_safe_float, run_trials
from . import rational
from .util import derive_seed, wilson_interval

SINGULARITY_BUDGET = 2**34


# ---------------------------------------------------------------------------
# noise sampling


def gaussian_matrix(n: int, seed: int) -> np.ndarray:
    """n x n standard normals via Box-Muller from the seeded uniform stream."""
    rng = np.random.Generator(np.random.PCG64(seed))
    count = n * n
    half = (count + 1) // 2
    u1 = 1.0 - rng.random(half)  # in (0, 1]: log stays finite
    u2 = rng.random(half)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([r * np.cos(2.0 * math.pi * u2), r * np.sin(2.0 * math.pi * u2)])
    return z[:count].reshape(n, n)


def build_mask(spec: str, base: IntegerMatrix, seed: int) -> np.ndarray | None:
    """Frozen-entry masks: 'none', 'zeros' (freeze zero entries of the base),
    or 'random:<k>' (k seeded positions per row).

    Per-row frozen counts are capped at min(ceil(n^0.99), n - 1): freezing
    a full row would remove all randomness from it.
    """
    spec = spec.strip().lower()
    n = base.n
    if spec in ("", "none"):
        return None
    if spec == "zeros":
        mask = base.entries == 0
    elif spec.startswith("random:"):
        k = int(spec.split(":", 1)[1])
        if k < 0:
            raise ValidationError("random mask count must be >= 0")
        rng = np.random.Generator(np.random.PCG64(derive_seed(seed, "mask", n)))
        mask = np.zeros((n, n), dtype=bool)
        for i in range(n):
            cols = rng.choice(n, size=min(k, n), replace=False)
            mask[i, cols] = True
    else:
        raise ValidationError(f"unknown mask spec {spec!r}")
    cap = min(math.ceil(n**0.99), n - 1) if n > 1 else 0
    worst = int(np.max(np.sum(mask, axis=1)))
    if worst > cap:
        raise ValidationError(
            f"mask freezes {worst} entries in a row, cap is {cap} (= min(ceil(n^0.99), n-1))"
        )
    return mask


# ---------------------------------------------------------------------------
# shared per-trial kernel


def _kappa_trial(
    base: IntegerMatrix,
    noise_spec: str,
    n: int,
    seed: int,
    mask: np.ndarray | None,
    tail_threshold: float,
) -> ExperimentRecord:
    if noise_spec.strip().lower() == "gaussian":
        noise = gaussian_matrix(n, seed)
        if mask is not None:
            noise = noise.copy()
            noise[mask] = 0.0
        spectrum = svd(RealMatrix(base.entries.astype(float) + noise))
    else:
        dist = distribution_from_spec(noise_spec)
        noise_m = IntegerMatrix(sample_iid_matrix(dist, n, seed))
        spectrum = svd(perturb(base, noise_m, mask))
    s_max = spectrum.sigma_max
    s_min = spectrum.sigma_min
    singular = s_min < 1e-300 * max(s_max, 1e-300)
    kappa = math.inf if singular else (s_max / s_min if s_min > 0 else math.inf)
    if s_max == 0.0:
        kappa = math.inf
        singular = True
    return ExperimentRecord(
        trial=0,  # caller overwrites
        seed=seed,
        n=n,
        sigma_max=s_max,
        sigma_min=s_min,
        kappa=kappa,
        singular=bool(singular),
        tail_hit=bool(kappa >= tail_threshold),
    )


def _with_trial(record: ExperimentRecord, trial: int) -> ExperimentRecord:
    return ExperimentRecord(
        trial=trial,
        seed=record.seed,
        n=record.n,
        sigma_max=record.sigma_max,
        sigma_min=record.sigma_min,
        kappa=record.kappa,
        singular=record.singular,
        tail_hit=record.tail_hit,
        wall_time=record.wall_time,
    )


# ---------------------------------------------------------------------------
# tail of the inverse norm


@dataclass(frozen=True)
class TailCurve:
    n: int
    grid: tuple[float, ...]
    counts: tuple[int, ...]
    fractions: tuple[float, ...]
    ci_low: tuple[float, ...]
    ci_high: tuple[float, ...]
    slope: float | None
    slope_points: int


@dataclass(frozen=True)
class TailResult:
    config: ExperimentConfig
    records: list[ExperimentRecord]
    curves: dict[int, TailCurve]

    def summary(self) -> dict:
        return {
            "experiment": "tail",
            "trials": self.config.trials,
            "noise": self.config.noise,
            "curves": {
                str(n): {
                    "grid": [json_safe_float(x) for x in c.grid],
                    "counts": list(c.counts),
                    "fractions": [json_safe_float(x) for x in c.fractions],
                    "ci_low": [json_safe_float(x) for x in c.ci_low],
                    "ci_high": [json_safe_float(x) for x in c.ci_high],
                    "loglog_slope": json_safe_float(c.slope) if c.slope is not None else None,
                    "slope_points": c.slope_points,
                }
                for n, c in self.curves.items()
            },
        }


def _tail_curve_from(inv_norms: list[float], n: int, grid_points: int) -> TailCurve:
    finite = sorted(x for x in inv_norms if math.isfinite(x))
    if len(finite) < 2:
        raise ValidationError("too few finite inverse norms to build a curve")
    lo = finite[int(0.50 * (len(finite) - 1))]
    hi = finite[int(0.98 * (len(finite) - 1))]
    if not (0 < lo < hi):
        lo = max(finite[0], 1e-6)
        hi = finite[-1]
    if hi <= lo:
        hi = lo * 10.0  # all observations equal: still emit a usable grid
    grid = list(np.geomspace(lo, hi, grid_points))
    trials = len(inv_norms)
    counts, fracs, cl, ch = [], [], [], []
    for x in grid:
        c = sum(1 for v in inv_norms if v >= x)
        counts.append(c)
        fracs.append(c / trials)
        w = wilson_interval(c, trials)
        cl.append(w[0])
        ch.append(w[1])
    pts = [(math.log10(x), math.log10(f)) for x, f in zip(grid, fracs) if 0.0 < f < 1.0]
    slope = None
    if len(pts) >= 3:
        xs = np.array([p[0] for p in pts])
        ys = np.array([p[1] for p in pts])
        slope = float(np.polyfit(xs, ys, 1)[0])
    return TailCurve(
        n=n,
        grid=tuple(grid),
        counts=tuple(counts),
        fractions=tuple(fracs),
        ci_low=tuple(cl),
        ci_high=tuple(ch),
        slope=slope,
        slope_points=len(pts),
    )


def tail_curve(cfg: ExperimentConfig) -> TailResult:
    """Exceedance curve of ||inverse|| = 1/sigma_min over a log grid."""
    if cfg.trials < 100:
        raise ValidationError("tail curves need at least 100 trials")
    records: list[ExperimentRecord] = []
    curves: dict[int, TailCurve] = {}
    for n in cfg.sizes:
        base = matrix_from_spec(cfg.matrix, n, cfg.c_exponent)
        mask = build_mask(cfg.mask, base, cfg.seed)
        x_ref = 10.0 * math.sqrt(n)  # record-level tail flag reference

        def one(trial: int, n=n, base=base, mask=mask, x_ref=x_ref):
            seed = derive_seed(cfg.seed, "tail", n, trial)
            rec = _kappa_trial(base, cfg.noise, n, seed, mask, math.inf)
            inv = math.inf if rec.sigma_min == 0.0 else 1.0 / rec.sigma_min
            return ExperimentRecord(
                trial=trial, seed=seed, n=n, sigma_max=rec.sigma_max,
                sigma_min=rec.sigma_min, kappa=rec.kappa, singular=rec.singular,
                tail_hit=bool(inv >= x_ref),
            )

        rows = run_trials(one, cfg.trials, cfg.threads)
        records.extend(rows)
        inv_norms = [math.inf if r.sigma_min == 0.0 else 1.0 / r.sigma_min for r in rows]
        curves[n] = _tail_curve_from(inv_norms, n, cfg.grid_points)
    return TailResult(config=cfg, records=records, curves=curves)


# ---------------------------------------------------------------------------
# condition number tail


@dataclass(frozen=True)
class ExceedanceRow:
    b: float
    threshold: float
    count: int
    fraction: float
    ci_low: float
    ci_high: float
    comparable_to_gaussian: bool | None = None


@dataclass(frozen=True)
class CondTailResult:
    config: ExperimentConfig
    records: list[ExperimentRecord]
    tables: dict[int, list[ExceedanceRow]]
    gaussian_tables: dict[int, list[ExceedanceRow]]
    smallest_sufficient_b: dict[int, float | None]

    def summary(self) -> dict:
        def rows(table):
            return [
                {
                    "b": r.b,
                    "threshold": json_safe_float(r.threshold),
                    "count": r.count,
                    "fraction": json_safe_float(r.fraction),
                    "ci_low": json_safe_float(r.ci_low),
                    "ci_high": json_safe_float(r.ci_high),
                    **(
                        {"comparable_to_gaussian": r.comparable_to_gaussian}
                        if r.comparable_to_gaussian is not None
                        else {}
                    ),
                }
                for r in table
            ]

        out = {
            "experiment": "cond-tail",
            "trials": self.config.trials,
            "noise": self.config.noise,
            "matrix": self.config.matrix,
            "tables": {str(n): rows(t) for n, t in self.tables.items()},
            "smallest_sufficient_b": {
                str(n): b for n, b in self.smallest_sufficient_b.items()
            },
        }
        if self.gaussian_tables:
            out["gaussian_tables"] = {str(n): rows(t) for n, t in self.gaussian_tables.items()}
        return out


def _exceedance_table(kappas: list[float], n: int, b_grid: Sequence[float]) -> list[ExceedanceRow]:
    trials = len(kappas)
    rows = []
    for b in b_grid:
        threshold = float(n) ** float(b)
        count = sum(1 for k in kappas if k >= threshold)
        lo, hi = wilson_interval(count, trials)
        rows.append(
            ExceedanceRow(
                b=float(b), threshold=threshold, count=count,
                fraction=count / trials, ci_low=lo, ci_high=hi,
            )
        )
    return rows


def condition_tail(cfg: ExperimentConfig) -> CondTailResult:
    """Empirical P(kappa >= n^B) per B, with an optional Gaussian baseline.

    The baseline runs the same trial count at the same sizes from its own
    derived seed stream; a B row is flagged comparable when the two 99%
    intervals overlap.  The summary also reports the smallest grid B whose
    exceedance is at or below the configured target (empirical sufficiency).
    """
    records: list[ExperimentRecord] = []
    tables: dict[int, list[ExceedanceRow]] = {}
    gauss_tables: dict[int, list[ExceedanceRow]] = {}
    smallest: dict[int, float | None] = {}
    for n in cfg.sizes:
        base = matrix_from_spec(cfg.matrix, n, cfg.c_exponent)
        mask = build_mask(cfg.mask, base, cfg.seed)
        tail_ref = float(n) ** float(cfg.b_grid[0])

        def one(trial: int, n=n, base=base, mask=mask, tail_ref=tail_ref):
            seed = derive_seed(cfg.seed, "cond-tail", n, trial)
            rec = _kappa_trial(base, cfg.noise, n, seed, mask, tail_ref)
            return _with_trial(rec, trial)

        rows = run_trials(one, cfg.trials, cfg.threads)
        records.extend(rows)
        kappas = [r.kappa for r in rows]
        table = _exceedance_table(kappas, n, cfg.b_grid)
        if cfg.compare_gaussian:

            def one_gauss(trial: int, n=n, base=base, mask=mask, tail_ref=tail_ref):
                seed = derive_seed(cfg.seed, "cond-tail-gaussian", n, trial)
                return _with_trial(_kappa_trial(base, "gaussian", n, seed, mask, tail_ref), trial)

            gauss_rows = run_trials(one_gauss, cfg.trials, cfg.threads)
            gauss_kappas = [r.kappa for r in gauss_rows]
            gtable = _exceedance_table(gauss_kappas, n, cfg.b_grid)
            gauss_tables[n] = gtable
            table = [
                ExceedanceRow(
                    b=r.b, threshold=r.threshold, count=r.count, fraction=r.fraction,
                    ci_low=r.ci_low, ci_high=r.ci_high,
                    comparable_to_gaussian=bool(
                        r.ci_low <= g.ci_high and g.ci_low <= r.ci_high
                    ),
                )
                for r, g in zip(table, gtable)
            ]
        tables[n] = table
        hit = [r.b for r in table if r.fraction <= cfg.target_exceedance]
        smallest[n] = min(hit) if hit else None
    return CondTailResult(
        config=cfg, records=records, tables=tables,
        gaussian_tables=gauss_tables, smallest_sufficient_b=smallest,
    )


# ---------------------------------------------------------------------------
# exact singularity probability


def singularity_probability(
    n: int,
    dist: DiscreteDistribution,
    order: str = "rows",
    budget: int = SINGULARITY_BUDGET,
) -> Fraction:
    """P(det = 0) by exhaustive enumeration over all entry assignments.

    Exact rational output.  `order` picks the fill order of the
    assignment tuple ('rows' or 'cols'); the sum is the same either way,
    which doubles as a regression check on the enumeration.
    """
    if n < 1 or n > 5:
        raise ValidationError("exhaustive singularity supports 1 <= n <= 5")
    if order not in ("rows", "cols"):
        raise ValidationError(f"order must be 'rows' or 'cols', got {order!r}")
    support = dist.values
    k = len(support)
    cells = n * n
    total_states = k**cells
    if total_states > budget:
        raise ResourceError(
            f"enumeration needs {total_states} states (budget {budget})"
        )
    probs = {v: p for v, p in dist.atoms}
    uniform = len(set(dist.probabilities)) == 1
    import itertools

    singular_mass = Fraction(0)
    singular_count = 0
    for assignment in itertools.product(support, repeat=cells):
        if order == "rows":
            rows = [list(assignment[i * n : (i + 1) * n]) for i in range(n)]
        else:
            rows = [[assignment[j * n + i] for j in range(n)] for i in range(n)]
        if rational.determinant(rows) == 0:
            if uniform:
                singular_count += 1
            else:
                mass = Fraction(1)
                for v in assignment:
                    mass *= probs[v]
                singular_mass += mass
    if uniform:
        return Fraction(singular_count, total_states)
    return singular_mass


# ---------------------------------------------------------------------------
# elimination error against the exact reference


def _ge_solve(a: np.ndarray, b: np.ndarray, dtype) -> np.ndarray | None:
    """Gaussian elimination with partial pivoting carried out in `dtype`
    (float32 simulates single precision end to end)."""
    a = a.astype(dtype).copy()
    b = b.astype(dtype).copy()
    n = len(b)
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if a[piv, k] == 0:
            return None
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            b[[k, piv]] = b[[piv, k]]
        factors = (a[k + 1 :, k] / a[k, k]).astype(dtype)
        a[k + 1 :, k:] -= factors[:, None] * a[k, k:]
        b[k + 1 :] -= factors * b[k]
    x = np.zeros(n, dtype=dtype)
    for i in range(n - 1, -1, -1):
        acc = dtype(b[i] - np.dot(a[i, i + 1 :], x[i + 1 :]))
        if a[i, i] == 0:
            return None
        x[i] = acc / a[i, i]
    return x


@dataclass(frozen=True)
class GeTrial:
    trial: int
    seed: int
    kappa: float
    rel_error: float
    ratio: float
    singular: bool


@dataclass(frozen=True)
class GeResult:
    config: ExperimentConfig
    records: list[ExperimentRecord]
    trials: list[GeTrial]
    eps_machine: float

    def summary(self) -> dict:
        ok = [t for t in self.trials if not t.singular]
        ratios = sorted(t.ratio for t in ok if math.isfinite(t.ratio))
        well = [t for t in ok if t.kappa <= 1e3]
        frac_small = (
            sum(1 for t in well if t.ratio <= 100.0) / len(well) if well else None
        )
        return {
            "experiment": "ge-check",
            "precision": self.config.precision,
            "eps_machine": self.eps_machine,
            "trials": len(self.trials),
            "singular_draws": sum(1 for t in self.trials if t.singular),
            "ratio_median": json_safe_float(ratios[len(ratios) // 2]) if ratios else None,
            "ratio_p90": json_safe_float(ratios[int(0.9 * (len(ratios) - 1))]) if ratios else None,
            "ratio_max": json_safe_float(ratios[-1]) if ratios else None,
            "well_conditioned_count": len(well),
            "fraction_ratio_le_100_well_conditioned": json_safe_float(frac_small)
            if frac_small is not None
            else None,
        }


def ge_error_experiment(cfg: ExperimentConfig) -> GeResult:
    """Relative solve error of floating GE against the exact rational answer.

    Systems are integer (base + discrete noise, integer right-hand side),
    so the reference path is exact elimination; the reported ratio is
    rel_error / (eps_machine * kappa).  Singular draws are recorded and
    excluded from the error statistics.
    """
    if cfg.noise.strip().lower() == "gaussian":
        raise ValidationError("ge-check needs discrete noise: the exact reference path is integer")
    dtype = np.float32 if cfg.precision == "single" else np.float64
    eps = 2.0**-24 if cfg.precision == "single" else 2.0**-53
    dist = distribution_from_spec(cfg.noise)
    records: list[ExperimentRecord] = []
    trials: list[GeTrial] = []
    for n in cfg.sizes:
        base = matrix_from_spec(cfg.matrix, n, cfg.c_exponent)

        def one(trial: int, n=n, base=base):
            seed = derive_seed(cfg.seed, "ge-check", n, trial)
            noise_m = IntegerMatrix(sample_iid_matrix(dist, n, seed))
            system = perturb(base, noise_m, None)
            rng = np.random.Generator(np.random.PCG64(derive_seed(cfg.seed, "ge-rhs", n, trial)))
            b = rng.integers(-9, 10, size=n)
            exact = rational.solve_exact(system.rows(), [int(x) for x in b])
            spectrum = svd(system)
            s_max, s_min = spectrum.sigma_max, spectrum.sigma_min
            singular = exact is None
            kappa = math.inf if singular or s_min <= 0 else s_max / s_min
            if singular:
                rel = math.inf
                ratio = math.inf
            else:
                approx = _ge_solve(system.entries.astype(np.float64), b.astype(np.float64), dtype)
                x_true = np.array([float(x) for x in exact])
                denom = float(np.linalg.norm(x_true))
                if approx is None or denom == 0.0:
                    rel = math.inf
                else:
                    rel = float(np.linalg.norm(approx.astype(np.float64) - x_true)) / denom
                ratio = rel / (eps * kappa) if math.isfinite(kappa) and kappa > 0 else math.inf
            rec = ExperimentRecord(
                trial=trial, seed=seed, n=n, sigma_max=s_max, sigma_min=s_min,
                kappa=kappa, singular=singular, tail_hit=bool(not singular and ratio > 100.0),
            )
            return rec, GeTrial(trial=trial, seed=seed, kappa=kappa, rel_error=rel,
                                ratio=ratio, singular=singular)

        rows = run_trials(one, cfg.trials, cfg.threads)
        records.extend(r for r, _ in rows)
        trials.extend(t for _, t in rows)
    return GeResult(config=cfg, records=records, trials=trials, eps_machine=eps)


# ---------------------------------------------------------------------------
# leading principal minors


@dataclass(frozen=True)
class MinorsResult:
    config: ExperimentConfig
    records: list[ExperimentRecord]
    per_k: dict[int, dict[int, float]]  # n -> k -> max kappa over trials
    fraction_all_below: dict[int, float]

    def summary(self) -> dict:
        return {
            "experiment": "minors",
            "trials": self.config.trials,
            "b": self.config.b_grid[0],
            "per_minor_max_kappa": {
                str(n): {str(k): json_safe_float(v) for k, v in ks.items()}
                for n, ks in self.per_k.items()
            },
            "fraction_all_minors_below_threshold": {
                str(n): json_safe_float(f) for n, f in self.fraction_all_below.items()
            },
        }


def minors_experiment(cfg: ExperimentConfig) -> MinorsResult:
    """Condition numbers of every leading principal minor of the perturbed
    matrix; B = first entry of b_grid sets the n^B quality threshold."""
    if max(cfg.sizes) > 300:
        raise ValidationError("minors experiment caps n at 300")
    b = cfg.b_grid[0]
    records: list[ExperimentRecord] = []
    per_k: dict[int, dict[int, float]] = {}
    frac_ok: dict[int, float] = {}
    for n in cfg.sizes:
        base = matrix_from_spec(cfg.matrix, n, cfg.c_exponent)
        mask = build_mask(cfg.mask, base, cfg.seed)
        threshold = float(n) ** float(b)

        def one(trial: int, n=n, base=base, mask=mask, threshold=threshold):
            seed = derive_seed(cfg.seed, "minors", n, trial)
            dist = distribution_from_spec(cfg.noise)
            noise_m = IntegerMatrix(sample_iid_matrix(dist, n, seed))
            full = perturb(base, noise_m, mask)
            kappas = []
            s_max = s_min = 0.0
            for k in range(1, n + 1):
                spec_k = svd(RealMatrix(full.entries[:k, :k].astype(float)))
                if k == n:
                    s_max, s_min = spec_k.sigma_max, spec_k.sigma_min
                kappas.append(
                    math.inf
                    if spec_k.sigma_min <= 0 or spec_k.sigma_max == 0
                    else spec_k.sigma_max / spec_k.sigma_min
                )
            kappa = math.inf if s_min <= 0 else s_max / s_min
            max_kappa = max(kappas)
            rec = ExperimentRecord(
                trial=trial, seed=seed, n=n, sigma_max=s_max, sigma_min=s_min,
                kappa=kappa, singular=bool(s_min <= 0),
                tail_hit=bool(max_kappa > threshold),
            )
            return rec, kappas

        rows = run_trials(one, cfg.trials, cfg.threads)
        records.extend(r for r, _ in rows)
        worst = {k + 1: 0.0 for k in range(n)}
        good = 0
        for _, kappas in rows:
            if max(kappas) <= threshold:
                good += 1
            for k, value in enumerate(kappas, start=1):
                worst[k] = max(worst[k], value)
        per_k[n] = worst
        frac_ok[n] = good / cfg.trials
    return MinorsResult(config=cfg, records=records, per_k=per_k, fraction_all_below=frac_ok)


# ---------------------------------------------------------------------------
# frozen entries


@dataclass(frozen=True)
class FrozenResult:
    config: ExperimentConfig
    records: list[ExperimentRecord]  # masked run
    masked_tables: dict[int, list[ExceedanceRow]]
    unmasked_tables: dict[int, list[ExceedanceRow]]

    def summary(self) -> dict:
        def rows(table):
            return [
                {
                    "b": r.b,
                    "count": r.count,
                    "fraction": json_safe_float(r.fraction),
                    "ci_low": json_safe_float(r.ci_low),
                    "ci_high": json_safe_float(r.ci_high),
                }
                for r in table
            ]

        return {
            "experiment": "frozen",
            "mask": self.config.mask,
            "trials": self.config.trials,
            "masked_tables": {str(n): rows(t) for n, t in self.masked_tables.items()},
            "unmasked_tables": {str(n): rows(t) for n, t in self.unmasked_tables.items()},
        }


def frozen_entries_experiment(cfg: ExperimentConfig) -> FrozenResult:
    """Condition tail with a frozen-entry mask, against the unmasked run
    at matched per-trial seeds."""
    if cfg.mask.strip().lower() in ("", "none"):
        raise ValidationError("frozen experiment needs a mask spec")
    records: list[ExperimentRecord] = []
    masked_tables: dict[int, list[ExceedanceRow]] = {}
    unmasked_tables: dict[int, list[ExceedanceRow]] = {}
    for n in cfg.sizes:
        base = matrix_from_spec(cfg.matrix, n, cfg.c_exponent)
        mask = build_mask(cfg.mask, base, cfg.seed)
        if mask is None:
            raise ValidationError("mask spec resolved to no frozen entries")
        tail_ref = float(n) ** float(cfg.b_grid[0])

        def one(trial: int, n=n, base=base, mask=mask, tail_ref=tail_ref):
            seed = derive_seed(cfg.seed, "frozen", n, trial)
            rec_masked = _kappa_trial(base, cfg.noise, n, seed, mask, tail_ref)
            rec_plain = _kappa_trial(base, cfg.noise, n, seed, None, tail_ref)
            return _with_trial(rec_masked, trial), rec_plain.kappa

        rows = run_trials(one, cfg.trials, cfg.threads)
        records.extend(r for r, _ in rows)
        masked_tables[n] = _exceedance_table([r.kappa for r, _ in rows], n, cfg.b_grid)
        unmasked_tables[n] = _exceedance_table([k for _, k in rows], n, cfg.b_grid)
    return FrozenResult(
        config=cfg, records=records,
        masked_tables=masked_tables, unmasked_tables=unmasked_tables,
    )
