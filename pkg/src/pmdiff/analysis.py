"""Metrics, noise injection, property/invariant verification, and the
denoising experiment driver.

The operator checks mirror the discrete well-posedness requirements:

    P1  coefficients depend continuously on u   (perturbation probe)
    P2  symmetry                                (exact)
    P3  zero row sums                           (exact, by construction)
    P4  nonnegative off-diagonal entries        (strictly positive here)
    P5  irreducibility                          (connected adjacency graph)

and the induced evolution properties checked from a metrics log:

    I2  average grey level invariance
    I3  extremum principle
    I4  convergence to a constant steady state (variance decay)
"""
from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np
from numpy.typing import NDArray
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .grid import ScalarField
from .operator import DiffusionOperator, _offdiag_row_sums, assemble

__all__ = [
    "MetricsLog",
    "FieldStats",
    "field_stats",
    "variance",
    "l1_distance",
    "add_gaussian_noise",
    "Check",
    "Report",
    "verify_operator_properties",
    "verify_invariants",
    "continuity_check",
    "SchemeOutcome",
    "denoise_experiment",
]


# ---------------------------------------------------------------------------
# metrics

def variance(field: ScalarField) -> float:
    """Population variance over all MN pixels."""
    return float(np.var(field.values))


def l1_distance(u0: ScalarField, u: ScalarField) -> float:
    """Sum of absolute pixel differences (the error metric of the
    denoising experiments)."""
    if u0.shape != u.shape:
        raise ValueError(f"dimension mismatch: {u0.shape} vs {u.shape}")
    return float(np.sum(np.abs(u0.values - u.values)))


@dataclass(frozen=True)
class FieldStats:
    mean: float
    variance: float
    min: float
    max: float


def field_stats(field: ScalarField) -> FieldStats:
    v = field.values
    return FieldStats(float(v.mean()), float(np.var(v)), float(v.min()), float(v.max()))


@dataclass
class MetricsRow:
    iteration: int
    mean: float
    variance: float
    min: float
    max: float
    l1_ref: float | None = None


class MetricsLog:
    """Per-iteration statistics of an evolution, in iteration order."""

    def __init__(self):
        self.rows: list[MetricsRow] = []

    def append(self, iteration: int, field: ScalarField, reference: ScalarField | None = None):
        if self.rows and iteration <= self.rows[-1].iteration:
            raise ValueError(f"iterations must be strictly increasing, got {iteration} after {self.rows[-1].iteration}")
        v = field.values
        l1 = None if reference is None else l1_distance(reference, field)
        self.rows.append(MetricsRow(iteration, float(v.mean()), float(np.var(v)), float(v.min()), float(v.max()), l1))

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> NDArray[np.float64]:
        return np.array([getattr(r, name) for r in self.rows], dtype=np.float64)

    def to_csv(self) -> str:
        """Header iter,mean,variance,min,max,l1_ref; 15 significant digits;
        l1_ref blank when no reference was tracked."""
        lines = ["iter,mean,variance,min,max,l1_ref"]
        for r in self.rows:
            l1 = "" if r.l1_ref is None else f"{r.l1_ref:.15g}"
            lines.append(f"{r.iteration},{r.mean:.15g},{r.variance:.15g},{r.min:.15g},{r.max:.15g},{l1}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# noise

def add_gaussian_noise(field: ScalarField, snr: float, seed: int) -> ScalarField:
    """Add zero-mean normal noise with std = mean(field) / snr.

    SNR is the mean signal divided by the noise standard deviation, so
    the field mean must be positive. Sampling uses numpy's PCG64
    generator with the ziggurat standard_normal transform, so a fixed
    seed reproduces the noise exactly. The output is NOT clamped to
    [0,1]; clamping would bias the mean and is left to image export.
    """
    if not (snr > 0.0 and np.isfinite(snr)):
        raise ValueError(f"snr must be a positive finite real, got {snr}")
    mean = float(field.values.mean())
    if mean <= 0.0:
        raise ValueError(f"snr is mean/std, undefined for non-positive field mean {mean}")
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(field.shape) * (mean / snr)
    return field.with_values(field.values + noise)


# ---------------------------------------------------------------------------
# reports

@dataclass
class Check:
    name: str
    passed: bool
    values: dict = dataclass_field(default_factory=dict)
    note: str = ""

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        parts = [f"{self.name}: {verdict}"]
        parts += [f"{k}={_fmt(v)}" for k, v in self.values.items()]
        if self.note:
            parts.append(self.note)
        return " ".join(parts)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


class Report:
    """A bundle of named checks with stable one-line renderings."""

    def __init__(self, checks: list[Check]):
        self.checks = checks

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]

    def key_values(self) -> list[str]:
        out = []
        for c in self.checks:
            out.append(f"{c.name.lower()}_pass={int(c.passed)}")
            out += [f"{c.name.lower()}_{k}={_fmt(v)}" for k, v in c.values.items()]
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())


# ---------------------------------------------------------------------------
# operator property verification

def _as_csr(operator) -> sparse.csr_matrix:
    if isinstance(operator, DiffusionOperator):
        mat = operator.matrix
    else:
        mat = sparse.csr_matrix(operator)
    mat.sort_indices()
    return mat


def verify_operator_properties(operator) -> Report:
    """Measure P2-P5 on an operator (or any matrix, for negative controls).

    Row sums are evaluated as (off-diagonal sum in storage order) plus the
    diagonal entry -- the same accumulation assembly uses -- so assembled
    operators report exactly zero. P5 walks the off-diagonal adjacency
    graph (BFS) and reports the component count.
    """
    mat = _as_csr(operator)
    n = mat.shape[0]

    asym = mat - mat.T
    max_asym = 0.0 if asym.nnz == 0 else float(np.abs(asym.data).max())
    p2 = Check("P2", max_asym == 0.0, {"max_asym": max_asym})
    if not p2.passed:
        k = int(np.argmax(np.abs(asym.data)))
        row = int(np.searchsorted(asym.indptr, k, side="right") - 1)
        p2.note = f"entry_pair=({row},{int(asym.indices[k])})"

    row_sums = _offdiag_row_sums(mat) + mat.diagonal()
    max_row_sum = float(np.abs(row_sums).max())
    p3 = Check("P3", max_row_sum == 0.0, {"max_row_sum": max_row_sum})

    row_of = np.repeat(np.arange(n), np.diff(mat.indptr))
    off_vals = mat.data[mat.indices != row_of]
    min_off = float(off_vals.min()) if off_vals.size else float("inf")
    p4 = Check("P4", min_off >= 0.0, {"min_offdiag": min_off})

    n_comp = int(connected_components(mat, directed=False)[0]) if n > 0 else 0
    p5 = Check("P5", n_comp <= 1, {"components": n_comp})

    return Report([p2, p3, p4, p5])


def continuity_check(field: ScalarField, model, epsilons=(1e-2, 1e-4, 1e-6), seed: int = 0) -> Report:
    """P1 probe: ||A(u + eps v) - A(u)||_max must shrink linearly with eps.

    Continuity proper is an analytic fact about c; numerically we check
    that the perturbation response is first order (bounded ratio to eps)
    and vanishing.
    """
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(field.shape)
    v /= np.abs(v).max()
    base = assemble(field, model).matrix
    diffs = []
    for eps in epsilons:
        pert = assemble(field.with_values(field.values + eps * v), model).matrix
        d = pert - base
        diffs.append(0.0 if d.nnz == 0 else float(np.abs(d.data).max()))
    ratios = [d / e for d, e in zip(diffs, epsilons)]
    # response must not blow up as eps -> 0, and must actually vanish
    bounded = ratios[-1] <= 10.0 * max(ratios[0], 1e-30)
    vanishing = diffs[-1] <= 1e-3 * max(diffs[0], 1e-30) or diffs[-1] == 0.0
    return Report([Check("P1", bounded and vanishing, {"max_ratio": max(ratios), "smallest_diff": diffs[-1]})])


# ---------------------------------------------------------------------------
# invariant verification

def verify_invariants(
    log: MetricsLog,
    u0_stats: FieldStats,
    mean_tol: float | None = None,
    extremum_slack: float = 1e-12,
    variance_slack: float = 1e-12,
) -> Report:
    """Check I2/I3/I4-style properties of a recorded evolution.

    mean_tol defaults to 1e-10 * max(1, |mean(u0)|). Extrema may exceed
    the initial range by at most extremum_slack; the variance sequence may
    rise by at most variance_slack per step (rounding headroom).
    """
    if len(log) == 0:
        raise ValueError("empty metrics log")
    if mean_tol is None:
        mean_tol = 1e-10 * max(1.0, abs(u0_stats.mean))

    means = log.column("mean")
    max_drift = float(np.abs(means - u0_stats.mean).max())
    i2 = Check("I2", max_drift <= mean_tol, {"max_drift": max_drift, "tol": mean_tol})

    overshoot = float(np.maximum(log.column("max") - u0_stats.max, 0.0).max())
    undershoot = float(np.maximum(u0_stats.min - log.column("min"), 0.0).max())
    worst = max(overshoot, undershoot)
    i3 = Check("I3", worst <= extremum_slack, {"max_overshoot": worst})

    variances = np.concatenate(([u0_stats.variance], log.column("variance")))
    rises = np.diff(variances)
    max_rise = float(rises.max()) if rises.size else 0.0
    i4 = Check("I4", max_rise <= variance_slack, {"max_variance_rise": max_rise, "final_variance": float(variances[-1])})

    return Report([i2, i3, i4])


# ---------------------------------------------------------------------------
# denoising experiment

@dataclass
class SchemeOutcome:
    """Result of one scheme's run against the clean reference."""

    scheme: str
    stop_iteration: int
    min_error: float
    errors: NDArray[np.float64]          # errors[n] = d(clean, u_n), errors[0] for the noisy input
    relative_errors: NDArray[np.float64]  # errors / d(clean, noisy)
    hit_max_iters: bool


def denoise_experiment(
    clean: ScalarField,
    noisy: ScalarField,
    model,
    configs,
    max_iters: int,
    patience: int = 10,
) -> list[SchemeOutcome]:
    """Run each configured scheme on the noisy field until the error to the
    clean field reaches its first minimum.

    The error is the L1 distance per iteration. Stopping: track the
    running minimum; once the error has exceeded it for `patience`
    consecutive iterations the minimum is confirmed and the run stops
    (jitter-proof "first local minimum"). An exact-zero error stops
    immediately (nothing can improve on it). Curves are also reported
    relative to the initial error d(clean, noisy), so they start at 1.
    """
    from . import schemes  # runtime import; schemes imports this module for MetricsLog

    if clean.shape != noisy.shape:
        raise ValueError(f"dimension mismatch: {clean.shape} vs {noisy.shape}")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")

    d0 = l1_distance(clean, noisy)
    outcomes = []
    for config in configs:
        step = schemes.step_function(config.scheme)
        errors = [d0]
        best, best_iter, worse = d0, 0, 0
        hit_max = False
        if d0 != 0.0:
            u = noisy
            for it in range(1, max_iters + 1):
                u = step(u, model, config)
                d = l1_distance(clean, u)
                errors.append(d)
                if d < best:
                    best, best_iter, worse = d, it, 0
                elif d > best:
                    worse += 1
                    if worse >= patience:
                        break
                else:
                    worse = 0
            else:
                hit_max = True
        err = np.array(errors)
        rel = err / d0 if d0 > 0.0 else np.zeros_like(err)
        outcomes.append(SchemeOutcome(config.scheme, best_iter, best, err, rel, hit_max))
    return outcomes
