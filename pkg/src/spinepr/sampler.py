"""Monte Carlo measurement sampling and bootstrap error bars.

Finite samples of joint spin outcomes are drawn from the exact joint PMF of a
density matrix, then every variance criterion is re-estimated from counts.

Random streams
--------------
All randomness comes from ``numpy.random.PCG64`` seeded through
``numpy.random.SeedSequence(seed, spawn_key=key)``:

* outcome sampling along axis ``x, y, z`` uses ``key = (0, axis_index)``;
* the bootstrap for that axis uses ``key = (1, axis_index)``.

Streams depend only on ``(seed, key)``, so results do not depend on the order
in which axes are processed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .criteria import (
    CriterionReport,
    InferenceConvention,
    collective_spin_criterion,
    conditional_variances,
    epr_criterion,
    hofmann_takeuchi_projected,
    joint_outcome_pmf,
)
from .errors import DegenerateError, DimensionError, DomainError
from .qmatrix import DensityMatrix
from .states import AXES, WernerLossParams, lossy_state_closed_form, project_two_photon, spin_operator

N_BOOTSTRAP = 200
SAMPLE_STREAM = 0
BOOTSTRAP_STREAM = 1


def rng_for(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


@dataclass(frozen=True)
class SampleConfig:
    n_samples: int
    seed: int = 0
    axis: str = "z"

    def __post_init__(self):
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise DomainError(f"n_samples must be a positive integer, got {self.n_samples!r}")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.axis not in AXES:
            raise DomainError(f"unknown axis {self.axis!r}")


@dataclass(frozen=True, eq=False)
class OutcomeCounts:
    outcomes_a: tuple[float, ...]
    outcomes_b: tuple[float, ...]
    table: np.ndarray
    axis: str = "z"

    @property
    def n(self) -> int:
        return int(self.table.sum())

    def as_dict(self) -> dict[tuple[float, float], int]:
        return {
            (a, b): int(self.table[i, j])
            for i, a in enumerate(self.outcomes_a)
            for j, b in enumerate(self.outcomes_b)
        }

    def to_json_dict(self) -> dict:
        return {
            "axis": self.axis,
            "outcomes_a": list(self.outcomes_a),
            "outcomes_b": list(self.outcomes_b),
            "counts": self.table.tolist(),
        }


def _space(rho: DensityMatrix) -> str:
    if rho.dims == (2, 2):
        return "qubit_pair"
    if rho.dims == (3, 3):
        return "qutrit_pair"
    raise DimensionError(f"sampling supports qubit or qutrit pairs, got dims {rho.dims}")


def sample_joint(rho: DensityMatrix, axis: str, config: SampleConfig) -> OutcomeCounts:
    """Counts of ``n_samples`` i.i.d. joint (J^A_axis, J^B_axis) outcomes."""
    if axis not in AXES:
        raise DomainError(f"unknown axis {axis!r}")
    space = _space(rho)
    pmf = joint_outcome_pmf(rho, spin_operator("A", axis, space), spin_operator("B", axis, space))
    probs = pmf.probs.ravel()
    rng = rng_for(config.seed, SAMPLE_STREAM, AXES.index(axis))
    counts = rng.multinomial(config.n_samples, probs / probs.sum())
    return OutcomeCounts(pmf.outcomes_a, pmf.outcomes_b, counts.reshape(pmf.probs.shape), axis)


def _bootstrap_tables(counts: OutcomeCounts, seed: int, n_boot: int) -> np.ndarray:
    rng = rng_for(seed, BOOTSTRAP_STREAM, AXES.index(counts.axis))
    flat = counts.table.ravel()
    draws = rng.multinomial(counts.n, flat / flat.sum(), size=n_boot)
    return draws.reshape((n_boot,) + counts.table.shape)


# --- statistics on count tables, vectorized over leading axes --------------

def _inferred(tables, outcomes_a, outcomes_b, convention: InferenceConvention) -> np.ndarray:
    na, var = conditional_variances(outcomes_b, tables)
    if convention is InferenceConvention.DETECTED_ONLY:
        keep = np.asarray(outcomes_a) != 0.0
        na, var = na[..., keep], var[..., keep]
        total = na.sum(axis=-1)
    else:
        total = np.asarray(tables).sum(axis=(-2, -1))
    with np.errstate(invalid="ignore", divide="ignore"):
        return (na * var).sum(axis=-1) / total


def _sum_variance(tables, outcomes_a, outcomes_b, detected_pairs_only=False) -> np.ndarray:
    a = np.asarray(outcomes_a)[:, None]
    b = np.asarray(outcomes_b)[None, :]
    s = a + b
    w = np.asarray(tables, dtype=float)
    if detected_pairs_only:
        w = w * ((a != 0) & (b != 0))
    total = w.sum(axis=(-2, -1))
    with np.errstate(invalid="ignore", divide="ignore"):
        m1 = (w * s).sum(axis=(-2, -1)) / total
        m2 = (w * s * s).sum(axis=(-2, -1)) / total
    return np.maximum(m2 - m1 * m1, 0.0)


def _detected_fraction(tables, outcomes, site: str) -> np.ndarray:
    w = np.asarray(tables, dtype=float)
    det = np.asarray(outcomes) != 0
    marg = w.sum(axis=-1) if site == "A" else w.sum(axis=-2)
    return marg[..., det].sum(axis=-1) / w.sum(axis=(-2, -1))


@dataclass(frozen=True)
class Estimate:
    value: float
    se: float


def estimate_inferred_variance(
    counts: OutcomeCounts,
    convention=InferenceConvention.ALL_OUTCOMES,
    seed: int = 0,
    n_boot: int = N_BOOTSTRAP,
) -> Estimate:
    """Plug-in average conditional variance with a bootstrap standard error."""
    convention = InferenceConvention.parse(convention)
    rows = counts.table.sum(axis=1)
    detected = np.asarray(counts.outcomes_a) != 0.0
    if rows.max(initial=0) < 2:
        raise DegenerateError("need at least 2 counts in some conditioning cell")
    if convention is InferenceConvention.DETECTED_ONLY and rows[detected].sum() == 0:
        raise DegenerateError("no detected outcomes at A")
    value = float(_inferred(counts.table, counts.outcomes_a, counts.outcomes_b, convention))
    boot = _inferred(_bootstrap_tables(counts, seed, n_boot), counts.outcomes_a, counts.outcomes_b, convention)
    boot = boot[np.isfinite(boot)]
    return Estimate(value, float(np.std(boot, ddof=1)) if boot.size > 1 else 0.0)


@dataclass(frozen=True)
class MonteCarloReport:
    """Sampled LHS/RHS of one criterion with bootstrap errors and analytic reference."""

    name: str
    convention: str
    lhs: float
    lhs_se: float
    rhs: float
    rhs_se: float
    margin_se: float
    analytic: CriterionReport
    sigmas: float = 3.0
    n_samples: int = 0

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def satisfied(self) -> bool:
        return bool(self.margin > 0)

    @staticmethod
    def _within(diff: float, se: float, sigmas: float) -> bool:
        return bool(abs(diff) <= max(sigmas * se, 1e-12))

    @property
    def lhs_consistent(self) -> bool:
        return self._within(self.lhs - self.analytic.lhs, self.lhs_se, self.sigmas)

    @property
    def rhs_consistent(self) -> bool:
        return self._within(self.rhs - self.analytic.rhs, self.rhs_se, self.sigmas)

    @property
    def verdict_agrees(self) -> bool:
        return bool(self.satisfied == self.analytic.satisfied)

    @property
    def agree(self) -> bool:
        return self.verdict_agrees and self.lhs_consistent and self.rhs_consistent

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "convention": self.convention,
            "n_samples": self.n_samples,
            "lhs": self.lhs,
            "lhs_se": self.lhs_se,
            "rhs": self.rhs,
            "rhs_se": self.rhs_se,
            "margin": self.margin,
            "margin_se": self.margin_se,
            "satisfied": self.satisfied,
            "analytic": self.analytic.to_json_dict(),
            "verdict_agrees": self.verdict_agrees,
            "lhs_consistent": self.lhs_consistent,
            "rhs_consistent": self.rhs_consistent,
            "agree": self.agree,
        }


def _se(x: np.ndarray) -> float:
    x = x[np.isfinite(x)]
    return float(np.std(x, ddof=1)) if x.size > 1 else 0.0


def sample_all_axes(rho: DensityMatrix, config: SampleConfig, axes: Iterable[str] = AXES) -> dict[str, OutcomeCounts]:
    return {ax: sample_joint(rho, ax, config) for ax in axes}


def estimate_criteria_suite(
    params: WernerLossParams, config: SampleConfig, n_boot: int = N_BOOTSTRAP
) -> list[MonteCarloReport]:
    """Sampled versions of the collective-spin, projected and EPR criteria.

    ``n_samples`` outcomes are drawn along each of the three axes.  Bootstrap
    replicates resample every axis table independently; the RHS uses the
    detection rates pooled over the three tables.
    """
    rho = lossy_state_closed_form(params)
    counts = sample_all_axes(rho, config)
    oa, ob = counts["z"].outcomes_a, counts["z"].outcomes_b
    tables = np.stack([counts[ax].table for ax in AXES])  # (3, na, nb)
    boots = np.stack([_bootstrap_tables(counts[ax], config.seed, n_boot) for ax in AXES], axis=1)

    def stats(t):
        # t: (..., 3, na, nb)
        det_a = _detected_fraction(t, oa, "A").mean(axis=-1)
        det_b = _detected_fraction(t, ob, "B").mean(axis=-1)
        out = {
            "collective_spin": (_sum_variance(t, oa, ob).sum(axis=-1), (det_a + det_b) / 2),
            "hofmann_takeuchi_projected": (
                _sum_variance(t, oa, ob, detected_pairs_only=True).sum(axis=-1),
                np.ones_like(det_a),
            ),
        }
        for conv in InferenceConvention:
            out[f"epr:{conv.value}"] = (_inferred(t, oa, ob, conv).sum(axis=-1), det_b / 2)
        return out

    point, boot = stats(tables), stats(boots)
    analytic = {
        "collective_spin": collective_spin_criterion(rho),
        "hofmann_takeuchi_projected": hofmann_takeuchi_projected(project_two_photon(rho)),
    }
    for conv in InferenceConvention:
        analytic[f"epr:{conv.value}"] = epr_criterion(rho, conv)

    reports = []
    for key, (lhs, rhs) in point.items():
        blhs, brhs = boot[key]
        name, _, conv = key.partition(":")
        reports.append(
            MonteCarloReport(
                name=name,
                convention=conv,
                lhs=float(lhs),
                lhs_se=_se(blhs),
                rhs=float(rhs),
                rhs_se=_se(brhs),
                margin_se=_se(brhs - blhs),
                analytic=analytic[key],
                n_samples=config.n_samples,
            )
        )
    return reports
