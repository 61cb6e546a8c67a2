"""Entanglement and EPR criteria evaluated on explicit density matrices.

All spin criteria compare a sum of variances (``lhs``) against a bound
(``rhs``); a criterion is satisfied when ``lhs < rhs``.

Inference conventions
---------------------
The inferred variance of Bob's spin averages the conditional variance
``Var(J^B | J^A = a)`` over Alice's outcomes ``a``.  Alice's outcomes include
``0`` (no photon).  ``ALL_OUTCOMES`` weights every outcome by ``P(a)``.
``DETECTED_ONLY`` keeps only ``a != 0`` and renormalizes by ``P(a != 0)``.
For the lossy Werner family these give, per axis::

    all_outcomes:   eta * (1 - eta**2 * p**2) / 4
    detected_only:  eta * (1 - eta * p**2) / 4

The bound ``<N^B>/2`` is always evaluated on the full, unconditioned state.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .errors import ContractViolation, DegenerateError, DimensionError, DomainError
from .qmatrix import (
    DensityMatrix,
    Observable,
    commutator,
    expectation,
    hermitian_eigenvalues,
    partial_transpose,
    variance,
)
from .states import (
    AXES,
    _params,
    collective_spin,
    lossy_state_closed_form,
    number_operator,
    project_two_photon,
    spin_operator,
)

PPT_FLOOR = -1e-12
PROB_FLOOR = -1e-14
BISECT_LO = 1e-6
BISECT_TOL = 1e-10


class InferenceConvention(str, enum.Enum):
    ALL_OUTCOMES = "all_outcomes"
    DETECTED_ONLY = "detected_only"

    @classmethod
    def parse(cls, value) -> "InferenceConvention":
        if isinstance(value, cls):
            return value
        return cls(str(value).replace("-", "_"))


@dataclass(frozen=True)
class CriterionReport:
    name: str
    lhs: float
    rhs: float
    convention: str = ""

    def __post_init__(self):
        object.__setattr__(self, "lhs", float(self.lhs))
        object.__setattr__(self, "rhs", float(self.rhs))

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def satisfied(self) -> bool:
        return self.margin > 0

    def to_json_dict(self) -> dict:
        d = asdict(self)
        d["margin"] = self.margin
        d["satisfied"] = self.satisfied
        return {k: d[k] for k in ("name", "lhs", "rhs", "margin", "satisfied", "convention")}


def _matrix(rho) -> tuple[np.ndarray, tuple[int, ...] | None]:
    if isinstance(rho, DensityMatrix):
        return rho.matrix, rho.dims
    return np.asarray(rho, dtype=complex), None


# ---------------------------------------------------------------------------
# negativity
# ---------------------------------------------------------------------------

def negativity(rho, dims=None, subsystem: int = 1) -> float:
    """Magnitude of the most negative eigenvalue of the partial transpose (0 if PPT)."""
    m, own_dims = _matrix(rho)
    dims = dims or own_dims
    if dims is None:
        raise DimensionError("subsystem dims required for a bare matrix")
    lam = hermitian_eigenvalues(partial_transpose(m, dims, subsystem))[0]
    return 0.0 if lam >= PPT_FLOOR else float(-lam)


def negativity_formula(p_or_params, eta: float | None = None) -> float:
    prm = _params(p_or_params, eta)
    return max(0.0, prm.eta**2 * (3 * prm.p - 1) / 4)


# ---------------------------------------------------------------------------
# variance criteria
# ---------------------------------------------------------------------------

def hofmann_takeuchi_projected(rho_proj) -> CriterionReport:
    """sum_theta Var(s^A + s^B) < 1 on the coincidence (two-photon) subspace."""
    m, _ = _matrix(rho_proj)
    if m.shape != (4, 4):
        raise DimensionError(f"expected a 4x4 two-qubit state, got {m.shape}")
    lhs = sum(variance(collective_spin(ax, "qubit_pair"), m) for ax in AXES)
    return CriterionReport("hofmann_takeuchi_projected", lhs, 1.0)


def collective_spin_criterion(rho9) -> CriterionReport:
    """sum_theta Var(J^A + J^B) < <N^A + N^B>/2 on the full qutrit-pair space."""
    m, _ = _matrix(rho9)
    if m.shape != (9, 9):
        raise DimensionError(f"expected a 9x9 qutrit-pair state, got {m.shape}")
    lhs = sum(variance(collective_spin(ax), m) for ax in AXES)
    rhs = (expectation(number_operator("A"), m) + expectation(number_operator("B"), m)) / 2
    return CriterionReport("collective_spin", lhs, rhs)


# ---------------------------------------------------------------------------
# conditional statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JointOutcomePMF:
    outcomes_a: tuple[float, ...]
    outcomes_b: tuple[float, ...]
    probs: np.ndarray  # shape (len(outcomes_a), len(outcomes_b))

    def marginal_a(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    def marginal_b(self) -> np.ndarray:
        return self.probs.sum(axis=0)


def joint_outcome_pmf(rho, obs_a: Observable, obs_b: Observable) -> JointOutcomePMF:
    """Joint distribution of two commuting observables from their spectral projectors."""
    m, _ = _matrix(rho)
    if np.max(np.abs(commutator(obs_a, obs_b))) > 1e-10:
        raise ContractViolation(f"{obs_a!r} and {obs_b!r} do not commute")
    spec_a, spec_b = obs_a.spectral_projectors, obs_b.spectral_projectors
    probs = np.empty((len(spec_a), len(spec_b)))
    for i, (_, pa) in enumerate(spec_a):
        for j, (_, pb) in enumerate(spec_b):
            probs[i, j] = expectation(pa @ pb, m)
    if probs.min() < PROB_FLOOR:
        raise ContractViolation(f"negative probability {probs.min():.3e}")
    probs = np.clip(probs, 0.0, None)
    if abs(probs.sum() - 1) > 1e-12:
        raise ContractViolation(f"probabilities sum to {probs.sum()!r}")
    pmf = JointOutcomePMF(tuple(v for v, _ in spec_a), tuple(v for v, _ in spec_b), probs)
    mean_a = float(np.dot(pmf.outcomes_a, pmf.marginal_a()))
    mean_b = float(np.dot(pmf.outcomes_b, pmf.marginal_b()))
    if abs(mean_a - expectation(obs_a, m)) > 1e-10 or abs(mean_b - expectation(obs_b, m)) > 1e-10:
        raise ContractViolation("PMF marginals disagree with expectation values")
    return pmf


def conditional_variances(outcomes_b, probs) -> tuple[np.ndarray, np.ndarray]:
    """P(a) and Var(B | a) for a table of joint weights (leading axes broadcast).

    Rows with zero weight get variance 0.  Works on probabilities or counts.
    """
    b = np.asarray(outcomes_b, dtype=float)
    probs = np.asarray(probs, dtype=float)
    pa = probs.sum(axis=-1)
    safe = np.where(pa > 0, pa, 1.0)
    m1 = (probs @ b) / safe
    m2 = (probs @ (b * b)) / safe
    var = np.where(pa > 0, np.maximum(m2 - m1 * m1, 0.0), 0.0)
    return pa, var


def inferred_variance(pmf: JointOutcomePMF, convention=InferenceConvention.ALL_OUTCOMES) -> float:
    """Average over Alice's outcomes of Var(Bob | Alice)."""
    convention = InferenceConvention.parse(convention)
    pa, var = conditional_variances(pmf.outcomes_b, pmf.probs)
    if convention is InferenceConvention.DETECTED_ONLY:
        keep = np.array([a != 0.0 for a in pmf.outcomes_a])
        pa, var = pa[keep], var[keep]
    total = pa.sum()
    if total <= 0:
        raise DegenerateError(f"no weight on conditioning outcomes ({convention.value})")
    weighted = float(np.dot(pa, var))
    return weighted / total if convention is InferenceConvention.DETECTED_ONLY else weighted


def axis_inferred_variances(rho9, convention=InferenceConvention.ALL_OUTCOMES) -> dict[str, float]:
    m, _ = _matrix(rho9)
    return {
        ax: inferred_variance(
            joint_outcome_pmf(m, spin_operator("A", ax), spin_operator("B", ax)), convention
        )
        for ax in AXES
    }


def epr_criterion(rho9, convention=InferenceConvention.ALL_OUTCOMES) -> CriterionReport:
    """sum_theta Var_inf(J^B_theta) < <N^B>/2."""
    convention = InferenceConvention.parse(convention)
    m, _ = _matrix(rho9)
    if m.shape != (9, 9):
        raise DimensionError(f"expected a 9x9 qutrit-pair state, got {m.shape}")
    lhs = sum(axis_inferred_variances(m, convention).values())
    rhs = expectation(number_operator("B"), m) / 2
    return CriterionReport("epr", lhs, rhs, convention.value)


def werner_inferred_variance(p_or_params, eta=None, convention=InferenceConvention.ALL_OUTCOMES) -> float:
    """Closed-form per-axis inferred variance for the lossy Werner family."""
    prm = _params(p_or_params, eta)
    p, e = prm.p, prm.eta
    if InferenceConvention.parse(convention) is InferenceConvention.DETECTED_ONLY:
        return e * (1 - e * p * p) / 4
    return e * (1 - e * e * p * p) / 4


# ---------------------------------------------------------------------------
# thresholds
# ---------------------------------------------------------------------------

def bisect_threshold(
    satisfied: Callable[[float], bool], lo: float, hi: float, tol: float = BISECT_TOL
) -> float | None:
    """Smallest x in (lo, hi] where ``satisfied`` switches on; None if off at hi.

    Assumes a single off -> on transition inside the bracket.
    """
    if not satisfied(hi):
        return None
    if satisfied(lo):
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if satisfied(mid):
            hi = mid
        else:
            lo = mid
    return hi


def epr_threshold_qubit(p: float, convention=InferenceConvention.ALL_OUTCOMES) -> float | None:
    """Smallest efficiency at which the EPR criterion holds for the lossy Werner state."""
    if not 0 < p <= 1:
        raise DomainError(f"p must lie in (0, 1], got {p!r}")
    convention = InferenceConvention.parse(convention)
    return bisect_threshold(
        lambda eta: epr_criterion(lossy_state_closed_form(p, eta), convention).satisfied,
        BISECT_LO,
        1.0,
    )


def epr_threshold_closed_form(p: float, convention=InferenceConvention.ALL_OUTCOMES) -> float | None:
    """1/(sqrt(3) p) for all outcomes, 1/(3 p^2) for detected only; None above 1."""
    if InferenceConvention.parse(convention) is InferenceConvention.DETECTED_ONLY:
        t = 1 / (3 * p * p)
    else:
        t = 1 / (math.sqrt(3) * p)
    return t if t <= 1 else None


def entanglement_reports(p_or_params, eta=None) -> list[CriterionReport]:
    """Projected Hofmann-Takeuchi and full-space collective-spin reports."""
    rho = lossy_state_closed_form(_params(p_or_params, eta))
    return [hofmann_takeuchi_projected(project_two_photon(rho)), collective_spin_criterion(rho)]

