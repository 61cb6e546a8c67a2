"""Two-qubit Bell/Werner states, photon loss, and Schwinger spin operators.

Each site (A or B) carries two field modes with spin labels +1 and -1.  With at
most one photon per site the detected space of a site is a qutrit with local
ordering ``(+1, -1, 0)``, where ``0`` means no photon.  The qubit-pair space
is the two-photon corner of the qutrit pair, local ordering ``(+1, -1)``.

The nine qutrit-pair states are also listed in the grouped order ``u1..u9``
(two-, one-, zero-photon), see :data:`QUTRIT_PAIR_BASIS` and
:func:`to_grouped_basis`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy.linalg import expm

from .errors import ContractViolation, DegenerateError, DimensionError, DomainError
from .qmatrix import DensityMatrix, Observable, partial_trace, tensor_product

Site = Literal["A", "B"]
Axis = Literal["x", "y", "z"]
Space = Literal["qubit_pair", "qutrit_pair"]

AXES: tuple[str, ...] = ("x", "y", "z")
QUBIT_DIMS = (2, 2)
QUTRIT_DIMS = (3, 3)

SITE_LABELS = ("+1", "-1", "0")

# (label, flat tensor index) in the grouped u1..u9 order
QUTRIT_PAIR_BASIS: tuple[tuple[str, int], ...] = (
    ("|+1>A|+1>B", 0),
    ("|+1>A|-1>B", 1),
    ("|-1>A|+1>B", 3),
    ("|-1>A|-1>B", 4),
    ("|+1>A|0>B", 2),
    ("|-1>A|0>B", 5),
    ("|0>A|+1>B", 6),
    ("|0>A|-1>B", 7),
    ("|0>A|0>B", 8),
)
GROUPED_ORDER = np.array([i for _, i in QUTRIT_PAIR_BASIS])
TWO_PHOTON = GROUPED_ORDER[:4]
ONE_PHOTON = GROUPED_ORDER[4:8]
ZERO_PHOTON = GROUPED_ORDER[8:]

PROJECTION_FLOOR = 1e-12


@dataclass(frozen=True)
class WernerLossParams:
    """Werner mixing probability ``p`` and overall detection efficiency ``eta``."""

    p: float
    eta: float

    def __post_init__(self):
        _check_unit("p", self.p)
        _check_unit("eta", self.eta)


def _check_unit(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


def _params(p_or_params, eta=None) -> WernerLossParams:
    if isinstance(p_or_params, WernerLossParams):
        return p_or_params
    return WernerLossParams(float(p_or_params), float(eta))


# ---------------------------------------------------------------------------
# Schwinger construction of a single site
# ---------------------------------------------------------------------------

_SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # annihilator, occupation <= 1
_I2 = np.eye(2, dtype=complex)


@lru_cache(maxsize=None)
def _site_ladder() -> tuple[np.ndarray, np.ndarray]:
    """Annihilators a+, a- on the two site modes (mode + most significant)."""
    return np.kron(_SIGMA_MINUS, _I2), np.kron(_I2, _SIGMA_MINUS)


@lru_cache(maxsize=None)
def _site_isometry() -> np.ndarray:
    """3x4 map from two-mode occupations |n+ n-> onto the qutrit (+1, -1, 0)."""
    w = np.zeros((3, 4))
    w[0, 0b10] = 1.0
    w[1, 0b01] = 1.0
    w[2, 0b00] = 1.0
    return w


@lru_cache(maxsize=None)
def _site_spin(axis: str) -> np.ndarray:
    """Single-site J_axis restricted to the qutrit, built from ladder operators."""
    ap, am = _site_ladder()
    if axis == "x":
        j = (ap.conj().T @ am + am.conj().T @ ap) / 2
    elif axis == "y":
        j = 1j * (am.conj().T @ ap - ap.conj().T @ am) / 2
    elif axis == "z":
        j = (ap.conj().T @ ap - am.conj().T @ am) / 2
    else:
        raise DomainError(f"unknown axis {axis!r}")
    w = _site_isometry()
    return w @ j @ w.T


@lru_cache(maxsize=None)
def _site_number() -> np.ndarray:
    ap, am = _site_ladder()
    w = _site_isometry()
    return w @ (ap.conj().T @ ap + am.conj().T @ am) @ w.T


def _on_site(local: np.ndarray, site: str, space: str) -> np.ndarray:
    if space == "qubit_pair":
        local = local[:2, :2]
    elif space != "qutrit_pair":
        raise DomainError(f"unknown space {space!r}")
    eye = np.eye(local.shape[0])
    if site == "A":
        return tensor_product(local, eye)
    if site == "B":
        return tensor_product(eye, local)
    raise DomainError(f"unknown site {site!r}")


@lru_cache(maxsize=None)
def spin_operator(site: Site, axis: Axis, space: Space = "qutrit_pair") -> Observable:
    """Schwinger spin component J_axis at one site.

    On the qutrit pair this is the unprojected operator; it annihilates the
    no-photon state, so it coincides with the projected ``s_axis = J_axis P``.
    """
    return Observable(_on_site(_site_spin(axis), site, space), f"J{axis}^{site}")


@lru_cache(maxsize=None)
def number_operator(site: Site, space: Space = "qutrit_pair") -> Observable:
    """N = a+^dag a+ + a-^dag a-; a projector since occupation is at most one."""
    return Observable(_on_site(_site_number(), site, space), f"N^{site}")


projector = number_operator


@lru_cache(maxsize=None)
def collective_spin(axis: Axis, space: Space = "qutrit_pair") -> Observable:
    """J_axis^A + J_axis^B."""
    return spin_operator("A", axis, space) + spin_operator("B", axis, space)


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

def bell_singlet() -> DensityMatrix:
    """(|+1,-1> - |-1,+1>)/sqrt(2) on the qubit pair."""
    psi = np.zeros(4, dtype=complex)
    psi[1], psi[2] = 1, -1
    psi /= np.sqrt(2)
    return DensityMatrix(np.outer(psi, psi.conj()), QUBIT_DIMS)


def werner_state(p: float) -> DensityMatrix:
    _check_unit("p", p)
    return DensityMatrix(p * bell_singlet().matrix + (1 - p) * np.eye(4) / 4, QUBIT_DIMS)


def werner_purity(p: float) -> float:
    """(3p^2 + 1)/4, cross-checked against Tr[rho_W^2]."""
    _check_unit("p", p)
    closed = (3 * p * p + 1) / 4
    numeric = werner_state(p).purity()
    if abs(closed - numeric) > 1e-12:
        raise ContractViolation(f"purity mismatch: {closed!r} vs {numeric!r}")
    return closed


def embed_two_photon(rho4) -> np.ndarray:
    """Place a qubit-pair matrix in the two-photon corner of the qutrit pair."""
    m = rho4.matrix if isinstance(rho4, DensityMatrix) else np.asarray(rho4)
    if m.shape != (4, 4):
        raise DimensionError(f"expected 4x4, got {m.shape}")
    out = np.zeros((9, 9), dtype=complex)
    out[np.ix_(TWO_PHOTON, TWO_PHOTON)] = m
    return out


def lossy_state_closed_form(p_or_params, eta: float | None = None) -> DensityMatrix:
    """Block-diagonal detected state: eta^2 rho_W (+) eta(1-eta)/2 I_4 (+) (1-eta)^2."""
    prm = _params(p_or_params, eta)
    e = prm.eta
    out = embed_two_photon(e * e * werner_state(prm.p).matrix)
    out[ONE_PHOTON, ONE_PHOTON] = e * (1 - e) / 2
    out[ZERO_PHOTON, ZERO_PHOTON] = (1 - e) ** 2
    return DensityMatrix(out, QUTRIT_DIMS)


# Dilation mode order per site: (mode+, loss port+, mode-, loss port-).
_DILATION_MODES = 8
_LEAK_TOL = 1e-12


def beam_splitter(eta: float) -> np.ndarray:
    """exp[theta (a^dag v - v^dag a)] on (system, loss port), cos(theta) = sqrt(eta).

    Maps a -> sqrt(eta) a + sqrt(1 - eta) v in the Heisenberg picture.
    Truncation at one photon per mode is exact for inputs with the loss port
    in vacuum.
    """
    _check_unit("eta", eta)
    a, v = _site_ladder()  # same two-mode truncated ladder pair
    theta = np.arccos(np.sqrt(eta))
    return expm(theta * (a.conj().T @ v - v.conj().T @ a))


@lru_cache(maxsize=None)
def _qubit_to_site_modes() -> np.ndarray:
    """16x2 isometry: |+1> -> photon in mode+, |-1> -> photon in mode-, ports empty."""
    v = np.zeros((16, 2))
    v[0b1000, 0] = 1.0
    v[0b0010, 1] = 1.0
    return v


def lossy_state_dilation(p_or_params, eta: float | None = None) -> DensityMatrix:
    """Detected state from an explicit beam-splitter loss model.

    rho_W is embedded in eight single-occupation modes (four system modes,
    four vacuum loss ports), each system mode is mixed with its own port,
    the ports are traced out and the remaining four modes are mapped onto the
    qutrit-pair detection basis.
    """
    prm = _params(p_or_params, eta)
    iso = np.kron(_qubit_to_site_modes(), _qubit_to_site_modes())
    rho_in = iso @ werner_state(prm.p).matrix @ iso.T
    u = tensor_product(*[beam_splitter(prm.eta)] * 4)
    rho_out = u @ rho_in @ u.conj().T
    rho_sys = partial_trace(rho_out, (2,) * _DILATION_MODES, keep=(0, 2, 4, 6))
    w = np.kron(_site_isometry(), _site_isometry())
    rho9 = w @ rho_sys @ w.T
    leaked = 1.0 - float(np.trace(rho9).real)
    if abs(leaked) > _LEAK_TOL:
        raise ContractViolation(f"weight outside one-photon-per-site space: {leaked:.3e}")
    return DensityMatrix(rho9, QUTRIT_DIMS)


def project_two_photon(rho9) -> DensityMatrix:
    """P^A P^B rho P^A P^B / Tr[rho P^A P^B], returned on the qubit pair."""
    m = rho9.matrix if isinstance(rho9, DensityMatrix) else np.asarray(rho9, dtype=complex)
    if m.shape != (9, 9):
        raise DimensionError(f"expected a 9x9 qutrit-pair matrix, got {m.shape}")
    proj = number_operator("A").matrix @ number_operator("B").matrix
    weight = float(np.trace(proj @ m).real)
    if weight <= PROJECTION_FLOOR:
        raise DegenerateError(f"coincidence weight {weight:.3e} too small to project")
    block = (proj @ m @ proj)[np.ix_(TWO_PHOTON, TWO_PHOTON)]
    return DensityMatrix(block / weight, QUBIT_DIMS)


def to_grouped_basis(rho9) -> np.ndarray:
    """Reorder a qutrit-pair matrix into the grouped u1..u9 basis."""
    m = rho9.matrix if isinstance(rho9, DensityMatrix) else np.asarray(rho9)
    return m[np.ix_(GROUPED_ORDER, GROUPED_ORDER)]
