"""Dense complex-matrix kernel.

Matrices are plain ``numpy`` arrays of ``complex128``.  Composite spaces are
described by a tuple of local dimensions; subsystem 0 is the leftmost,
slowest-varying tensor factor (``np.kron`` order), so for dims ``(3, 3)`` the
flat index of ``|i>|j>`` is ``3 * i + j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractViolation, DimensionError

HERMITIAN_TOL = 1e-10
IMAG_TOL = 1e-10
VARIANCE_FLOOR = -1e-12
# eigenvalues closer than this are treated as one measurement outcome
OUTCOME_TOL = 1e-8


def _as_array(m) -> np.ndarray:
    if isinstance(m, (DensityMatrix, Observable)):
        return m.matrix
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DimensionError(f"invalid subsystem dims {dims}")
    if int(np.prod(dims)) != m.shape[0]:
        raise DimensionError(f"dims {dims} do not match matrix dimension {m.shape[0]}")
    return dims


def tensor_product(*mats) -> np.ndarray:
    """Kronecker product, first argument most significant."""
    if not mats:
        raise DimensionError("tensor_product needs at least one factor")
    out = _as_array(mats[0])
    for m in mats[1:]:
        out = np.kron(out, _as_array(m))
    return out


def partial_transpose(m, dims: Sequence[int], subsystem: int) -> np.ndarray:
    """Transpose only the indices belonging to ``subsystem``."""
    m = _as_array(m)
    dims = _check_dims(m, dims)
    n = len(dims)
    if not 0 <= subsystem < n:
        raise DimensionError(f"subsystem {subsystem} out of range for {n} factors")
    t = m.reshape(dims + dims)
    axes = list(range(2 * n))
    axes[subsystem], axes[n + subsystem] = axes[n + subsystem], axes[subsystem]
    return t.transpose(axes).reshape(m.shape)


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep`` (kept order preserved)."""
    m = _as_array(m)
    dims = _check_dims(m, dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or any(not 0 <= k < n for k in keep):
        raise DimensionError(f"invalid keep set {keep} for {n} factors")
    drop = [k for k in range(n) if k not in keep]
    dk = int(np.prod([dims[k] for k in keep]))
    dd = int(np.prod([dims[k] for k in drop])) if drop else 1
    t = m.reshape(dims + dims)
    t = t.transpose(keep + drop + [n + k for k in keep] + [n + k for k in drop])
    t = t.reshape(dk, dd, dk, dd)
    return np.einsum("ijkj->ik", t)


def hermitian_part(m) -> np.ndarray:
    """Return (m + m^dag)/2 after checking m is Hermitian to ``HERMITIAN_TOL``."""
    m = _as_array(m)
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > HERMITIAN_TOL:
        raise ContractViolation(f"matrix is not Hermitian (max deviation {dev:.3e})")
    return (m + m.conj().T) / 2


def hermitian_eigenvalues(m) -> np.ndarray:
    """Real eigenvalues in ascending order (LAPACK ``heevd`` via numpy)."""
    return np.linalg.eigvalsh(hermitian_part(m))


def expectation(obs, rho) -> float:
    """Tr[obs rho] as a real number."""
    o, r = _as_array(obs), _as_array(rho)
    if o.shape != r.shape:
        raise DimensionError(f"shape mismatch {o.shape} vs {r.shape}")
    # Tr[AB] = sum_ij A_ij B_ji
    val = np.sum(o * r.T)
    if abs(val.imag) >= IMAG_TOL:
        raise ContractViolation(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def variance(obs, rho) -> float:
    """<obs^2> - <obs>^2, tiny negative rounding clamped to zero."""
    o = _as_array(obs)
    v = expectation(o @ o, rho) - expectation(o, rho) ** 2
    if v < VARIANCE_FLOOR:
        raise ContractViolation(f"negative variance {v:.3e}")
    return max(v, 0.0)


def commutator(a, b) -> np.ndarray:
    a, b = _as_array(a), _as_array(b)
    return a @ b - b @ a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Unit-trace positive Hermitian matrix tagged with its subsystem dims."""

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        dims = _check_dims(_as_array(m), self.dims)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def purity(self) -> float:
        return expectation(self.matrix, self.matrix)

    def eigenvalues(self) -> np.ndarray:
        return hermitian_eigenvalues(self.matrix)

    def check(self, tol: float = 1e-10) -> "DensityMatrix":
        """Raise ContractViolation unless Hermitian, unit trace and PSD."""
        ev = self.eigenvalues()
        if abs(self.trace - 1) > tol:
            raise ContractViolation(f"trace {self.trace!r} != 1")
        if ev[0] < -tol:
            raise ContractViolation(f"negative eigenvalue {ev[0]:.3e}")
        return self

    def partial_transpose(self, subsystem: int) -> np.ndarray:
        return partial_transpose(self.matrix, self.dims, subsystem)

    def reduced(self, keep: Iterable[int]) -> "DensityMatrix":
        keep = sorted(set(keep))
        return DensityMatrix(partial_trace(self.matrix, self.dims, keep),
                             tuple(self.dims[k] for k in keep))

    def allclose(self, other, atol: float = 1e-12) -> bool:
        return np.allclose(self.matrix, _as_array(other), rtol=0, atol=atol)

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "dims": list(self.dims),
            "re": self.matrix.real.tolist(),
            "im": self.matrix.imag.tolist(),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "DensityMatrix":
        m = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
        if m.shape != (d["dim"], d["dim"]):
            raise DimensionError(f"declared dim {d['dim']} but data has shape {m.shape}")
        return cls(m, tuple(d["dims"]))


class Observable:
    """Hermitian operator with a lazily computed, cached eigendecomposition."""

    def __init__(self, matrix, name: str = ""):
        m = hermitian_part(matrix)
        m.setflags(write=False)
        self.matrix = m
        self.name = name

    def __repr__(self):
        return f"Observable({self.name or '?'}, dim={self.dim})"

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.matrix)

    @cached_property
    def spectral_projectors(self) -> list[tuple[float, np.ndarray]]:
        """Distinct eigenvalues (ascending) with their orthogonal projectors."""
        vals, vecs = self.eigh
        groups: list[list[int]] = []
        for i, v in enumerate(vals):
            if groups and v - vals[groups[-1][-1]] < OUTCOME_TOL:
                groups[-1].append(i)
            else:
                groups.append([i])
        out = []
        for g in groups:
            v = vecs[:, g]
            # snap the representative so outcome labels print cleanly (-0.0 -> 0.0)
            out.append((round(float(np.mean(vals[g])), 12) + 0.0, v @ v.conj().T))
        return out

    def __add__(self, other: "Observable") -> "Observable":
        return Observable(self.matrix + other.matrix, f"{self.name}+{other.name}")

    def __matmul__(self, other: "Observable") -> np.ndarray:
        return self.matrix @ other.matrix
