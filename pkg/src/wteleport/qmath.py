"""Dense complex linear algebra for registers of 1 to 4 qubits.

Conventions used throughout the package:
  - qubit 0 occupies the most significant bit of the basis index,
  - z- is computational |0>, z+ is |1>,
  - state equality is judged up to global phase.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels

NORM_TOL = 1e-12
PSD_TOL = 1e-10
PHASE_TOL = 1e-10

MAX_QUBITS = 4


def _as_complex_vector(amps) -> np.ndarray:
    arr = np.ascontiguousarray(amps, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError(f"expected a flat amplitude vector, got shape {arr.shape}")
    return arr


def _qubit_count(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim != 1 << n:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def _trusted_state(amps: np.ndarray) -> StateVector:
    """Wrap a fresh complex vector whose normalization holds by construction.

    Only for internal callers that own `amps` and can prove ||amps|| = 1
    (unitary application, tensor of normalized factors, explicit division
    by the computed norm); everything else goes through StateVector.
    """
    st = object.__new__(StateVector)
    amps.flags.writeable = False
    object.__setattr__(st, "amps", amps)
    return st


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state on 1..4 qubits."""

    amps: np.ndarray

    def __post_init__(self):
        arr = _as_complex_vector(self.amps)
        n = _qubit_count(arr.shape[0])
        if not 1 <= n <= MAX_QUBITS:
            raise ValueError(f"qubit count {n} outside 1..{MAX_QUBITS}")
        norm2 = float(np.vdot(arr, arr).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: sum |amps|^2 = {norm2!r}")
        arr.flags.writeable = False
        object.__setattr__(self, "amps", arr)

    @property
    def n_qubits(self) -> int:
        return self.amps.shape[0].bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amps.shape[0]


@dataclass(frozen=True, eq=False)
class Operator:
    """Complex square matrix on a power-of-two dimension.

    The `unitary` and `hermitian` flags are promises checked at
    construction, not inferred.
    """

    entries: np.ndarray
    unitary: bool = False
    hermitian: bool = False

    def __post_init__(self):
        arr = np.ascontiguousarray(self.entries, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"operator must be square, got shape {arr.shape}")
        _qubit_count(arr.shape[0])
        if self.unitary:
            res = np.abs(arr.conj().T @ arr - np.eye(arr.shape[0])).max()
            if res > NORM_TOL:
                raise ValueError(f"operator flagged unitary but ||U+U - I||_max = {res!r}")
        if self.hermitian:
            res = np.abs(arr - arr.conj().T).max()
            if res > NORM_TOL:
                raise ValueError(f"operator flagged hermitian but ||A - A+||_max = {res!r}")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.entries.shape[0].bit_length() - 1


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.entries, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {arr.shape}")
        _qubit_count(arr.shape[0])
        herm = np.abs(arr - arr.conj().T).max()
        if herm > NORM_TOL:
            raise ValueError(f"density matrix not hermitian, residual {herm!r}")
        tr = arr.trace()
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace {tr!r} != 1")
        lo = float(np.linalg.eigvalsh(arr).min())
        if lo < -PSD_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {lo!r}")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


# Single-qubit constants.  SIGMA_XZ is sigma_x @ sigma_z; corrections that
# use it recover the target state up to a global sign only.
IDENTITY_2 = Operator(np.eye(2), unitary=True, hermitian=True)
SIGMA_X = Operator(np.array([[0, 1], [1, 0]]), unitary=True, hermitian=True)
SIGMA_Z = Operator(np.array([[1, 0], [0, -1]]), unitary=True, hermitian=True)
SIGMA_XZ = Operator(np.array([[0, -1], [1, 0]]), unitary=True)


@lru_cache(maxsize=1024)
def _validated_targets(targets: tuple, n_state: int, n_op: int) -> tuple[int, ...]:
    t = tuple(int(q) for q in targets)
    if len(t) != n_op:
        raise ValueError(f"operator acts on {n_op} qubits but {len(t)} targets given")
    if len(set(t)) != len(t):
        raise ValueError(f"duplicate targets {t}")
    if any(q < 0 or q >= n_state for q in t):
        raise ValueError(f"targets {t} out of range for {n_state} qubits")
    return t


def _check_targets(targets, n_state: int, n_op: int) -> tuple[int, ...]:
    if type(targets) is not tuple:
        targets = tuple(targets)
    return _validated_targets(targets, n_state, n_op)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product; a's qubits become the most significant block."""
    if a.n_qubits + b.n_qubits > MAX_QUBITS:
        raise ValueError(f"tensor product would need {a.n_qubits + b.n_qubits} qubits, max is {MAX_QUBITS}")
    # ||a (x) b|| = ||a|| ||b||, so the product of two states needs no recheck.
    return _trusted_state(_kernels.kron2(a.amps, b.amps))


def apply_op(s: StateVector, u: Operator, targets) -> StateVector:
    """Apply a unitary-flagged operator to the target qubits."""
    if not u.unitary:
        raise ValueError("apply_op requires a unitary-flagged operator")
    t = _check_targets(targets, s.n_qubits, u.n_qubits)
    # Unitaries preserve the norm, so the result needs no recheck.
    return _trusted_state(_kernels.apply_matrix(s.amps, u.entries, t, s.n_qubits))


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b> with the conjugate on the left argument."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return complex(np.vdot(a.amps, b.amps))


def partial_trace(s: StateVector, keep) -> DensityMatrix:
    """Reduced density matrix on the kept qubits, in the order given."""
    t = tuple(int(q) for q in keep)
    if not t:
        raise ValueError("keep set must be nonempty")
    if len(set(t)) != len(t) or any(q < 0 or q >= s.n_qubits for q in t):
        raise ValueError(f"invalid keep set {t} for {s.n_qubits} qubits")
    return DensityMatrix(_kernels.reduced_density(s.amps, t, s.n_qubits))


def min_eigenvalue_hermitian(a: Operator) -> float:
    """Smallest eigenvalue of a hermitian-flagged operator."""
    if not a.hermitian:
        raise ValueError("min_eigenvalue_hermitian requires a hermitian-flagged operator")
    return float(np.linalg.eigvalsh(a.entries)[0])


def states_equal(a: StateVector, b: StateVector, tol: float = PHASE_TOL) -> bool:
    """Equality up to global phase: | |<a|b>| - 1 | <= tol."""
    return abs(abs(inner(a, b)) - 1.0) <= tol
