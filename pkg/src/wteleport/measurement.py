"""Projective and POVM measurements on qubit subsets of a register.

Sampling draws exactly one uniform variate per measurement and walks the
cumulative distribution, so a seeded generator makes every run replayable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .qmath import NORM_TOL, PSD_TOL, Operator, StateVector, _check_targets, _trusted_state
from .states import SQRT1_2

# Probabilities below this are treated as exactly zero so a near-null
# branch is never sampled and then normalized.
PROB_FLOOR = 1e-15


@dataclass(frozen=True, eq=False)
class ProjectiveBasis:
    """Complete orthonormal basis given as rows of a matrix, with labels."""

    matrix: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        arr = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"basis must be square, got shape {arr.shape}")
        if len(self.labels) != arr.shape[0]:
            raise ValueError("one label per basis vector required")
        gram = arr.conj() @ arr.T
        if np.abs(gram - np.eye(arr.shape[0])).max() > NORM_TOL:
            raise ValueError("basis vectors are not orthonormal")
        arr.flags.writeable = False
        object.__setattr__(self, "matrix", arr)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def vectors(self) -> list[StateVector]:
        return [StateVector(row) for row in self.matrix]


@dataclass(frozen=True, eq=False)
class Povm:
    """POVM elements with attached Kraus operators A_i, A_i+ A_i = M_i."""

    elements: tuple[Operator, ...]
    kraus: tuple[np.ndarray, ...]
    labels: tuple[str, ...]
    _stack: np.ndarray = field(init=False, repr=False)
    _checked: bool = field(default=False, init=False, repr=False)

    def __post_init__(self):
        if not self.elements:
            raise ValueError("empty POVM")
        dim = self.elements[0].dim
        if any(m.dim != dim for m in self.elements) or any(a.shape != (dim, dim) for a in self.kraus):
            raise ValueError("POVM elements and Kraus operators must share one dimension")
        if len(self.kraus) != len(self.elements) or len(self.labels) != len(self.elements):
            raise ValueError("need one Kraus operator and one label per element")
        if any(not m.hermitian for m in self.elements):
            raise ValueError("POVM elements must be hermitian-flagged")
        stack = np.ascontiguousarray([m.entries for m in self.elements])
        stack.flags.writeable = False
        object.__setattr__(self, "_stack", stack)
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "kraus", tuple(np.ascontiguousarray(a, dtype=np.complex128) for a in self.kraus))
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    @classmethod
    def from_elements(cls, elements, labels) -> "Povm":
        """Attach the canonical Kraus choice A_i = M_i^(1/2)."""
        ops = tuple(m if isinstance(m, Operator) else Operator(m, hermitian=True) for m in elements)
        kraus = []
        for m in ops:
            vals, vecs = np.linalg.eigh(m.entries)
            root = np.sqrt(np.clip(vals, 0.0, None))
            kraus.append((vecs * root) @ vecs.conj().T)
        return cls(elements=ops, kraus=tuple(kraus), labels=tuple(labels))


@dataclass(frozen=True, eq=False)
class OutcomeSample:
    """One sampled measurement outcome and the collapsed register."""

    index: int
    label: str
    probability: float
    post_state: StateVector


@dataclass(frozen=True)
class PovmValidation:
    """Positivity/completeness/Kraus report for a POVM."""

    min_eigenvalues: tuple[float, ...]
    completeness_residual: float
    kraus_residuals: tuple[float, ...]
    tol: float

    @property
    def passed(self) -> bool:
        return (
            all(lo >= -self.tol for lo in self.min_eigenvalues)
            and self.completeness_residual <= self.tol
            and all(r <= self.tol for r in self.kraus_residuals)
        )


def sample_index(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw from one uniform variate.

    Probabilities below PROB_FLOOR contribute nothing to the cumulative
    sum; the cumulative is clamped to 1 at the last outcome, which
    therefore absorbs any rounding shortfall.
    """
    u = rng.random()
    acc = 0.0
    last = len(probs) - 1
    for i, pi in enumerate(probs.tolist()):
        if pi >= PROB_FLOOR:
            acc += pi
        if u < acc or i == last:
            return i
    raise ValueError("empty probability vector")


def outcome_distribution(s: StateVector, measurement, targets) -> np.ndarray:
    """Born probabilities of every outcome on the target qubits."""
    if isinstance(measurement, ProjectiveBasis):
        t = _check_targets(targets, s.n_qubits, measurement.dim.bit_length() - 1)
        return _kernels.branch_probabilities(s.amps, measurement.matrix, t, s.n_qubits)
    if isinstance(measurement, Povm):
        t = _check_targets(targets, s.n_qubits, measurement.dim.bit_length() - 1)
        return _kernels.expectations(s.amps, measurement._stack, t, s.n_qubits)
    raise TypeError(f"expected ProjectiveBasis or Povm, got {type(measurement).__name__}")


def measure_projective(s: StateVector, basis: ProjectiveBasis, targets, rng: np.random.Generator) -> OutcomeSample:
    """Sample one projective outcome and collapse the register."""
    t = _check_targets(targets, s.n_qubits, basis.dim.bit_length() - 1)
    probs = _kernels.branch_probabilities(s.amps, basis.matrix, t, s.n_qubits)
    i = sample_index(probs, rng)
    post = _kernels.project_onto(s.amps, basis.matrix[i], t, s.n_qubits)
    post /= math.sqrt(np.vdot(post, post).real)
    return OutcomeSample(index=i, label=basis.labels[i], probability=float(probs[i]), post_state=_trusted_state(post))


def measure_povm(s: StateVector, p: Povm, targets, rng: np.random.Generator) -> OutcomeSample:
    """Sample one POVM outcome; post-state uses the stored Kraus operator."""
    if not p._checked:
        report = validate_povm(p)
        if not report.passed:
            raise ValueError(
                "invalid POVM: min eigenvalues "
                f"{report.min_eigenvalues}, completeness residual {report.completeness_residual!r}"
            )
        object.__setattr__(p, "_checked", True)
    t = _check_targets(targets, s.n_qubits, p.dim.bit_length() - 1)
    probs = _kernels.expectations(s.amps, p._stack, t, s.n_qubits)
    i = sample_index(probs, rng)
    post = _kernels.apply_matrix(s.amps, p.kraus[i], t, s.n_qubits)
    post /= math.sqrt(np.vdot(post, post).real)
    return OutcomeSample(index=i, label=p.labels[i], probability=float(probs[i]), post_state=_trusted_state(post))


def validate_povm(p: Povm, tol: float = PSD_TOL) -> PovmValidation:
    """Check positivity, completeness and Kraus consistency; never raises."""
    lows = tuple(float(np.linalg.eigvalsh(m.entries)[0]) for m in p.elements)
    total = sum(m.entries for m in p.elements)
    completeness = float(np.abs(total - np.eye(p.dim)).max())
    kraus_res = tuple(
        float(np.abs(a.conj().T @ a - m.entries).max()) for a, m in zip(p.kraus, p.elements)
    )
    return PovmValidation(
        min_eigenvalues=lows,
        completeness_residual=completeness,
        kraus_residuals=kraus_res,
        tol=tol,
    )


def z_basis() -> ProjectiveBasis:
    return ProjectiveBasis(np.eye(2), ("z-", "z+"))


def x_basis() -> ProjectiveBasis:
    return ProjectiveBasis(np.array([[SQRT1_2, SQRT1_2], [SQRT1_2, -SQRT1_2]]), ("x+", "x-"))


def bell_basis() -> ProjectiveBasis:
    """psi+- = (|z-z-> +- |z+z+>)/sqrt(2), phi+- = (|z-z+> +- |z+z->)/sqrt(2)."""
    rows = np.array(
        [
            [SQRT1_2, 0.0, 0.0, SQRT1_2],
            [SQRT1_2, 0.0, 0.0, -SQRT1_2],
            [0.0, SQRT1_2, SQRT1_2, 0.0],
            [0.0, SQRT1_2, -SQRT1_2, 0.0],
        ]
    )
    return ProjectiveBasis(rows, ("psi+", "psi-", "phi+", "phi-"))


def ghz_type_basis() -> ProjectiveBasis:
    """Three-qubit analogue of the Bell basis, completed to 8 dimensions.

    The four named vectors span every reachable total state; the four
    computational completion vectors can only appear with probability 0
    and are labeled unreachable.
    """
    rows = np.zeros((8, 8))
    rows[0, 0b000] = SQRT1_2
    rows[0, 0b111] = SQRT1_2
    rows[1, 0b000] = SQRT1_2
    rows[1, 0b111] = -SQRT1_2
    rows[2, 0b011] = SQRT1_2
    rows[2, 0b100] = SQRT1_2
    rows[3, 0b011] = SQRT1_2
    rows[3, 0b100] = -SQRT1_2
    for j, idx in enumerate((0b001, 0b010, 0b101, 0b110)):
        rows[4 + j, idx] = 1.0
    labels = ("psi+", "psi-", "phi+", "phi-") + tuple(f"unreachable{j}" for j in range(4))
    return ProjectiveBasis(rows, labels)
