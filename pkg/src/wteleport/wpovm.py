"""The asymmetric three-qubit POVM family for the W channel.

Four rank-1 elements are built from dual vectors of a W-like (and mutually
non-orthogonal) vector family on the register (U, A, A'); the fifth element
soaks up the remainder.  The scale lambda is bounded by the positivity of
that remainder, with a closed-form maximum that the tests cross-check
against a direct eigenvalue scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measurement import Povm
from .qmath import PSD_TOL, StateVector

SQRT3_2 = math.sqrt(3.0) / 2.0

# Basis indices of the register (U, A, A'), U in the most significant bit.
_IDX_001 = 0b001
_IDX_010 = 0b010
_IDX_100 = 0b100
_IDX_101 = 0b101
_IDX_110 = 0b110
_IDX_000 = 0b000

POVM_LABELS = ("M1", "M2", "M3", "M4", "M5")


@dataclass(frozen=True)
class WPovmParams:
    """Dual-vector weights (a, a') and overall scale lambda."""

    a: float
    a_prime: float
    lambda_asym: float

    def __post_init__(self):
        if self.a <= 0.0 or self.a_prime <= 0.0:
            raise ValueError(f"weights must be positive, got a={self.a!r}, a'={self.a_prime!r}")
        if not 0.0 < self.lambda_asym <= 1.0:
            raise ValueError(f"lambda must lie in (0, 1], got {self.lambda_asym!r}")

    @property
    def feasible(self) -> bool:
        bound = min(lambda_max(self.a), lambda_max(self.a_prime))
        return self.lambda_asym <= bound + 1e-12


DEFAULT_PARAMS = WPovmParams(a=SQRT3_2, a_prime=SQRT3_2, lambda_asym=2.0 / 3.0)


@dataclass(frozen=True, eq=False)
class WMeasurementFamily:
    """Primal vectors psi'_i with their duals, <dual_i|primal_j> = delta_ij.

    The primal vectors are each normalized but are not mutually orthogonal
    (<psi'_1|psi'_2> = 1/3); they form a frame, and the duals are what make
    the POVM elements well defined.
    """

    primal: tuple[np.ndarray, ...]
    dual: tuple[np.ndarray, ...]


def w_primal_basis() -> tuple[np.ndarray, ...]:
    """The four unit vectors whose branches carry the teleported state."""
    s = 1.0 / math.sqrt(3.0)
    v1 = np.zeros(8, dtype=np.complex128)
    v1[[_IDX_001, _IDX_010, _IDX_100]] = (s, s, s)
    v2 = np.zeros(8, dtype=np.complex128)
    v2[[_IDX_001, _IDX_010, _IDX_100]] = (s, s, -s)
    v3 = np.zeros(8, dtype=np.complex128)
    v3[[_IDX_101, _IDX_110, _IDX_000]] = (s, s, s)
    v4 = np.zeros(8, dtype=np.complex128)
    v4[[_IDX_101, _IDX_110, _IDX_000]] = (s, s, -s)
    return (v1, v2, v3, v4)


def w_dual_basis(a: float, a_prime: float) -> tuple[np.ndarray, ...]:
    """Unnormalized duals of the primal family, weights (a, a')."""
    if a <= 0.0 or a_prime <= 0.0:
        raise ValueError(f"weights must be positive, got a={a!r}, a'={a_prime!r}")
    d1 = np.zeros(8, dtype=np.complex128)
    d1[[_IDX_001, _IDX_010, _IDX_100]] = (a, SQRT3_2 - a, SQRT3_2)
    d2 = np.zeros(8, dtype=np.complex128)
    d2[[_IDX_001, _IDX_010, _IDX_100]] = (a, SQRT3_2 - a, -SQRT3_2)
    d3 = np.zeros(8, dtype=np.complex128)
    d3[[_IDX_101, _IDX_110, _IDX_000]] = (a_prime, SQRT3_2 - a_prime, SQRT3_2)
    d4 = np.zeros(8, dtype=np.complex128)
    d4[[_IDX_101, _IDX_110, _IDX_000]] = (a_prime, SQRT3_2 - a_prime, -SQRT3_2)
    return (d1, d2, d3, d4)


def measurement_family(a: float, a_prime: float) -> WMeasurementFamily:
    return WMeasurementFamily(primal=w_primal_basis(), dual=w_dual_basis(a, a_prime))


def lambda_max(a: float) -> float:
    """Largest scale keeping the remainder element positive semidefinite.

    Constant 2/3 up to a = sqrt(3)/2, then 1/(4a^2 - 2*sqrt(3)*a + 3/2);
    the two branches agree at the junction.
    """
    if a <= 0.0:
        raise ValueError(f"weight must be positive, got {a!r}")
    if a <= SQRT3_2:
        return 2.0 / 3.0
    return 1.0 / (4.0 * a * a - 2.0 * math.sqrt(3.0) * a + 1.5)


def build_w_povm(params: WPovmParams) -> Povm:
    """Elements M_i = lambda |dual_i><dual_i| for i = 1..4, M5 the remainder."""
    duals = w_dual_basis(params.a, params.a_prime)
    lam = params.lambda_asym
    elements = [lam * np.outer(d, d.conj()) for d in duals]
    m5 = np.eye(8, dtype=np.complex128) - sum(elements)
    low = float(np.linalg.eigvalsh(m5)[0])
    if not params.feasible or low < -PSD_TOL:
        raise ValueError(
            f"infeasible POVM scale: lambda={lam!r} exceeds "
            f"lambda_max={min(lambda_max(params.a), lambda_max(params.a_prime))!r} "
            f"(remainder eigenvalue {low!r})"
        )
    elements.append(m5)
    return Povm.from_elements(elements, POVM_LABELS)


def conclusive_branch_states(input_state: StateVector) -> tuple[np.ndarray, ...]:
    """Charlie's conditional state on each conclusive outcome, pre-correction."""
    alpha, beta = input_state.amps
    return (
        np.array([alpha, beta]),
        np.array([alpha, -beta]),
        np.array([beta, alpha]),
        np.array([beta, -alpha]),
    )
