"""Constructors for the named channel states and for random input qubits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .qmath import NORM_TOL, StateVector, _trusted_state

SQRT1_2 = 1.0 / math.sqrt(2.0)
SQRT1_3 = 1.0 / math.sqrt(3.0)

BELL_LABELS = ("psi+", "psi-", "phi+", "phi-")


@dataclass(frozen=True)
class BlochAngles:
    """Polar/azimuthal parameterization of a single-qubit pure state."""

    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta {self.theta!r} outside [0, pi]")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise ValueError(f"phi {self.phi!r} outside [0, 2*pi)")


@dataclass(frozen=True)
class GeneralWAmplitudes:
    """Amplitudes (a, b, c) of the three single-excitation terms."""

    a: complex
    b: complex
    c: complex

    def __post_init__(self):
        norm2 = abs(self.a) ** 2 + abs(self.b) ** 2 + abs(self.c) ** 2
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"amplitudes not normalized: |a|^2+|b|^2+|c|^2 = {norm2!r}")


def unknown_qubit(angles: BlochAngles) -> StateVector:
    """cos(theta/2)|z-> + e^{i phi} sin(theta/2)|z+>, alpha real by convention."""
    alpha = math.cos(angles.theta / 2.0)
    beta = complex(math.cos(angles.phi), math.sin(angles.phi)) * math.sin(angles.theta / 2.0)
    # cos^2 + sin^2 = 1, so the vector is normalized by construction.
    return _trusted_state(np.array([alpha, beta], dtype=np.complex128))


@lru_cache(maxsize=None)
def bell(kind: str) -> StateVector:
    """One of the four Bell states; psi pairs aligned, phi pairs anti-aligned."""
    amps = {
        "psi+": (SQRT1_2, 0.0, 0.0, SQRT1_2),
        "psi-": (SQRT1_2, 0.0, 0.0, -SQRT1_2),
        "phi+": (0.0, SQRT1_2, SQRT1_2, 0.0),
        "phi-": (0.0, SQRT1_2, -SQRT1_2, 0.0),
    }
    if kind not in amps:
        raise ValueError(f"unknown Bell state {kind!r}, expected one of {BELL_LABELS}")
    return StateVector(np.array(amps[kind]))


@lru_cache(maxsize=None)
def ghz() -> StateVector:
    """(|z-z-z-> + |z+z+z+>)/sqrt(2)."""
    amps = np.zeros(8)
    amps[0b000] = SQRT1_2
    amps[0b111] = SQRT1_2
    return StateVector(amps)


@lru_cache(maxsize=None)
def w() -> StateVector:
    """(|z+z-z-> + |z-z+z-> + |z-z-z+>)/sqrt(3)."""
    amps = np.zeros(8)
    amps[0b100] = SQRT1_3
    amps[0b010] = SQRT1_3
    amps[0b001] = SQRT1_3
    return StateVector(amps)


@lru_cache(maxsize=64)
def w_general(amps: GeneralWAmplitudes) -> StateVector:
    """a|z-z-z+> + b|z-z+z-> + c|z+z-z-> on parties (A, B, C)."""
    vec = np.zeros(8, dtype=np.complex128)
    vec[0b001] = amps.a
    vec[0b010] = amps.b
    vec[0b100] = amps.c
    return StateVector(vec)


def haar_random_qubit(rng: np.random.Generator) -> tuple[BlochAngles, StateVector]:
    """Uniform draw on the Bloch sphere: cos(theta) uniform, phi uniform."""
    theta = math.acos(1.0 - 2.0 * rng.random())
    phi = 2.0 * math.pi * rng.random()
    if phi >= 2.0 * math.pi:
        phi = 0.0
    angles = BlochAngles(theta, phi)
    return angles, unknown_qubit(angles)
