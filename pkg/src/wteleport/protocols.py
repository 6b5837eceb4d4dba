"""End-to-end teleportation protocols and their exact branch enumerations.

Registers are laid out (U, A, B, C) for the Bell-measurement schemes and
(U, A, A', C) for the two-qubit-Alice and POVM schemes; Charlie is always
the last qubit.  Every protocol returns a ProtocolOutcome; the matching
*_distribution function enumerates all branches with exact probabilities
and Charlie's conditional state after his correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .measurement import (
    PROB_FLOOR,
    Povm,
    ProjectiveBasis,
    bell_basis,
    ghz_type_basis,
    measure_povm,
    measure_projective,
    x_basis,
    z_basis,
)
from .qmath import (
    IDENTITY_2,
    SIGMA_X,
    SIGMA_XZ,
    SIGMA_Z,
    DensityMatrix,
    Operator,
    StateVector,
    _trusted_state,
    apply_op,
    inner,
    partial_trace,
    tensor,
)
from .states import GeneralWAmplitudes, ghz, w, w_general
from .wpovm import WPovmParams, build_w_povm


@dataclass(frozen=True, eq=False)
class CorrectionTable:
    """Map from (alice outcome, bob outcome or None) to Charlie's unitary."""

    entries: dict[tuple[str, str | None], Operator]

    def __post_init__(self):
        for key, op in self.entries.items():
            if not op.unitary or op.dim != 2:
                raise ValueError(f"correction for {key} must be a 2x2 unitary")

    def get(self, alice: str, bob: str | None) -> Operator:
        return self.entries[(alice, bob)]


GHZ_BM_CORRECTIONS = CorrectionTable(
    {
        ("psi+", "x+"): IDENTITY_2,
        ("psi+", "x-"): SIGMA_Z,
        ("phi+", "x+"): SIGMA_X,
        ("phi+", "x-"): SIGMA_XZ,
        ("psi-", "x+"): SIGMA_Z,
        ("psi-", "x-"): IDENTITY_2,
        ("phi-", "x+"): SIGMA_XZ,
        ("phi-", "x-"): SIGMA_X,
    }
)

W_BM_CORRECTIONS = CorrectionTable(
    {
        ("psi+", "z-"): SIGMA_X,
        ("psi-", "z-"): SIGMA_XZ,
        ("phi+", "z-"): IDENTITY_2,
        ("phi-", "z-"): SIGMA_Z,
    }
)

GHZ_TWO_QUBIT_CORRECTIONS = CorrectionTable(
    {
        ("psi+", None): IDENTITY_2,
        ("psi-", None): SIGMA_Z,
        ("phi+", None): SIGMA_X,
        ("phi-", None): SIGMA_XZ,
    }
)

W_POVM_CORRECTIONS = CorrectionTable(
    {
        ("M1", None): IDENTITY_2,
        ("M2", None): SIGMA_Z,
        ("M3", None): SIGMA_X,
        ("M4", None): SIGMA_XZ,
    }
)


@dataclass(frozen=True, eq=False)
class ProtocolOutcome:
    """Record of one protocol run."""

    protocol: str
    alice_outcome: str
    bob_outcome: str | None
    conclusive: bool
    classical_bits: int
    charlie_state: StateVector | DensityMatrix
    fidelity: float


@dataclass(frozen=True, eq=False)
class Branch:
    """One enumerated outcome: probability and Charlie's corrected state.

    charlie_state is None exactly when the branch has probability 0.
    """

    label: str
    probability: float
    conclusive: bool
    charlie_state: StateVector | DensityMatrix | None


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Exact branch enumeration of a protocol for one input state."""

    protocol: str
    branches: tuple[Branch, ...]

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([b.probability for b in self.branches])

    @property
    def conclusive_probability(self) -> float:
        return float(sum(b.probability for b in self.branches if b.conclusive))

    def branch(self, label: str) -> Branch:
        for b in self.branches:
            if b.label == label:
                return b
        raise KeyError(label)


_BELL = bell_basis()
_X = x_basis()
_Z = z_basis()
_GHZ_TYPE = ghz_type_basis()


def _charlie_qubit(s: StateVector) -> StateVector:
    """Extract the last qubit of a register that factors over it."""
    rows = s.amps.reshape(-1, 2)
    weights = np.einsum("ij,ij->i", rows, rows.conj()).real
    row = rows[int(np.argmax(weights))]
    return _trusted_state(row / math.sqrt(np.vdot(row, row).real))


def _fidelity(target: StateVector, delivered: StateVector | DensityMatrix) -> float:
    if isinstance(delivered, StateVector):
        return float(abs(inner(target, delivered)) ** 2)
    phi = target.amps
    return float((phi.conj() @ delivered.entries @ phi).real)


def _collapse(s: StateVector, basis: ProjectiveBasis, index: int, targets: tuple[int, ...]) -> StateVector | None:
    """Conditional post-state for one projective outcome, None if unreachable."""
    post = _kernels.project_onto(s.amps, basis.matrix[index], targets, s.n_qubits)
    norm2 = np.vdot(post, post).real
    if norm2 < PROB_FLOOR:
        return None
    return _trusted_state(post / np.sqrt(norm2))


def teleport_ghz_bm(input_state: StateVector, rng: np.random.Generator) -> ProtocolOutcome:
    """Bell measurement by Alice, x measurement by Bob, always conclusive."""
    total = tensor(input_state, ghz())
    alice = measure_projective(total, _BELL, (0, 1), rng)
    bob = measure_projective(alice.post_state, _X, (2,), rng)
    corrected = apply_op(bob.post_state, GHZ_BM_CORRECTIONS.get(alice.label, bob.label), (3,))
    charlie = _charlie_qubit(corrected)
    return ProtocolOutcome(
        protocol="ghz-bm",
        alice_outcome=alice.label,
        bob_outcome=bob.label,
        conclusive=True,
        classical_bits=3,
        charlie_state=charlie,
        fidelity=_fidelity(input_state, charlie),
    )


def teleport_ghz_two_qubit(input_state: StateVector, rng: np.random.Generator) -> ProtocolOutcome:
    """Alice holds two channel qubits and measures all three of hers at once."""
    total = tensor(input_state, ghz())
    alice = measure_projective(total, _GHZ_TYPE, (0, 1, 2), rng)
    corrected = apply_op(alice.post_state, GHZ_TWO_QUBIT_CORRECTIONS.get(alice.label, None), (3,))
    charlie = _charlie_qubit(corrected)
    return ProtocolOutcome(
        protocol="ghz-2q",
        alice_outcome=alice.label,
        bob_outcome=None,
        conclusive=True,
        classical_bits=2,
        charlie_state=charlie,
        fidelity=_fidelity(input_state, charlie),
    )


def _teleport_w_like(protocol: str, input_state: StateVector, channel: StateVector, rng: np.random.Generator) -> ProtocolOutcome:
    total = tensor(input_state, channel)
    alice = measure_projective(total, _BELL, (0, 1), rng)
    bob = measure_projective(alice.post_state, _Z, (2,), rng)
    conclusive = bob.label == "z-"
    state = bob.post_state
    if conclusive:
        state = apply_op(state, W_BM_CORRECTIONS.get(alice.label, bob.label), (3,))
    charlie = _charlie_qubit(state)
    return ProtocolOutcome(
        protocol=protocol,
        alice_outcome=alice.label,
        bob_outcome=bob.label,
        conclusive=conclusive,
        classical_bits=3,
        charlie_state=charlie,
        fidelity=_fidelity(input_state, charlie),
    )


def teleport_w_bm(input_state: StateVector, rng: np.random.Generator) -> ProtocolOutcome:
    """W-channel teleportation with Bell measurement; fails when Bob sees z+."""
    return _teleport_w_like("w-bm", input_state, w(), rng)


def teleport_w_general_bm(
    input_state: StateVector, amps: GeneralWAmplitudes, rng: np.random.Generator
) -> ProtocolOutcome:
    """Same flow as teleport_w_bm over an amplitude-weighted channel.

    Conclusive branches are perfect only when |a| = |c|; the reported
    fidelity carries whatever the channel actually delivers.
    """
    return _teleport_w_like("w-general-bm", input_state, w_general(amps), rng)


@lru_cache(maxsize=8)
def _povm_for(params: WPovmParams) -> Povm:
    return build_w_povm(params)


def teleport_w_povm(
    input_state: StateVector, params: WPovmParams, rng: np.random.Generator
) -> ProtocolOutcome:
    """Three-qubit POVM by Alice; outcome M5 is the inconclusive event."""
    total = tensor(input_state, w())
    sample = measure_povm(total, _povm_for(params), (0, 1, 2), rng)
    conclusive = sample.index < 4
    if conclusive:
        corrected = apply_op(sample.post_state, W_POVM_CORRECTIONS.get(sample.label, None), (3,))
        charlie: StateVector | DensityMatrix = _charlie_qubit(corrected)
    else:
        charlie = partial_trace(sample.post_state, (3,))
    return ProtocolOutcome(
        protocol="w-povm",
        alice_outcome=sample.label,
        bob_outcome=None,
        conclusive=conclusive,
        classical_bits=3,
        charlie_state=charlie,
        fidelity=_fidelity(input_state, charlie),
    )


def _bm_branches(
    protocol: str,
    input_state: StateVector,
    channel: StateVector,
    bob_basis: ProjectiveBasis,
    table: CorrectionTable,
    order: tuple[tuple[str, str], ...],
) -> OutcomeDistribution:
    total = tensor(input_state, channel)
    alice_probs = _kernels.branch_probabilities(total.amps, _BELL.matrix, (0, 1), 4)
    conditionals = {}
    for i, la in enumerate(_BELL.labels):
        post_a = _collapse(total, _BELL, i, (0, 1))
        if post_a is None:
            for j, lb in enumerate(bob_basis.labels):
                conditionals[(la, lb)] = (0.0, None)
            continue
        bob_probs = _kernels.branch_probabilities(post_a.amps, bob_basis.matrix, (2,), 4)
        for j, lb in enumerate(bob_basis.labels):
            p = float(alice_probs[i] * bob_probs[j])
            post_b = _collapse(post_a, bob_basis, j, (2,))
            if post_b is None:
                conditionals[(la, lb)] = (0.0, None)
                continue
            key = (la, lb)
            if key in table.entries:
                post_b = apply_op(post_b, table.get(la, lb), (3,))
            conditionals[key] = (p, _charlie_qubit(post_b))
    branches = []
    for la, lb in order:
        p, charlie = conditionals[(la, lb)]
        branches.append(
            Branch(
                label=f"{la}/{lb}",
                probability=p,
                conclusive=(la, lb) in table.entries,
                charlie_state=charlie,
            )
        )
    return OutcomeDistribution(protocol=protocol, branches=tuple(branches))


# Branch order of the Bell-measurement W schemes: the four conclusive
# outcomes first, then the four failures, each in Bell-label order.
_W_BM_ORDER = (
    ("psi+", "z-"),
    ("psi-", "z-"),
    ("phi+", "z-"),
    ("phi-", "z-"),
    ("psi+", "z+"),
    ("psi-", "z+"),
    ("phi+", "z+"),
    ("phi-", "z+"),
)

_GHZ_BM_ORDER = tuple((la, lb) for la in ("psi+", "psi-", "phi+", "phi-") for lb in ("x+", "x-"))


def ghz_bm_distribution(input_state: StateVector) -> OutcomeDistribution:
    """Eight equal branches, all conclusive with fidelity 1."""
    return _bm_branches("ghz-bm", input_state, ghz(), _X, GHZ_BM_CORRECTIONS, _GHZ_BM_ORDER)


def w_bm_distribution(input_state: StateVector) -> OutcomeDistribution:
    """Exact eight-branch enumeration; conclusive branches sum to 2/3."""
    return _bm_branches("w-bm", input_state, w(), _Z, W_BM_CORRECTIONS, _W_BM_ORDER)


def w_general_bm_distribution(input_state: StateVector, amps: GeneralWAmplitudes) -> OutcomeDistribution:
    """Branch enumeration over the amplitude-weighted channel."""
    return _bm_branches("w-general-bm", input_state, w_general(amps), _Z, W_BM_CORRECTIONS, _W_BM_ORDER)


def ghz_two_qubit_distribution(input_state: StateVector) -> OutcomeDistribution:
    """Four reachable branches at probability 1/4; completion vectors at 0."""
    total = tensor(input_state, ghz())
    probs = _kernels.branch_probabilities(total.amps, _GHZ_TYPE.matrix, (0, 1, 2), 4)
    branches = []
    for i, label in enumerate(_GHZ_TYPE.labels):
        post = _collapse(total, _GHZ_TYPE, i, (0, 1, 2))
        reachable = post is not None and (label, None) in GHZ_TWO_QUBIT_CORRECTIONS.entries
        charlie = None
        if reachable:
            corrected = apply_op(post, GHZ_TWO_QUBIT_CORRECTIONS.get(label, None), (3,))
            charlie = _charlie_qubit(corrected)
        branches.append(
            Branch(
                label=label,
                probability=float(probs[i]),
                conclusive=True,
                charlie_state=charlie,
            )
        )
    return OutcomeDistribution(protocol="ghz-2q", branches=tuple(branches))


def w_povm_distribution(input_state: StateVector, params: WPovmParams) -> OutcomeDistribution:
    """Five POVM branches: M1..M4 conclusive at lambda/4 each, M5 the rest."""
    povm = _povm_for(params)
    total = tensor(input_state, w())
    probs = _kernels.expectations(total.amps, povm._stack, (0, 1, 2), 4)
    branches = []
    for i, label in enumerate(povm.labels):
        p = float(probs[i])
        if p < PROB_FLOOR:
            branches.append(Branch(label=label, probability=max(p, 0.0), conclusive=i < 4, charlie_state=None))
            continue
        post = _kernels.apply_matrix(total.amps, povm.kraus[i], (0, 1, 2), 4)
        post = _trusted_state(post / np.sqrt(np.vdot(post, post).real))
        if i < 4:
            corrected = apply_op(post, W_POVM_CORRECTIONS.get(label, None), (3,))
            charlie: StateVector | DensityMatrix = _charlie_qubit(corrected)
        else:
            charlie = partial_trace(post, (3,))
        branches.append(Branch(label=label, probability=p, conclusive=i < 4, charlie_state=charlie))
    return OutcomeDistribution(protocol="w-povm", branches=tuple(branches))
