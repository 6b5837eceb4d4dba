"""Average-fidelity estimation over uniformly random inputs.

Two modes: Monte Carlo sampling (per-trial random streams keyed by
(master_seed, trial_index), compensated summation so the reduction order
cannot leak into the reported means) and a deterministic Gauss-Legendre
product grid over the Bloch sphere, exact for the polynomial integrands
these protocols produce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .protocols import OutcomeDistribution, ProtocolOutcome, w_povm_distribution
from .qmath import DensityMatrix, StateVector, inner
from .states import BlochAngles, GeneralWAmplitudes, haar_random_qubit, unknown_qubit
from .wpovm import WPovmParams, lambda_max

ProtocolRunner = Callable[[StateVector, np.random.Generator], ProtocolOutcome]
DistributionFn = Callable[[StateVector], OutcomeDistribution]

GRID_NODES = 64


@dataclass(frozen=True)
class TrialStats:
    """Aggregated success and fidelity statistics."""

    n_trials: int
    success_rate: float
    success_stderr: float
    avg_fidelity: float
    fidelity_stderr: float
    conclusive_part: float
    inconclusive_part: float


@dataclass(frozen=True)
class SweepRow:
    """One grid point of a parameter sweep; None entries mean infeasible."""

    param: str
    value: float
    feasible: bool
    lambda_max: float
    analytic_fidelity: float | None
    mc_fidelity: float | None
    stderr: float | None
    success_rate: float | None


def state_fidelity(target: StateVector, delivered: StateVector | DensityMatrix) -> float:
    """<phi|rho|phi>, or |<phi|chi>|^2 when the delivered state is pure."""
    if target.dim != 2 or delivered.dim != 2:
        raise ValueError("state_fidelity compares single-qubit states")
    if isinstance(delivered, StateVector):
        return float(abs(inner(target, delivered)) ** 2)
    phi = target.amps
    return float((phi.conj() @ delivered.entries @ phi).real)


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial, reproducible in any run order."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((master_seed, trial))))


def _stderr(total: float, total_sq: float, n: int) -> float:
    if n < 2:
        return 0.0
    mean = total / n
    var = max(total_sq - n * mean * mean, 0.0) / (n - 1)
    return math.sqrt(var / n)


def avg_fidelity_mc(run_trial: ProtocolRunner, n_trials: int, master_seed: int) -> TrialStats:
    """Sample Haar inputs, run the protocol, average realized fidelities."""
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    fids = []
    fids_sq = []
    successes = 0
    conclusive_fids = []
    inconclusive_fids = []
    for i in range(n_trials):
        rng = trial_rng(master_seed, i)
        _, phi = haar_random_qubit(rng)
        outcome = run_trial(phi, rng)
        f = outcome.fidelity
        fids.append(f)
        fids_sq.append(f * f)
        if outcome.conclusive:
            successes += 1
            conclusive_fids.append(f)
        else:
            inconclusive_fids.append(f)
    total = math.fsum(fids)
    n = n_trials
    p = successes / n
    return TrialStats(
        n_trials=n,
        success_rate=p,
        success_stderr=_stderr(successes, successes, n),
        avg_fidelity=total / n,
        fidelity_stderr=_stderr(total, math.fsum(fids_sq), n),
        conclusive_part=math.fsum(conclusive_fids) / n,
        inconclusive_part=math.fsum(inconclusive_fids) / n,
    )


def grid_angles(nodes: int = GRID_NODES) -> list[tuple[BlochAngles, float]]:
    """Gauss-Legendre nodes in cos(theta) times midpoint nodes in phi."""
    x, wx = np.polynomial.legendre.leggauss(nodes)
    pairs = []
    for xi, wi in zip(x, wx):
        theta = math.acos(float(xi))
        for j in range(nodes):
            phi = (j + 0.5) * 2.0 * math.pi / nodes
            pairs.append((BlochAngles(theta, phi), float(wi) / (2.0 * nodes)))
    return pairs


def avg_fidelity_grid(distribution: DistributionFn, nodes: int = GRID_NODES) -> TrialStats:
    """Deterministic sphere average of the exact branch enumeration."""
    fid_terms = []
    success_terms = []
    conclusive_terms = []
    inconclusive_terms = []
    points = grid_angles(nodes)
    for angles, weight in points:
        phi = unknown_qubit(angles)
        dist = distribution(phi)
        for b in dist.branches:
            if b.charlie_state is None or b.probability <= 0.0:
                continue
            contrib = weight * b.probability * state_fidelity(phi, b.charlie_state)
            fid_terms.append(contrib)
            if b.conclusive:
                success_terms.append(weight * b.probability)
                conclusive_terms.append(contrib)
            else:
                inconclusive_terms.append(contrib)
    return TrialStats(
        n_trials=len(points),
        success_rate=math.fsum(success_terms),
        success_stderr=0.0,
        avg_fidelity=math.fsum(fid_terms),
        fidelity_stderr=0.0,
        conclusive_part=math.fsum(conclusive_terms),
        inconclusive_part=math.fsum(inconclusive_terms),
    )


def avg_fidelity_analytic(
    scheme: str,
    lambda_asym: float | None = None,
    amps: GeneralWAmplitudes | None = None,
    a: float | None = None,
) -> float:
    """Closed-form sphere averages for each scheme."""
    if scheme in ("ghz-bm", "ghz-2q"):
        return 1.0
    if scheme == "w-bm":
        return 5.0 / 6.0
    if scheme == "w-povm":
        if lambda_asym is None:
            raise ValueError("w-povm needs lambda_asym")
        bound = lambda_max(a) if a is not None else 2.0 / 3.0
        if not 0.0 < lambda_asym <= bound + 1e-12:
            raise ValueError(f"lambda {lambda_asym!r} outside (0, {bound!r}]")
        return 0.5 + 0.5 * lambda_asym
    if scheme == "w-general-bm":
        if amps is None:
            raise ValueError("w-general-bm needs channel amplitudes")
        pa, pb, pc = abs(amps.a) ** 2, abs(amps.b) ** 2, abs(amps.c) ** 2
        cross = (amps.a * np.conj(amps.c)).real
        return (2.0 / 3.0) * (pa + pc + cross) + pb / 2.0
    raise ValueError(f"unknown scheme {scheme!r}")


def sweep(
    param: str,
    values,
    n_trials: int,
    master_seed: int,
    a: float = math.sqrt(3.0) / 2.0,
    lambda_asym: float = 2.0 / 3.0,
) -> list[SweepRow]:
    """POVM parameter sweep; infeasible points become flagged rows."""
    from .protocols import teleport_w_povm

    if param not in ("a", "lambda"):
        raise ValueError(f"sweep parameter must be 'a' or 'lambda', got {param!r}")
    rows = []
    for value in values:
        v = float(value)
        if param == "a":
            pa, plam = v, lambda_asym
        else:
            pa, plam = a, v
        bound = lambda_max(pa)
        feasible = 0.0 < plam <= bound + 1e-12 and pa > 0.0
        if not feasible:
            rows.append(
                SweepRow(param, v, False, bound, None, None, None, None)
            )
            continue
        params = WPovmParams(a=pa, a_prime=pa, lambda_asym=plam)
        stats = avg_fidelity_mc(lambda phi, rng: teleport_w_povm(phi, params, rng), n_trials, master_seed)
        rows.append(
            SweepRow(
                param=param,
                value=v,
                feasible=True,
                lambda_max=bound,
                analytic_fidelity=avg_fidelity_analytic("w-povm", lambda_asym=plam, a=pa),
                mc_fidelity=stats.avg_fidelity,
                stderr=stats.fidelity_stderr,
                success_rate=stats.success_rate,
            )
        )
    return rows


def w_povm_grid_distribution(params: WPovmParams) -> DistributionFn:
    """Distribution closure for grid averaging of the POVM scheme."""
    return lambda phi: w_povm_distribution(phi, params)
