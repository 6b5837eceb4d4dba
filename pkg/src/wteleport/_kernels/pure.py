"""Reference numpy implementations of the dense register kernels.

Registers are flat complex128 arrays of length 2**n with qubit 0 stored in
the most significant bit of the index.  Every function returns a fresh
array; inputs are never mutated.
"""

from __future__ import annotations

import numpy as np

NAME = "pure"


def _to_front(state: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    """Reshape to axes-per-qubit and move the target axes to the front."""
    st = state.reshape([2] * n)
    return np.moveaxis(st, targets, range(len(targets)))


def kron2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product of two registers, a's qubits in front."""
    return np.kron(a, b)


def apply_matrix(state: np.ndarray, mat: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    """Apply a 2^k x 2^k matrix to the target qubits, identity elsewhere."""
    k = len(targets)
    st = state.reshape([2] * n)
    op = mat.reshape([2] * (2 * k))
    st = np.tensordot(op, st, axes=(tuple(range(k, 2 * k)), targets))
    st = np.moveaxis(st, range(k), targets)
    return np.ascontiguousarray(st.reshape(-1))


def branch_probabilities(state: np.ndarray, basis: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    """Born probabilities of projecting the targets onto each basis row."""
    k = len(targets)
    st = _to_front(state, targets, n).reshape(1 << k, -1)
    amps = basis.conj() @ st
    return np.einsum("ij,ij->i", amps, amps.conj()).real


def project_onto(state: np.ndarray, vec: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    """Unnormalized projection of the targets onto one basis vector."""
    k = len(targets)
    st = _to_front(state, targets, n).reshape(1 << k, -1)
    coeff = vec.conj() @ st
    post = np.outer(vec, coeff).reshape([2] * n)
    post = np.moveaxis(post, range(k), targets)
    return np.ascontiguousarray(post.reshape(-1))


def reduced_density(state: np.ndarray, keep: tuple[int, ...], n: int) -> np.ndarray:
    """Reduced density matrix on the kept qubits (trace out the rest)."""
    k = len(keep)
    st = _to_front(state, keep, n).reshape(1 << k, -1)
    return st @ st.conj().T


def expectations(state: np.ndarray, ops: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    """<state| O_i (x) I |state> for a stack of operators on the targets."""
    rho = reduced_density(state, targets, n)
    return np.einsum("kij,ji->k", ops, rho).real
