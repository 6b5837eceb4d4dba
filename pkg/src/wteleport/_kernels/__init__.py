"""Register kernels with a compiled fast path and a numpy fallback.

The compiled backend is picked automatically when the extension built; the
pure backend is always available.  `use_backend` swaps the active one at
runtime (used by the benchmark and for debugging).
"""

from __future__ import annotations

from . import pure

try:
    from . import _native
except ImportError:
    _native = None

_BACKENDS = {"pure": pure}
if _native is not None:
    _BACKENDS["native"] = _native

_active = _BACKENDS.get("native", pure)


def backend_name() -> str:
    """Name of the backend currently in use."""
    return _active.NAME


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def use_backend(name: str) -> None:
    """Switch the active backend ('pure' or 'native')."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}, available: {available_backends()}")
    _active = _BACKENDS[name]


def kron2(a, b):
    return _active.kron2(a, b)


def apply_matrix(state, mat, targets, n):
    return _active.apply_matrix(state, mat, targets, n)


def branch_probabilities(state, basis, targets, n):
    return _active.branch_probabilities(state, basis, targets, n)


def project_onto(state, vec, targets, n):
    return _active.project_onto(state, vec, targets, n)


def reduced_density(state, keep, n):
    return _active.reduced_density(state, keep, n)


def expectations(state, ops, targets, n):
    return _active.expectations(state, ops, targets, n)
