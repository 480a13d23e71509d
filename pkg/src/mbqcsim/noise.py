"""Degrade ideal cluster states to a target preparation fidelity.

White noise (uniform mixing with the maximally mixed state) is the only
built-in model: a measured preparation quality is a single scalar
fidelity, and inverting F = p + (1 - p)/2^n fixes the mixing weight
exactly. Measured density matrices can be supplied as JSON files
instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import DensityMatrix, StateVector, to_density

# File validation is looser than the in-memory invariants: files may
# carry rounded entries.
FILE_HERMITIAN_TOL = 1e-8
FILE_TRACE_TOL = 1e-8
FILE_EIGENVALUE_FLOOR = -1e-8


@dataclass(frozen=True)
class NoiseSpec:
    """White-noise mixing weight p in [0, 1]; p = 1 is the pure state."""

    p: float
    kind: str = "white_noise"

    def __post_init__(self):
        if self.kind != "white_noise":
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"mixing weight p={self.p} outside [0, 1]")


def white_noise(pure: StateVector, p: float) -> DensityMatrix:
    """rho = p |psi><psi| + (1 - p) I / 2^n."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing weight p={p} outside [0, 1]")
    d = pure.dim
    rho = p * to_density(pure).matrix + (1.0 - p) * np.eye(d) / d
    return DensityMatrix(rho)


def solve_p_for_fidelity(f_target: float, n_qubits: int) -> float:
    """Mixing weight p that makes white noise hit the given fidelity.

    Inverts F = p + (1 - p)/2^n. The fidelity floor 1/2^n is the
    maximally mixed state.
    """
    d = 2**n_qubits
    floor = 1.0 / d
    if f_target > 1.0 or f_target < floor:
        raise ValueError(
            f"target fidelity {f_target} outside [{floor}, 1] for {n_qubits} qubits"
        )
    return (f_target - floor) / (1.0 - floor)


def save_density(rho: DensityMatrix, path) -> None:
    """Write {"n": ..., "rho": [[[re, im], ...], ...]} row-major."""
    payload = {
        "n": rho.n_qubits,
        "rho": [
            [[float(z.real), float(z.imag)] for z in row] for row in rho.matrix
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_density(path) -> DensityMatrix:
    """Read and validate a density matrix file written by :func:`save_density`.

    Raises ValueError on malformed JSON or on a physicality violation,
    naming the broken invariant and its magnitude.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        n = int(data["n"])
        raw = data["rho"]
        mat = np.array(
            [[complex(re, im) for re, im in row] for row in raw], dtype=complex
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"cannot parse density-matrix file {path}: {exc}") from exc
    if mat.shape != (2**n, 2**n):
        raise ValueError(
            f"matrix shape {mat.shape} does not match n={n} (expected {2**n})"
        )
    rho = DensityMatrix(mat)
    rho.validate(
        hermitian_tol=FILE_HERMITIAN_TOL,
        trace_tol=FILE_TRACE_TOL,
        eigenvalue_floor=FILE_EIGENVALUE_FLOOR,
    )
    return rho
