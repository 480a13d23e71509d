"""Simulated projective count data and maximum-likelihood reconstruction.

Settings are all combinations of the mutually unbiased single-qubit
bases Z {|0>,|1>}, X {|+>,|->}, Y {|R>,|L>}: 3^n settings exposing 6^n
projectors (81 settings / 1296 projectors for four qubits). Counts are
Poisson around mean_total * tr(rho Pi).

Reconstruction maximizes the Poisson log-likelihood over the
parameterization rho(T) = T'T / tr(T'T) with T lower triangular, which
is physical by construction. The optimizer is a monotone backtracking
gradient ascent; each setting's unknown Poisson intensity is profiled
out at its maximum-likelihood value, the observed setting total.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import _accel
from .core import (
    KET_0,
    KET_1,
    KET_LEFT,
    KET_MINUS,
    KET_PLUS,
    KET_RIGHT,
    DensityMatrix,
    StateVector,
    to_density,
)

BASIS_KETS = {
    "Z": (KET_0, KET_1),
    "X": (KET_PLUS, KET_MINUS),
    "Y": (KET_RIGHT, KET_LEFT),
}


def enumerate_settings(n_qubits: int) -> list[str]:
    """All 3^n local basis combinations, e.g. 'ZXYZ'."""
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    return ["".join(t) for t in product("ZXY", repeat=n_qubits)]


def setting_projector_kets(bases: str) -> np.ndarray:
    """Rows are the 2^n projector kets of one setting, in outcome-bit
    order with qubit 1 as the most significant bit."""
    if not bases or any(c not in BASIS_KETS for c in bases):
        raise ValueError(f"invalid bases string {bases!r}")
    n = len(bases)
    kets = np.empty((2**n, 2**n), dtype=complex)
    for out in range(2**n):
        v = np.array([1.0], dtype=complex)
        for q, ch in enumerate(bases):
            bit = (out >> (n - 1 - q)) & 1
            v = np.kron(v, BASIS_KETS[ch][bit])
        kets[out] = v
    return kets


@dataclass(frozen=True)
class CountRecord:
    """Counts for every outcome pattern of one measurement setting."""

    bases: str
    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.ndim != 1 or c.shape[0] != 2 ** len(self.bases):
            raise ValueError(
                f"need {2 ** len(self.bases)} counts for bases {self.bases!r}, "
                f"got shape {c.shape}"
            )
        if np.any(c < 0):
            raise ValueError("counts must be nonnegative")
        c.flags.writeable = False
        object.__setattr__(self, "counts", c)

    @property
    def n_qubits(self) -> int:
        return len(self.bases)


def save_records(records, path) -> None:
    """One JSON object per line: {"bases": ..., "counts": [...]}."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(
                json.dumps({"bases": rec.bases, "counts": [int(x) for x in rec.counts]})
            )
            fh.write("\n")


def load_records(path) -> list[CountRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                data = json.loads(line)
                records.append(CountRecord(data["bases"], data["counts"]))
    return records


def simulate_counts(rho, mean_total: float, rng, settings=None) -> list[CountRecord]:
    """Poisson counts with mean = mean_total * tr(rho Pi) per projector."""
    if mean_total <= 0:
        raise ValueError(f"mean_total must be positive, got {mean_total}")
    dm = to_density(rho) if isinstance(rho, StateVector) else rho
    if settings is None:
        settings = enumerate_settings(dm.n_qubits)
    records = []
    for bases in settings:
        kets = setting_projector_kets(bases)
        p = np.einsum("ki,ij,kj->k", kets.conj(), dm.matrix, kets).real
        counts = rng.poisson(mean_total * np.clip(p, 0.0, None))
        records.append(CountRecord(bases, counts))
    return records


@dataclass(frozen=True)
class MLEConfig:
    max_iterations: int = 10_000
    # convergence when the accepted relative log-likelihood gain drops below this
    improvement_tol: float = 1e-10
    initial_state: str = "maximally_mixed"

    def __post_init__(self):
        if self.improvement_tol <= 0:
            raise ValueError("improvement_tol must be positive")
        if self.initial_state != "maximally_mixed":
            raise ValueError(f"unknown initial-state rule {self.initial_state!r}")


@dataclass
class MLEResult:
    rho: DensityMatrix
    log_likelihood: float
    log_likelihood_history: np.ndarray = field(repr=False)
    iterations: int
    converged: bool
    gradient_norm: float


def _stack_records(records):
    if not records:
        raise ValueError("no count records given")
    n = records[0].n_qubits
    d = 2**n
    kets = []
    counts = []
    scales = []
    for rec in records:
        if rec.n_qubits != n:
            raise ValueError("records mix different qubit counts")
        kets.append(setting_projector_kets(rec.bases))
        counts.append(rec.counts.astype(float))
        scales.append(np.full(d, float(rec.counts.sum())))
    V = np.ascontiguousarray(np.vstack(kets))
    return n, d, V, np.concatenate(counts), np.concatenate(scales)


def _check_complete(V: np.ndarray, d: int) -> None:
    # the projectors |v><v| must span the d^2-dimensional operator space
    flat = np.einsum("ki,kj->kij", V, V.conj()).reshape(V.shape[0], d * d)
    rank = np.linalg.matrix_rank(flat, tol=1e-9)
    if rank < d * d:
        raise ValueError(
            f"record set is not informationally complete: operator rank {rank} < {d * d}"
        )


def mle_reconstruct_full(records, config: MLEConfig | None = None) -> MLEResult:
    """Maximum-likelihood state with optimizer diagnostics."""
    config = config or MLEConfig()
    n, d, V, counts, scales = _stack_records(records)
    _check_complete(V, d)
    T0 = np.eye(d, dtype=complex) / np.sqrt(d)
    T, hist, n_iter, converged, grad_norm = _accel.mle_ascent(
        V, V.conj(), counts, scales, T0, config.max_iterations, config.improvement_tol
    )
    A = T.conj().T @ T
    rho = DensityMatrix(A / np.trace(A).real)
    return MLEResult(
        rho=rho,
        log_likelihood=float(hist[-1]),
        log_likelihood_history=np.asarray(hist),
        iterations=int(n_iter),
        converged=bool(converged),
        gradient_norm=float(grad_norm),
    )


def mle_reconstruct(records, config: MLEConfig | None = None) -> DensityMatrix:
    """Physical density matrix maximizing the Poisson likelihood.

    Warns (and still returns the last iterate) when the iteration cap is
    hit before the convergence threshold.
    """
    result = mle_reconstruct_full(records, config)
    if not result.converged:
        warnings.warn(
            "likelihood ascent hit the iteration cap; final gradient norm "
            f"{result.gradient_norm:.3e}",
            stacklevel=2,
        )
    return result.rho


def single_qubit_tomography(records, config: MLEConfig | None = None) -> DensityMatrix:
    """mle_reconstruct restricted to one qubit (6 projectors)."""
    for rec in records:
        if rec.n_qubits != 1:
            raise ValueError(f"expected single-qubit records, got bases {rec.bases!r}")
    return mle_reconstruct(records, config)


def monte_carlo_errors(
    records,
    derived_quantity,
    n_runs: int = 100,
    rng=None,
    config: MLEConfig | None = None,
):
    """Uncertainty of a reconstruction-derived quantity.

    Resamples every count as Poisson(count), reruns the reconstruction
    and the quantity, and returns (sample mean, sample std).
    """
    if n_runs < 2:
        raise ValueError(f"need at least 2 runs, got {n_runs}")
    rng = rng if rng is not None else np.random.default_rng()
    values = np.empty(n_runs)
    for k in range(n_runs):
        resampled = [
            CountRecord(rec.bases, rng.poisson(rec.counts)) for rec in records
        ]
        rho = mle_reconstruct(resampled, config)
        values[k] = float(derived_quantity(rho))
    return float(values.mean()), float(values.std(ddof=1))
