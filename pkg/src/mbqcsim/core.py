"""Exact dense linear algebra for few-qubit pure and mixed states.

Labeling convention used across the package: qubit 1 is the leftmost
tensor factor, i.e. the most significant bit of the amplitude index.
All operations are pure functions; the wrapped numpy arrays are marked
read-only so values can be shared freely across threads.

Computational-basis kets map to polarization as |0> = |H>, |1> = |V>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SQRT2 = math.sqrt(2.0)

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / SQRT2
CPHASE = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)

KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)
KET_PLUS = (KET_0 + KET_1) / SQRT2
KET_MINUS = (KET_0 - KET_1) / SQRT2
# +1 / -1 eigenstates of sigma_y: right / left circular polarization
KET_RIGHT = (KET_0 + 1j * KET_1) / SQRT2
KET_LEFT = (KET_0 - 1j * KET_1) / SQRT2

for _arr in (IDENTITY_2, SIGMA_X, SIGMA_Y, SIGMA_Z, HADAMARD, CPHASE,
             KET_0, KET_1, KET_PLUS, KET_MINUS, KET_RIGHT, KET_LEFT):
    _arr.flags.writeable = False
del _arr

NORM_TOL = 1e-12
UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-10
PHASE_EQUALITY_TOL = 1e-9


def rotation_z(alpha: float) -> np.ndarray:
    """R_z(alpha) = exp(-i alpha sigma_z / 2)."""
    return np.array(
        [[np.exp(-0.5j * alpha), 0.0], [0.0, np.exp(0.5j * alpha)]], dtype=complex
    )


def rotation_x(alpha: float) -> np.ndarray:
    """R_x(alpha) via the identity R_x(alpha) = H R_z(alpha) H."""
    return HADAMARD @ rotation_z(alpha) @ HADAMARD


def _n_qubits_of(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim <= 0 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True)
class Operator:
    """Square complex matrix, optionally checked for unitarity."""

    entries: np.ndarray
    unitary: bool = True

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")
        _n_qubits_of(m.shape[0])
        if self.unitary:
            dev = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
            if dev > UNITARY_TOL:
                raise ValueError(f"matrix is not unitary (deviation {dev:.2e})")
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    @property
    def n_qubits(self) -> int:
        return _n_qubits_of(self.dimension)


@dataclass(frozen=True)
class StateVector:
    """Pure state of n labeled qubits; qubit 1 is the leftmost factor."""

    amplitudes: np.ndarray
    n_qubits: int = field(init=False)

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex).reshape(-1)
        n = _n_qubits_of(amp.shape[0])
        amp.flags.writeable = False
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "n_qubits", n)

    @classmethod
    def from_label(cls, label: str) -> "StateVector":
        """Computational basis state from a bit string, e.g. '0011'."""
        if not label or any(c not in "01" for c in label):
            raise ValueError(f"invalid basis label {label!r}")
        amp = np.zeros(2 ** len(label), dtype=complex)
        amp[int(label, 2)] = 1.0
        return cls(amp)

    @classmethod
    def plus_states(cls, n: int) -> "StateVector":
        """|+>^n, the raw material of every graph state."""
        if n < 1:
            raise ValueError("need at least one qubit")
        return cls(np.full(2**n, 2 ** (-n / 2), dtype=complex))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        nrm = self.norm()
        if nrm < 1e-15:
            raise ValueError("cannot normalize a zero vector")
        return StateVector(self.amplitudes / nrm)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() ** 2 - 1.0) <= tol


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix."""

    matrix: np.ndarray
    n_qubits: int = field(init=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        n = _n_qubits_of(m.shape[0])
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "n_qubits", n)

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityMatrix":
        d = 2**n
        return cls(np.eye(d, dtype=complex) / d)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def validate(
        self,
        hermitian_tol: float = HERMITIAN_TOL,
        trace_tol: float = TRACE_TOL,
        eigenvalue_floor: float = EIGENVALUE_FLOOR,
    ) -> None:
        """Raise ValueError naming the violated invariant and its size."""
        m = self.matrix
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > hermitian_tol:
            raise ValueError(f"not Hermitian: max deviation {herm:.3e}")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"trace is {tr:.12g}, deviates by {abs(tr - 1.0):.3e}")
        lo = float(np.min(np.linalg.eigvalsh((m + m.conj().T) / 2)))
        if lo < eigenvalue_floor:
            raise ValueError(f"negative eigenvalue {lo:.3e} below floor")

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


@dataclass(frozen=True)
class MeasurementBasis:
    """Single-qubit measurement basis.

    ``MeasurementBasis(alpha)`` is the equatorial basis
    B(alpha) = {|a+>, |a->} with |a+-> = (e^{i a/2}|0> +- e^{-i a/2}|1>)/sqrt(2);
    outcome 0 means projection onto |a+>. ``MeasurementBasis.computational()``
    is {|0>, |1>}, the basis that detaches a qubit from a cluster.
    """

    alpha: float | None

    @classmethod
    def computational(cls) -> "MeasurementBasis":
        return cls(alpha=None)

    @property
    def is_computational(self) -> bool:
        return self.alpha is None

    def vectors(self) -> tuple[np.ndarray, np.ndarray]:
        """Kets for outcomes 0 and 1."""
        if self.alpha is None:
            return KET_0, KET_1
        ea = np.exp(0.5j * self.alpha)
        v0 = np.array([ea, 1.0 / ea], dtype=complex) / SQRT2
        v1 = np.array([ea, -1.0 / ea], dtype=complex) / SQRT2
        return v0, v1


def _as_matrix(u) -> np.ndarray:
    if isinstance(u, Operator):
        return u.entries
    m = np.asarray(u, dtype=complex)
    dev = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
    if dev > UNITARY_TOL:
        raise ValueError(f"matrix is not unitary (deviation {dev:.2e})")
    return m


def _check_targets(targets, n: int) -> list[int]:
    t = list(targets)
    if len(set(t)) != len(t):
        raise ValueError(f"duplicate target qubits in {t}")
    for q in t:
        if not 1 <= q <= n:
            raise ValueError(f"qubit label {q} out of range 1..{n}")
    return [q - 1 for q in t]


def _apply_axes(flat: np.ndarray, u: np.ndarray, axes: list[int], total: int) -> np.ndarray:
    """Apply u to the given axes of a (2,)*total tensor stored flat."""
    k = len(axes)
    psi = flat.reshape((2,) * total)
    rest = [a for a in range(total) if a not in axes]
    psi = np.transpose(psi, rest + axes).reshape(-1, 2**k)
    psi = psi @ u.T
    psi = psi.reshape((2,) * total)
    inv = np.argsort(rest + axes)
    return np.transpose(psi, inv).reshape(-1)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Product state with a's qubits first."""
    return StateVector(np.kron(a.amplitudes, b.amplitudes))


def apply_unitary(state, u, targets):
    """Apply a unitary to the listed qubit labels of a pure or mixed state.

    ``targets`` are 1-based labels ordered as the tensor factors of ``u``.
    """
    m = _as_matrix(u)
    k = m.shape[0].bit_length() - 1
    if m.shape[0] != 2**k:
        raise ValueError(f"unitary dimension {m.shape[0]} is not a power of two")
    n = state.n_qubits
    axes = _check_targets(targets, n)
    if len(axes) != k:
        raise ValueError(
            f"unitary acts on {k} qubits but {len(axes)} targets were given"
        )
    if isinstance(state, StateVector):
        return StateVector(_apply_axes(state.amplitudes, m, axes, n))
    if isinstance(state, DensityMatrix):
        flat = _apply_axes(state.matrix.reshape(-1), m, axes, 2 * n)
        flat = _apply_axes(flat, m.conj(), [n + a for a in axes], 2 * n)
        return DensityMatrix(flat.reshape(state.dim, state.dim))
    raise TypeError(f"expected StateVector or DensityMatrix, got {type(state)}")


def _sv_outcome_slices(state: StateVector, qubit: int):
    axis = _check_targets([qubit], state.n_qubits)[0]
    psi = state.amplitudes.reshape((2,) * state.n_qubits)
    psi = np.moveaxis(psi, axis, 0).reshape(2, -1)
    return psi


def born_probabilities(state, qubit: int, basis: MeasurementBasis):
    """Probabilities (p0, p1) of the two basis outcomes on one qubit."""
    v0, v1 = basis.vectors()
    if isinstance(state, StateVector):
        psi = _sv_outcome_slices(state, qubit)
        a0 = v0.conj()[0] * psi[0] + v0.conj()[1] * psi[1]
        a1 = v1.conj()[0] * psi[0] + v1.conj()[1] * psi[1]
        p0 = float(np.vdot(a0, a0).real)
        p1 = float(np.vdot(a1, a1).real)
    elif isinstance(state, DensityMatrix):
        p0 = _dm_project(state, qubit, v0)[0]
        p1 = _dm_project(state, qubit, v1)[0]
    else:
        raise TypeError(f"expected StateVector or DensityMatrix, got {type(state)}")
    total = p0 + p1
    return p0 / total, p1 / total


def _dm_project(state: DensityMatrix, qubit: int, vec: np.ndarray):
    """(probability, unnormalized reduced matrix) after projecting one qubit out."""
    n = state.n_qubits
    axis = _check_targets([qubit], n)[0]
    rho = state.matrix.reshape((2,) * (2 * n))
    rho = np.moveaxis(rho, (axis, n + axis), (0, 1))
    vc = vec.conj()
    red = (
        vc[0] * vec[0] * rho[0, 0]
        + vc[0] * vec[1] * rho[0, 1]
        + vc[1] * vec[0] * rho[1, 0]
        + vc[1] * vec[1] * rho[1, 1]
    )
    d = 2 ** (n - 1)
    red = red.reshape(d, d)
    return float(np.trace(red).real), red


def collapse(state, qubit: int, basis: MeasurementBasis, outcome: int):
    """Post-measurement state with the measured qubit removed.

    Remaining labels shift down to fill the gap. Raises on an outcome of
    (numerically) zero probability.
    """
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome}")
    vec = basis.vectors()[outcome]
    if isinstance(state, StateVector):
        if state.n_qubits < 2:
            raise ValueError("cannot remove the last remaining qubit")
        psi = _sv_outcome_slices(state, qubit)
        res = vec.conj()[0] * psi[0] + vec.conj()[1] * psi[1]
        p = float(np.vdot(res, res).real)
        if p <= NORM_TOL:
            raise ValueError(
                f"outcome {outcome} on qubit {qubit} has probability {p:.3e}"
            )
        return StateVector(res / math.sqrt(p))
    if isinstance(state, DensityMatrix):
        if state.n_qubits < 2:
            raise ValueError("cannot remove the last remaining qubit")
        p, red = _dm_project(state, qubit, vec)
        if p <= NORM_TOL:
            raise ValueError(
                f"outcome {outcome} on qubit {qubit} has probability {p:.3e}"
            )
        return DensityMatrix(red / p)
    raise TypeError(f"expected StateVector or DensityMatrix, got {type(state)}")


def to_density(state: StateVector) -> DensityMatrix:
    """|psi><psi| of a pure state."""
    amp = state.amplitudes
    return DensityMatrix(np.outer(amp, amp.conj()))


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced state on the kept qubit labels (ascending order)."""
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep-set must not be empty")
    n = rho.n_qubits
    kept_axes = _check_targets(keep, n)
    letters = "abcdefghijklmnopqrstuvwx"
    ket = list(letters[:n])
    bra = list(letters[n : 2 * n])
    for a in range(n):
        if a not in kept_axes:
            bra[a] = ket[a]
    out = "".join(ket[a] for a in kept_axes) + "".join(bra[a] for a in kept_axes)
    sub = "".join(ket) + "".join(bra) + "->" + out
    d = 2 ** len(kept_axes)
    red = np.einsum(sub, rho.matrix.reshape((2,) * (2 * n))).reshape(d, d)
    return DensityMatrix(red)


def permute_qubits(state, order) -> StateVector | DensityMatrix:
    """Relabel qubits: new qubit k is old qubit order[k-1]."""
    n = state.n_qubits
    axes = _check_targets(order, n)
    if len(axes) != n:
        raise ValueError(f"order must list all {n} labels, got {order}")
    if isinstance(state, StateVector):
        psi = state.amplitudes.reshape((2,) * n)
        return StateVector(np.transpose(psi, axes).reshape(-1))
    if isinstance(state, DensityMatrix):
        rho = state.matrix.reshape((2,) * (2 * n))
        rho = np.transpose(rho, axes + [n + a for a in axes])
        return DensityMatrix(rho.reshape(state.dim, state.dim))
    raise TypeError(f"expected StateVector or DensityMatrix, got {type(state)}")


def states_equal_up_to_phase(a: StateVector, b: StateVector,
                             tol: float = PHASE_EQUALITY_TOL) -> bool:
    """Equality test |<a|b>| = 1 within tol; ignores the global phase."""
    if a.dim != b.dim:
        return False
    return abs(abs(np.vdot(a.amplitudes, b.amplitudes)) - 1.0) <= tol
