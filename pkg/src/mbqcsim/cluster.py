"""Four-qubit cluster states and their graph-state relatives.

The prepared cluster is
(|0000> + |0011> + |1100> - |1111>)/2.
It equals (H x I x I x H) applied to the chain graph state 1-2-3-4, so
the linear and horseshoe clusters are one Hadamard on each end qubit
away; the two differ only in measurement order. The box cluster is the
graph state on the 4-cycle and is related to the prepared state by a
local Clifford map that :func:`find_local_clifford_map` digs up by
exhaustive search.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .core import (
    CPHASE,
    HADAMARD,
    IDENTITY_2,
    SIGMA_X,
    SIGMA_Z,
    DensityMatrix,
    StateVector,
    apply_unitary,
    to_density,
)


@dataclass(frozen=True)
class GraphSpec:
    """Undirected graph over 1-based qubit labels."""

    n_qubits: int
    edges: frozenset

    def __init__(self, n_qubits: int, edges):
        if n_qubits < 1:
            raise ValueError("graph needs at least one vertex")
        norm = set()
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            if not (1 <= i <= n_qubits and 1 <= j <= n_qubits):
                raise ValueError(f"edge ({i},{j}) outside 1..{n_qubits}")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def chain(cls, n: int) -> "GraphSpec":
        return cls(n, [(i, i + 1) for i in range(1, n)])

    @classmethod
    def cycle(cls, n: int) -> "GraphSpec":
        if n < 3:
            raise ValueError("a cycle needs at least three vertices")
        return cls(n, [(i, i + 1) for i in range(1, n)] + [(1, n)])

    def neighbors(self, vertex: int) -> list[int]:
        out = []
        for i, j in self.edges:
            if i == vertex:
                out.append(j)
            elif j == vertex:
                out.append(i)
        return sorted(out)

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n_qubits, "edges": sorted(list(e) for e in self.edges)}
        )

    @classmethod
    def from_json(cls, text: str) -> "GraphSpec":
        data = json.loads(text)
        return cls(int(data["n"]), [tuple(e) for e in data["edges"]])


def build_cluster_state() -> StateVector:
    """The four-qubit cluster as prepared: (|0000>+|0011>+|1100>-|1111>)/2."""
    amp = np.zeros(16, dtype=complex)
    amp[0b0000] = 0.5
    amp[0b0011] = 0.5
    amp[0b1100] = 0.5
    amp[0b1111] = -0.5
    return StateVector(amp)


def build_graph_state(g: GraphSpec) -> StateVector:
    """CPhase across every edge of |+>^n."""
    state = StateVector.plus_states(g.n_qubits)
    for i, j in sorted(g.edges):
        state = apply_unitary(state, CPHASE, (i, j))
    return state


def build_box_cluster() -> StateVector:
    """Graph state on the 4-cycle 1-2-3-4-1; the Grover substrate."""
    return build_graph_state(GraphSpec.cycle(4))


def local_equivalent(cluster, which: str = "linear"):
    """Hadamard the end qubits: maps the prepared cluster to its chain form.

    'linear' and 'horseshoe' name the same state; they differ only in
    which qubits get measured first. Applying this twice is the identity.
    Accepts a StateVector or a DensityMatrix.
    """
    if which not in ("linear", "horseshoe"):
        raise ValueError(f"unknown form {which!r}")
    if cluster.n_qubits != 4:
        raise ValueError(f"expected a 4-qubit state, got {cluster.n_qubits} qubits")
    state = apply_unitary(cluster, HADAMARD, (1,))
    return apply_unitary(state, HADAMARD, (4,))


def stabilizer_generator_matrices(g: GraphSpec) -> list[np.ndarray]:
    """K_i = X on vertex i, Z on every neighbor, as dense matrices."""
    mats = []
    for v in range(1, g.n_qubits + 1):
        nbrs = set(g.neighbors(v))
        factors = []
        for q in range(1, g.n_qubits + 1):
            if q == v:
                factors.append(SIGMA_X)
            elif q in nbrs:
                factors.append(SIGMA_Z)
            else:
                factors.append(IDENTITY_2)
        m = factors[0]
        for f in factors[1:]:
            m = np.kron(m, f)
        mats.append(m)
    return mats


def _expectation(state, op: np.ndarray) -> float:
    if isinstance(state, StateVector):
        val = np.vdot(state.amplitudes, op @ state.amplitudes)
    elif isinstance(state, DensityMatrix):
        val = np.trace(op @ state.matrix)
    else:
        raise TypeError(f"expected StateVector or DensityMatrix, got {type(state)}")
    return float(val.real)


def stabilizer_expectations(state, g: GraphSpec) -> list[float]:
    """Expectation value of every stabilizer generator of the graph."""
    dim = 2**g.n_qubits
    sdim = state.dim if isinstance(state, (StateVector, DensityMatrix)) else None
    if sdim != dim:
        raise ValueError(f"state dimension {sdim} does not match graph ({dim})")
    return [_expectation(state, k) for k in stabilizer_generator_matrices(g)]


def stabilizer_group_expectations(state, g: GraphSpec) -> np.ndarray:
    """All 2^n products of generators; entry m multiplies K_i for each set bit i.

    Index 0 is the identity (always 1); a graph state gives +1 everywhere.
    """
    gens = stabilizer_generator_matrices(g)
    n = g.n_qubits
    out = np.empty(2**n)
    for mask in range(2**n):
        op = np.eye(2**n, dtype=complex)
        for i in range(n):
            if mask >> i & 1:
                op = op @ gens[i]
        out[mask] = _expectation(state, op)
    return out


def _single_qubit_cliffords() -> tuple[list[str], list[np.ndarray]]:
    """The 24 single-qubit Cliffords (up to phase) as words in H and S."""
    s_gate = np.diag([1.0, 1j])

    def same_up_to_phase(a, b):
        # 2x2 unitaries are phase-equal iff |tr(a' b)| = 2
        return abs(np.trace(a.conj().T @ b)) > 2.0 - 1e-9

    names = ["I"]
    mats = [np.eye(2, dtype=complex)]
    frontier = [0]
    while frontier:
        nxt = []
        for idx in frontier:
            for gname, g in (("H", HADAMARD), ("S", s_gate)):
                m = g @ mats[idx]
                if any(same_up_to_phase(m, known) for known in mats):
                    continue
                word = gname if names[idx] == "I" else gname + names[idx]
                nxt.append(len(mats))
                names.append(word)
                mats.append(m)
        frontier = nxt
    order = sorted(range(len(names)), key=lambda k: (len(names[k]), names[k]))
    return [names[k] for k in order], [mats[k] for k in order]


def find_local_clifford_map(source: StateVector, target: StateVector):
    """Search U1 x ... x Un over single-qubit Cliffords with U|source> = |target>.

    Returns a list of (word, matrix) per qubit, or None when the states
    are not locally Clifford equivalent. Exhaustive (24^n combinations),
    intended for n <= 4.
    """
    if source.n_qubits != target.n_qubits:
        raise ValueError("states must have the same qubit count")
    n = source.n_qubits
    names, mats = _single_qubit_cliffords()
    stack = np.stack(mats)
    tgt = target.amplitudes.conj()

    def rec(state: StateVector, qubit: int):
        if qubit == n:
            # last qubit: score all 24 candidates in one contraction
            m = tgt.reshape(-1, 2).T @ state.amplitudes.reshape(-1, 2)
            ov = np.abs(np.einsum("kab,ab->k", stack, m))
            k = int(np.argmax(ov))
            if abs(ov[k] - 1.0) < 1e-9:
                return [(names[k], mats[k])]
            return None
        for name, m in zip(names, mats):
            hit = rec(apply_unitary(state, m, (qubit,)), qubit + 1)
            if hit is not None:
                return [(name, m)] + hit
        return None

    return rec(source, 1)


def cluster_fidelity(state, cluster: StateVector | None = None) -> float:
    """Overlap <cluster| rho |cluster> with the prepared cluster by default."""
    if cluster is None:
        cluster = build_cluster_state()
    rho = to_density(state) if isinstance(state, StateVector) else state
    c = cluster.amplitudes
    return float((c.conj() @ rho.matrix @ c).real)
