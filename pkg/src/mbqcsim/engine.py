"""Measurement patterns with stochastic outcomes and active feed-forward.

Three computations run on four-qubit cluster states:

* an arbitrary single-qubit rotation R_x(beta) R_z(alpha) on the chain,
* the entangling two-qubit gate (H x H)(R_z x R_z) CPhase on the
  horseshoe ordering,
* Grover search of a four-entry database on the box cluster.

Outcome s_j = 0 means projection onto |a+>. A "1" outcome injects a
known Pauli byproduct; the active policy compensates by adapting later
measurement bases and applying frame corrections to the output qubits,
which makes every branch land on the same output state. With the policy
off, raw branch outputs are reported as they come.

Frames: the rotation's output is reported in the cluster-computational
frame where the R_x R_z identity holds; the laboratory polarization view
of that qubit is one Hadamard away. The two-qubit gate and Grover read
their outputs directly in the frame of the horseshoe / box cluster.

Each run draws one seeded generator and gives every shot its own row of
uniform variates, so shot-level parallelism cannot reorder results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import product

import numpy as np

from . import _accel
from .cluster import build_box_cluster, build_cluster_state, local_equivalent
from .core import (
    CPHASE,
    HADAMARD,
    KET_PLUS,
    SIGMA_X,
    SIGMA_Z,
    DensityMatrix,
    MeasurementBasis,
    StateVector,
    apply_unitary,
    born_probabilities,
    collapse,
    rotation_x,
    rotation_z,
    to_density,
)
from .metrics import fidelity

_DEAD_BRANCH_TOL = 1e-12

#: Outcomes are plain ints: 0 projects onto |a+>, 1 onto |a->.
Outcome = int


class FeedForwardPolicy(str, Enum):
    """Whether measurement adaptation and Pauli corrections are applied."""

    ACTIVE = "active"
    OFF = "off"


@dataclass(frozen=True)
class PauliFrame:
    """Accumulated byproduct exponents per output qubit.

    Applying the frame acts with sigma_x^x sigma_z^z on each qubit; the
    powers are bits because Paulis square to the identity.
    """

    x_powers: tuple
    z_powers: tuple

    def __post_init__(self):
        if len(self.x_powers) != len(self.z_powers):
            raise ValueError("x and z power lists differ in length")
        for b in (*self.x_powers, *self.z_powers):
            if b not in (0, 1):
                raise ValueError(f"Pauli powers must be bits, got {b}")


def branch_correction(frame: PauliFrame, state):
    """Apply sigma_x^x sigma_z^z per output qubit (z acts first)."""
    out = state
    for i, (x, z) in enumerate(zip(frame.x_powers, frame.z_powers), start=1):
        if z:
            out = apply_unitary(out, SIGMA_Z, (i,))
        if x:
            out = apply_unitary(out, SIGMA_X, (i,))
    return out


def measure_qubit(state, qubit: int, basis: MeasurementBasis, rng):
    """Sample one outcome by the Born rule and collapse the qubit away."""
    p0, _ = born_probabilities(state, qubit, basis)
    outcome = int(rng.random() >= p0)
    return outcome, collapse(state, qubit, basis, outcome)


# --------------------------------------------------------------------------
# analytic references (independent of the measurement machinery)

def ideal_rotation_output(alpha: float, beta: float) -> StateVector:
    """Error-free single-qubit result R_x(beta) R_z(alpha) |+>."""
    return StateVector(rotation_x(beta) @ rotation_z(alpha) @ KET_PLUS)


def ideal_two_qubit_output(alpha: float, beta: float) -> StateVector:
    """Error-free entangling-gate result (H x H)(R_z(a) x R_z(b)) CPhase |++>."""
    amp = np.kron(KET_PLUS, KET_PLUS)
    amp = CPHASE @ amp
    amp = np.kron(rotation_z(alpha), rotation_z(beta)) @ amp
    amp = np.kron(HADAMARD, HADAMARD) @ amp
    return StateVector(amp)


def grover_reference_distribution(tag: str) -> dict:
    """Gate-model Grover on two qubits: oracle sign flip, then inversion
    about the mean. Finds the tagged element with certainty."""
    _check_tag(tag)
    amp = np.kron(KET_PLUS, KET_PLUS)
    oracle = np.eye(4, dtype=complex)
    oracle[int(tag, 2), int(tag, 2)] = -1.0
    amp = oracle @ amp
    plus2 = np.kron(KET_PLUS, KET_PLUS)
    diffusion = 2.0 * np.outer(plus2, plus2.conj()) - np.eye(4)
    amp = diffusion @ amp
    probs = np.abs(amp) ** 2
    return {f"{k >> 1}{k & 1}": float(probs[k]) for k in range(4)}


# --------------------------------------------------------------------------
# branch-tree enumeration and sampling

@dataclass
class _Leaf:
    outcomes: tuple
    probability: float
    state: object  # StateVector | DensityMatrix | None for dead/terminal


def _enumerate_tree(initial, steps, collapse_last: bool):
    """Walk every outcome branch of a measurement plan exactly.

    ``steps[k](outcomes)`` returns (qubit, basis) for the k-th
    measurement given the earlier outcomes. Returns the leaves in path
    order plus the heap of outcome-0 probabilities used for sampling.
    """
    depth = len(steps)
    p0_heap = np.ones(2**depth - 1)
    leaves = [None] * (2**depth)

    def dead(outcomes, prob):
        pad = depth - len(outcomes)
        for bits in product((0, 1), repeat=pad):
            full = outcomes + bits
            leaves[int("".join(map(str, full)), 2)] = _Leaf(full, prob if pad == 0 else 0.0, None)

    def rec(state, outcomes, prob, node):
        k = len(outcomes)
        qubit, basis = steps[k](outcomes)
        p0, p1 = born_probabilities(state, qubit, basis)
        p0_heap[node] = p0
        last = k == depth - 1
        for outcome, p in ((0, p0), (1, p1)):
            path = outcomes + (outcome,)
            joint = prob * p
            if p <= _DEAD_BRANCH_TOL:
                dead(path, joint)
                continue
            if last:
                if collapse_last:
                    nxt = collapse(state, qubit, basis, outcome)
                else:
                    nxt = None
                leaves[int("".join(map(str, path)), 2)] = _Leaf(path, joint, nxt)
            else:
                nxt = collapse(state, qubit, basis, outcome)
                rec(nxt, path, joint, 2 * node + 1 + outcome)

    rec(initial, (), 1.0, 0)
    return leaves, p0_heap


def _sample_leaves(p0_heap, depth: int, shots: int, seed):
    rng = np.random.default_rng(seed)
    uniforms = rng.random((shots, depth))
    idx = _accel.walk_tree(p0_heap, uniforms)
    counts = np.bincount(idx, minlength=2**depth)
    return idx, counts


def _decode_outcomes(idx, depth: int) -> np.ndarray:
    bits = (idx[:, None] >> np.arange(depth - 1, -1, -1)) & 1
    return bits.astype(np.uint8)


def _as_dm(state) -> DensityMatrix:
    return to_density(state) if isinstance(state, StateVector) else state


# --------------------------------------------------------------------------
# results

@dataclass
class RunResult:
    """Aggregated outcome of one sampled measurement-pattern run."""

    experiment: str
    policy: FeedForwardPolicy
    alpha: float
    beta: float
    shots: int
    seed: object
    branch_counts: dict
    discarded: int
    branch_probabilities: dict
    branch_states: dict
    branch_fidelities: dict
    average_density_matrix: DensityMatrix
    average_fidelity: float
    exact_average_fidelity: float
    reference: StateVector
    shot_outcomes: np.ndarray = field(repr=False)

    def to_json_dict(self) -> dict:
        dm = self.average_density_matrix.matrix
        return {
            "experiment": self.experiment,
            "policy": self.policy.value,
            "alpha": self.alpha,
            "beta": self.beta,
            "shots": self.shots,
            "seed": self.seed,
            "branch_counts": dict(self.branch_counts),
            "discarded": self.discarded,
            "branch_probabilities": dict(self.branch_probabilities),
            "branch_fidelities": dict(self.branch_fidelities),
            "average_fidelity": self.average_fidelity,
            "exact_average_fidelity": self.exact_average_fidelity,
            "average_density_matrix": [
                [[float(z.real), float(z.imag)] for z in row] for row in dm
            ],
        }


@dataclass
class GroverResult:
    """Search outcome statistics over the four database elements."""

    tag: str
    policy: FeedForwardPolicy
    shots: int
    seed: object
    element_counts: dict
    probabilities: dict
    exact_probabilities: dict
    oracle_branch_counts: dict
    shot_outcomes: np.ndarray = field(repr=False)

    def to_json_dict(self) -> dict:
        return {
            "experiment": "grover",
            "tag": self.tag,
            "policy": self.policy.value,
            "shots": self.shots,
            "seed": self.seed,
            "element_counts": dict(self.element_counts),
            "probabilities": dict(self.probabilities),
            "exact_probabilities": dict(self.exact_probabilities),
            "oracle_branch_counts": dict(self.oracle_branch_counts),
        }


def _check_shots(shots: int):
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")


def _check_cluster(cluster, n: int):
    if cluster is None:
        return None
    if not isinstance(cluster, (StateVector, DensityMatrix)):
        raise TypeError(f"cluster must be StateVector or DensityMatrix, got {type(cluster)}")
    if cluster.n_qubits != n:
        raise ValueError(f"cluster must have {n} qubits, got {cluster.n_qubits}")
    return cluster


def _check_tag(tag: str):
    if tag not in ("00", "01", "10", "11"):
        raise ValueError(f"tag must be one of 00, 01, 10, 11, got {tag!r}")


# --------------------------------------------------------------------------
# the three computations

def run_single_qubit_rotation(
    alpha: float,
    beta: float,
    policy: FeedForwardPolicy = FeedForwardPolicy.ACTIVE,
    shots: int = 1,
    seed=None,
    cluster=None,
) -> RunResult:
    """Rotate the encoded |+> by R_x(beta) R_z(alpha) on the chain cluster.

    Qubit 1 is measured in {|+>, |->} to detach it; only the s1 = 0
    branch is kept (post-selected and counted as discarded otherwise).
    Qubit 2 is measured in B(alpha), qubit 3 in B(+-beta) where the sign
    follows (-1)^{s2} under the active policy. Active runs finish with
    sigma_z^{s2} sigma_x^{s3} on the output qubit.
    """
    _check_shots(shots)
    policy = FeedForwardPolicy(policy)
    initial = _check_cluster(cluster, 4) or build_cluster_state()

    def basis3(outcomes):
        s2 = outcomes[1]
        sign = -1.0 if (policy is FeedForwardPolicy.ACTIVE and s2 == 1) else 1.0
        return MeasurementBasis(sign * beta)

    steps = [
        lambda o: (1, MeasurementBasis(0.0)),
        lambda o: (1, MeasurementBasis(alpha)),
        lambda o: (1, basis3(o)),
    ]
    leaves, p0_heap = _enumerate_tree(initial, steps, collapse_last=True)
    idx, counts = _sample_leaves(p0_heap, 3, shots, seed)
    reference = ideal_rotation_output(alpha, beta)

    branch_states = {}
    branch_fid = {}
    exact_probs = {}
    kept_prob_total = 0.0
    for leaf in leaves:
        s1, s2, s3 = leaf.outcomes
        if s1 == 1 or leaf.state is None:
            continue
        out = apply_unitary(leaf.state, HADAMARD, (1,))
        if policy is FeedForwardPolicy.ACTIVE:
            out = branch_correction(PauliFrame((s3,), (s2,)), out)
        key = f"{s2}{s3}"
        branch_states[key] = out
        branch_fid[key] = fidelity(out, reference)
        exact_probs[key] = leaf.probability
        kept_prob_total += leaf.probability
    if kept_prob_total <= 0.0:
        raise ValueError("the preparation measurement never yields s1 = 0")
    exact_probs = {k: v / kept_prob_total for k, v in exact_probs.items()}

    branch_counts = {}
    discarded = 0
    for leaf_index, c in enumerate(counts):
        s1, s2, s3 = (leaf_index >> 2) & 1, (leaf_index >> 1) & 1, leaf_index & 1
        if s1 == 1:
            discarded += int(c)
        else:
            key = f"{s2}{s3}"
            branch_counts[key] = branch_counts.get(key, 0) + int(c)

    kept_total = sum(branch_counts.values())
    if kept_total == 0:
        raise RuntimeError("every shot was discarded by the s1 post-selection")
    dim = 2
    avg = np.zeros((dim, dim), dtype=complex)
    for key, c in branch_counts.items():
        if c and key in branch_states:
            avg += (c / kept_total) * _as_dm(branch_states[key]).matrix
    average_dm = DensityMatrix(avg)
    avg_fid = float(sum((branch_counts[k] / kept_total) * branch_fid[k]
                        for k in branch_counts if k in branch_fid))
    exact_avg = float(sum(exact_probs[k] * branch_fid[k] for k in exact_probs))

    return RunResult(
        experiment="rotation",
        policy=policy,
        alpha=alpha,
        beta=beta,
        shots=shots,
        seed=seed,
        branch_counts=branch_counts,
        discarded=discarded,
        branch_probabilities=exact_probs,
        branch_states=branch_states,
        branch_fidelities=branch_fid,
        average_density_matrix=average_dm,
        average_fidelity=avg_fid,
        exact_average_fidelity=exact_avg,
        reference=reference,
        shot_outcomes=_decode_outcomes(idx, 3),
    )


def run_two_qubit_gate(
    alpha: float,
    beta: float,
    policy: FeedForwardPolicy = FeedForwardPolicy.ACTIVE,
    shots: int = 1,
    seed=None,
    cluster=None,
) -> RunResult:
    """Entangle two encoded |+> qubits via the horseshoe measurement order.

    Qubits 2 and 3 are measured in B(alpha) and B(beta); the result
    lives on qubits 1 and 4. Byproducts need no basis adaptation here:
    the active policy applies sigma_x^{s2} on output qubit 1 and
    sigma_x^{s3} on output qubit 4.
    """
    _check_shots(shots)
    policy = FeedForwardPolicy(policy)
    prepared = _check_cluster(cluster, 4) or build_cluster_state()
    initial = local_equivalent(prepared, "horseshoe")

    steps = [
        lambda o: (2, MeasurementBasis(alpha)),
        lambda o: (2, MeasurementBasis(beta)),
    ]
    leaves, p0_heap = _enumerate_tree(initial, steps, collapse_last=True)
    idx, counts = _sample_leaves(p0_heap, 2, shots, seed)
    reference = ideal_two_qubit_output(alpha, beta)

    branch_states = {}
    branch_fid = {}
    exact_probs = {}
    for leaf in leaves:
        if leaf.state is None:
            continue
        s2, s3 = leaf.outcomes
        out = leaf.state
        if policy is FeedForwardPolicy.ACTIVE:
            out = branch_correction(PauliFrame((s2, s3), (0, 0)), out)
        key = f"{s2}{s3}"
        branch_states[key] = out
        branch_fid[key] = fidelity(out, reference)
        exact_probs[key] = leaf.probability
    total = sum(exact_probs.values())
    exact_probs = {k: v / total for k, v in exact_probs.items()}

    branch_counts = {f"{i >> 1}{i & 1}": int(c) for i, c in enumerate(counts)}
    avg = np.zeros((4, 4), dtype=complex)
    for key, c in branch_counts.items():
        if c and key in branch_states:
            avg += (c / shots) * _as_dm(branch_states[key]).matrix
    average_dm = DensityMatrix(avg)
    avg_fid = float(sum((branch_counts[k] / shots) * branch_fid.get(k, 0.0)
                        for k in branch_counts))
    exact_avg = float(sum(exact_probs[k] * branch_fid[k] for k in exact_probs))

    return RunResult(
        experiment="two_qubit",
        policy=policy,
        alpha=alpha,
        beta=beta,
        shots=shots,
        seed=seed,
        branch_counts=branch_counts,
        discarded=0,
        branch_probabilities=exact_probs,
        branch_states=branch_states,
        branch_fidelities=branch_fid,
        average_density_matrix=average_dm,
        average_fidelity=avg_fid,
        exact_average_fidelity=exact_avg,
        reference=reference,
        shot_outcomes=_decode_outcomes(idx, 2),
    )


#: Readout relabeling per oracle branch (s2, s3) -> (flip on qubit 1, flip
#: on qubit 4). Frozen from exhaustive enumeration of the 16 branch/readout
#: combinations on the exact box cluster: the ideal readout is r1 = s3,
#: r4 = s2, so each oracle "error" crosses over to the other rail.
#: Relabeling by these bits is exactly equivalent to applying sigma_z on
#: the corresponding output qubit before the B(pi) readout.
GROVER_READOUT_CORRECTION = {
    (0, 0): (0, 0),
    (0, 1): (1, 0),
    (1, 0): (0, 1),
    (1, 1): (1, 1),
}


def run_grover(
    tag: str,
    policy: FeedForwardPolicy = FeedForwardPolicy.ACTIVE,
    shots: int = 1,
    seed=None,
    cluster=None,
) -> GroverResult:
    """Single-iteration Grover search on the box cluster.

    The oracle measures qubits 2 and 3 in B(pi); qubits 1 and 4 are read
    out in B(pi). Under the active policy the readout bits are
    reinterpreted through :data:`GROVER_READOUT_CORRECTION` plus the
    requested tag, which reports the tagged element with certainty on
    the ideal cluster. With the policy off the raw readout is reported.
    """
    _check_tag(tag)
    _check_shots(shots)
    policy = FeedForwardPolicy(policy)
    initial = _check_cluster(cluster, 4) or build_box_cluster()

    pi_basis = MeasurementBasis(np.pi)
    steps = [
        lambda o: (2, pi_basis),
        lambda o: (2, pi_basis),
        lambda o: (1, pi_basis),
        lambda o: (1, pi_basis),
    ]
    leaves, p0_heap = _enumerate_tree(initial, steps, collapse_last=False)
    idx, counts = _sample_leaves(p0_heap, 4, shots, seed)

    t1, t2 = int(tag[0]), int(tag[1])

    def element_of(s2, s3, r1, r4):
        if policy is FeedForwardPolicy.ACTIVE:
            c1, c4 = GROVER_READOUT_CORRECTION[(s2, s3)]
            return f"{r1 ^ c1 ^ t1}{r4 ^ c4 ^ t2}"
        return f"{r1}{r4}"

    elements = ("00", "01", "10", "11")
    exact = dict.fromkeys(elements, 0.0)
    for leaf in leaves:
        s2, s3, r1, r4 = leaf.outcomes
        exact[element_of(s2, s3, r1, r4)] += leaf.probability

    element_counts = dict.fromkeys(elements, 0)
    oracle_counts = {}
    for leaf_index, c in enumerate(counts):
        if not c:
            continue
        bits = [(leaf_index >> k) & 1 for k in (3, 2, 1, 0)]
        s2, s3, r1, r4 = bits
        element_counts[element_of(s2, s3, r1, r4)] += int(c)
        key = f"{s2}{s3}"
        oracle_counts[key] = oracle_counts.get(key, 0) + int(c)

    probabilities = {k: v / shots for k, v in element_counts.items()}
    return GroverResult(
        tag=tag,
        policy=policy,
        shots=shots,
        seed=seed,
        element_counts=element_counts,
        probabilities=probabilities,
        exact_probabilities=exact,
        oracle_branch_counts=oracle_counts,
        shot_outcomes=_decode_outcomes(idx, 4),
    )
