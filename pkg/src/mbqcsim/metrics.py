"""State-quality and entanglement measures.

fidelity     - overlap with a pure target state
witness      - the F > 1/2 genuine-entanglement threshold for clusters
tangle       - squared Wootters concurrence (two qubits)
chsh_max     - largest CHSH value, closed form from the correlation matrix
chsh_max_grid- the same quantity by exhaustive angle search, kept as an
               independent cross-check of the closed form
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import _accel
from .core import SIGMA_X, SIGMA_Y, SIGMA_Z, DensityMatrix, StateVector, to_density

_PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def _as_density(state) -> DensityMatrix:
    if isinstance(state, StateVector):
        return to_density(state)
    if isinstance(state, DensityMatrix):
        return state
    raise TypeError(f"expected StateVector or DensityMatrix, got {type(state)}")


def fidelity(rho, target: StateVector) -> float:
    """<target| rho |target>, clamped to [0, 1] against round-off."""
    dm = _as_density(rho)
    if dm.dim != target.dim:
        raise ValueError(f"dimension mismatch: state {dm.dim}, target {target.dim}")
    t = target.amplitudes
    val = float((t.conj() @ dm.matrix @ t).real)
    return min(1.0, max(0.0, val))


def witness(f: float) -> bool:
    """True when the fidelity certifies genuine multipartite entanglement.

    The threshold is strict: exactly 1/2 does not pass.
    """
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"fidelity {f} outside [0, 1]")
    return f > 0.5


def tangle(rho) -> float:
    """Squared concurrence of a two-qubit state.

    C = max(0, l1 - l2 - l3 - l4) with l_i the descending square roots of
    the eigenvalues of rho (sy x sy) rho* (sy x sy). Round-off can push
    those eigenvalues slightly negative; anything above -1e-10 is clamped.
    """
    dm = _as_density(rho)
    if dm.n_qubits != 2:
        raise ValueError(f"tangle is defined for 2 qubits, got {dm.n_qubits}")
    yy = np.kron(SIGMA_Y, SIGMA_Y)
    m = dm.matrix @ yy @ dm.matrix.conj() @ yy
    ev = np.linalg.eigvals(m).real
    if np.min(ev) < -1e-10:
        raise ValueError(f"spin-flip spectrum has eigenvalue {np.min(ev):.3e}")
    lam = np.sqrt(np.clip(ev, 0.0, None))
    lam[::-1].sort()
    c = max(0.0, lam[0] - lam[1] - lam[2] - lam[3])
    return c * c


def correlation_matrix(rho) -> np.ndarray:
    """T_ij = tr(rho sigma_i x sigma_j) for i, j in (x, y, z)."""
    dm = _as_density(rho)
    if dm.n_qubits != 2:
        raise ValueError(f"correlation matrix needs 2 qubits, got {dm.n_qubits}")
    t = np.empty((3, 3))
    for i, si in enumerate(_PAULIS):
        for j, sj in enumerate(_PAULIS):
            t[i, j] = np.trace(dm.matrix @ np.kron(si, sj)).real
    return t


def bloch_vector(rho) -> np.ndarray:
    """(x, y, z) Bloch components of a single-qubit state."""
    dm = _as_density(rho)
    if dm.n_qubits != 1:
        raise ValueError(f"Bloch vector needs 1 qubit, got {dm.n_qubits}")
    return np.array([np.trace(dm.matrix @ s).real for s in _PAULIS])


def chsh_max(rho) -> float:
    """Largest CHSH value S = 2 sqrt(u1 + u2).

    u1 >= u2 are the two largest eigenvalues of T^t T for the spin
    correlation matrix T. S > 2 rules out local realism; the ceiling is
    2 sqrt(2).
    """
    t = correlation_matrix(rho)
    w = np.linalg.eigvalsh(t.T @ t)
    return float(2.0 * np.sqrt(w[-1] + w[-2]))


def _sphere_directions(n_theta: int, n_phi: int) -> np.ndarray:
    thetas = np.linspace(0.0, np.pi, n_theta)
    phis = np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False)
    t, p = np.meshgrid(thetas, phis, indexing="ij")
    t = t.ravel()
    p = p.ravel()
    return np.stack(
        [np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], axis=1
    ), t, p


def _dir(theta: float, phi: float) -> np.ndarray:
    return np.array(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
    )


def chsh_max_grid(
    rho,
    n_theta: int = 24,
    n_phi: int = 48,
    refine_rounds: int = 7,
) -> float:
    """CHSH maximum by brute-force search over measurement directions.

    One party's two settings are scanned over a sphere grid; the other
    party's optimal settings are analytic for fixed directions (b along
    T^t(a + a'), b' along T^t(a - a')), so each pair scores
    |T^t(a+a')| + |T^t(a-a')|. The best grid pair is then refined by
    shrinking local grids. Slow; exists to cross-check :func:`chsh_max`.
    """
    t_mat = correlation_matrix(rho)
    dirs, thetas, phis = _sphere_directions(n_theta, n_phi)
    u = np.ascontiguousarray(dirs @ t_mat)
    best, bi, bj = _accel.chsh_pair_scan(u)
    a = [thetas[bi], phis[bi]]
    b = [thetas[bj], phis[bj]]
    span = np.pi / n_theta
    offsets = np.linspace(-1.0, 1.0, 9)
    for _ in range(refine_rounds):
        cand_a = [(a[0] + span * da, a[1] + span * db) for da in offsets for db in offsets]
        cand_b = [(b[0] + span * da, b[1] + span * db) for da in offsets for db in offsets]
        ua = np.array([_dir(t, p) for t, p in cand_a]) @ t_mat
        ub = np.array([_dir(t, p) for t, p in cand_b]) @ t_mat
        s = np.linalg.norm(ua[:, None, :] + ub[None, :, :], axis=2)
        s += np.linalg.norm(ua[:, None, :] - ub[None, :, :], axis=2)
        k = int(np.argmax(s))
        ia, ib = divmod(k, len(cand_b))
        if s.ravel()[k] > best:
            best = float(s.ravel()[k])
            a = list(cand_a[ia])
            b = list(cand_b[ib])
        span *= 0.35
    return best


@dataclass(frozen=True)
class MetricReport:
    """Bundle of the standard quality numbers for one output state."""

    fidelity: float
    witness_pass: bool
    tangle: float | None = None
    chsh_s: float | None = None

    def to_json_dict(self) -> dict:
        return asdict(self)


def report_for(rho, target: StateVector) -> MetricReport:
    """Fidelity plus, for two-qubit states, tangle and CHSH maximum."""
    dm = _as_density(rho)
    f = fidelity(dm, target)
    if dm.n_qubits == 2:
        return MetricReport(
            fidelity=f, witness_pass=witness(f), tangle=tangle(dm), chsh_s=chsh_max(dm)
        )
    return MetricReport(fidelity=f, witness_pass=witness(f))
