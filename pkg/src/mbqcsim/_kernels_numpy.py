"""Pure-numpy implementations of the hot kernels.

Each function here has a numba twin in ``_kernels_numba`` with the same
signature and contract. Keep the two in sync; the test suite compares
their outputs.
"""

import numpy as np

_TINY = 1e-300


def _probs_loglik(V, Vc, counts, scales, T):
    """Probabilities and Poisson log-likelihood of the state T'T/tr(T'T).

    V holds one projector ket per row, counts/scales the observed counts
    and per-setting intensity for every projector.
    """
    A = T.conj().T @ T
    t = np.trace(A).real
    rho = A / t
    p = np.sum((Vc @ rho) * V, axis=1).real
    np.clip(p, _TINY, None, out=p)
    mu = scales * p
    ll = float(np.sum(counts * np.log(np.maximum(mu, _TINY))) - np.sum(mu))
    return rho, p, ll


def _gradient(V, Vc, counts, scales, T, rho, p, tril_mask):
    c = counts / p - scales
    G = (V.T * c) @ Vc
    tr_grho = np.trace(G @ rho).real
    t = np.trace(T.conj().T @ T).real
    grad = (2.0 / t) * (T @ (G - tr_grho * np.eye(T.shape[0])))
    grad = grad * tril_mask
    idx = np.arange(T.shape[0])
    grad[idx, idx] = grad[idx, idx].real
    return grad


def mle_ascent(V, Vc, counts, scales, T0, max_iter, rel_tol):
    """Monotone gradient ascent of the Poisson log-likelihood over T.

    T parameterizes the state as T'T / tr(T'T) with T lower triangular
    (real diagonal), so every iterate is a physical state. Backtracking
    keeps the likelihood non-decreasing; the step grows again after each
    accepted move. Returns (T, history, n_iter, converged, grad_norm).
    """
    d = T0.shape[0]
    T = T0.copy()
    tril = np.tril(np.ones((d, d)))
    hist = np.empty(max_iter + 1)
    rho, p, ll = _probs_loglik(V, Vc, counts, scales, T)
    hist[0] = ll
    grad = _gradient(V, Vc, counts, scales, T, rho, p, tril)
    gnorm = float(np.linalg.norm(grad))
    eta = 1.0 / max(1.0, gnorm)
    n_iter = 0
    converged = False
    for it in range(max_iter):
        accepted = False
        ll_new = ll
        T_new = T
        for _ in range(80):
            T_try = T + eta * grad
            _, _, ll_try = _probs_loglik(V, Vc, counts, scales, T_try)
            if ll_try >= ll:
                accepted = True
                T_new, ll_new = T_try, ll_try
                break
            eta *= 0.5
        n_iter = it + 1
        hist[n_iter] = ll_new
        if not accepted:
            converged = True
            break
        improvement = (ll_new - ll) / max(1.0, abs(ll))
        T, ll = T_new, ll_new
        rho, p, _ = _probs_loglik(V, Vc, counts, scales, T)
        grad = _gradient(V, Vc, counts, scales, T, rho, p, tril)
        gnorm = float(np.linalg.norm(grad))
        eta *= 1.3
        if improvement < rel_tol:
            converged = True
            break
    return T, hist[: n_iter + 1], n_iter, converged, gnorm


def chsh_pair_scan(U):
    """Best CHSH value over all direction pairs.

    U[i] = T^t a_i for the i-th candidate Bloch direction; the optimal
    second-party settings are analytic, leaving S_ij = |u_i + u_j| +
    |u_i - u_j|. Returns (best, i, j).
    """
    m = U.shape[0]
    best = -1.0
    bi = bj = 0
    chunk = 512
    for i0 in range(0, m, chunk):
        Ui = U[i0 : i0 + chunk]
        s = np.linalg.norm(Ui[:, None, :] + U[None, :, :], axis=2)
        s += np.linalg.norm(Ui[:, None, :] - U[None, :, :], axis=2)
        k = int(np.argmax(s))
        v = float(s.ravel()[k])
        if v > best:
            best = v
            bi = i0 + k // m
            bj = k % m
    return best, bi, bj


def walk_tree(p0, uniforms):
    """Vectorized walk of a binary outcome tree in heap layout.

    p0[node] is the probability of outcome 0 at that node; children of
    node i are 2i+1 and 2i+2. Row k of uniforms drives shot k. Returns
    the leaf index (path bits, first measurement = most significant).
    """
    shots, depth = uniforms.shape
    node = np.zeros(shots, dtype=np.int64)
    for step in range(depth):
        bit = (uniforms[:, step] >= p0[node]).astype(np.int64)
        node = 2 * node + 1 + bit
    return node - (2**depth - 1)
