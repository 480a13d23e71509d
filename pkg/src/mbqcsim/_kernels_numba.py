"""Numba-compiled twins of the kernels in ``_kernels_numpy``.

Importing this module requires numba. Compilation results are cached on
disk, so only the first call in a fresh environment pays the JIT cost.
"""

import numpy as np
from numba import njit

_TINY = 1e-300


@njit(cache=True)
def _probs_loglik_nb(V, Vc, counts, scales, T):
    K, d = V.shape
    A = np.dot(T.conj().T, T)
    t = 0.0
    for i in range(d):
        t += A[i, i].real
    rho = A / t
    W = np.dot(Vc, rho)
    p = np.empty(K)
    for k in range(K):
        acc = 0j
        for j in range(d):
            acc += W[k, j] * V[k, j]
        p[k] = acc.real if acc.real > _TINY else _TINY
    ll = 0.0
    for k in range(K):
        mu = scales[k] * p[k]
        if counts[k] > 0.0:
            ll += counts[k] * np.log(mu if mu > _TINY else _TINY)
        ll -= mu
    return rho, p, ll


@njit(cache=True)
def _gradient_nb(V, Vc, counts, scales, T, rho, p):
    K, d = V.shape
    c = counts / p - scales
    G = np.dot(V.T * c, Vc)
    tr_grho = 0.0
    for i in range(d):
        acc = 0j
        for j in range(d):
            acc += G[i, j] * rho[j, i]
        tr_grho += acc.real
    t = 0.0
    A = np.dot(T.conj().T, T)
    for i in range(d):
        t += A[i, i].real
    M = G.copy()
    for i in range(d):
        M[i, i] -= tr_grho
    grad = (2.0 / t) * np.dot(T, M)
    for i in range(d):
        for j in range(d):
            if j > i:
                grad[i, j] = 0.0
            elif j == i:
                grad[i, j] = complex(grad[i, j].real, 0.0)
    return grad


@njit(cache=True)
def mle_ascent(V, Vc, counts, scales, T0, max_iter, rel_tol):
    d = T0.shape[0]
    T = T0.copy()
    hist = np.empty(max_iter + 1)
    rho, p, ll = _probs_loglik_nb(V, Vc, counts, scales, T)
    hist[0] = ll
    grad = _gradient_nb(V, Vc, counts, scales, T, rho, p)
    gnorm = 0.0
    for i in range(d):
        for j in range(d):
            gnorm += abs(grad[i, j]) ** 2
    gnorm = np.sqrt(gnorm)
    eta = 1.0 / max(1.0, gnorm)
    n_iter = 0
    converged = False
    for it in range(max_iter):
        accepted = False
        ll_new = ll
        T_new = T
        for _ in range(80):
            T_try = T + eta * grad
            _, _, ll_try = _probs_loglik_nb(V, Vc, counts, scales, T_try)
            if ll_try >= ll:
                accepted = True
                T_new = T_try
                ll_new = ll_try
                break
            eta *= 0.5
        n_iter = it + 1
        hist[n_iter] = ll_new
        if not accepted:
            converged = True
            break
        improvement = (ll_new - ll) / max(1.0, abs(ll))
        T = T_new
        ll = ll_new
        rho, p, _ = _probs_loglik_nb(V, Vc, counts, scales, T)
        grad = _gradient_nb(V, Vc, counts, scales, T, rho, p)
        gnorm = 0.0
        for i in range(d):
            for j in range(d):
                gnorm += abs(grad[i, j]) ** 2
        gnorm = np.sqrt(gnorm)
        eta *= 1.3
        if improvement < rel_tol:
            converged = True
            break
    return T, hist[: n_iter + 1], n_iter, converged, gnorm


@njit(cache=True)
def chsh_pair_scan(U):
    m = U.shape[0]
    best = -1.0
    bi = 0
    bj = 0
    for i in range(m):
        for j in range(i, m):
            sp = 0.0
            sm = 0.0
            for q in range(3):
                a = U[i, q] + U[j, q]
                b = U[i, q] - U[j, q]
                sp += a * a
                sm += b * b
            s = np.sqrt(sp) + np.sqrt(sm)
            if s > best:
                best = s
                bi = i
                bj = j
    return best, bi, bj


@njit(cache=True)
def walk_tree(p0, uniforms):
    shots, depth = uniforms.shape
    leaves = np.empty(shots, dtype=np.int64)
    offset = 2**depth - 1
    for k in range(shots):
        node = 0
        for step in range(depth):
            if uniforms[k, step] >= p0[node]:
                node = 2 * node + 2
            else:
                node = 2 * node + 1
        leaves[k] = node - offset
    return leaves
