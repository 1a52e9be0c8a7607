"""Pure numpy implementations of the iterative kernels.

These are the fallback for :mod:`sideinfo._ckernels` and share its
signatures exactly. All quantities are in nats.
"""
import numpy as np

NAME = "python"


def ba(W, p0, tol, max_iter):
    """Blahut-Arimoto on ``W[t, z]`` from ``p0``.

    Returns ``(p, lower, upper, iterations, history)``; ``lower`` is I(p)
    and ``upper`` the dual bound ``max_t D(W_t || pW)``.
    """
    W = np.ascontiguousarray(W, dtype=float)
    p = np.array(p0, dtype=float)
    pos = W > 0
    logW = np.log(np.where(pos, W, 1.0))
    history = []
    it = 0
    while True:
        r = p @ W
        with np.errstate(divide="ignore", invalid="ignore"):
            logr = np.log(r)
            # masked entries may form 0 * inf before np.where discards them
            D = np.where(pos, W * (logW - logr[None, :]), 0.0).sum(1)
        lower = float(p[p > 0] @ D[p > 0])
        upper = float(D.max())
        history.append(lower)
        if upper - lower <= tol or it >= max_iter:
            break
        it += 1
        with np.errstate(divide="ignore"):
            a = np.log(p) + D
        a -= a[np.isfinite(a)].max()
        p = np.exp(a)
        p /= p.sum()
    return p, lower, upper, it, np.array(history)


def _posterior_log(j):
    pz = j.sum(axis=tuple(range(j.ndim - 1)))
    with np.errstate(divide="ignore"):
        return np.log(j) - np.log(np.where(pz > 0, pz, 1.0))


def _softmax_rows(a):
    m = a.max(axis=-1, keepdims=True)
    e = np.exp(a - m)
    return e / e.sum(axis=-1, keepdims=True)


def gp(W, ps, q0, tol, max_iter, causal):
    """Alternating ascent of I(T;Z) - I(T;S) over ``q[s, t] = P(t | s)``.

    ``W[s, t, z] = P(z | t, s)``. With ``causal`` the rows of ``q`` are tied
    (T independent of S) and the subtractive term vanishes.
    Returns ``(q, value, iterations, history)``.
    """
    W = np.ascontiguousarray(W, dtype=float)
    ps = np.asarray(ps, dtype=float)
    q = np.array(q0, dtype=float)
    live = ps > 0
    history = []
    prev = -np.inf
    it = 0
    while True:
        j = np.einsum("s,st,stz->tz", ps, q, W)
        logphi = _posterior_log(j)
        with np.errstate(divide="ignore", invalid="ignore"):
            logq = np.log(q)
            pw = (ps[:, None] * q)[:, :, None] * W
            terms = np.where(pw > 0, pw * (logphi[None, :, :] - logq[:, :, None]), 0.0)
        value = float(terms.sum())
        history.append(value)
        if value - prev < tol or it >= max_iter:
            break
        prev = value
        it += 1
        with np.errstate(invalid="ignore"):
            A = np.where(W > 0, W * logphi[None, :, :], 0.0).sum(-1)
        if causal:
            a = (ps[:, None] * A).sum(0)
            q = np.broadcast_to(_softmax_rows(a), q.shape).copy()
        else:
            q[live] = _softmax_rows(A[live])
    return q, value, it, np.array(history)


def mac(W, p12, q1_0, q2_0, tol, max_iter, causal):
    """Coordinate ascent of I(T1,T2;Z) - I(T1;S1) - I(T2;S2).

    ``W[s1, s2, t1, t2, z]``, ``p12[s1, s2]``, ``q1[s1, t1]``, ``q2[s2, t2]``.
    With ``causal`` each user's rows are tied. Returns
    ``(q1, q2, value, iterations, history)``.
    """
    W = np.ascontiguousarray(W, dtype=float)
    p12 = np.asarray(p12, dtype=float)
    q1 = np.array(q1_0, dtype=float)
    q2 = np.array(q2_0, dtype=float)
    p1, p2 = p12.sum(1), p12.sum(0)
    live1, live2 = p1 > 0, p2 > 0
    c1 = np.divide(p12, p1[:, None], out=np.zeros_like(p12), where=live1[:, None])
    c2 = np.divide(p12, p2[None, :], out=np.zeros_like(p12), where=live2[None, :])

    def logphi_of(q1, q2):
        j = np.einsum("ab,ai,bj,abijz->ijz", p12, q1, q2, W)
        return _posterior_log(j)

    def G_of(logphi):
        with np.errstate(invalid="ignore"):
            return np.where(W > 0, W * logphi[None, None], 0.0).sum(-1)

    history = []
    prev = -np.inf
    it = 0
    while True:
        logphi = logphi_of(q1, q2)
        with np.errstate(divide="ignore", invalid="ignore"):
            l1, l2 = np.log(q1), np.log(q2)
            pw = np.einsum("ab,ai,bj->abij", p12, q1, q2)[..., None] * W
            body = logphi[None, None] - l1[:, None, :, None, None] - l2[None, :, None, :, None]
            terms = np.where(pw > 0, pw * body, 0.0)
        value = float(terms.sum())
        history.append(value)
        if value - prev < tol or it >= max_iter:
            break
        prev = value
        it += 1
        G = G_of(logphi)
        B1 = np.einsum("ab,bj,abij->ai", c1, q2, G)
        if causal:
            q1 = np.broadcast_to(_softmax_rows(p1 @ B1), q1.shape).copy()
        else:
            q1[live1] = _softmax_rows(B1[live1])
        G = G_of(logphi_of(q1, q2))
        B2 = np.einsum("ab,ai,abij->bj", c2, q1, G)
        if causal:
            q2 = np.broadcast_to(_softmax_rows(p2 @ B2), q2.shape).copy()
        else:
            q2[live2] = _softmax_rows(B2[live2])
    return q1, q2, value, it, np.array(history)
