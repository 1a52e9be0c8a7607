# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the iterative kernels in :mod:`sideinfo._pykernels`."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, exp, INFINITY

cnp.import_array()

NAME = "cython"


cdef inline void _softmax(double[::1] a, double[::1] out) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0], i
    cdef double m = -INFINITY, tot = 0.0
    for i in range(n):
        if a[i] > m:
            m = a[i]
    for i in range(n):
        if a[i] == -INFINITY:
            out[i] = 0.0
        else:
            out[i] = exp(a[i] - m)
        tot += out[i]
    for i in range(n):
        out[i] /= tot


def ba(W, p0, double tol, Py_ssize_t max_iter):
    cdef double[:, ::1] w = np.ascontiguousarray(W, dtype=np.float64)
    cdef Py_ssize_t nt = w.shape[0], nz = w.shape[1], t, z, it = 0
    p_arr = np.array(p0, dtype=np.float64)
    cdef double[::1] p = p_arr
    cdef double[::1] r = np.empty(nz)
    cdef double[::1] logr = np.empty(nz)
    cdef double[::1] D = np.empty(nt)
    cdef double[::1] a = np.empty(nt)
    cdef double[:, ::1] logw = np.zeros((nt, nz))
    cdef double lower = 0.0, upper = 0.0, m, tot, acc
    hist = []
    for t in range(nt):
        for z in range(nz):
            if w[t, z] > 0:
                logw[t, z] = log(w[t, z])
    while True:
        with nogil:
            for z in range(nz):
                r[z] = 0.0
            for t in range(nt):
                if p[t] > 0:
                    for z in range(nz):
                        r[z] += p[t] * w[t, z]
            for z in range(nz):
                logr[z] = log(r[z]) if r[z] > 0 else -INFINITY
            lower = 0.0
            upper = -INFINITY
            for t in range(nt):
                acc = 0.0
                for z in range(nz):
                    if w[t, z] > 0:
                        acc += w[t, z] * (logw[t, z] - logr[z])
                D[t] = acc
                if p[t] > 0:
                    lower += p[t] * acc
                if acc > upper:
                    upper = acc
        hist.append(lower)
        if upper - lower <= tol or it >= max_iter:
            break
        it += 1
        with nogil:
            m = -INFINITY
            for t in range(nt):
                a[t] = log(p[t]) + D[t] if p[t] > 0 else -INFINITY
                if a[t] > m:
                    m = a[t]
            tot = 0.0
            for t in range(nt):
                p[t] = exp(a[t] - m) if a[t] != -INFINITY else 0.0
                tot += p[t]
            for t in range(nt):
                p[t] /= tot
    return p_arr, lower, upper, it, np.array(hist)


def gp(W, ps_in, q0, double tol, Py_ssize_t max_iter, bint causal):
    cdef double[:, :, ::1] w = np.ascontiguousarray(W, dtype=np.float64)
    cdef double[::1] ps = np.ascontiguousarray(ps_in, dtype=np.float64)
    cdef Py_ssize_t ns = w.shape[0], nt = w.shape[1], nz = w.shape[2], s, t, z, it = 0
    q_arr = np.array(q0, dtype=np.float64)
    cdef double[:, ::1] q = q_arr
    cdef double[:, ::1] logphi = np.empty((nt, nz))
    cdef double[::1] pz = np.empty(nz)
    cdef double[::1] a = np.empty(nt)
    cdef double[::1] row = np.empty(nt)
    cdef double[:, ::1] A = np.empty((ns, nt))
    cdef double value = 0.0, prev = -INFINITY, acc, lq, pw
    hist = []
    while True:
        with nogil:
            for t in range(nt):
                for z in range(nz):
                    logphi[t, z] = 0.0
            for s in range(ns):
                if ps[s] <= 0:
                    continue
                for t in range(nt):
                    pw = ps[s] * q[s, t]
                    if pw > 0:
                        for z in range(nz):
                            logphi[t, z] += pw * w[s, t, z]
            for z in range(nz):
                pz[z] = 0.0
            for t in range(nt):
                for z in range(nz):
                    pz[z] += logphi[t, z]
            for t in range(nt):
                for z in range(nz):
                    logphi[t, z] = log(logphi[t, z] / pz[z]) if logphi[t, z] > 0 else -INFINITY
            value = 0.0
            for s in range(ns):
                if ps[s] <= 0:
                    continue
                for t in range(nt):
                    if q[s, t] <= 0:
                        continue
                    lq = log(q[s, t])
                    pw = ps[s] * q[s, t]
                    for z in range(nz):
                        if pw * w[s, t, z] > 0:
                            value += pw * w[s, t, z] * (logphi[t, z] - lq)
        hist.append(value)
        if value - prev < tol or it >= max_iter:
            break
        prev = value
        it += 1
        with nogil:
            for s in range(ns):
                for t in range(nt):
                    acc = 0.0
                    for z in range(nz):
                        if w[s, t, z] > 0:
                            acc += w[s, t, z] * logphi[t, z]
                    A[s, t] = acc
            if causal:
                for t in range(nt):
                    acc = 0.0
                    for s in range(ns):
                        if ps[s] > 0:
                            acc += ps[s] * A[s, t]
                    a[t] = acc
                _softmax(a, row)
                for s in range(ns):
                    for t in range(nt):
                        q[s, t] = row[t]
            else:
                for s in range(ns):
                    if ps[s] <= 0:
                        continue
                    _softmax(A[s], row)
                    for t in range(nt):
                        q[s, t] = row[t]
    return q_arr, value, it, np.array(hist)


cdef void _mac_logphi(double[:, :, :, :, ::1] w, double[:, ::1] p12, double[:, ::1] q1,
                      double[:, ::1] q2, double[:, :, ::1] logphi, double[::1] pz) noexcept nogil:
    cdef Py_ssize_t n1 = w.shape[0], n2 = w.shape[1], nt1 = w.shape[2], nt2 = w.shape[3], nz = w.shape[4]
    cdef Py_ssize_t a, b, i, j, z
    cdef double pa, pab
    for i in range(nt1):
        for j in range(nt2):
            for z in range(nz):
                logphi[i, j, z] = 0.0
    for a in range(n1):
        for b in range(n2):
            if p12[a, b] <= 0:
                continue
            for i in range(nt1):
                pa = p12[a, b] * q1[a, i]
                if pa <= 0:
                    continue
                for j in range(nt2):
                    pab = pa * q2[b, j]
                    if pab <= 0:
                        continue
                    for z in range(nz):
                        logphi[i, j, z] += pab * w[a, b, i, j, z]
    for z in range(nz):
        pz[z] = 0.0
    for i in range(nt1):
        for j in range(nt2):
            for z in range(nz):
                pz[z] += logphi[i, j, z]
    for i in range(nt1):
        for j in range(nt2):
            for z in range(nz):
                logphi[i, j, z] = log(logphi[i, j, z] / pz[z]) if logphi[i, j, z] > 0 else -INFINITY


cdef inline double _dot_log(double[:, :, :, :, ::1] w, double[:, :, ::1] logphi,
                            Py_ssize_t a, Py_ssize_t b, Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t z
    cdef double acc = 0.0
    for z in range(w.shape[4]):
        if w[a, b, i, j, z] > 0:
            acc += w[a, b, i, j, z] * logphi[i, j, z]
    return acc


def mac(W, p12_in, q1_0, q2_0, double tol, Py_ssize_t max_iter, bint causal):
    cdef double[:, :, :, :, ::1] w = np.ascontiguousarray(W, dtype=np.float64)
    cdef double[:, ::1] p12 = np.ascontiguousarray(p12_in, dtype=np.float64)
    cdef Py_ssize_t n1 = w.shape[0], n2 = w.shape[1], nt1 = w.shape[2], nt2 = w.shape[3], nz = w.shape[4]
    cdef Py_ssize_t a, b, i, j, z, it = 0
    q1_arr = np.array(q1_0, dtype=np.float64)
    q2_arr = np.array(q2_0, dtype=np.float64)
    cdef double[:, ::1] q1 = q1_arr
    cdef double[:, ::1] q2 = q2_arr
    p1_arr = np.asarray(p12_in, dtype=np.float64).sum(1)
    p2_arr = np.asarray(p12_in, dtype=np.float64).sum(0)
    cdef double[::1] p1 = p1_arr
    cdef double[::1] p2 = p2_arr
    cdef double[:, :, ::1] logphi = np.empty((nt1, nt2, nz))
    cdef double[::1] pz = np.empty(nz)
    cdef double[:, ::1] B1 = np.empty((n1, nt1))
    cdef double[:, ::1] B2 = np.empty((n2, nt2))
    cdef double[::1] a1 = np.empty(nt1)
    cdef double[::1] a2 = np.empty(nt2)
    cdef double[::1] r1 = np.empty(nt1)
    cdef double[::1] r2 = np.empty(nt2)
    cdef double value = 0.0, prev = -INFINITY, pab, l1, l2, acc, c
    hist = []
    while True:
        with nogil:
            _mac_logphi(w, p12, q1, q2, logphi, pz)
            value = 0.0
            for a in range(n1):
                for b in range(n2):
                    if p12[a, b] <= 0:
                        continue
                    for i in range(nt1):
                        if q1[a, i] <= 0:
                            continue
                        l1 = log(q1[a, i])
                        for j in range(nt2):
                            if q2[b, j] <= 0:
                                continue
                            l2 = log(q2[b, j])
                            pab = p12[a, b] * q1[a, i] * q2[b, j]
                            for z in range(nz):
                                if pab * w[a, b, i, j, z] > 0:
                                    value += pab * w[a, b, i, j, z] * (logphi[i, j, z] - l1 - l2)
        hist.append(value)
        if value - prev < tol or it >= max_iter:
            break
        prev = value
        it += 1
        with nogil:
            # user 1
            for a in range(n1):
                for i in range(nt1):
                    B1[a, i] = 0.0
            for a in range(n1):
                if p1[a] <= 0:
                    continue
                for b in range(n2):
                    if p12[a, b] <= 0:
                        continue
                    c = p12[a, b] / p1[a]
                    for i in range(nt1):
                        acc = 0.0
                        for j in range(nt2):
                            if q2[b, j] > 0:
                                acc += q2[b, j] * _dot_log(w, logphi, a, b, i, j)
                        B1[a, i] += c * acc
            if causal:
                for i in range(nt1):
                    acc = 0.0
                    for a in range(n1):
                        if p1[a] > 0:
                            acc += p1[a] * B1[a, i]
                    a1[i] = acc
                _softmax(a1, r1)
                for a in range(n1):
                    for i in range(nt1):
                        q1[a, i] = r1[i]
            else:
                for a in range(n1):
                    if p1[a] <= 0:
                        continue
                    _softmax(B1[a], r1)
                    for i in range(nt1):
                        q1[a, i] = r1[i]
            # user 2 against the refreshed posterior
            _mac_logphi(w, p12, q1, q2, logphi, pz)
            for b in range(n2):
                for j in range(nt2):
                    B2[b, j] = 0.0
            for b in range(n2):
                if p2[b] <= 0:
                    continue
                for a in range(n1):
                    if p12[a, b] <= 0:
                        continue
                    c = p12[a, b] / p2[b]
                    for j in range(nt2):
                        acc = 0.0
                        for i in range(nt1):
                            if q1[a, i] > 0:
                                acc += q1[a, i] * _dot_log(w, logphi, a, b, i, j)
                        B2[b, j] += c * acc
            if causal:
                for j in range(nt2):
                    acc = 0.0
                    for b in range(n2):
                        if p2[b] > 0:
                            acc += p2[b] * B2[b, j]
                    a2[j] = acc
                _softmax(a2, r2)
                for b in range(n2):
                    for j in range(nt2):
                        q2[b, j] = r2[j]
            else:
                for b in range(n2):
                    if p2[b] <= 0:
                        continue
                    _softmax(B2[b], r2)
                    for j in range(nt2):
                        q2[b, j] = r2[j]
    return q1_arr, q2_arr, value, it, np.array(hist)
