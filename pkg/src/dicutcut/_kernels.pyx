# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; same contracts as dicutcut._pykernels."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def best_cuts_scan(int n, tails, heads):
    """Scan all 2^n assignments; returns
    (best_cut, best_cut_mask, best_dicut, best_dicut_mask)."""
    cdef long[::1] t = np.ascontiguousarray(tails, dtype=np.int64)
    cdef long[::1] h = np.ascontiguousarray(heads, dtype=np.int64)
    cdef int m = t.shape[0]
    cdef int[::1] su = np.empty(m, dtype=np.int32)
    cdef int[::1] sv = np.empty(m, dtype=np.int32)
    cdef int e
    for e in range(m):
        su[e] = n - <int>t[e]
        sv[e] = n - <int>h[e]
    cdef unsigned long total = (<unsigned long>1) << n
    cdef unsigned long mask
    cdef unsigned long best_cut_mask = 0, best_dic_mask = 0
    cdef int cut, dic, best_cut = -1, best_dic = -1
    cdef unsigned long bu, bv
    with nogil:
        for mask in range(total):
            cut = 0
            dic = 0
            for e in range(m):
                bu = (mask >> su[e]) & 1
                bv = (mask >> sv[e]) & 1
                cut += <int>(bu ^ bv)
                dic += <int>(bu & (bv ^ 1))
            if cut > best_cut:
                best_cut = cut
                best_cut_mask = mask
            if dic > best_dic:
                best_dic = dic
                best_dic_mask = mask
    return best_cut, int(best_cut_mask), best_dic, int(best_dic_mask)


cdef double _al_value(double[:, ::1] V, double[:, ::1] lam, double mu,
                      long[::1] t, long[::1] h, double inv_m,
                      double[:, ::1] g) noexcept nogil:
    cdef int m = t.shape[0]
    cdef int r = V.shape[1]
    cdef int e, j
    cdef double x, y, z, d, obj = 0.0, pen = 0.0
    for e in range(m):
        x = 0.0
        y = 0.0
        z = 0.0
        for j in range(r):
            x += V[t[e], j] * V[0, j]
            y += V[h[e], j] * V[0, j]
            z += V[t[e], j] * V[h[e], j]
        obj += 1.0 - z + y - x
        g[e, 0] = 1.0 + x + y + z
        g[e, 1] = 1.0 + x - y - z
        g[e, 2] = 1.0 - x + y - z
        g[e, 3] = 1.0 - x - y + z
        for j in range(4):
            d = lam[e, j] - mu * g[e, j]
            if d > 0.0:
                pen += d * d - lam[e, j] * lam[e, j]
            else:
                pen += -lam[e, j] * lam[e, j]
    return obj * inv_m * 0.25 - pen / (2.0 * mu)


def al_inner(V_arr, lam_arr, double mu, tails, heads, double step0,
             int max_steps, double min_step, double improve_tol):
    """Ascent iterations in place on ``V_arr``; see _pykernels.al_inner."""
    cdef double[:, ::1] V = V_arr
    cdef double[:, ::1] lam = np.ascontiguousarray(lam_arr, dtype=np.float64)
    cdef long[::1] t = np.ascontiguousarray(tails, dtype=np.int64)
    cdef long[::1] h = np.ascontiguousarray(heads, dtype=np.int64)
    cdef int nv = V.shape[0]
    cdef int r = V.shape[1]
    cdef int m = t.shape[0]
    cdef double inv_m = 1.0 / m
    cdef double[:, ::1] g = np.zeros((m, 4))
    cdef double[:, ::1] gt = np.zeros((m, 4))
    cdef double[:, ::1] grad = np.zeros((nv, r))
    cdef double[:, ::1] trial = np.zeros((nv, r))
    cdef double value = _al_value(V, lam, mu, t, h, inv_m, g)
    cdef int steps = 0
    cdef int it, e, j, w
    cdef double da, db, dc, wgt, eta, tv, norm, improvement
    cdef bint improved
    with nogil:
        for it in range(max_steps):
            for w in range(nv):
                for j in range(r):
                    grad[w, j] = 0.0
            for e in range(m):
                da = -0.25 * inv_m
                db = 0.25 * inv_m
                dc = -0.25 * inv_m
                wgt = lam[e, 0] - mu * g[e, 0]
                if wgt > 0.0:
                    da += wgt
                    db += wgt
                    dc += wgt
                wgt = lam[e, 1] - mu * g[e, 1]
                if wgt > 0.0:
                    da += wgt
                    db -= wgt
                    dc -= wgt
                wgt = lam[e, 2] - mu * g[e, 2]
                if wgt > 0.0:
                    da -= wgt
                    db += wgt
                    dc -= wgt
                wgt = lam[e, 3] - mu * g[e, 3]
                if wgt > 0.0:
                    da -= wgt
                    db -= wgt
                    dc += wgt
                for j in range(r):
                    grad[t[e], j] += da * V[0, j] + dc * V[h[e], j]
                    grad[h[e], j] += db * V[0, j] + dc * V[t[e], j]
            eta = step0
            improved = False
            improvement = 0.0
            while eta >= min_step:
                for j in range(r):
                    trial[0, j] = V[0, j]
                for w in range(1, nv):
                    norm = 0.0
                    for j in range(r):
                        tv = V[w, j] + eta * grad[w, j]
                        trial[w, j] = tv
                        norm += tv * tv
                    norm = sqrt(norm)
                    for j in range(r):
                        trial[w, j] /= norm
                tv = _al_value(trial, lam, mu, t, h, inv_m, gt)
                if tv > value:
                    improvement = tv - value
                    for w in range(nv):
                        for j in range(r):
                            V[w, j] = trial[w, j]
                    for e in range(m):
                        for j in range(4):
                            g[e, j] = gt[e, j]
                    value = tv
                    improved = True
                    break
                eta *= 0.5
            steps += 1
            if (not improved) or improvement <= improve_tol:
                break
    return value, steps
