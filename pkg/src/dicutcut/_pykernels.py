"""Numpy implementations of the hot kernels.

These are the fallback backend used when the compiled extension
``dicutcut._kernels`` is unavailable; see ``dicutcut._backend`` for the
selection logic.  Both backends implement the same iteration, so results
agree (bit-identical per backend, and to float round-off across backends).

Kernels:

``best_cuts_scan``
    Enumerate all 2^n sign assignments of a directed graph and return the
    best undirected and directed cut numerators with their witnesses.
    Vertex v lives at bit (n - v), so ascending masks enumerate assignments
    in lexicographic (+1 before -1) vertex order and keeping the first
    maximum yields the lexicographically smallest witness.

``al_inner``
    Inner loop of the augmented-Lagrangian low-rank solver: gradient ascent
    on the penalised objective over the product of unit spheres (row 0 is
    pinned), with per-iteration backtracking from a fixed initial step.
"""

from __future__ import annotations

import numpy as np

_CHUNK_BITS = 18


def best_cuts_scan(n, tails, heads):
    """Scan all 2^n assignments; returns
    (best_cut, best_cut_mask, best_dicut, best_dicut_mask).

    ``tails``/``heads`` are 1-based vertex arrays.  Mask bit (n - v) set
    means vertex v is assigned -1.
    """
    tails = np.asarray(tails, dtype=np.int64)
    heads = np.asarray(heads, dtype=np.int64)
    shift_u = (n - tails).astype(np.uint32)
    shift_v = (n - heads).astype(np.uint32)
    total = np.uint64(1) << np.uint64(n)

    best_cut = -1
    best_cut_mask = 0
    best_dicut = -1
    best_dicut_mask = 0
    chunk = 1 << _CHUNK_BITS
    start = 0
    while start < int(total):
        stop = min(start + chunk, int(total))
        masks = np.arange(start, stop, dtype=np.uint32)
        cut = np.zeros(masks.shape, dtype=np.int32)
        dic = np.zeros(masks.shape, dtype=np.int32)
        for su, sv in zip(shift_u, shift_v):
            bu = (masks >> su) & np.uint32(1)
            bv = (masks >> sv) & np.uint32(1)
            cut += (bu ^ bv).astype(np.int32)
            dic += (bu & (np.uint32(1) ^ bv)).astype(np.int32)
        i = int(np.argmax(cut))
        if cut[i] > best_cut:
            best_cut = int(cut[i])
            best_cut_mask = start + i
        j = int(np.argmax(dic))
        if dic[j] > best_dicut:
            best_dicut = int(dic[j])
            best_dicut_mask = start + j
        start = stop
    return best_cut, best_cut_mask, best_dicut, best_dicut_mask


def _al_value(V, lam, mu, tails, heads, inv_m):
    x = V[tails] @ V[0]
    y = V[heads] @ V[0]
    z = np.einsum("ij,ij->i", V[tails], V[heads])
    obj = inv_m * 0.25 * np.sum(1.0 - z + y - x)
    g = np.stack((1 + x + y + z, 1 + x - y - z, 1 - x + y - z, 1 - x - y + z), axis=1)
    d = lam - mu * g
    np.maximum(d, 0.0, out=d)
    pen = np.sum(d * d - lam * lam) / (2.0 * mu)
    return obj - pen, g


def al_inner(V, lam, mu, tails, heads, step0, max_steps, min_step, improve_tol):
    """Run up to ``max_steps`` ascent iterations in place on ``V``.

    Each iteration recomputes the gradient of the augmented objective,
    tries the fixed initial step, halves on decrease, and renormalises the
    free rows (1..n) to the unit sphere.  Stops when no step above
    ``min_step`` improves or the improvement drops below ``improve_tol``.
    Returns (final value, iterations used).
    """
    tails = np.asarray(tails, dtype=np.int64)
    heads = np.asarray(heads, dtype=np.int64)
    inv_m = 1.0 / len(tails)
    x0 = V[0]

    value, g = _al_value(V, lam, mu, tails, heads, inv_m)
    steps = 0
    for _ in range(max_steps):
        w = lam - mu * g
        np.maximum(w, 0.0, out=w)
        # d(value)/d(x_e), d/d(y_e), d/d(z_e) per edge
        da = -0.25 * inv_m + w[:, 0] + w[:, 1] - w[:, 2] - w[:, 3]
        db = 0.25 * inv_m + w[:, 0] - w[:, 1] + w[:, 2] - w[:, 3]
        dc = -0.25 * inv_m + w[:, 0] - w[:, 1] - w[:, 2] + w[:, 3]
        grad = np.zeros_like(V)
        np.add.at(grad, tails, da[:, None] * x0 + dc[:, None] * V[heads])
        np.add.at(grad, heads, db[:, None] * x0 + dc[:, None] * V[tails])
        grad[0] = 0.0  # row 0 is pinned

        eta = step0
        improved = False
        while eta >= min_step:
            trial = V + eta * grad
            trial[0] = x0
            norms = np.linalg.norm(trial[1:], axis=1, keepdims=True)
            trial[1:] /= norms
            trial_value, trial_g = _al_value(trial, lam, mu, tails, heads, inv_m)
            if trial_value > value:
                improvement = trial_value - value
                V[:] = trial
                value, g = trial_value, trial_g
                improved = True
                break
            eta *= 0.5
        steps += 1
        if not improved or improvement <= improve_tol:
            break
    return value, steps
