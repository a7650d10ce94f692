"""Exact cut(G) and dicut(G) by enumerating all 2^n assignments.

This is the ground truth the rest of the package is tested against, so it
stays as close to the definitions as possible: evaluate every assignment,
keep the maximum.  Ties are broken towards the lexicographically smallest
assignment with +1 ordered before -1, vertex 1 most significant, which
makes witnesses reproducible.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from dicutcut import _backend
from dicutcut.graph import CutAssignment, DirectedGraph

DEFAULT_VERTEX_LIMIT = 24


def _check(g: DirectedGraph, vertex_limit: int) -> None:
    if vertex_limit < 1:
        raise ValueError("vertex_limit must be positive")
    if g.n > vertex_limit:
        raise ValueError(
            f"graph has {g.n} vertices, enumeration limit is {vertex_limit}"
        )
    if g.m == 0:
        raise ValueError("graph has no edges; cut values are undefined")


def _mask_to_assignment(mask: int, n: int) -> CutAssignment:
    # bit (n - v) set <=> vertex v is -1
    return CutAssignment(
        tuple(-1 if (mask >> (n - v)) & 1 else 1 for v in range(1, n + 1))
    )


def _scan(g: DirectedGraph):
    tails = np.fromiter((u for u, _ in g.edges), dtype=np.int64, count=g.m)
    heads = np.fromiter((v for _, v in g.edges), dtype=np.int64, count=g.m)
    return _backend.best_cuts_scan(g.n, tails, heads)


def exact_cut(
    g: DirectedGraph, vertex_limit: int = DEFAULT_VERTEX_LIMIT
) -> tuple[Fraction, CutAssignment]:
    """Maximum undirected cut value and its lexicographically first witness."""
    _check(g, vertex_limit)
    best_cut, cut_mask, _, _ = _scan(g)
    return Fraction(best_cut, g.m), _mask_to_assignment(cut_mask, g.n)


def exact_dicut(
    g: DirectedGraph, vertex_limit: int = DEFAULT_VERTEX_LIMIT
) -> tuple[Fraction, CutAssignment]:
    """Maximum directed cut value and its lexicographically first witness."""
    _check(g, vertex_limit)
    _, _, best_dicut, dicut_mask = _scan(g)
    return Fraction(best_dicut, g.m), _mask_to_assignment(dicut_mask, g.n)
