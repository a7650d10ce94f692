"""Directed-graph data model, edge-list text I/O, and exact cut evaluation.

Graph file format (UTF-8 text): a header line ``n m`` followed by ``m``
lines ``u v`` with 1-based endpoints in ``[1, n]``.  Lines whose first
non-blank character is ``#`` and blank lines are ignored on input; the
writer emits the canonical form (header, then edges in stored order, no
comments).

Cut values are exact rationals with denominator ``|E|``: the per-edge
undirected contribution is ``(1 - c(u) c(v)) / 2`` and the directed one is
``(1 - c(u) c(v) + c(v) - c(u)) / 4``; on ±1 inputs both are 0 or 1, and a
self-loop contributes 0 under every assignment.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping


class GraphFormatError(ValueError):
    """Malformed edge-list document; carries the offending 1-based line."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class DirectedGraph:
    """A directed multigraph on vertices 1..n.

    ``edges`` is an ordered multiset: self-loops and repeated pairs are
    allowed and every occurrence counts once in the edge average.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"vertex count must be positive, got {self.n}")
        for u, v in self.edges:
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"edge ({u}, {v}) out of range [1, {self.n}]")

    @property
    def m(self) -> int:
        return len(self.edges)

    def reversed(self) -> "DirectedGraph":
        return DirectedGraph(self.n, tuple((v, u) for u, v in self.edges))


@dataclass(frozen=True)
class CutAssignment:
    """A total map vertex -> {-1, +1}; ``signs[v-1]`` is the value of v."""

    signs: tuple[int, ...]

    def __post_init__(self):
        if not self.signs:
            raise ValueError("assignment must cover at least one vertex")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("assignment values must be -1 or +1")

    @classmethod
    def from_mapping(cls, values: Mapping[int, int], n: int) -> "CutAssignment":
        return cls(tuple(values[v] for v in range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.signs)

    def __getitem__(self, vertex: int) -> int:
        return self.signs[vertex - 1]

    def __iter__(self) -> Iterator[int]:
        return iter(self.signs)

    def negated(self) -> "CutAssignment":
        return CutAssignment(tuple(-s for s in self.signs))

    def to_string(self) -> str:
        """Compact form, one of ``+``/``-`` per vertex in index order."""
        return "".join("+" if s > 0 else "-" for s in self.signs)

    @classmethod
    def from_string(cls, text: str) -> "CutAssignment":
        if any(ch not in "+-" for ch in text):
            raise ValueError("assignment string may only contain '+' and '-'")
        return cls(tuple(1 if ch == "+" else -1 for ch in text))


def _check_evaluable(g: DirectedGraph, c: CutAssignment) -> None:
    if g.m == 0:
        raise ValueError("graph has no edges; cut values are undefined")
    if c.n != g.n:
        raise ValueError(f"assignment covers {c.n} vertices, graph has {g.n}")


def cut_numerator(g: DirectedGraph, c: CutAssignment) -> int:
    """Number of edges whose endpoints get opposite signs."""
    _check_evaluable(g, c)
    s = c.signs
    return sum(1 for u, v in g.edges if s[u - 1] != s[v - 1])


def dicut_numerator(g: DirectedGraph, c: CutAssignment) -> int:
    """Number of edges going from the -1 side to the +1 side."""
    _check_evaluable(g, c)
    s = c.signs
    return sum(1 for u, v in g.edges if s[u - 1] < 0 < s[v - 1])


def cut_value(g: DirectedGraph, c: CutAssignment) -> Fraction:
    """Fraction of edges cut, ignoring orientation; exact rational."""
    return Fraction(cut_numerator(g, c), g.m)


def dicut_value(g: DirectedGraph, c: CutAssignment) -> Fraction:
    """Fraction of edges cut in the forward direction; exact rational."""
    return Fraction(dicut_numerator(g, c), g.m)


def parse_graph(text: str) -> DirectedGraph:
    """Parse an edge-list document (see module docstring for the format)."""
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        try:
            values = [int(t) for t in tokens]
        except ValueError:
            raise GraphFormatError(f"non-integer token in {line!r}", lineno) from None
        if header is None:
            if len(values) != 2:
                raise GraphFormatError("header must be 'n m'", lineno)
            n, m = values
            if n < 1:
                raise GraphFormatError(f"vertex count must be positive, got {n}", lineno)
            if m < 0:
                raise GraphFormatError(f"edge count must be non-negative, got {m}", lineno)
            header = (n, m)
            continue
        if len(values) != 2:
            raise GraphFormatError("edge line must be 'u v'", lineno)
        if len(edges) >= header[1]:
            raise GraphFormatError(
                f"more than the declared {header[1]} edges", lineno
            )
        u, v = values
        if not (1 <= u <= header[0] and 1 <= v <= header[0]):
            raise GraphFormatError(
                f"endpoint out of range [1, {header[0]}] in edge ({u}, {v})", lineno
            )
        edges.append((u, v))
    if header is None:
        raise GraphFormatError("empty document, expected 'n m' header")
    if len(edges) != header[1]:
        raise GraphFormatError(
            f"declared {header[1]} edges but found {len(edges)}"
        )
    return DirectedGraph(header[0], tuple(edges))


def format_graph(g: DirectedGraph) -> str:
    """Canonical text form: header then edges in stored order."""
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"
