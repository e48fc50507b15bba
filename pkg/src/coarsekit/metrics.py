"""Exact pseudometrics over finite point sets.

All values are Fractions; ``None`` stands for an infinite (disconnected)
distance and serializes as ``inf``.  Constructors verify symmetry, the zero
diagonal and nonnegativity; the triangle inequality and left-invariance are
checked by :func:`validate`.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Optional, Sequence

from .groups import (
    DEFAULT_BALL_CAP,
    Element,
    ElementSet,
    GroupModel,
    PreconditionError,
    compose,
    invert,
    set_product,
    subgroup_witness,
)

Value = Optional[Fraction]


class OutOfFiltrationError(ValueError):
    """An element lies outside the top level of a truncated filtration."""


class PointListMismatchError(ValueError):
    """Two pseudometrics were combined over different point lists."""


def _as_value(x) -> Value:
    if x is None:
        return None
    return x if isinstance(x, Fraction) else Fraction(x)


class PseudoMetric:
    """Symmetric exact matrix of distances over an ordered finite point list."""

    def __init__(self, points: Sequence[Hashable], values: Sequence[Sequence],
                 left_invariant: Optional[bool] = None, notes: Iterable[str] = ()):
        pts = tuple(points)
        if len(set(pts)) != len(pts):
            raise ValueError("point ids are not unique")
        n = len(pts)
        rows = [[_as_value(v) for v in row] for row in values]
        if len(rows) != n or any(len(row) != n for row in rows):
            raise ValueError(f"matrix shape does not match {n} points")
        for i in range(n):
            if rows[i][i] != 0:
                raise ValueError(f"nonzero diagonal at point {pts[i]!r}")
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"asymmetric entries at ({pts[i]!r}, {pts[j]!r})")
                if rows[i][j] is not None and rows[i][j] < 0:
                    raise ValueError(f"negative distance at ({pts[i]!r}, {pts[j]!r})")
        self.points = pts
        self._index = {p: i for i, p in enumerate(pts)}
        self._rows = rows
        self.left_invariant = left_invariant
        self.notes = tuple(notes)

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, p: Hashable) -> bool:
        return p in self._index

    def index(self, p: Hashable) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise KeyError(f"point {p!r} is not in this metric's point list") from None

    def d(self, p: Hashable, q: Hashable) -> Value:
        return self._rows[self.index(p)][self.index(q)]

    def at(self, i: int, j: int) -> Value:
        return self._rows[i][j]

    def rows(self) -> list[list[Value]]:
        return [row[:] for row in self._rows]

    def disconnected_pairs(self) -> tuple[tuple[Hashable, Hashable], ...]:
        pts = self.points
        return tuple((pts[i], pts[j])
                     for i in range(len(pts)) for j in range(i + 1, len(pts))
                     if self._rows[i][j] is None)

    def diameter(self) -> Value:
        """Largest distance; None when some pair is disconnected."""
        best = Fraction(0)
        for i in range(len(self.points)):
            for j in range(i + 1, len(self.points)):
                v = self._rows[i][j]
                if v is None:
                    return None
                if v > best:
                    best = v
        return best

    def __repr__(self) -> str:
        return f"PseudoMetric({len(self.points)} points)"


@dataclass(frozen=True)
class MetricReport:
    """Outcome of validate: ok, or the first violating witness found."""

    ok: bool
    witness: Optional[tuple] = None
    checked_left_invariance: bool = False


def _left_invariance_witness(d: PseudoMetric) -> Optional[tuple]:
    """First triple (k, g, h) with d(kg,kh) != d(g,h), or None.

    When the point set is a subgroup it suffices to compare every pair against
    the identity-based entry, which the full triple loop would also cover.
    """
    pts = d.points
    if not all(isinstance(p, Element) for p in pts):
        raise ValueError("left-invariance is only meaningful for group-element points")
    model = pts[0].model
    as_set = ElementSet(model, pts)
    if subgroup_witness(as_set) is None:
        identity = model.identity
        for g in pts:
            g_inv = invert(g)
            for h in pts:
                if d.d(g, h) != d.d(identity, compose(g_inv, h)):
                    return (g_inv, g, h)
        return None
    payloads = {p.payload for p in pts}
    for k in pts:
        translated = {}
        for g in pts:
            kg = compose(k, g)
            if kg.payload in payloads:
                translated[g] = kg
        for g, kg in translated.items():
            for h, kh in translated.items():
                if d.d(g, h) != d.d(kg, kh):
                    return (k, g, h)
    return None


def verify_left_invariance(d: PseudoMetric) -> bool:
    return _left_invariance_witness(d) is None


def validate(d: PseudoMetric, check_left_invariance: bool = False) -> MetricReport:
    """Check symmetry, zero diagonal, nonnegativity and the triangle inequality.

    Returns the first violating witness, if any.  Left-invariance is checked
    on request and only when the points are group elements.
    """
    rows = d._rows
    pts = d.points
    n = len(pts)
    for i in range(n):
        if rows[i][i] != 0:
            return MetricReport(False, ("diagonal", pts[i], rows[i][i]))
        for j in range(n):
            if rows[i][j] != rows[j][i]:
                return MetricReport(False, ("symmetry", pts[i], pts[j], rows[i][j], rows[j][i]))
            if rows[i][j] is not None and rows[i][j] < 0:
                return MetricReport(False, ("negative", pts[i], pts[j], rows[i][j]))
    for a in range(n):
        ra = rows[a]
        for b in range(n):
            dab = ra[b]
            rb = rows[b]
            for c in range(n):
                dac, dcb = ra[c], rb[c]
                if dac is None or dcb is None:
                    continue
                if dab is None or dab > dac + dcb:
                    return MetricReport(False, ("triangle", pts[a], pts[c], pts[b],
                                                dab, dac + dcb))
    if check_left_invariance:
        witness = _left_invariance_witness(d)
        if witness is not None:
            return MetricReport(False, ("left-invariance",) + witness, True)
        return MetricReport(True, None, True)
    return MetricReport(True, None)


# --- shortest-path machinery --------------------------------------------------


def metric_closure(matrix: list[list[Value]]) -> list[list[Value]]:
    """All-pairs shortest paths (Floyd-Warshall) over an exact matrix."""
    D = [row[:] for row in matrix]
    n = len(D)
    for k in range(n):
        Dk = D[k]
        for i in range(n):
            dik = D[i][k]
            if dik is None:
                continue
            Di = D[i]
            for j in range(n):
                dkj = Dk[j]
                if dkj is None:
                    continue
                v = dik + dkj
                if Di[j] is None or v < Di[j]:
                    Di[j] = v
    return D


def _int_metric_closure(matrix: list[list[int]]) -> list[list[int]]:
    # Same algorithm specialized to ints; used for dyadic weights after scaling.
    D = [row[:] for row in matrix]
    n = len(D)
    rng = range(n)
    for k in rng:
        Dk = D[k]
        for i in rng:
            Di = D[i]
            dik = Di[k]
            for j in rng:
                v = dik + Dk[j]
                if v < Di[j]:
                    Di[j] = v
    return D


def dijkstra(adjacency: dict, source, nodes: Sequence[Hashable]) -> dict:
    """Single-source shortest paths with exact nonnegative weights.

    adjacency maps node -> list of (neighbor, weight) pairs; unreachable nodes
    are absent from the result.
    """
    dist = {source: Fraction(0)}
    done = set()
    counter = itertools.count()
    heap = [(Fraction(0), next(counter), source)]
    while heap:
        du, _, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, w in adjacency.get(u, ()):
            nd = du + w
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, next(counter), v))
    return dist


# --- word metric ----------------------------------------------------------------


def word_lengths(G: GroupModel, S: ElementSet, targets: Iterable[Element],
                 cap: int = DEFAULT_BALL_CAP) -> dict[Element, Optional[int]]:
    """BFS word length over S for each target; None if unreachable within cap."""
    S.require_symmetric_with_identity("word-length generating set")
    targets = list(targets)
    remaining = set(targets)
    identity = G.identity
    lengths: dict[Element, int] = {identity: 0}
    remaining.discard(identity)
    steps = [s for s in S if not s.is_identity()]
    frontier = [identity]
    length = 0
    while frontier and remaining and len(lengths) <= cap:
        length += 1
        layer: set[Element] = set()
        for g in frontier:
            for s in steps:
                h = compose(g, s)
                if h not in lengths:
                    layer.add(h)
        frontier = sorted(layer)
        for h in frontier:
            lengths[h] = length
            remaining.discard(h)
    return {t: lengths.get(t) for t in targets}


def word_metric(G: GroupModel, S: ElementSet, domain: ElementSet,
                cap: int = DEFAULT_BALL_CAP) -> PseudoMetric:
    """Word metric d_S(g,h) = word length of g^-1 h, over a finite domain.

    Pairs whose difference is unreachable within the search cap are recorded
    as disconnected rather than failing.
    """
    S.require_symmetric_with_identity("word metric generating set")
    points = tuple(sorted(domain))
    needed: set[Element] = set()
    diffs: dict[tuple[int, int], Element] = {}
    for i, g in enumerate(points):
        g_inv = invert(g)
        for j in range(i + 1, len(points)):
            delta = compose(g_inv, points[j])
            diffs[(i, j)] = delta
            needed.add(delta)
    found = word_lengths(G, S, needed, cap=cap)
    n = len(points)
    rows: list[list[Value]] = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), delta in diffs.items():
        length = found[delta]
        v = None if length is None else Fraction(length)
        rows[i][j] = v
        rows[j][i] = v
    d = PseudoMetric(points, rows)
    d.left_invariant = verify_left_invariance(d)
    return d


# --- Birkhoff-Kakutani construction ----------------------------------------------


class Filtration:
    """Nested symmetric identity neighborhoods U_n with U_n^3 inside U_{n+1}.

    Indices run over a contiguous integer range.  Below the bottom level the
    filtration is implicitly extended by the singleton {identity}, so the
    identity always has norm 0.
    """

    def __init__(self, levels: dict[int, ElementSet]):
        if not levels:
            raise ValueError("filtration needs at least one level")
        indices = sorted(levels)
        if indices != list(range(indices[0], indices[-1] + 1)):
            raise ValueError(f"filtration indices {indices} are not contiguous")
        for n in indices:
            U = levels[n]
            if not U.contains_identity:
                raise PreconditionError(f"filtration level {n} does not contain the identity")
            if not U.is_symmetric:
                raise PreconditionError(f"filtration level {n} is not symmetric")
        for n in indices[:-1]:
            if not levels[n].issubset(levels[n + 1]):
                raise PreconditionError(f"filtration nesting fails: U_{n} is not inside U_{n + 1}")
            cube = set_product(set_product(levels[n], levels[n]), levels[n])
            if not cube.issubset(levels[n + 1]):
                offender = next(g for g in cube if g not in levels[n + 1])
                raise PreconditionError(
                    f"filtration cube condition fails at level {n}: "
                    f"{offender} is in U_{n}^3 but not in U_{n + 1}")
        self.levels = {n: levels[n] for n in indices}
        self.n_min = indices[0]
        self.n_max = indices[-1]
        self.model = levels[indices[0]].model

    def least_level(self, g: Element) -> Optional[int]:
        for n in range(self.n_min, self.n_max + 1):
            if g in self.levels[n]:
                return n
        return None

    def top(self) -> ElementSet:
        return self.levels[self.n_max]


def bk_norm(g: Element, F: Filtration) -> Fraction:
    """The norm 2^n for the least level n containing g; the identity gets 0."""
    if g.is_identity():
        return Fraction(0)
    n = F.least_level(g)
    if n is None:
        raise OutOfFiltrationError(f"{g} lies outside the top filtration level U_{F.n_max}")
    return Fraction(2) ** n


def bk_pseudometric(F: Filtration, domain: ElementSet) -> PseudoMetric:
    """Chain-infimum pseudometric of the filtration norm over a finite domain.

    Realized as all-pairs shortest paths on the complete graph with edge
    weight the norm of x^-1 y.  The two-sided comparison with the norm, half
    the norm below and the norm above, is asserted on every pair afterwards.
    """
    points = tuple(sorted(domain))
    n = len(points)
    norm_rows: list[list[Fraction]] = [[Fraction(0)] * n for _ in range(n)]
    for i, g in enumerate(points):
        g_inv = invert(g)
        for j in range(i + 1, n):
            try:
                w = bk_norm(compose(g_inv, points[j]), F)
            except OutOfFiltrationError as exc:
                raise OutOfFiltrationError(
                    f"domain escapes the filtration: {exc}") from None
            norm_rows[i][j] = w
            norm_rows[j][i] = w
    # Dyadic weights scale to integers, keeping the closure exact and fast.
    scale = 2 ** (-F.n_min) if F.n_min < 0 else 1
    int_rows = []
    for row in norm_rows:
        scaled = []
        for w in row:
            sw = w * scale
            if sw.denominator != 1:
                raise AssertionError("filtration norm did not scale to an integer")
            scaled.append(int(sw))
        int_rows.append(scaled)
    closed = _int_metric_closure(int_rows)
    rows = [[Fraction(v, scale) for v in row] for row in closed]
    for i in range(n):
        for j in range(n):
            w = norm_rows[i][j]
            if not (w / 2 <= rows[i][j] <= w):
                raise AssertionError(
                    f"two-sided norm comparison fails at ({points[i]}, {points[j]}): "
                    f"norm {w}, distance {rows[i][j]}")
    d = PseudoMetric(points, rows)
    d.left_invariant = verify_left_invariance(d)
    return d


# --- rectified (hat) metric -----------------------------------------------------


def hat_metric(d: PseudoMetric, S: ElementSet, domain: ElementSet) -> PseudoMetric:
    """Shortest paths on the S-Cayley graph over the domain, edge weight d(x, xs).

    Dominates d pointwise (asserted).  Pairs in different S-components of the
    domain are recorded as disconnected.
    """
    if d.left_invariant is not True:
        raise PreconditionError("hat_metric needs a base metric verified left-invariant")
    S.require_symmetric_with_identity("hat metric generating set")
    points = tuple(sorted(domain))
    for p in points:
        if p not in d:
            raise PreconditionError(f"domain element {p} is missing from the base metric")
    notes = []
    adjacency: dict[Element, list[tuple[Element, Fraction]]] = {p: [] for p in points}
    steps = [s for s in S if not s.is_identity()]
    skipped_infinite = False
    for x in points:
        for s in steps:
            y = compose(x, s)
            if y not in adjacency:
                continue
            w = d.d(x, y)
            if w is None:
                skipped_infinite = True
                continue
            adjacency[x].append((y, w))
    if skipped_infinite:
        notes.append("edges with infinite base distance were skipped")
    n = len(points)
    rows: list[list[Value]] = [[None] * n for _ in range(n)]
    for i, p in enumerate(points):
        dist = dijkstra(adjacency, p, points)
        for j, q in enumerate(points):
            rows[i][j] = dist.get(q)
    for i in range(n):
        rows[i][i] = Fraction(0)
        for j in range(n):
            base = d.d(points[i], points[j])
            if base is not None and rows[i][j] is not None and rows[i][j] < base:
                raise AssertionError(
                    f"rectified metric dropped below the base metric at "
                    f"({points[i]}, {points[j]})")
    out = PseudoMetric(points, rows, notes=notes)
    out.left_invariant = verify_left_invariance(out)
    return out


# --- poset operations -----------------------------------------------------------


def combine(d: PseudoMetric, d2: PseudoMetric, mode: str) -> PseudoMetric:
    """Pointwise meet (min) or sum of two pseudometrics on the same points.

    The raw pointwise min can violate the triangle inequality; in that case it
    is replaced by its shortest-path closure, the largest pseudometric lying
    below both inputs, and the result carries a note saying so.
    """
    if d.points != d2.points:
        raise PointListMismatchError("combine needs identical point lists")
    if mode not in ("meet", "sum"):
        raise ValueError(f"unknown combine mode {mode!r}")
    n = len(d.points)
    rows: list[list[Value]] = []
    for i in range(n):
        row = []
        for j in range(n):
            a, b = d.at(i, j), d2.at(i, j)
            if mode == "sum":
                row.append(None if a is None or b is None else a + b)
            else:
                if a is None:
                    row.append(b)
                elif b is None:
                    row.append(a)
                else:
                    row.append(min(a, b))
        rows.append(row)
    notes = []
    if mode == "meet":
        closed = metric_closure(rows)
        if closed != rows:
            rows = closed
            notes.append("meet required shortest-path repair of the raw pointwise min")
    out = PseudoMetric(d.points, rows, notes=notes)
    if d.left_invariant is True and d2.left_invariant is True \
            and all(isinstance(p, Element) for p in out.points):
        out.left_invariant = verify_left_invariance(out)
    return out
