"""Graph models of a group: VSV coset graphs and weighted coset ray trees.

Coset graph vertices are canonical coset representatives; gV and hV are
adjacent when h^-1 g lands in VSV and the cosets differ (self-loops are
dropped).  Ray tree vertices are (level, representative) pairs with the edge
joining gG_n to gG_{n+1} weighted 2^(n-1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .groups import (
    CosetPartition,
    Element,
    ElementSet,
    PreconditionError,
    compose,
    cosets,
    invert,
    require_subgroup,
    set_product,
)
from .metrics import PseudoMetric, Value, dijkstra


class RepresentativeMismatchError(ValueError):
    """A word metric does not cover the coset members it is compared against."""


class CosetGraph:
    """Graph on G/V with VSV adjacency, its unit-edge metric, and provenance."""

    def __init__(self, group_elements: ElementSet, subgroup: ElementSet,
                 genset: ElementSet, partition: CosetPartition,
                 edges: tuple[tuple[Element, Element], ...], metric: PseudoMetric):
        self.group_elements = group_elements
        self.subgroup = subgroup
        self.genset = genset
        self.partition = partition
        self.vertices = partition.representatives
        self.edges = edges
        self.metric = metric
        adjacency: dict[Element, list[Element]] = {v: [] for v in self.vertices}
        for u, v in edges:
            adjacency[u].append(v)
            adjacency[v].append(u)
        self.adjacency = {v: tuple(sorted(nbrs)) for v, nbrs in adjacency.items()}

    def vertex_of(self, g: Element) -> Element:
        try:
            return self.partition.rep_of[g]
        except KeyError:
            raise KeyError(f"{g} is outside the enumerated group") from None

    def translate_vertex(self, g: Element, vertex: Element) -> Element:
        """The action on vertices: g . (hV) = (gh)V."""
        return self.vertex_of(compose(g, vertex))

    def degrees(self) -> tuple[int, ...]:
        return tuple(len(self.adjacency[v]) for v in self.vertices)


def build_coset_graph(G_elements: ElementSet, V: ElementSet,
                      S: ElementSet) -> CosetGraph:
    """Coset graph of Prop-style VSV adjacency over an enumerated group."""
    require_subgroup(V, "V")
    S.require_symmetric_with_identity("coset graph generating set")
    if not V.issubset(S):
        offender = next(g for g in V if g not in S)
        raise PreconditionError(
            f"the construction requires V to be contained in S; {offender} is not")
    partition = cosets(G_elements, V)
    vsv = set_product(set_product(V, S), V)
    reps = partition.representatives
    edges = []
    for i, u in enumerate(reps):
        for v in reps[i + 1:]:
            if compose(invert(v), u) in vsv:
                edges.append((u, v))
    adjacency: dict[Element, list[Element]] = {r: [] for r in reps}
    for u, v in edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
    n = len(reps)
    index = {r: i for i, r in enumerate(reps)}
    rows: list[list[Value]] = [[None] * n for _ in range(n)]
    for i, source in enumerate(reps):
        dist = {source: Fraction(0)}
        frontier = [source]
        while frontier:
            nxt = []
            for u in frontier:
                for w in adjacency[u]:
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        nxt.append(w)
            frontier = sorted(nxt)
        for target, value in dist.items():
            rows[i][index[target]] = value
        rows[i][i] = Fraction(0)
    metric = PseudoMetric(reps, rows)
    return CosetGraph(G_elements, V, S, partition, tuple(edges), metric)


# --- the two-sided comparison with the word metric ------------------------------------


@dataclass(frozen=True)
class TwoQIReport:
    holds: bool
    lower_holds: bool          # d_Gamma <= coset word distance
    upper_holds: bool          # coset word distance <= 2 d_Gamma
    max_word_over_graph: Optional[Fraction]
    tight_pairs: tuple
    pairs_checked: int


def coset_word_distance(gamma: CosetGraph, dS: PseudoMetric,
                        u: Element, v: Element) -> Value:
    """Word distance between cosets: the minimum over representative pairs.

    Left-invariance makes this the minimal word length over the double coset
    V(g^-1 h)V, the quantity the factor-two comparison actually bounds; any
    single choice of representatives can exceed it.
    """
    best: Value = None
    for a in gamma.partition.blocks[u]:
        for b in gamma.partition.blocks[v]:
            w = dS.d(a, b)
            if w is not None and (best is None or w < best):
                best = w
    return best


def two_qi_check(gamma: CosetGraph, dS: PseudoMetric) -> TwoQIReport:
    """Check d_Gamma <= d_S on cosets <= 2 d_Gamma for every vertex pair."""
    for rep in gamma.vertices:
        for member in gamma.partition.blocks[rep]:
            if member not in dS:
                raise RepresentativeMismatchError(
                    f"word metric does not cover coset member {member}")
    lower = upper = True
    max_ratio: Optional[Fraction] = None
    tight = []
    pairs = 0
    reps = gamma.vertices
    for i, u in enumerate(reps):
        for v in reps[i + 1:]:
            pairs += 1
            dg = gamma.metric.d(u, v)
            dw = coset_word_distance(gamma, dS, u, v)
            if dg is None:
                if dw is not None:
                    lower = False
                continue
            if dw is None:
                upper = False
                continue
            if dg > dw:
                lower = False
            if dw > 2 * dg:
                upper = False
            if dg > 0:
                ratio = dw / dg
                if max_ratio is None or ratio > max_ratio:
                    max_ratio = ratio
                if dw == 2 * dg:
                    tight.append((u, v))
    return TwoQIReport(lower and upper, lower, upper, max_ratio, tuple(tight), pairs)


# --- Cayley-Abels-Rosendal conditions ---------------------------------------------------


@dataclass(frozen=True)
class CarReport:
    connected: bool
    vertex_transitive: bool
    adjacency_invariant: bool
    edge_orbits: int
    stabilizer: ElementSet
    stabilizer_diameter: Value
    stabilizer_bound: Fraction
    stabilizer_bounded: bool
    vertex_count: int
    constant_degree: Optional[int]
    is_car: bool


def car_check(gamma: CosetGraph, stabilizer_bound, reference: PseudoMetric) -> CarReport:
    """Connectivity, transitivity, edge orbits and stabilizer size of the graph."""
    stabilizer_bound = Fraction(stabilizer_bound)
    reps = gamma.vertices
    connected = all(gamma.metric.d(u, v) is not None
                    for i, u in enumerate(reps) for v in reps[i + 1:])
    transitive = True
    for u in reps:
        for v in reps:
            g = compose(v, invert(u))
            if g not in gamma.group_elements or gamma.translate_vertex(g, u) != v:
                transitive = False
    edge_set = {frozenset(e) for e in gamma.edges}
    invariant = True
    orbit_reps: set[tuple] = set()
    seen: set[frozenset] = set()
    for edge in gamma.edges:
        if frozenset(edge) in seen:
            continue
        orbit = set()
        for g in gamma.group_elements:
            gu = gamma.translate_vertex(g, edge[0])
            gv = gamma.translate_vertex(g, edge[1])
            if gu == gv or frozenset((gu, gv)) not in edge_set:
                invariant = False
                continue
            orbit.add(frozenset((gu, gv)))
        seen |= orbit
        orbit_reps.add(min(tuple(sorted(e)) for e in orbit))
    base = gamma.vertex_of(gamma.group_elements.model.identity)
    stabilizer = ElementSet(gamma.group_elements.model,
                            [g for g in gamma.group_elements
                             if gamma.translate_vertex(g, base) == base])
    diameter: Value = Fraction(0)
    for g in stabilizer:
        if g not in reference:
            raise PreconditionError(
                f"reference metric does not cover stabilizer element {g}")
    for g in stabilizer:
        for h in stabilizer:
            v = reference.d(g, h)
            if v is None:
                diameter = None
                break
            if diameter is not None and v > diameter:
                diameter = v
        if diameter is None:
            break
    bounded = diameter is not None and diameter <= stabilizer_bound
    degrees = gamma.degrees()
    constant_degree = degrees[0] if degrees and len(set(degrees)) == 1 else None
    is_car = connected and transitive and invariant and bounded
    return CarReport(connected, transitive, invariant, len(orbit_reps), stabilizer,
                     diameter, stabilizer_bound, bounded, len(reps),
                     constant_degree, is_car)


# --- coset ray trees -----------------------------------------------------------------------


class CosetRayTree:
    """Tree on the cosets of a nested subgroup chain with dyadic edge weights."""

    def __init__(self, chain: tuple[ElementSet, ...], partitions: tuple[CosetPartition, ...],
                 vertices: tuple, edges: tuple, metric: PseudoMetric, base):
        self.chain = chain
        self.partitions = partitions
        self.vertices = vertices
        self.edges = edges
        self.metric = metric
        self.base = base

    def vertex_at_level(self, g: Element, level: int):
        return (level, self.partitions[level - 1].rep_of[g])

    def meet_level(self, g: Element) -> int:
        """Least level whose subgroup contains g; the top always does."""
        for n, G_n in enumerate(self.chain, start=1):
            if g in G_n:
                return n
        raise KeyError(f"{g} is outside the enumerated group")


def build_ray_tree(chain: Sequence[ElementSet], G_elements: ElementSet) -> CosetRayTree:
    """Tree on the cosets G/G_n of a strictly nested chain ending at the group."""
    chain = tuple(chain)
    if not chain:
        raise PreconditionError("chain must contain at least one subgroup")
    for n, G_n in enumerate(chain, start=1):
        require_subgroup(G_n, f"chain level {n}")
    for n in range(len(chain) - 1):
        if not chain[n].issubset(chain[n + 1]):
            raise PreconditionError(
                f"chain nesting fails: level {n + 1} is not inside level {n + 2}")
        if len(chain[n]) == len(chain[n + 1]):
            raise PreconditionError(
                f"chain nesting must be strict: levels {n + 1} and {n + 2} coincide")
    if chain[-1] != G_elements:
        raise PreconditionError("the last chain entry must be the whole enumerated group")
    partitions = tuple(cosets(G_elements, G_n) for G_n in chain)
    vertices = []
    for level, partition in enumerate(partitions, start=1):
        vertices.extend((level, rep) for rep in partition.representatives)
    edges = []
    for level in range(1, len(chain)):
        weight = Fraction(2) ** (level - 1)
        upper = partitions[level]
        for rep in partitions[level - 1].representatives:
            edges.append(((level, rep), (level + 1, upper.rep_of[rep]), weight))
    if len(edges) != len(vertices) - 1:
        raise AssertionError("ray tree edge count is not vertices minus one")
    adjacency: dict = {v: [] for v in vertices}
    for u, v, w in edges:
        adjacency[u].append((v, w))
        adjacency[v].append((u, w))
    adjacency = {v: sorted(nbrs, key=lambda t: (str(t[0]), t[1])) for v, nbrs in adjacency.items()}
    n = len(vertices)
    index = {v: i for i, v in enumerate(vertices)}
    rows: list[list[Value]] = [[None] * n for _ in range(n)]
    for i, source in enumerate(vertices):
        dist = dijkstra(adjacency, source, vertices)
        if len(dist) != n:
            raise AssertionError("ray tree is not connected")
        for target, value in dist.items():
            rows[i][index[target]] = value
    metric = PseudoMetric(vertices, rows)
    identity = G_elements.model.identity
    base = (1, partitions[0].rep_of[identity])
    return CosetRayTree(chain, partitions, tuple(vertices), tuple(edges), metric, base)


def ray_tree_distance(t: CosetRayTree, g: Element, base: Optional[tuple] = None) -> Fraction:
    """Weighted tree distance from the base coset to gG_1."""
    try:
        vertex = t.vertex_at_level(g, 1)
    except KeyError:
        raise PreconditionError(f"{g} is outside the enumerated group") from None
    return t.metric.d(base if base is not None else t.base, vertex)


def weight_form_distance(meet_level: int) -> Fraction:
    """Up-and-down sum of the declared edge weights: 2 * (2^(m-1) - 1)."""
    return 2 * (Fraction(2) ** (meet_level - 1) - 1)


def display_form_distance(meet_level: int) -> Fraction:
    """The doubled geometric sum 2 * (2^m - 1) with one extra term."""
    return 2 * (Fraction(2) ** meet_level - 1)


@dataclass(frozen=True)
class RayTreeRow:
    element: Element
    distance: Fraction
    meet_level: int
    weight_form: Fraction
    display_form: Fraction


@dataclass(frozen=True)
class RayTreeReport:
    rows: tuple
    weight_form_matches: bool
    display_form_matches: bool


def ray_tree_report(t: CosetRayTree) -> RayTreeReport:
    """Tabulate tree distances against both closed forms and record which fits."""
    rows = []
    weight_ok = True
    display_ok = True
    for g in t.chain[-1]:
        dist = ray_tree_distance(t, g)
        m = t.meet_level(g)
        wf, df = weight_form_distance(m), display_form_distance(m)
        weight_ok = weight_ok and dist == wf
        display_ok = display_ok and dist == df
        rows.append(RayTreeRow(g, dist, m, wf, df))
    return RayTreeReport(tuple(rows), weight_ok, display_ok)
