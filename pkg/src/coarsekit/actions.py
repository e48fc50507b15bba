"""Isometric actions of group models on finite metric spaces.

Generator images are permutations of the point list; arbitrary elements act
through breadth-first evaluation of words in the generators, so every element
expressible within the configured cap gets a well-defined point map.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from .groups import (
    DEFAULT_BALL_CAP,
    Element,
    ElementSet,
    GroupModel,
    PreconditionError,
    compose,
    invert,
)
from .metrics import PseudoMetric, Value, validate, verify_left_invariance, word_lengths


class ExpressibilityError(ValueError):
    """An element is not reachable as a word in the action's generators."""


class FiniteMetricSpace:
    """Finite point set carrying a validated exact (pseudo)metric.

    ``genuine`` records whether all off-diagonal distances are positive and
    finite; otherwise the space is only pseudometric.
    """

    def __init__(self, metric: PseudoMetric, skip_validation: bool = False):
        if not skip_validation:
            report = validate(metric)
            if not report.ok:
                raise ValueError(f"space metric fails validation: {report.witness}")
        self.metric = metric
        self.points = metric.points
        genuine = True
        for i in range(len(self.points)):
            for j in range(i + 1, len(self.points)):
                v = metric.at(i, j)
                if v is None or v == 0:
                    genuine = False
                    break
            if not genuine:
                break
        self.genuine = genuine

    def d(self, p: Hashable, q: Hashable) -> Value:
        return self.metric.d(p, q)

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def cycle(cls, n: int, prefix: str = "v") -> "FiniteMetricSpace":
        """The n-cycle graph with its integer path metric."""
        if n < 1:
            raise ValueError("cycle needs at least one point")
        points = tuple(f"{prefix}{i}" for i in range(n))
        rows = [[Fraction(min(abs(i - j), n - abs(i - j))) for j in range(n)]
                for i in range(n)]
        # graph metrics satisfy the triangle inequality by construction
        return cls(PseudoMetric(points, rows), skip_validation=True)

    @classmethod
    def torus(cls, n: int, m: int, prefix: str = "v") -> "FiniteMetricSpace":
        """The n-by-m grid torus with the quotient taxicab metric."""
        if n < 1 or m < 1:
            raise ValueError("torus needs positive side lengths")
        points = tuple(f"{prefix}{i * m + j}" for i in range(n) for j in range(m))
        def wrap(a: int, size: int) -> int:
            a = abs(a) % size
            return min(a, size - a)
        coords = [(i, j) for i in range(n) for j in range(m)]
        rows = [[Fraction(wrap(a - c, n) + wrap(b - d, m)) for (c, d) in coords]
                for (a, b) in coords]
        return cls(PseudoMetric(points, rows), skip_validation=True)


class GroupAction:
    """Action of a group model on a finite metric space via generator images.

    images maps each generator to the tuple of image points, aligned with the
    space's point order.  Every image must be an isometric permutation, and
    images of mutually inverse generators must be inverse permutations.
    """

    def __init__(self, group: GroupModel, space: FiniteMetricSpace,
                 images: Mapping[Element, Sequence[Hashable]]):
        self.group = group
        self.space = space
        n = len(space.points)
        point_index = {p: i for i, p in enumerate(space.points)}
        self._images: dict[Element, tuple[int, ...]] = {}
        for gen in group.generators:
            if gen not in images:
                raise ValueError(f"generator {gen} has no image")
        for gen, image in images.items():
            image = tuple(image)
            if len(image) != n or set(image) != set(space.points):
                raise ValueError(f"image of {gen} is not a permutation of the point list")
            index_map = tuple(point_index[p] for p in image)
            self._check_isometry(gen, index_map)
            self._images[gen] = index_map
        for gen, index_map in self._images.items():
            partner = self._images.get(invert(gen))
            if partner is not None and _invert_map(index_map) != partner:
                raise ValueError(
                    f"images of {gen} and its inverse are not inverse permutations")
        identity_map = tuple(range(n))
        self._rho: dict[Element, tuple[int, ...]] = {group.identity: identity_map}
        steps: dict[Element, tuple[int, ...]] = {}
        for gen, index_map in self._images.items():
            steps[gen] = index_map
            steps.setdefault(invert(gen), _invert_map(index_map))
        steps.pop(group.identity, None)
        self._steps = sorted(steps.items())
        self._frontier = [group.identity]

    def _check_isometry(self, gen: Element, index_map: tuple[int, ...]) -> None:
        metric = self.space.metric
        n = len(index_map)
        for i in range(n):
            for j in range(i + 1, n):
                if metric.at(i, j) != metric.at(index_map[i], index_map[j]):
                    raise ValueError(
                        f"image of {gen} is not an isometry: it changes the distance "
                        f"between {self.space.points[i]} and {self.space.points[j]}")

    def point_map(self, g: Element, cap: int = DEFAULT_BALL_CAP) -> tuple[int, ...]:
        """Index permutation realizing g, evaluated along a minimal word."""
        while g not in self._rho:
            if not self._frontier or len(self._rho) > cap:
                raise ExpressibilityError(
                    f"{g} is not expressible as a word in the action's generators "
                    f"within the cap of {cap} elements")
            layer: dict[Element, tuple[int, ...]] = {}
            for h in self._frontier:
                rho_h = self._rho[h]
                for s, rho_s in self._steps:
                    hs = compose(h, s)
                    if hs not in self._rho and hs not in layer:
                        # (h*s).x = h.(s.x)
                        layer[hs] = tuple(rho_h[i] for i in rho_s)
            self._frontier = sorted(layer)
            self._rho.update(layer)
        return self._rho[g]

    def act(self, g: Element, p: Hashable, cap: int = DEFAULT_BALL_CAP) -> Hashable:
        index_map = self.point_map(g, cap=cap)
        return self.space.points[index_map[self.space.metric.index(p)]]

    def orbit(self, x: Hashable) -> tuple[Hashable, ...]:
        """Orbit of a point under the whole generated group."""
        start = self.space.metric.index(x)
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for i in frontier:
                for _, index_map in self._steps:
                    j = index_map[i]
                    if j not in seen:
                        seen.add(j)
                        nxt.append(j)
            frontier = nxt
        return tuple(self.space.points[i] for i in sorted(seen))


def act(a: GroupAction, g: Element, p: Hashable, cap: int = DEFAULT_BALL_CAP) -> Hashable:
    return a.act(g, p, cap=cap)


def _invert_map(index_map: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(index_map)
    for i, j in enumerate(index_map):
        out[j] = i
    return tuple(out)


def orbit_pseudometric(a: GroupAction, x: Hashable, domain: ElementSet,
                       cap: int = DEFAULT_BALL_CAP) -> PseudoMetric:
    """Pull back the space metric along the orbit map g -> g.x."""
    if x not in a.space.metric:
        raise ValueError(f"basepoint {x!r} is not a point of the space")
    points = tuple(sorted(domain))
    orbit_points = [a.act(g, x, cap=cap) for g in points]
    metric = a.space.metric
    rows = [[metric.d(p, q) for q in orbit_points] for p in orbit_points]
    d = PseudoMetric(points, rows)
    d.left_invariant = verify_left_invariance(d)
    return d


# --- coboundedness, Macbeath sets, Milnor-Schwarz -----------------------------------


@dataclass(frozen=True)
class CoboundednessReport:
    covered: bool
    radius: Fraction
    uncovered: tuple
    orbit_size: int


def check_cobounded(a: GroupAction, x: Hashable, R) -> CoboundednessReport:
    """Does the closed R-ball around the orbit of x cover the whole space?"""
    R = Fraction(R)
    orbit = a.orbit(x)
    uncovered = []
    for p in a.space.points:
        distances = [a.space.d(p, o) for o in orbit]
        if not any(v is not None and v <= R for v in distances):
            uncovered.append(p)
    return CoboundednessReport(not uncovered, R, tuple(uncovered), len(orbit))


def closed_ball(space: FiniteMetricSpace, x: Hashable, M) -> tuple[Hashable, ...]:
    M = Fraction(M)
    return tuple(p for p in space.points
                 if space.d(x, p) is not None and space.d(x, p) <= M)


def macbeath_set(a: GroupAction, x: Hashable, M, ball: ElementSet,
                 cap: int = DEFAULT_BALL_CAP) -> ElementSet:
    """Elements of the search ball whose translate of B_M(x) meets B_M(x).

    The result is asserted to be symmetric and to contain the identity, which
    fails only when the search ball itself is not symmetric with identity.
    """
    B = set(closed_ball(a.space, x, M))
    members = []
    for g in ball:
        image = {a.act(g, p, cap=cap) for p in B}
        if image & B:
            members.append(g)
    S = ElementSet(ball.model, members)
    if not S.is_symmetric or not S.contains_identity:
        raise PreconditionError(
            "macbeath set came out asymmetric or without identity; "
            "the search ball must be symmetric and contain the identity")
    return S


@dataclass(frozen=True)
class GenerationReport:
    generates: bool
    missing: tuple
    closure_size: int
    closure_complete: bool


def check_generates(S: ElementSet, target: ElementSet,
                    cap: Optional[int] = None) -> GenerationReport:
    """Grow the closure of S until it covers the target, stalls, or hits the cap."""
    if cap is None:
        cap = max(10 * len(target), 1000)
    model = S.model
    steps = sorted({g for g in S} | {invert(g) for g in S})
    elements: set[Element] = {model.identity} | set(steps)
    frontier = sorted(elements)
    remaining = {g for g in target if g not in elements}
    complete = True
    while frontier and remaining:
        if len(elements) > cap:
            complete = False
            break
        layer: set[Element] = set()
        for g in frontier:
            for s in steps:
                h = compose(g, s)
                if h not in elements:
                    layer.add(h)
        elements |= layer
        remaining -= layer
        frontier = sorted(layer)
    missing = tuple(sorted(remaining))
    return GenerationReport(not missing, missing, len(elements), complete)


def m_chainable(space: FiniteMetricSpace, M) -> bool:
    """Any two points joined by a chain with steps of length at most M."""
    M = Fraction(M)
    n = len(space.points)
    if n == 0:
        return True
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for j in range(n):
                if j not in seen:
                    v = space.metric.at(i, j)
                    if v is not None and v <= M:
                        seen.add(j)
                        nxt.append(j)
        frontier = nxt
    return len(seen) == n


@dataclass(frozen=True)
class MilnorSchwarzRow:
    element: Element
    word_length: Optional[int]
    distance: Value
    bound: Fraction
    holds: bool


@dataclass(frozen=True)
class MilnorSchwarzReport:
    holds: bool
    chainable: bool
    macbeath: Optional[ElementSet]
    rows: tuple
    max_slack: Optional[Fraction]


def milnor_schwarz_check(a: GroupAction, x: Hashable, M, ball: ElementSet,
                         cap: int = DEFAULT_BALL_CAP) -> MilnorSchwarzReport:
    """Verify word lengths over the radius-3M Macbeath set against distance/M + 1.

    Coboundedness at radius M is a hard precondition; failure of M-chainability
    is reported rather than producing vacuous bounds.
    """
    M = Fraction(M)
    cob = check_cobounded(a, x, M)
    if not cob.covered:
        raise PreconditionError(
            f"action is not cobounded at radius {M}: "
            f"uncovered points {list(cob.uncovered)[:4]}")
    if not m_chainable(a.space, M):
        return MilnorSchwarzReport(False, False, None, (), None)
    S = macbeath_set(a, x, 3 * M, ball, cap=cap)
    lengths = word_lengths(a.group, S, ball, cap=cap)
    rows = []
    holds = True
    max_slack: Optional[Fraction] = None
    for g in ball:
        dist = a.space.d(x, a.act(g, x, cap=cap))
        bound = dist / M + 1
        length = lengths[g]
        ok = length is not None and Fraction(length) <= bound
        holds = holds and ok
        if ok:
            slack = bound - length
            if max_slack is None or slack > max_slack:
                max_slack = slack
        rows.append(MilnorSchwarzRow(g, length, dist, bound, ok))
    return MilnorSchwarzReport(holds, True, S, tuple(rows), max_slack)


# --- coarse properness and quasi-continuity ------------------------------------------


@dataclass(frozen=True)
class CoarsePropernessReport:
    elements: ElementSet
    diameter: Value
    bound: Fraction
    within_bound: bool
    witness: Optional[tuple]


def coarse_properness_check(a: GroupAction, x: Hashable, R, ball: ElementSet,
                            bound, reference: PseudoMetric,
                            cap: int = DEFAULT_BALL_CAP) -> CoarsePropernessReport:
    """Reference-diameter of {g : g.B_R(x) meets B_R(x)} against a bound."""
    R = Fraction(R)
    bound = Fraction(bound)
    B = set(closed_ball(a.space, x, R))
    members = []
    for g in ball:
        image = {a.act(g, p, cap=cap) for p in B}
        if image & B:
            members.append(g)
    W = ElementSet(ball.model, members)
    for g in W:
        if g not in reference:
            raise PreconditionError(
                f"reference metric does not cover {g}; it must be a metric on the ball")
    diameter: Value = Fraction(0)
    witness = None
    for g in W:
        for h in W:
            v = reference.d(g, h)
            if v is None:
                diameter = None
                witness = (g, h)
                break
            if diameter is not None and v > diameter:
                diameter = v
                witness = (g, h)
        if diameter is None:
            break
    within = diameter is not None and diameter <= bound
    return CoarsePropernessReport(W, diameter, bound, within, witness)


@dataclass(frozen=True)
class QuasiContinuityReport:
    ok: bool
    eps: Fraction
    violations: tuple


def quasi_continuity_check(a: GroupAction, eps,
                           neighborhoods: Mapping[Hashable, ElementSet],
                           cap: int = DEFAULT_BALL_CAP) -> QuasiContinuityReport:
    """Verify d(x, g.x) <= eps for every x and every g in its neighborhood set."""
    eps = Fraction(eps)
    violations = []
    for x in sorted(neighborhoods, key=lambda p: a.space.metric.index(p)):
        for g in neighborhoods[x]:
            dist = a.space.d(x, a.act(g, x, cap=cap))
            if dist is None or dist > eps:
                violations.append((x, g, dist))
    return QuasiContinuityReport(not violations, eps, tuple(violations))
