"""Exact group models: permutations of 1..n, integer lattice vectors, set algebra.

Permutations compose as functions applied right to left: (a*b)(x) = a(b(x)).
Element payloads are tuples; the lexicographic order on payloads is the
canonical order used everywhere for deterministic iteration and tie-breaking.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

PERMUTATION = "finite-permutation"
LATTICE = "abelian-lattice"

DEFAULT_BALL_CAP = 200_000
DEFAULT_CLOSURE_CAP = 100_000


class ModelMismatchError(ValueError):
    """Operands belong to incompatible group models."""


class PreconditionError(ValueError):
    """A documented precondition of an operation does not hold."""


class CapacityError(RuntimeError):
    """A search exceeded its configured cap."""


class Element:
    """A single group element owned by a :class:`GroupModel`.

    The payload is either a tuple of images ``(g(1), ..., g(n))`` for a
    permutation of ``1..n``, or an integer vector for a lattice model.
    """

    __slots__ = ("model", "payload")

    def __init__(self, model: "GroupModel", payload: tuple[int, ...]):
        self.model = model
        self.payload = payload

    def __mul__(self, other: "Element") -> "Element":
        return compose(self, other)

    def inverse(self) -> "Element":
        return invert(self)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Element) and self.payload == other.payload

    def __hash__(self) -> int:
        return hash(self.payload)

    def __lt__(self, other: "Element") -> bool:
        return self.payload < other.payload

    def __le__(self, other: "Element") -> bool:
        return self.payload <= other.payload

    def is_identity(self) -> bool:
        return self == self.model.identity

    def __str__(self) -> str:
        if self.model.kind == PERMUTATION:
            return cycle_string(self.payload)
        return "(" + ",".join(str(x) for x in self.payload) + ")"

    def __repr__(self) -> str:
        return f"Element({self})"


class GroupModel:
    """A concrete computable group with an exact element algebra.

    kind is either ``finite-permutation`` (elements permute ``1..degree``) or
    ``abelian-lattice`` (elements are integer vectors of length ``degree``,
    composed by addition).
    """

    def __init__(self, kind: str, degree: int, generators: Iterable[tuple[int, ...]],
                 name: str = ""):
        if kind not in (PERMUTATION, LATTICE):
            raise ValueError(f"unknown group kind {kind!r}")
        if degree < 1:
            raise ValueError(f"degree/rank must be positive, got {degree}")
        self.kind = kind
        self.degree = degree
        self.name = name or kind
        gens = tuple(self.element(p) for p in generators)
        if not gens:
            raise ValueError("generator list is empty")
        self.generators = gens
        self._generator_names: dict[str, Element] = {}

    def element(self, payload: Iterable[int]) -> Element:
        """Validate a payload and wrap it as an Element of this model."""
        p = tuple(int(x) for x in payload)
        if len(p) != self.degree:
            raise ValueError(
                f"payload length {len(p)} does not match degree/rank {self.degree}")
        if self.kind == PERMUTATION and sorted(p) != list(range(1, self.degree + 1)):
            raise ValueError(f"{p} is not a permutation of 1..{self.degree}")
        return Element(self, p)

    @property
    def identity(self) -> Element:
        if self.kind == PERMUTATION:
            return Element(self, tuple(range(1, self.degree + 1)))
        return Element(self, (0,) * self.degree)

    def name_generator(self, name: str, gen: Element) -> None:
        self._generator_names[name] = gen

    def generator_named(self, name: str) -> Element:
        try:
            return self._generator_names[name]
        except KeyError:
            raise KeyError(f"no generator named {name!r} in group {self.name!r}") from None

    def __repr__(self) -> str:
        return f"GroupModel({self.name!r}, {self.kind}, degree={self.degree})"


def _common_model(a: Element, b: Element) -> GroupModel:
    ma, mb = a.model, b.model
    if ma is mb:
        return ma
    if ma.kind == mb.kind and ma.degree == mb.degree:
        return ma
    raise ModelMismatchError(
        f"mixed-model operands: {ma.kind}/{ma.degree} vs {mb.kind}/{mb.degree}")


def compose(a: Element, b: Element) -> Element:
    """Return a*b. Permutations apply right to left; lattice vectors add."""
    m = _common_model(a, b)
    if m.kind == PERMUTATION:
        pa = a.payload
        return Element(m, tuple(pa[x - 1] for x in b.payload))
    return Element(m, tuple(x + y for x, y in zip(a.payload, b.payload)))


def invert(a: Element) -> Element:
    """Return the group inverse of a."""
    m = a.model
    if m.kind == PERMUTATION:
        inv = [0] * m.degree
        for i, image in enumerate(a.payload):
            inv[image - 1] = i + 1
        return Element(m, tuple(inv))
    return Element(m, tuple(-x for x in a.payload))


class ElementSet:
    """A finite set of elements of one model, kept sorted in canonical order.

    The symmetry and identity flags are verified properties computed from the
    members, never caller declarations.  ``complete`` is False only for
    truncated closures returned by :func:`enumerate_subgroup`.
    """

    def __init__(self, model: GroupModel, elements: Iterable[Element],
                 complete: bool = True):
        members = sorted(set(elements))
        for g in members:
            _common_model(g, model.identity)
        self.model = model
        self.members = tuple(members)
        self._payloads = frozenset(g.payload for g in members)
        self.complete = complete
        self._symmetric: Optional[bool] = None
        self._has_identity: Optional[bool] = None

    def __contains__(self, g: Element) -> bool:
        return g.payload in self._payloads

    def __iter__(self) -> Iterator[Element]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ElementSet) and self._payloads == other._payloads

    def __hash__(self) -> int:
        return hash(self._payloads)

    def __repr__(self) -> str:
        inner = ", ".join(str(g) for g in itertools.islice(self.members, 8))
        more = ", ..." if len(self) > 8 else ""
        return f"ElementSet[{len(self)}]{{{inner}{more}}}"

    @property
    def is_symmetric(self) -> bool:
        if self._symmetric is None:
            self._symmetric = all(invert(g) in self for g in self.members)
        return self._symmetric

    @property
    def contains_identity(self) -> bool:
        if self._has_identity is None:
            self._has_identity = self.model.identity in self
        return self._has_identity

    def require_symmetric_with_identity(self, what: str) -> None:
        if not self.is_symmetric:
            raise PreconditionError(f"{what} is not symmetric (call symmetrize first)")
        if not self.contains_identity:
            raise PreconditionError(f"{what} does not contain the identity")

    def issubset(self, other: "ElementSet") -> bool:
        return self._payloads <= other._payloads

    def union(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self.model, self.members + other.members)


def set_product(A: ElementSet, B: ElementSet) -> ElementSet:
    """Exact product set {a*b : a in A, b in B}."""
    if A.model.kind != B.model.kind or A.model.degree != B.model.degree:
        raise ModelMismatchError("set_product operands come from different models")
    return ElementSet(A.model, (compose(a, b) for a in A for b in B))


def symmetrize(A: ElementSet) -> ElementSet:
    """Return A together with all inverses and the identity."""
    members = list(A.members)
    members.extend(invert(g) for g in A.members)
    members.append(A.model.identity)
    return ElementSet(A.model, members)


def ball(G: GroupModel, S: ElementSet, r: int,
         cap: int = DEFAULT_BALL_CAP) -> dict[Element, int]:
    """Word-length ball of radius r: every element of length <= r with its length.

    S must already be symmetric with identity.  Iteration order of the result
    is breadth first, lexicographic within each length layer.
    """
    if r < 0:
        raise ValueError(f"radius must be nonnegative, got {r}")
    S.require_symmetric_with_identity("ball generating set")
    identity = G.identity
    lengths: dict[Element, int] = {identity: 0}
    steps = [s for s in S if not s.is_identity()]
    frontier = [identity]
    for length in range(1, r + 1):
        layer: set[Element] = set()
        for g in frontier:
            for s in steps:
                h = compose(g, s)
                if h not in lengths:
                    layer.add(h)
        frontier = sorted(layer)
        for h in frontier:
            lengths[h] = length
        if len(lengths) > cap:
            raise CapacityError(f"ball of radius {length} exceeds the cap of {cap} elements")
        if not frontier:
            break
    return lengths


def enumerate_subgroup(G: GroupModel, gens: ElementSet,
                       cap: int = DEFAULT_CLOSURE_CAP) -> ElementSet:
    """Closure of gens under product and inverse, truncated at cap.

    The result is flagged complete only when the closure stabilized within the
    cap; an incomplete partial closure is a flagged result, not an error.
    """
    if len(gens) == 0:
        raise PreconditionError("enumerate_subgroup needs a nonempty generating set")
    steps = sorted({g for g in gens} | {invert(g) for g in gens})
    elements: set[Element] = {G.identity} | set(steps)
    frontier = sorted(elements)
    complete = True
    while frontier:
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
        frontier = sorted(layer)
    return ElementSet(G, elements, complete=complete)


def subgroup_witness(V: ElementSet) -> Optional[str]:
    """Return None when V is a subgroup, else a human-readable counterexample."""
    if len(V) == 0:
        return "empty set"
    if not V.contains_identity:
        return "identity missing"
    for g in V:
        if invert(g) not in V:
            return f"inverse of {g} missing"
    for g in V:
        for h in V:
            if compose(g, h) not in V:
                return f"product {g}*{h} escapes the set"
    return None


def require_subgroup(V: ElementSet, what: str = "V") -> None:
    witness = subgroup_witness(V)
    if witness is not None:
        raise PreconditionError(f"{what} is not a subgroup: {witness}")


@dataclass(frozen=True)
class CosetPartition:
    """Partition of a set into left cosets gV with canonical representatives."""

    subgroup: ElementSet
    representatives: tuple[Element, ...]
    rep_of: dict[Element, Element]
    blocks: dict[Element, tuple[Element, ...]]

    def __len__(self) -> int:
        return len(self.representatives)


def cosets(G_elements: ElementSet, V: ElementSet) -> CosetPartition:
    """Partition G_elements into left cosets gV.

    The canonical representative of each coset is its lexicographically least
    member.  V must be a verified subgroup and G_elements must be closed under
    right multiplication by V.
    """
    require_subgroup(V)
    rep_of: dict[Element, Element] = {}
    blocks: dict[Element, tuple[Element, ...]] = {}
    reps: list[Element] = []
    for g in G_elements:
        if g in rep_of:
            continue
        block = sorted(compose(g, v) for v in V)
        for member in block:
            if member not in G_elements:
                raise PreconditionError(
                    f"coset member {member} of {g}V lies outside the element set: "
                    "it must be closed under right multiplication by V")
        rep = block[0]
        reps.append(rep)
        blocks[rep] = tuple(block)
        for member in block:
            rep_of[member] = rep
    return CosetPartition(V, tuple(sorted(reps)), rep_of, blocks)


# --- parsing and formatting -------------------------------------------------

_CYCLE_RE = re.compile(r"\(\s*((?:\d+[\s]*)*)\)")


def perm_from_cycles(degree: int, text: str) -> tuple[int, ...]:
    """Parse cycle notation like ``(1 2)(3 4)`` into an image tuple.

    ``()`` denotes the identity.  Cycles multiply right to left, matching the
    composition convention, though the usual input is disjoint cycles where
    the order is immaterial.
    """
    stripped = text.replace(" ", "")
    consumed = "".join(m.group(0) for m in _CYCLE_RE.finditer(stripped)).replace(" ", "")
    if consumed != stripped:
        raise ValueError(f"cannot parse permutation {text!r}")
    images = list(range(1, degree + 1))
    for match in reversed(list(_CYCLE_RE.finditer(text))):
        points = [int(tok) for tok in match.group(1).split()]
        if len(set(points)) != len(points):
            raise ValueError(f"repeated point in cycle {match.group(0)!r}")
        if any(p < 1 or p > degree for p in points):
            raise ValueError(f"cycle {match.group(0)!r} exceeds degree {degree}")
        if len(points) < 2:
            continue
        cycle_map = {points[i]: points[(i + 1) % len(points)] for i in range(len(points))}
        images = [cycle_map.get(x, x) for x in images]
    return tuple(images)


def cycle_string(payload: tuple[int, ...]) -> str:
    """Format an image tuple as a product of disjoint cycles; identity is ``()``."""
    seen: set[int] = set()
    parts = []
    for start in range(1, len(payload) + 1):
        if start in seen or payload[start - 1] == start:
            continue
        cycle = [start]
        x = payload[start - 1]
        while x != start:
            cycle.append(x)
            x = payload[x - 1]
        seen.update(cycle)
        parts.append("(" + " ".join(str(p) for p in cycle) + ")")
    return "".join(parts) if parts else "()"


def vector_from_text(rank: int, text: str) -> tuple[int, ...]:
    """Parse a lattice element literal like ``(2,-3)``."""
    stripped = text.strip()
    if not (stripped.startswith("(") and stripped.endswith(")")):
        raise ValueError(f"cannot parse lattice element {text!r}")
    body = stripped[1:-1].strip()
    parts = [p.strip() for p in body.split(",")] if body else []
    if len(parts) != rank or any(not re.fullmatch(r"-?\d+", p) for p in parts):
        raise ValueError(f"lattice element {text!r} is not an integer vector of rank {rank}")
    return tuple(int(p) for p in parts)


def element_from_text(G: GroupModel, text: str) -> Element:
    """Parse an element literal in the model's notation."""
    if G.kind == PERMUTATION:
        return G.element(perm_from_cycles(G.degree, text))
    return G.element(vector_from_text(G.degree, text))
