"""Quantitative comparison of pseudometrics: coarse Lipschitz and QI constant
fitting, closeness, domination, and Rosendal coarse-boundedness certificates.

A coarse Lipschitz fit collects one half-plane K >= dY - L*dX per point pair
and intersects them exactly; the Pareto frontier is the vertex list of the
resulting upper envelope together with the point where it meets K = 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Mapping, Optional, Sequence

from .groups import (
    Element,
    ElementSet,
    PreconditionError,
    compose,
    invert,
    set_product,
)
from .metrics import PseudoMetric, Value


@dataclass(frozen=True)
class QIReport:
    """Result of a constant fit; L and K are None only when infeasible."""

    feasible: bool
    L: Optional[Fraction]
    K: Optional[Fraction]
    C: Optional[Fraction]
    direction: str
    pareto: tuple[tuple[Fraction, Fraction], ...]
    witnesses: tuple
    unconstrained: bool = False
    infeasible_pairs: tuple = ()
    pareto_backward: tuple = ()
    coarsely_surjective: Optional[bool] = None
    quasi_isometry: Optional[bool] = None


@dataclass(frozen=True)
class CBReport:
    """Coarse-boundedness verdict with a re-checkable certificate when bounded."""

    verdict: str
    F: Optional[ElementSet] = None
    U: Optional[ElementSet] = None
    k: Optional[int] = None
    failing_chain_index: Optional[int] = None


@dataclass(frozen=True)
class ExhaustionReport:
    contained_at: Optional[int]
    witness: Optional[Element]


@dataclass(frozen=True)
class DominationReport:
    holds_at_scale: bool
    fit: QIReport
    domain_size: int


# --- envelope machinery ---------------------------------------------------------


def _upper_envelope(constraints: list[tuple[Fraction, Fraction, tuple]]):
    """Vertices of the Pareto frontier for K >= b - a*L, a > 0, b > 0, K >= 0.

    Returns (vertices, witnesses): the envelope breakpoints with K > 0 followed
    by the point (max b/a, 0), and the constraint pairs supporting them.
    """
    best: dict[Fraction, tuple[Fraction, tuple]] = {}
    for a, b, pair in constraints:
        if a not in best or b > best[a][0]:
            best[a] = (b, pair)
    # lines K = b - a*L sorted by slope -a ascending, i.e. a descending
    lines = sorted(((a, b, pair) for a, (b, pair) in best.items()),
                   key=lambda t: (-t[0], t[1]))

    def crossing(l1, l2) -> Fraction:
        # L where b1 - a1*L = b2 - a2*L
        return (l1[1] - l2[1]) / (l1[0] - l2[0])

    hull: list[tuple[Fraction, Fraction, tuple]] = []
    for line in lines:
        while hull:
            if len(hull) >= 2 and crossing(hull[-2], line) <= crossing(hull[-2], hull[-1]):
                hull.pop()
                continue
            if len(hull) == 1 and line[1] >= hull[-1][1]:
                # same or higher intercept with shallower slope: previous line
                # never exceeds the new one for L >= 0
                hull.pop()
                continue
            break
        hull.append(line)
    vertices: list[tuple[Fraction, Fraction]] = []
    witnesses: list[tuple] = []
    for prev, cur in zip(hull, hull[1:]):
        x = crossing(prev, cur)
        y = prev[1] - prev[0] * x
        if x > 0 and y > 0:
            vertices.append((x, y))
            witnesses.extend([prev[2], cur[2]])
    root_line = max(lines, key=lambda t: (t[1] / t[0], t[1]))
    L0 = root_line[1] / root_line[0]
    vertices = [v for v in vertices if v[0] < L0]
    vertices.append((L0, Fraction(0)))
    witnesses.append(root_line[2])
    seen = set()
    unique_witnesses = []
    for w in witnesses:
        if w not in seen:
            seen.add(w)
            unique_witnesses.append(w)
    return tuple(vertices), tuple(unique_witnesses)


def _fit_pairs(pairs: list[tuple[Value, Value, tuple]]):
    """Classify (source distance, target distance, pair) triples into a fit.

    Returns (feasible, unconstrained, pareto, witnesses, infeasible_pairs).
    """
    constraints = []
    infeasible = []
    for dx, dy, pair in pairs:
        if dx is None:
            continue  # an infinite source distance imposes no constraint
        if dy is None:
            infeasible.append(pair + (dx, dy))
            continue
        if dx == 0:
            if dy > 0:
                infeasible.append(pair + (dx, dy))
            continue
        if dy > 0:
            constraints.append((dx, dy, pair))
    if infeasible:
        return False, False, (), (), tuple(infeasible)
    if not constraints:
        return True, True, (), (), ()
    pareto, witnesses = _upper_envelope(constraints)
    return True, False, pareto, witnesses, ()


def _normalize_map(f, points: Sequence[Hashable]) -> dict:
    if callable(f):
        return {p: f(p) for p in points}
    return {p: f[p] for p in points}


def fit_coarse_lipschitz(f, dX: PseudoMetric, dY: PseudoMetric) -> QIReport:
    """Exact Pareto frontier of (L, K) with dY(f x, f y) <= L dX(x, y) + K.

    Pairs at source distance 0 with positive image distance make the fit
    infeasible; that is a reported verdict, not an exception.  The headline
    (L, K) is the frontier endpoint with K = 0 and least such L.
    """
    fmap = _normalize_map(f, dX.points)
    for p, q in fmap.items():
        if q not in dY:
            raise ValueError(f"image {q!r} of {p!r} lies outside the target metric")
    pairs = []
    pts = dX.points
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            pairs.append((dX.d(p, q), dY.d(fmap[p], fmap[q]), (p, q)))
    feasible, unconstrained, pareto, witnesses, infeasible_pairs = _fit_pairs(pairs)
    if not feasible:
        return QIReport(False, None, None, None, "forward", (), (),
                        infeasible_pairs=infeasible_pairs)
    if unconstrained:
        return QIReport(True, Fraction(1), Fraction(0), None, "forward", (), (),
                        unconstrained=True)
    L, K = pareto[-1]
    return QIReport(True, L, K, None, "forward", pareto, witnesses)


def fit_qi(f, dX: PseudoMetric, dY: PseudoMetric) -> QIReport:
    """Two-sided fit: forward coarse Lipschitz constants, backward embedding
    constants, coarse surjectivity, and a shared headline pair.

    The shared (L, K) takes coordinatewise maxima of the per-direction
    headline pairs (with L at least 1 so the embedding form absorbs K).
    """
    fmap = _normalize_map(f, dX.points)
    forward = fit_coarse_lipschitz(fmap, dX, dY)
    pairs = []
    pts = dX.points
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            pairs.append((dY.d(fmap[p], fmap[q]), dX.d(p, q), (p, q)))
    b_feasible, b_unconstrained, b_pareto, b_witnesses, b_infeasible = _fit_pairs(pairs)
    image = sorted(set(fmap.values()), key=dY.index)
    C: Optional[Fraction] = Fraction(0)
    for y in dY.points:
        options = [dY.d(y, z) for z in image]
        finite = [v for v in options if v is not None]
        if not finite:
            C = None
            break
        nearest = min(finite)
        if C is not None and nearest > C:
            C = nearest
    surjective = C is not None
    feasible = forward.feasible and b_feasible
    if not feasible:
        return QIReport(False, None, None, C, "two-sided", forward.pareto,
                        forward.witnesses,
                        infeasible_pairs=forward.infeasible_pairs + b_infeasible,
                        pareto_backward=b_pareto, coarsely_surjective=surjective,
                        quasi_isometry=False)
    Lb, Kb = (b_pareto[-1] if b_pareto else (Fraction(1), Fraction(0)))
    L = max(Fraction(1), forward.L, Lb)
    K = max(forward.K, Kb)
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            dx, dy = dX.d(p, q), dY.d(fmap[p], fmap[q])
            if dx is not None and dy is not None:
                if dy > L * dx + K or dx > L * dy + L * K:
                    raise AssertionError("shared quasi-isometry constants fail a pair")
    return QIReport(True, L, K, C, "two-sided", forward.pareto, forward.witnesses,
                    unconstrained=forward.unconstrained and b_unconstrained,
                    pareto_backward=b_pareto, coarsely_surjective=surjective,
                    quasi_isometry=surjective)


def closeness(f, g, dY: PseudoMetric, points: Optional[Sequence[Hashable]] = None) -> Value:
    """The least C with dY(f x, g x) <= C for all x; None when infinite."""
    if points is None:
        if callable(f) or callable(g):
            raise ValueError("closeness needs an explicit point list for callables")
        common = set(f) & set(g)
        points = sorted(common, key=str)
        if set(f) != set(g):
            raise ValueError("closeness needs maps over a common domain")
    fmap = _normalize_map(f, points)
    gmap = _normalize_map(g, points)
    best = Fraction(0)
    for x in points:
        for image in (fmap[x], gmap[x]):
            if image not in dY:
                raise ValueError(f"image {image!r} lies outside the target metric")
        v = dY.d(fmap[x], gmap[x])
        if v is None:
            return None
        if v > best:
            best = v
    return best


def dominates(d: PseudoMetric, d2: PseudoMetric) -> DominationReport:
    """Fit coarse Lipschitz constants for the identity map (d -> d2)."""
    if d.points != d2.points:
        raise PreconditionError("domination compares metrics on one point set")
    fit = fit_coarse_lipschitz({p: p for p in d.points}, d, d2)
    return DominationReport(fit.feasible, fit, len(d.points))


# --- Rosendal's criterion and exhaustion chains -----------------------------------


def _grow_products(F: ElementSet, U: ElementSet, k_max: int, targets: set):
    """Incrementally grow (FU)^k, reporting the least k covering the targets."""
    fu = {compose(f, u) for f in F for u in U}
    cumulative = set(fu)
    level = set(fu)
    if targets <= cumulative:
        return 1, cumulative
    for k in range(2, k_max + 1):
        level = {compose(x, y) for x in level for y in fu}
        before = len(cumulative)
        cumulative |= level
        if targets <= cumulative:
            return k, cumulative
        if len(cumulative) == before:
            break  # stabilized short of the targets
    return None, cumulative


def verify_rosendal_certificate(A: ElementSet, F: ElementSet, U: ElementSet,
                                k: int) -> bool:
    """Recompute (FU)^k through the set-product API and test the inclusion."""
    fu = set_product(F, U)
    cumulative = fu
    power = fu
    for _ in range(k - 1):
        power = set_product(power, fu)
        cumulative = cumulative.union(power)
    return A.issubset(cumulative)


def rosendal_criterion(A: ElementSet, U: ElementSet, F_pool: ElementSet,
                       k_max: int, F_size_max: int) -> CBReport:
    """Search for finite F and k with A inside (FU)^k.

    Candidate sets F grow k first: each F in deterministic (size, canonical)
    order is expanded through every k before moving on, so the first hit has
    the smallest F that certifies within k_max, at its least k.  Certificates
    re-verify through an independent set-product computation before returning.
    """
    if not U.contains_identity:
        raise PreconditionError("U must contain the identity")
    targets = set(A)
    pool = list(F_pool)
    for size in range(1, min(F_size_max, len(pool)) + 1):
        for combo in itertools.combinations(pool, size):
            F = ElementSet(F_pool.model, combo)
            k, _ = _grow_products(F, U, k_max, targets)
            if k is not None:
                if not verify_rosendal_certificate(A, F, U, k):
                    raise AssertionError("certificate failed independent re-verification")
                return CBReport("certified-bounded", F=F, U=U, k=k)
    return CBReport("inconclusive")


def exhaustion_check(A: ElementSet, chain: Sequence[ElementSet]) -> ExhaustionReport:
    """Least chain index containing A, for verified exhaustion chains.

    Chain entries must nest and satisfy U_n * U_n inside U_{n+1}; a violation
    is a precondition error naming the level.
    """
    chain = list(chain)
    if not chain:
        raise PreconditionError("exhaustion chain is empty")
    for n in range(len(chain) - 1):
        if not chain[n].issubset(chain[n + 1]):
            raise PreconditionError(f"chain nesting fails at level {n}")
        square = set_product(chain[n], chain[n])
        if not square.issubset(chain[n + 1]):
            offender = next(g for g in square if g not in chain[n + 1])
            raise PreconditionError(
                f"chain square condition fails at level {n}: {offender} escapes")
    for n, U in enumerate(chain):
        if A.issubset(U):
            return ExhaustionReport(n, None)
    witness = next(g for g in A if g not in chain[-1])
    return ExhaustionReport(None, witness)


def cb_check(A: ElementSet, U: ElementSet, F_pool: ElementSet, k_max: int,
             F_size_max: int, chain: Optional[Sequence[ElementSet]] = None) -> CBReport:
    """Rosendal search, falling back to an exhaustion-chain refutation."""
    report = rosendal_criterion(A, U, F_pool, k_max, F_size_max)
    if report.verdict == "certified-bounded" or chain is None:
        return report
    ex = exhaustion_check(A, chain)
    if ex.contained_at is None:
        return CBReport("certified-unbounded-at-scale",
                        failing_chain_index=len(chain) - 1)
    return report
