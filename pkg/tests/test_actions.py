import itertools
from fractions import Fraction

import pytest

from coarsekit.actions import (
    ExpressibilityError,
    FiniteMetricSpace,
    GroupAction,
    act,
    check_cobounded,
    check_generates,
    coarse_properness_check,
    m_chainable,
    macbeath_set,
    milnor_schwarz_check,
    orbit_pseudometric,
    quasi_continuity_check,
)
from coarsekit.groups import (
    ElementSet,
    GroupModel,
    LATTICE,
    PERMUTATION,
    PreconditionError,
    ball,
    compose,
    enumerate_subgroup,
    invert,
    symmetrize,
)
from coarsekit.metrics import validate, word_metric

from conftest import gen_set, perm, vec


def rotation(z12, k):
    r = z12.generators[0]
    g = z12.identity
    step = r if k >= 0 else invert(r)
    for _ in range(abs(k)):
        g = compose(g, step)
    return g


def z12_cycle_action(z12):
    space = FiniteMetricSpace.cycle(12)
    r = z12.generators[0]
    return GroupAction(z12, space, {r: tuple(f"v{(i + 1) % 12}" for i in range(12))})


def z12_elements(z12):
    return enumerate_subgroup(z12, ElementSet(z12, z12.generators))


def torus_action(z2, n=12):
    space = FiniteMetricSpace.torus(n, n)
    e1, e2 = z2.generators
    images = {
        e1: tuple(f"v{((i + 1) % n) * n + j}" for i in range(n) for j in range(n)),
        e2: tuple(f"v{i * n + (j + 1) % n}" for i in range(n) for j in range(n)),
    }
    return GroupAction(z2, space, images)


def projection_action(z2, n=21):
    # Z^2 acts on the n-cycle through its first coordinate only.
    space = FiniteMetricSpace.cycle(n)
    e1, e2 = z2.generators
    images = {
        e1: tuple(f"v{(i + 1) % n}" for i in range(n)),
        e2: tuple(f"v{i}" for i in range(n)),
    }
    return GroupAction(z2, space, images)


# --- spaces and actions ---------------------------------------------------------


def test_cycle_space_metric_validates():
    space = FiniteMetricSpace.cycle(12)
    assert validate(space.metric).ok
    assert space.genuine
    assert space.d("v0", "v6") == 6
    assert space.d("v0", "v11") == 1


def test_torus_space_metric_validates():
    space = FiniteMetricSpace.torus(4, 6)
    assert validate(space.metric).ok
    assert space.d("v0", "v3") == 3
    assert space.d("v0", "v5") == 1  # wraps around the second factor


def test_action_rejects_non_isometry(z12):
    space = FiniteMetricSpace.cycle(12)
    r = z12.generators[0]
    bad = ["v0"] + [f"v{i}" for i in range(2, 12)] + ["v1"]  # transposition, not rotation
    with pytest.raises(ValueError, match="isometry"):
        GroupAction(z12, space, {r: tuple(bad)})


def test_act_rotation(z12):
    a = z12_cycle_action(z12)
    assert act(a, rotation(z12, 3), "v2") == "v5"


def test_act_identity_and_inverse_law(z12):
    a = z12_cycle_action(z12)
    for p in a.space.points:
        assert act(a, z12.identity, p) == p
    g = rotation(z12, 5)
    for p in a.space.points:
        assert act(a, g, act(a, invert(g), p)) == p


def test_act_preserves_metric(z12):
    a = z12_cycle_action(z12)
    for g in z12_elements(z12):
        for p, q in itertools.combinations(a.space.points, 2):
            assert a.space.d(p, q) == a.space.d(act(a, g, p), act(a, g, q))


def test_act_well_defined_across_words(z12):
    # r^3 and r^-9 are the same element of Z/12; their point maps must agree.
    a = z12_cycle_action(z12)
    assert rotation(z12, 3) == rotation(z12, -9)
    forward = a.point_map(rotation(z12, 3))
    r_inv_map = a.point_map(invert(z12.generators[0]))
    backward = tuple(range(12))
    for _ in range(9):
        backward = tuple(backward[i] for i in r_inv_map)
    assert forward == backward


def test_act_expressibility_error(z12):
    # The even-rotation model cannot express the odd rotation.
    even = GroupModel(PERMUTATION, 12, [rotation(z12, 2).payload], name="2Z12")
    space = FiniteMetricSpace.cycle(12)
    r2 = even.generators[0]
    a = GroupAction(even, space, {r2: tuple(f"v{(i + 2) % 12}" for i in range(12))})
    odd = even.element(rotation(z12, 1).payload)
    with pytest.raises(ExpressibilityError):
        a.act(odd, "v0")


# --- orbit pseudometric ------------------------------------------------------------


def test_orbit_pseudometric_is_cycle_distance(z12):
    a = z12_cycle_action(z12)
    domain = z12_elements(z12)
    d = orbit_pseudometric(a, "v0", domain)
    for g in domain:
        for h in domain:
            # cross-module oracle: recompute from the action directly
            assert d.d(g, h) == a.space.d(act(a, g, "v0"), act(a, h, "v0"))
    assert d.left_invariant is True
    assert validate(d).ok


def test_orbit_pseudometric_on_point_vanishes(z12):
    point_space = FiniteMetricSpace(
        __import__("coarsekit.metrics", fromlist=["PseudoMetric"]).PseudoMetric(("x",), [[0]]))
    r = z12.generators[0]
    a = GroupAction(z12, point_space, {r: ("x",)})
    d = orbit_pseudometric(a, "x", z12_elements(z12))
    assert all(d.d(g, h) == 0 for g in d.points for h in d.points)


def test_orbit_pseudometric_rejects_unknown_basepoint(z12):
    a = z12_cycle_action(z12)
    with pytest.raises(ValueError, match="not a point"):
        orbit_pseudometric(a, "w0", z12_elements(z12))


# --- coboundedness -------------------------------------------------------------------


def test_cobounded_transitive_at_zero(z12):
    a = z12_cycle_action(z12)
    report = check_cobounded(a, "v0", 0)
    assert report.covered
    assert report.orbit_size == 12


def test_cobounded_trivial_group_fails():
    trivial = GroupModel(PERMUTATION, 2, [(1, 2)], name="1")
    from coarsekit.metrics import PseudoMetric
    space = FiniteMetricSpace(PseudoMetric(("p", "q"), [[0, 1], [1, 0]]))
    a = GroupAction(trivial, space, {trivial.generators[0]: ("p", "q")})
    report = check_cobounded(a, "p", Fraction(1, 2))
    assert not report.covered
    assert report.uncovered == ("q",)


def test_cobounded_even_rotations(z12):
    even = GroupModel(PERMUTATION, 12, [rotation(z12, 2).payload], name="2Z12")
    space = FiniteMetricSpace.cycle(12)
    a = GroupAction(even, space,
                    {even.generators[0]: tuple(f"v{(i + 2) % 12}" for i in range(12))})
    assert a.orbit("v0") == tuple(f"v{i}" for i in range(0, 12, 2))
    assert check_cobounded(a, "v0", 1).covered
    assert not check_cobounded(a, "v0", 0).covered


# --- Macbeath sets --------------------------------------------------------------------


def test_macbeath_z12_radius_three_halves(z12):
    a = z12_cycle_action(z12)
    G = z12_elements(z12)
    S = macbeath_set(a, "v0", Fraction(3, 2), G)
    expected = {rotation(z12, k) for k in (-2, -1, 0, 1, 2)}
    assert set(S) == expected
    assert S.is_symmetric and S.contains_identity


def test_macbeath_zero_radius_free_action(z12):
    a = z12_cycle_action(z12)
    S = macbeath_set(a, "v0", 0, z12_elements(z12))
    assert set(S) == {z12.identity}


def test_macbeath_full_radius(z12):
    a = z12_cycle_action(z12)
    G = z12_elements(z12)
    S = macbeath_set(a, "v0", 6, G)
    assert set(S) == set(G)


def test_macbeath_requires_symmetric_ball(z12):
    a = z12_cycle_action(z12)
    lopsided = ElementSet(z12, [z12.identity, rotation(z12, 1)])
    with pytest.raises(PreconditionError):
        macbeath_set(a, "v0", Fraction(3, 2), lopsided)


# --- generation checks ----------------------------------------------------------------


def test_generates_from_small_rotations(z12):
    G = z12_elements(z12)
    S = ElementSet(z12, [rotation(z12, k) for k in (-2, -1, 0, 1, 2)])
    report = check_generates(S, G)
    assert report.generates
    assert report.missing == ()


def test_identity_does_not_generate(z12):
    G = z12_elements(z12)
    report = check_generates(ElementSet(z12, [z12.identity]), G)
    assert not report.generates
    assert len(report.missing) == 11


def test_even_rotations_do_not_generate(z12):
    G = z12_elements(z12)
    S = ElementSet(z12, [rotation(z12, 2), rotation(z12, -2)])
    report = check_generates(S, G)
    assert not report.generates
    assert len(report.missing) == 6  # the odd rotations


# --- Milnor-Schwarz -------------------------------------------------------------------


def test_milnor_schwarz_z12(z12):
    a = z12_cycle_action(z12)
    G = z12_elements(z12)
    report = milnor_schwarz_check(a, "v0", Fraction(3, 2), G)
    assert report.chainable
    assert report.holds
    row6 = next(r for r in report.rows if r.element == rotation(z12, 6))
    assert row6.bound == 5  # 6 / (3/2) + 1
    assert row6.word_length <= 2
    gen_report = check_generates(report.macbeath, G)
    assert gen_report.generates


def test_milnor_schwarz_identity_row(z12):
    a = z12_cycle_action(z12)
    report = milnor_schwarz_check(a, "v0", Fraction(3, 2), z12_elements(z12))
    row = next(r for r in report.rows if r.element == z12.identity)
    assert row.word_length == 0
    assert row.bound == 1


def test_milnor_schwarz_torus(z2):
    a = torus_action(z2, 12)
    B6 = ElementSet(z2, ball(z2, gen_set(z2), 6))
    report = milnor_schwarz_check(a, "v0", 1, B6)
    assert report.chainable
    assert report.holds
    assert check_generates(report.macbeath, B6).generates


def test_milnor_schwarz_needs_coboundedness(z12):
    even = GroupModel(PERMUTATION, 12, [rotation(z12, 2).payload], name="2Z12")
    space = FiniteMetricSpace.cycle(12)
    a = GroupAction(even, space,
                    {even.generators[0]: tuple(f"v{(i + 2) % 12}" for i in range(12))})
    G = enumerate_subgroup(even, ElementSet(even, even.generators))
    with pytest.raises(PreconditionError, match="cobounded"):
        milnor_schwarz_check(a, "v0", Fraction(1, 2), G)


def test_milnor_schwarz_reports_unchainable(z12):
    # Radius below the unit step size: cobounded (transitive orbit) but the
    # cycle is not chainable with such short hops.
    a = z12_cycle_action(z12)
    report = milnor_schwarz_check(a, "v0", Fraction(1, 2), z12_elements(z12))
    assert not report.chainable
    assert not report.holds
    assert report.rows == ()


def test_m_chainability_threshold():
    space = FiniteMetricSpace.cycle(12)
    assert m_chainable(space, 1)
    assert not m_chainable(space, Fraction(1, 2))


# --- coarse properness ----------------------------------------------------------------


def test_coarse_properness_finite_group_passes(z12):
    a = z12_cycle_action(z12)
    G = z12_elements(z12)
    dS = word_metric(z12, symmetrize(ElementSet(z12, z12.generators)), G)
    report = coarse_properness_check(a, "v0", 2, G, bound=6, reference=dS)
    assert report.within_bound


def test_coarse_properness_torus_ball(z2):
    a = torus_action(z2, 12)
    B5 = ElementSet(z2, ball(z2, gen_set(z2), 5))
    dS = word_metric(z2, gen_set(z2), B5)
    report = coarse_properness_check(a, "v0", 2, B5, bound=8, reference=dS)
    expected = {g for g in B5 if sum(abs(c) for c in g.payload) <= 4}
    assert set(report.elements) == expected
    assert report.diameter == 8
    assert report.within_bound


def test_coarse_properness_projection_fails(z2):
    a = projection_action(z2, 21)
    B10 = ElementSet(z2, ball(z2, gen_set(z2), 10))
    dS = word_metric(z2, gen_set(z2), B10)
    report = coarse_properness_check(a, "v0", 1, B10, bound=6, reference=dS)
    vertical = {g for g in B10 if abs(g.payload[0]) <= 2}
    assert set(report.elements) == vertical
    assert vec(z2, 0, 10) in report.elements
    assert report.diameter == 20
    assert not report.within_bound
    assert report.witness is not None


# --- quasi-continuity ------------------------------------------------------------------


def test_quasi_continuity_identity_neighborhoods(z12):
    a = z12_cycle_action(z12)
    neighborhoods = {p: ElementSet(z12, [z12.identity]) for p in a.space.points}
    assert quasi_continuity_check(a, 0, neighborhoods).ok


def test_quasi_continuity_stabilizers(z2):
    a = projection_action(z2, 21)
    B3 = ElementSet(z2, ball(z2, gen_set(z2), 3))
    stabilizer = ElementSet(z2, [g for g in B3 if a.act(g, "v0") == "v0"])
    assert all(g.payload[0] == 0 for g in stabilizer)
    neighborhoods = {"v0": stabilizer}
    assert quasi_continuity_check(a, 0, neighborhoods).ok


def test_quasi_continuity_unit_rotations(z12):
    a = z12_cycle_action(z12)
    U = ElementSet(z12, [rotation(z12, -1), z12.identity, rotation(z12, 1)])
    neighborhoods = {p: U for p in a.space.points}
    assert quasi_continuity_check(a, 1, neighborhoods).ok
    report = quasi_continuity_check(a, Fraction(1, 2), neighborhoods)
    assert not report.ok
    offenders = {g for _, g, _ in report.violations}
    assert offenders == {rotation(z12, 1), rotation(z12, -1)}
