import pytest

from coarsekit.groups import (
    LATTICE,
    PERMUTATION,
    ElementSet,
    GroupModel,
    element_from_text,
    symmetrize,
)


@pytest.fixture
def s3():
    return GroupModel(PERMUTATION, 3, [(2, 1, 3), (1, 3, 2)], name="S3")


@pytest.fixture
def z2():
    return GroupModel(LATTICE, 2, [(1, 0), (0, 1)], name="Z2")


@pytest.fixture
def z8():
    # Z/8 as the rotation subgroup of S_8 generated by an 8-cycle.
    return GroupModel(PERMUTATION, 8, [(2, 3, 4, 5, 6, 7, 8, 1)], name="Z8")


@pytest.fixture
def z12():
    images = tuple(list(range(2, 13)) + [1])
    return GroupModel(PERMUTATION, 12, [images], name="Z12")


def perm(G, text):
    return element_from_text(G, text)


def vec(G, *coords):
    return G.element(coords)


def gen_set(G):
    return symmetrize(ElementSet(G, G.generators))
