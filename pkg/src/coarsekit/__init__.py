"""coarsekit: exact desk-scale computations in coarse geometric group theory."""

from .groups import (
    CapacityError,
    CosetPartition,
    Element,
    ElementSet,
    GroupModel,
    LATTICE,
    ModelMismatchError,
    PERMUTATION,
    PreconditionError,
    ball,
    compose,
    cosets,
    element_from_text,
    enumerate_subgroup,
    invert,
    set_product,
    symmetrize,
)
from .metrics import (
    Filtration,
    MetricReport,
    OutOfFiltrationError,
    PseudoMetric,
    bk_norm,
    bk_pseudometric,
    combine,
    hat_metric,
    validate,
    word_metric,
)

__all__ = [
    "CapacityError",
    "CosetPartition",
    "Element",
    "ElementSet",
    "Filtration",
    "GroupModel",
    "LATTICE",
    "MetricReport",
    "ModelMismatchError",
    "OutOfFiltrationError",
    "PERMUTATION",
    "PreconditionError",
    "PseudoMetric",
    "ball",
    "bk_norm",
    "bk_pseudometric",
    "combine",
    "compose",
    "cosets",
    "element_from_text",
    "enumerate_subgroup",
    "hat_metric",
    "invert",
    "set_product",
    "symmetrize",
    "validate",
    "word_metric",
]
