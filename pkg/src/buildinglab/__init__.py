"""buildinglab: exact desk-scale laboratory for affine buildings of PGL_d
over Laurent fields, their finite quotient complexes, and the spectral and
coarse-geometric diagnostics that go with them."""

__version__ = "0.1.0"

from .fields import (
    LaurentElement,
    Poly,
    PrimeField,
    ResidueElement,
    ResidueRing,
    canonical_reduce,
    residue_reduce,
    valuation,
)
from .building import (
    ApartmentCoords,
    LatticeClass,
    apartment_coords,
    ball,
    canonical_form,
    cat0_distance,
    chamber_diameter,
    color,
    graph_distance,
    link,
    neighbors,
    standard_lattice,
)
from .simplicial import ColoredGraph, SimplicialSet
from .flags import (
    Flag,
    Frame,
    Subspace,
    apartment,
    flag_complex,
    group_action,
    root_group_check,
    root_halfapartment,
)
from .quotients import (
    GeneratorSet,
    QuotientComplex,
    build_quotient,
    congruence_reduce,
    covering_check,
    group_closure,
    quotient_complex,
    standard_generators,
    systole,
)
from .spectral import (
    SpectralReport,
    adjacency_spectrum,
    cheeger_estimate,
    colored_spectra,
    ramanujan_check,
)
from .coarse import (
    FiniteMetricSpace,
    GrowthProfile,
    QIWitness,
    distortion_lower_bound,
    embedding_search,
    family_qi_check,
    growth_profile,
    qi_check,
    skeleton_lemma_verify,
)

__all__ = [
    "ApartmentCoords",
    "ColoredGraph",
    "Flag",
    "FiniteMetricSpace",
    "Frame",
    "GeneratorSet",
    "GrowthProfile",
    "LatticeClass",
    "LaurentElement",
    "Poly",
    "PrimeField",
    "QIWitness",
    "QuotientComplex",
    "ResidueElement",
    "ResidueRing",
    "SimplicialSet",
    "SpectralReport",
    "Subspace",
    "__version__",
    "adjacency_spectrum",
    "apartment",
    "apartment_coords",
    "ball",
    "build_quotient",
    "canonical_form",
    "canonical_reduce",
    "cat0_distance",
    "chamber_diameter",
    "cheeger_estimate",
    "color",
    "colored_spectra",
    "congruence_reduce",
    "covering_check",
    "distortion_lower_bound",
    "embedding_search",
    "family_qi_check",
    "flag_complex",
    "graph_distance",
    "group_action",
    "group_closure",
    "growth_profile",
    "link",
    "neighbors",
    "qi_check",
    "quotient_complex",
    "ramanujan_check",
    "residue_reduce",
    "root_group_check",
    "root_halfapartment",
    "skeleton_lemma_verify",
    "standard_generators",
    "standard_lattice",
    "systole",
    "valuation",
]
