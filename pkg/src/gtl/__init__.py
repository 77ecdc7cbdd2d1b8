"""Finite groupoids, their convolution algebras, invariant measures and tracial states."""

from .algebra import (
    AlgebraElement,
    block_decomposition,
    convolve,
    delta,
    element,
    faithful_realization,
    reduced_norm,
    regular_representation,
    star,
)
from .catalog import get as catalog_get
from .groupoid import (
    GroupAction,
    Groupoid,
    GroupoidError,
    fix_set,
    isotropy_group,
    make_transformation_groupoid,
    orbits,
    pair_groupoid,
    product_bisection,
    restrict,
    unit_groupoid,
    validate_groupoid,
)
from .measures import Measure, invariant_vertices, is_essentially_free, is_invariant, measure
from .traces import (
    Trace,
    associated_measure,
    check_exact_sequence,
    is_canonical,
    is_tracial_state,
    isotropy_decomposition,
    tau_fix,
    tau_mu_trace,
    trace_simplex,
    traces_with_measure,
    tracial_ideal,
)
from .verify import search, verify

__version__ = "0.1.0"
