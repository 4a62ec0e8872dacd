"""Genus symbols, finite quadratic forms and lattice criteria for
symplectic automorphisms of supersingular K3 surfaces."""

from .lattice import GramMatrix, LatticeError, discriminant_form, smith_normal_form
from .genus import (
    GenusError,
    GenusSymbol,
    IllegalSymbol,
    canonicalize_2adic,
    exists,
    negate,
    p_excess,
    p_length,
    parse_symbol,
    print_symbol,
    symbol_from_gram,
)
from .discform import (
    FiniteQuadraticForm,
    FormError,
    GluingDatum,
    WittFailure,
    embeddings,
    enumerate_gluings,
    from_genus,
    glue,
    isometric,
    symbol_of_form,
    witt_complement,
)
from .criteria import Verdict, tame_conditions, legendre_orbit_condition
from .classify import (
    ClassificationEntry,
    classify_entry,
    dataset,
    load_entries,
    mukai_holds,
    mukai_residues,
    reproduce_table,
    validate_entries,
)

__version__ = "0.1.0"
