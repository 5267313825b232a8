"""Bidirectional macro schemes, string attractors and repetitiveness
measures on Thue-Morse words."""

from .construct import base_scheme_t2, lift, upper_bound_scheme
from .schemes import (
    Copy,
    Ground,
    MacroScheme,
    decode,
    ground_count,
    parse,
    serialize,
    source_function,
    validate,
)
from .words import (
    Morphism,
    TM_MORPHISM,
    apply_morphism,
    check_parity_lemma,
    has_overlapping_factors,
    inverse_tm_morphism,
    occurrences,
    thue_morse,
)

__all__ = [
    "Copy",
    "Ground",
    "MacroScheme",
    "Morphism",
    "TM_MORPHISM",
    "apply_morphism",
    "base_scheme_t2",
    "check_parity_lemma",
    "decode",
    "ground_count",
    "has_overlapping_factors",
    "inverse_tm_morphism",
    "lift",
    "occurrences",
    "parse",
    "serialize",
    "source_function",
    "thue_morse",
    "upper_bound_scheme",
    "validate",
]
