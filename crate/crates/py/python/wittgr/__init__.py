"""Witt vectors, lattice counts over finite fields, KL polynomials and
affine Deligne-Lusztig checks, backed by the Rust `wittgr` crate."""

from ._wittgr import (
    KlTable,
    WittVector,
    b3_suite,
    cell_polynomial,
    count_cell,
    count_chain,
    count_fiber,
    count_mv,
    defect,
    dimension_report,
    kl_kostka_report,
    kostka_foulkes,
    lusztig_kato,
    lv_polynomial,
    newton_point,
    quotient_check,
    verify_famous_identity,
    verify_minus_q,
    weight_multiplicity,
)

__all__ = [
    "KlTable",
    "WittVector",
    "b3_suite",
    "cell_polynomial",
    "count_cell",
    "count_chain",
    "count_fiber",
    "count_mv",
    "defect",
    "dimension_report",
    "kl_kostka_report",
    "kostka_foulkes",
    "lusztig_kato",
    "lv_polynomial",
    "newton_point",
    "quotient_check",
    "verify_famous_identity",
    "verify_minus_q",
    "weight_multiplicity",
]
