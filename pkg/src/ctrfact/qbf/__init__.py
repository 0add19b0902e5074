"""Quantified boolean formulas: evaluation, encodings and solver formats."""

from .encode import (
    CauseEncoder, McEncoder, encode_actual_cause, encode_hardness, encode_mc, hardness_fresh_names,
)
from .export import (
    QbfFormatError, alternation_depth, export_qcir, export_qdimacs, nnf, parse_qcir,
    parse_qdimacs, prenex, quantifier_prefix,
)
from .formula import (
    QFALSE, QTRUE, Exists, Forall, OpenFormulaError, QAnd, QbfFormula, QConst, QIff, QImplies,
    QNot, QOr, QVar, bound_vars, default_var_order, eval_qbf, exists, forall, free_vars, iff,
    implies, is_closed, qand, qbf_size, qnot, qor, qvar, rename_apart,
)

__all__ = [
    "QbfFormula", "QVar", "QConst", "QNot", "QAnd", "QOr", "QImplies", "QIff", "Forall", "Exists",
    "QTRUE", "QFALSE", "qvar", "qnot", "qand", "qor", "implies", "iff", "forall", "exists",
    "free_vars", "bound_vars", "qbf_size", "is_closed", "rename_apart", "eval_qbf",
    "OpenFormulaError", "default_var_order",
    "McEncoder", "CauseEncoder", "encode_mc", "encode_actual_cause", "encode_hardness",
    "hardness_fresh_names",
    "nnf", "prenex", "quantifier_prefix", "alternation_depth", "export_qcir", "parse_qcir",
    "export_qdimacs", "parse_qdimacs", "QbfFormatError",
]
