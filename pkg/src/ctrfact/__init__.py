"""Counterfactual conditionals over causal bases, actual cause, and their QBF encodings."""

from .causal import (
    CausalCycleError, CauseQueryError, EquationalState, actual_cause_formula,
    actual_cause_via_counterfactuals, build_causal_graph, but_condition, but_condition_via_might,
    enumerate_actual_causes, is_actual_cause, is_dag, solve_post_intervention,
)
from .checker import check_validity, closest_states, model_check, relativize, satisfies
from .formulas import (
    Atom, BoxRight, Delta, DiamondRight, Equation, Formula, ParseError, Term, parse_formula,
    render_formula, term_from_formula,
)
from .modelfile import LoadedModel, ModelError, load_model
from .states import Context, State, at_least_as_close, closest, enumerate_context, strictly_closer

__version__ = "0.1.0"

__all__ = [
    "Atom", "BoxRight", "Delta", "DiamondRight", "Equation", "Formula", "ParseError", "Term",
    "parse_formula", "render_formula", "term_from_formula",
    "Context", "State", "at_least_as_close", "strictly_closer", "closest", "enumerate_context",
    "satisfies", "model_check", "relativize", "closest_states", "check_validity",
    "EquationalState", "CausalCycleError", "CauseQueryError", "build_causal_graph", "is_dag",
    "solve_post_intervention", "but_condition", "but_condition_via_might", "is_actual_cause",
    "actual_cause_formula", "actual_cause_via_counterfactuals", "enumerate_actual_causes",
    "LoadedModel", "ModelError", "load_model",
]
