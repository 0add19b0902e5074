"""Equational states, interventions and actual cause.

Two independent routes decide actual cause:

* the interventionist route (``but_condition`` / ``is_actual_cause``), which
  solves the structural equations after each candidate intervention;
* the counterfactual route (``but_condition_via_might`` /
  ``actual_cause_via_counterfactuals``), which model checks a conditional
  formula with no interventions in it.

Both require the causal graph to be acyclic.
"""

from __future__ import annotations

import graphlib
import itertools
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .checker import model_check
from .formulas import (
    BOT, TOP, And, Bot, BoxRight, DiamondRight, Equation, Formula, Not, Term, Top,
    atoms_of, conjoin, enumerate_terms, equation_from_formula, holds, is_propositional,
    negate_term, render_formula, subformulas, TERM_BOUND,
)
from .states import State

__all__ = [
    "EquationalState", "CausalGraph", "CausalCycleError", "CauseQueryError", "TOP_NODE",
    "classify_variables", "build_causal_graph", "is_dag", "intervention_conjunct",
    "intervene_base", "solve_post_intervention", "exo_term", "find_but_witness",
    "but_condition", "but_condition_via_might", "is_actual_cause",
    "actual_cause_formula", "actual_cause_via_counterfactuals", "enumerate_actual_causes",
]

TOP_NODE = "⊤"

Intervention = Mapping[str, bool]


class CausalCycleError(ValueError):
    pass


class CauseQueryError(ValueError):
    pass


@dataclass(frozen=True)
class EquationalState:
    """A state whose causal base holds at most one structural equation per atom."""

    equations: tuple
    valuation: frozenset

    def __init__(self, equations: Mapping[str, Formula] | Iterable[Equation],
                 valuation: Iterable[str] = ()):
        if isinstance(equations, Mapping):
            eqs = [Equation(h, b) for h, b in equations.items()]
        else:
            eqs = list(equations)
        heads = [e.head for e in eqs]
        dupes = sorted({h for h in heads if heads.count(h) > 1})
        if dupes:
            raise ValueError(f"more than one equation for {', '.join(dupes)}")
        eqs.sort(key=lambda e: e.head)
        valuation = frozenset(valuation)
        # raises IncompatibleStateError when V violates an equation
        State((e.as_formula() for e in eqs), valuation)
        object.__setattr__(self, "equations", tuple(eqs))
        object.__setattr__(self, "valuation", valuation)

    @classmethod
    def from_state(cls, state: State) -> "EquationalState":
        eqs = []
        for w in state.base:
            e = equation_from_formula(w)
            if e is None:
                raise ValueError(f"not an equational formula: {render_formula(w)}")
            eqs.append(e)
        return cls(eqs, state.valuation)

    @property
    def equation_map(self) -> dict[str, Formula]:
        return {e.head: e.body for e in self.equations}

    @property
    def base(self) -> frozenset[Formula]:
        return frozenset(e.as_formula() for e in self.equations)

    def as_state(self) -> State:
        return State(self.base, self.valuation)

    @property
    def atoms(self) -> frozenset[str]:
        """Atoms occurring in the causal base."""
        out = set()
        for e in self.equations:
            out.add(e.head)
            out |= atoms_of(e.body)
        return frozenset(out)

    @property
    def endogenous(self) -> frozenset[str]:
        return frozenset(e.head for e in self.equations)

    @property
    def exogenous(self) -> frozenset[str]:
        return self.atoms - self.endogenous

    def __str__(self) -> str:
        eqs = ", ".join(str(e) for e in self.equations)
        return f"({{{eqs}}}, {{{', '.join(sorted(self.valuation))}}})"


def classify_variables(state: EquationalState) -> tuple[frozenset[str], frozenset[str]]:
    """(endogenous, exogenous) atoms of the causal base."""
    return state.endogenous, state.exogenous


@dataclass(frozen=True)
class CausalGraph:
    nodes: frozenset
    parents: dict

    def edges(self) -> list[tuple[str, str]]:
        return sorted((p, child) for child, ps in self.parents.items() for p in ps)

    def topological_order(self) -> list[str]:
        try:
            return list(graphlib.TopologicalSorter(self.parents).static_order())
        except graphlib.CycleError as exc:
            raise CausalCycleError(f"causal graph has a cycle: {' -> '.join(exc.args[1])}") from None


def _atoms_plus(body: Formula) -> set[str]:
    # false abbreviates ~true, so either constant contributes the top node
    out = set(atoms_of(body))
    if any(isinstance(g, (Top, Bot)) for g in subformulas(body)):
        out.add(TOP_NODE)
    return out


def _graph(equations: Mapping[str, Formula]) -> CausalGraph:
    parents: dict[str, frozenset] = {}
    nodes: set[str] = set()
    for head, body in equations.items():
        ps = _atoms_plus(body)
        parents[head] = frozenset(ps)
        nodes |= ps | {head}
    for n in nodes:
        parents.setdefault(n, frozenset())
    return CausalGraph(frozenset(nodes), parents)


def build_causal_graph(state: EquationalState) -> CausalGraph:
    return _graph(state.equation_map)


def is_dag(graph: CausalGraph) -> bool:
    try:
        graph.topological_order()
    except CausalCycleError:
        return False
    return True


def intervention_conjunct(intervention: Intervention) -> Term:
    return Term(intervention)


def intervene_base(equations: Mapping[str, Formula], intervention: Intervention) -> dict[str, Formula]:
    """Replace (or add) the equation of every intervened atom by a constant equation."""
    out = {h: b for h, b in equations.items() if h not in intervention}
    for p, value in intervention.items():
        out[p] = TOP if value else BOT
    return dict(sorted(out.items()))


def solve_post_intervention(state: EquationalState, intervention: Intervention) -> EquationalState:
    """The unique successor state after ``intervention`` that keeps exogenous and off-base values.

    Atoms without an equation in the new base keep their value from the
    original valuation; equation heads are evaluated in topological order.
    """
    outside = set(intervention) - state.endogenous
    if outside:
        raise ValueError(f"interventions must target endogenous atoms; got {sorted(outside)}")
    equations = intervene_base(state.equation_map, intervention)
    valuation = set(state.valuation) - set(equations)
    for node in _graph(equations).topological_order():
        body = equations.get(node)
        if body is not None and holds(body, valuation):
            valuation.add(node)
    return EquationalState(equations, valuation)


def exo_term(state: EquationalState) -> Term:
    """Term fixing every exogenous atom to its actual value."""
    return Term({p: p in state.valuation for p in state.exogenous})


def _check_query(state: EquationalState, term: Term, effect: Formula) -> None:
    if not is_propositional(effect):
        raise CauseQueryError("the effect must be a propositional formula")
    stray = term.atoms - state.endogenous
    if stray:
        raise CauseQueryError(f"cause terms must range over endogenous atoms; {sorted(stray)} are not")
    stray = atoms_of(effect) - state.atoms
    if stray:
        raise CauseQueryError(f"effect atoms {sorted(stray)} do not occur in the causal base")
    if not is_dag(build_causal_graph(state)):
        raise CausalCycleError("actual cause is only defined here for acyclic causal graphs")


def find_but_witness(state: EquationalState, term: Term, effect: Formula
                     ) -> tuple[dict[str, bool], frozenset[str]] | None:
    """Search for an intervention on the term's atoms plus a set of frozen atoms falsifying ``effect``.

    Returns ``(intervention, frozen)`` where ``frozen`` are the endogenous atoms
    outside the term held at their actual values, or None.
    """
    _check_query(state, term, effect)
    free = sorted(state.endogenous - term.atoms)
    for signs in enumerate_terms(term.atoms):
        for size in range(len(free) + 1):
            for frozen in itertools.combinations(free, size):
                # the freezing intervention must hold at the actual state, so it is fixed by its atoms
                e = dict(signs)
                e.update({z: z in state.valuation for z in frozen})
                if not holds(effect, solve_post_intervention(state, e).valuation):
                    return dict(signs), frozenset(frozen)
    return None


def but_condition(state: EquationalState, term: Term, effect: Formula) -> bool:
    return find_but_witness(state, term, effect) is not None


def _might_formula(term: Term, exo: Term, effect: Formula) -> Formula:
    return DiamondRight(And(term.to_formula(), exo.to_formula()), Not(effect))


def but_condition_via_might(state: EquationalState, term: Term, effect: Formula) -> bool:
    """But-condition decided by might-counterfactuals over every sign pattern of the term's atoms."""
    _check_query(state, term, effect)
    if not term.holds_in(state.valuation):
        raise CauseQueryError(f"the term {term} is false at the state")
    exo = exo_term(state)
    plain = state.as_state()
    return any(model_check(_might_formula(alt, exo, effect), state.base, plain)
               for alt in enumerate_terms(term.atoms))


def _strict_subterms(term: Term) -> Iterable[Term]:
    items = sorted(term.items())
    for size in range(len(items)):
        for lits in itertools.combinations(items, size):
            yield Term(lits)


def is_actual_cause(state: EquationalState, term: Term, effect: Formula) -> bool:
    """Interventionist actual cause: true, a but-condition, and minimal among its subterms."""
    _check_query(state, term, effect)
    if not (term.holds_in(state.valuation) and holds(effect, state.valuation)):
        return False
    if not but_condition(state, term, effect):
        return False
    return not any(but_condition(state, sub, effect) for sub in _strict_subterms(term))


def actual_cause_formula(state: EquationalState, term: Term, effect: Formula) -> Formula:
    """The intervention-free conditional formula characterizing actual cause."""
    exo = exo_term(state).to_formula()
    parts = [term.to_formula(),
             DiamondRight(And(negate_term(term).to_formula(), exo), Not(effect))]
    atoms = sorted(term.atoms)
    for size in range(len(atoms)):
        for subset in itertools.combinations(atoms, size):
            for alt in enumerate_terms(subset):
                parts.append(BoxRight(And(alt.to_formula(), exo), effect))
    return conjoin(parts)


def actual_cause_via_counterfactuals(state: EquationalState, term: Term, effect: Formula) -> bool:
    """Actual cause decided by model checking ``actual_cause_formula`` at the state.

    The characterization needs a nonempty term: for the empty term the
    formula collapses to "the effect is false", while no empty term is a cause.
    """
    _check_query(state, term, effect)
    if not term:
        raise CauseQueryError("the counterfactual characterization needs a nonempty cause term")
    formula = actual_cause_formula(state, term, effect)
    # the formula is unnested and Delta-free, so the base itself is a sufficient vocabulary
    return model_check(formula, state.base, state.as_state())


def enumerate_actual_causes(state: EquationalState, effect: Formula, max_size: int) -> list[Term]:
    """Every actual cause of ``effect`` with at most ``max_size`` literals.

    Candidates are built from literals true at the state, since a cause must hold.
    """
    if max_size > TERM_BOUND:
        raise ValueError(f"max_size {max_size} exceeds the term bound {TERM_BOUND}")
    _check_query(state, Term(), effect)
    actual = sorted((p, p in state.valuation) for p in state.endogenous)
    found = []
    for size in range(min(max_size, len(actual)) + 1):
        for lits in itertools.combinations(actual, size):
            term = Term(lits)
            if is_actual_cause(state, term, effect):
                found.append(term)
    return found
