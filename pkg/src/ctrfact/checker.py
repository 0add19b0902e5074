"""Brute-force satisfaction of conditional formulas over finite contexts."""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass

import numpy as np

from .formulas import (
    TOP, And, Atom, BoxRight, Delta, DiamondRight, Formula, Iff, Implies, Not, Or,
    holds, is_propositional, render_formula, subformulas,
)
from .states import Context, State, Universe, universe

__all__ = [
    "Evaluator", "satisfies", "relativize", "model_check", "closest_states", "Countermodel",
    "check_validity", "VALIDITIES", "RM_SCHEMA", "instantiate",
]

_CONDITIONAL = (BoxRight, DiamondRight)


class Evaluator:
    """Satisfaction over one materialized context, memoized per (subformula, state).

    Memo tables are keyed by node identity; the evaluator keeps every formula
    it has seen alive so identities stay valid.
    """

    def __init__(self, context: Context, bound: int | None = None):
        self.context = context
        self.universe: Universe = universe(context, bound)
        self._vectors: dict[int, np.ndarray] = {}
        self._values: dict[tuple[int, int], bool] = {}
        self._closest: dict[tuple[int, int], np.ndarray] = {}
        self._modal: dict[int, bool] = {}
        self._alive: list[Formula] = []

    def _has_conditional(self, f: Formula) -> bool:
        key = id(f)
        if key not in self._modal:
            self._alive.append(f)
            self._modal[key] = any(isinstance(g, _CONDITIONAL) for g in subformulas(f))
        return self._modal[key]

    def vector(self, f: Formula) -> np.ndarray:
        """Truth value of ``f`` at every state of the universe."""
        key = id(f)
        vec = self._vectors.get(key)
        if vec is not None:
            return vec
        u = self.universe
        if is_propositional(f):
            vec = u.prop_vector(f)
        elif isinstance(f, Delta):
            vec = u.delta_vector(f.body)
        elif isinstance(f, Not):
            vec = ~self.vector(f.operand)
        elif isinstance(f, And):
            vec = self.vector(f.left) & self.vector(f.right)
        elif isinstance(f, Or):
            vec = self.vector(f.left) | self.vector(f.right)
        elif isinstance(f, Implies):
            vec = ~self.vector(f.left) | self.vector(f.right)
        elif isinstance(f, Iff):
            vec = self.vector(f.left) == self.vector(f.right)
        elif isinstance(f, _CONDITIONAL):
            vec = np.fromiter((self.value(f, i) for i in range(len(u))), dtype=bool, count=len(u))
        else:
            raise TypeError(f"unknown formula node {f!r}")
        self._alive.append(f)
        self._vectors[key] = vec
        return vec

    def closest(self, antecedent: Formula, anchor: int) -> np.ndarray:
        key = (id(antecedent), anchor)
        found = self._closest.get(key)
        if found is None:
            found = self.universe.closest_indices(self.vector(antecedent), anchor)
            self._closest[key] = found
        return found

    def _box(self, antecedent: Formula, consequent: Formula, i: int, negate: bool) -> bool:
        # every closest antecedent-state satisfies the (possibly negated) consequent
        members = self.closest(antecedent, i)
        if not self._has_conditional(consequent):
            vals = self.vector(consequent)[members]
            return bool(np.all(~vals if negate else vals))
        return all(self.value(consequent, int(j)) != negate for j in members)

    def value(self, f: Formula, i: int) -> bool:
        """Truth value of ``f`` at the state with index ``i``."""
        if not self._has_conditional(f):
            return bool(self.vector(f)[i])
        key = (id(f), i)
        val = self._values.get(key)
        if val is not None:
            return val
        if isinstance(f, BoxRight):
            val = self._box(f.antecedent, f.consequent, i, negate=False)
        elif isinstance(f, DiamondRight):
            # phi <>-> psi  :=  ~(phi []-> ~psi)
            val = not self._box(f.antecedent, f.consequent, i, negate=True)
        elif isinstance(f, Not):
            val = not self.value(f.operand, i)
        elif isinstance(f, And):
            val = self.value(f.left, i) and self.value(f.right, i)
        elif isinstance(f, Or):
            val = self.value(f.left, i) or self.value(f.right, i)
        elif isinstance(f, Implies):
            val = (not self.value(f.left, i)) or self.value(f.right, i)
        elif isinstance(f, Iff):
            val = self.value(f.left, i) == self.value(f.right, i)
        else:
            raise TypeError(f"unknown formula node {f!r}")
        self._values[key] = val
        return val

    def holds_at(self, state: State, f: Formula) -> bool:
        return self.value(f, self.universe.index_of(state))


def satisfies(state: State, context: Context, phi: Formula) -> bool:
    """Decide ``(state, context) |= phi``."""
    return Evaluator(context).holds_at(state, phi)


def closest_states(phi: Formula, state: State, context: Context) -> list[State]:
    """The phi-closest states to ``state`` in ``context``, in universe order."""
    ev = Evaluator(context)
    u = ev.universe
    return [u.state(int(j)) for j in ev.closest(phi, u.index_of(state))]


def relativize(psi: Formula, gamma: Iterable[Formula], state: State,
               constraint: Formula = TOP, extra_atoms: Iterable[str] = ()) -> tuple[State, Context]:
    """The context ``model_check`` evaluates in, and the state restricted to its vocabulary."""
    gamma = list(gamma)
    extra = set(state.base) - set(gamma)
    if extra:
        raise ValueError("the state's causal base is not included in gamma: "
                         + ", ".join(sorted(render_formula(w) for w in extra)))
    context = Context.around(gamma, psi, constraint=constraint, extra_atoms=extra_atoms)
    restricted = State(state.base, state.valuation & set(context.sigma))
    if not holds(constraint, restricted.valuation):
        raise ValueError("the state's valuation violates the context constraint")
    return restricted, context


def model_check(psi: Formula, gamma: Iterable[Formula], state: State,
                constraint: Formula = TOP, extra_atoms: Iterable[str] = ()) -> bool:
    """Relativized model checking: ``(state, U^gamma) |= psi``.

    Sigma is the set of atoms of gamma, psi, the constraint and
    ``extra_atoms``; the state's valuation is restricted to it.
    """
    restricted, context = relativize(psi, gamma, state, constraint, extra_atoms)
    return satisfies(restricted, context, psi)


# --------------------------------------------------------------------------
# Validity harness

@dataclass(frozen=True)
class Countermodel:
    formula: Formula
    state: State
    context: Context

    def __str__(self) -> str:
        ctx = self.context
        return (f"{render_formula(self.formula)} fails at {self.state} in context "
                f"gamma={{{', '.join(render_formula(w) for w in ctx.gamma)}}} "
                f"sigma={{{', '.join(ctx.sigma)}}} constraint={render_formula(ctx.constraint)}")


def check_validity(formula: Formula, models: Iterable[Context | tuple[State, Context]]
                   ) -> Countermodel | None:
    """Search ``models`` for a falsifying (state, context) pair.

    Each item is either a context (all of its states are checked) or a single
    ``(state, context)`` pair.  Returns the first countermodel found.
    """
    for item in models:
        if isinstance(item, Context):
            ev = Evaluator(item)
            vec = ev.vector(formula)
            bad = np.flatnonzero(~vec)
            if len(bad):
                return Countermodel(formula, ev.universe.state(int(bad[0])), item)
        else:
            state, context = item
            if not satisfies(state, context, formula):
                return Countermodel(formula, state, context)
    return None


def _box(a, b):
    return BoxRight(a, b)


# Schemas take (phi, psi, chi, omega, p); omega is propositional, p an atom.
VALIDITIES: dict[str, Callable[..., Formula]] = {
    "identity": lambda phi, psi, chi, omega, p: _box(phi, phi),
    "weak-centering": lambda phi, psi, chi, omega, p: Implies(_box(phi, psi), Implies(phi, psi)),
    "disjunction": lambda phi, psi, chi, omega, p: Implies(
        And(_box(phi, chi), _box(psi, chi)), _box(Or(phi, psi), chi)),
    "cumulation-atom": lambda phi, psi, chi, omega, p: Implies(
        And(p, _box(phi, psi)), _box(And(phi, p), psi)),
    "cumulation-negated-atom": lambda phi, psi, chi, omega, p: Implies(
        And(Not(p), _box(phi, psi)), _box(And(phi, Not(p)), psi)),
    "cumulation-causal": lambda phi, psi, chi, omega, p: Implies(
        And(Delta(omega), _box(phi, psi)), _box(And(phi, Delta(omega)), psi)),
    "relevance": lambda phi, psi, chi, omega, p: _box(Delta(omega), omega),
}

# rational monotonicity: valid for total preorders, not here
RM_SCHEMA: Callable[..., Formula] = lambda phi, psi, chi, omega, p: Implies(
    And(_box(phi, psi), DiamondRight(phi, chi)), _box(And(phi, chi), psi))


def instantiate(schema: Callable[..., Formula], phi: Formula, psi: Formula, chi: Formula,
                omega: Formula, p: str | Atom) -> Formula:
    if isinstance(p, str):
        p = Atom(p)
    if not is_propositional(omega):
        raise ValueError("omega must be propositional")
    return schema(phi, psi, chi, omega, p)
