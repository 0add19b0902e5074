"""Seeded random instances for the differential and property suites."""

from __future__ import annotations

import random
from collections.abc import Sequence

from .causal import EquationalState
from .formulas import (
    BOT, TOP, And, Atom, BoxRight, Delta, DiamondRight, Formula, Iff, Implies, Not, Or, Term,
    atoms_of, holds,
)
from .qbf.formula import QFALSE, QTRUE, Exists, Forall, QAnd, QIff, QImplies, QNot, QOr, QVar, QbfFormula
from .states import Context, State, universe

ATOM_POOL = ("p", "q", "r", "s", "t")

_BINARY = (And, Or, Implies, Iff)


def random_prop(rng: random.Random, atoms: Sequence[str], depth: int) -> Formula:
    """Random propositional formula of depth at most ``depth`` over ``atoms``."""
    if depth <= 0 or rng.random() < 0.3:
        if rng.random() < 0.06:
            return rng.choice((TOP, BOT))
        return Atom(rng.choice(atoms))
    if rng.random() < 0.2:
        return Not(random_prop(rng, atoms, depth - 1))
    op = rng.choice(_BINARY)
    return op(random_prop(rng, atoms, depth - 1), random_prop(rng, atoms, depth - 1))


def random_formula(rng: random.Random, atoms: Sequence[str], gamma: Sequence[Formula],
                   depth: int, nesting: int = 1) -> Formula:
    """Random conditional formula of depth at most ``depth`` and counterfactual nesting at most ``nesting``.

    Delta bodies are drawn from ``gamma`` (and occasionally from fresh
    propositional formulas, which no base of the context can contain).
    """
    if depth <= 0 or rng.random() < 0.2:
        roll = rng.random()
        if roll < 0.25 and (gamma or atoms):
            if gamma and rng.random() < 0.85:
                return Delta(rng.choice(list(gamma)))
            return Delta(random_prop(rng, atoms, 1))
        if roll < 0.28:
            return rng.choice((TOP, BOT))
        return Atom(rng.choice(atoms))
    roll = rng.random()
    if nesting > 0 and roll < 0.4:
        op = BoxRight if rng.random() < 0.6 else DiamondRight
        return op(random_formula(rng, atoms, gamma, depth - 1, nesting - 1),
                  random_formula(rng, atoms, gamma, depth - 1, nesting - 1))
    if roll < 0.55:
        return Not(random_formula(rng, atoms, gamma, depth - 1, nesting))
    op = rng.choice(_BINARY)
    return op(random_formula(rng, atoms, gamma, depth - 1, nesting),
              random_formula(rng, atoms, gamma, depth - 1, nesting))


def random_context(rng: random.Random, max_gamma: int, max_sigma: int,
                   constraint_prob: float = 0.0, prop_depth: int = 2) -> Context:
    """Random context with 1..max_sigma atoms and 0..max_gamma vocabulary formulas."""
    atoms = list(ATOM_POOL[:rng.randint(1, max_sigma)])
    gamma = {random_prop(rng, atoms, prop_depth) for _ in range(rng.randint(0, max_gamma))}
    constraint = TOP
    if rng.random() < constraint_prob:
        constraint = random_prop(rng, atoms, prop_depth)
        # keep the universe nonempty
        if not any(holds(constraint, {a for k, a in enumerate(atoms) if m >> k & 1})
                   for m in range(1 << len(atoms))):
            constraint = TOP
    return Context(gamma, atoms, constraint)


def random_state(rng: random.Random, context: Context) -> State:
    u = universe(context)
    return u.state(rng.randrange(len(u)))


def random_equational_state(rng: random.Random, max_endo: int = 5, max_exo: int = 3,
                            max_body_atoms: int = 3) -> EquationalState:
    """Random acyclic equational state; valuations follow the equations from random exogenous values.

    Endogenous atoms are ``v0, v1, ...`` in a topological order, exogenous
    atoms ``u0, u1, ...``; each body mentions at most ``max_body_atoms`` atoms
    chosen among the exogenous ones and earlier endogenous ones.
    """
    n_endo = rng.randint(1, max_endo)
    n_exo = rng.randint(1, max_exo)
    exo = [f"u{k}" for k in range(n_exo)]
    endo = [f"v{k}" for k in range(n_endo)]
    equations = {}
    for k, head in enumerate(endo):
        pool = exo + endo[:k]
        chosen = rng.sample(pool, rng.randint(1, min(max_body_atoms, len(pool))))
        body = random_prop(rng, chosen, 2)
        # ensure every chosen atom occurs at least once
        for a in chosen:
            if a not in atoms_of(body):
                body = rng.choice(_BINARY)(body, Atom(a))
        equations[head] = body
    valuation = {u for u in exo if rng.random() < 0.5}
    for head in endo:
        if holds(equations[head], valuation):
            valuation.add(head)
    return EquationalState(equations, valuation)


def random_true_term(rng: random.Random, state: EquationalState, max_size: int,
                     min_size: int = 1) -> Term:
    """Random term over endogenous atoms that holds at the state."""
    endo = sorted(state.endogenous)
    size = rng.randint(min(min_size, len(endo)), min(max_size, len(endo)))
    chosen = rng.sample(endo, size)
    return Term({p: p in state.valuation for p in chosen})


def random_qbf(rng: random.Random, n_vars: int = 4, depth: int = 4, prefix: str = "x") -> QbfFormula:
    """Random closed QBF binding at most ``n_vars`` variables, quantifiers possibly under connectives."""
    names = [f"{prefix}{k}" for k in range(n_vars)]
    remaining = list(names)

    def gen(bound: list[str], d: int) -> QbfFormula:
        if remaining and (not bound or rng.random() < 0.35):
            v = remaining.pop(0)
            kind = Forall if rng.random() < 0.5 else Exists
            return kind((v,), gen(bound + [v], d))
        if d <= 0 or rng.random() < 0.25:
            if not bound or rng.random() < 0.05:
                return rng.choice((QTRUE, QFALSE))
            return QVar(rng.choice(bound))
        roll = rng.random()
        if roll < 0.2:
            return QNot(gen(bound, d - 1))
        if roll < 0.5:
            return QAnd((gen(bound, d - 1), gen(bound, d - 1)))
        if roll < 0.75:
            return QOr((gen(bound, d - 1), gen(bound, d - 1)))
        if roll < 0.88:
            return QImplies(gen(bound, d - 1), gen(bound, d - 1))
        return QIff(gen(bound, d - 1), gen(bound, d - 1))

    return gen([], depth)
