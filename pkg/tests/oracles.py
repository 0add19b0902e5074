"""Independent reference implementations used to cross-check the library.

Nothing here calls the library's checker, universe or solver code; states are
plain ``(frozenset base, frozenset valuation)`` pairs and the semantics are
written out directly from the definitions.
"""

from __future__ import annotations

import itertools

from ctrfact.formulas import (
    And, Atom, Bot, BoxRight, Delta, DiamondRight, Iff, Implies, Not, Or, Top,
)


def powerset(items):
    items = list(items)
    return [frozenset(c) for k in range(len(items) + 1) for c in itertools.combinations(items, k)]


def prop(f, val) -> bool:
    if isinstance(f, Atom):
        return f.name in val
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Not):
        return not prop(f.operand, val)
    if isinstance(f, And):
        return prop(f.left, val) and prop(f.right, val)
    if isinstance(f, Or):
        return prop(f.left, val) or prop(f.right, val)
    if isinstance(f, Implies):
        return not prop(f.left, val) or prop(f.right, val)
    if isinstance(f, Iff):
        return prop(f.left, val) == prop(f.right, val)
    raise TypeError(f)


def states_of(gamma, sigma, constraint=Top()):
    """Every (C, V) with C a subset of gamma, V a subset of sigma, V satisfying C and the constraint."""
    out = []
    for val in powerset(sorted(sigma)):
        if not prop(constraint, val):
            continue
        for base in powerset(gamma):
            if all(prop(w, val) for w in base):
                out.append((base, val))
    return out


def as_similar(anchor, a, b) -> bool:
    """b is below a in the anchor's similarity order: a is at least as similar to the anchor as b."""
    c, v = anchor
    return (c & b[0]) <= (c & a[0]) and (v ^ a[1]) <= (v ^ b[1])


def sat(universe, s, f) -> bool:
    base, val = s
    if isinstance(f, Delta):
        return f.body in base
    if isinstance(f, (Atom, Top, Bot)):
        return prop(f, val)
    if isinstance(f, Not):
        return not sat(universe, s, f.operand)
    if isinstance(f, And):
        return sat(universe, s, f.left) and sat(universe, s, f.right)
    if isinstance(f, Or):
        return sat(universe, s, f.left) or sat(universe, s, f.right)
    if isinstance(f, Implies):
        return not sat(universe, s, f.left) or sat(universe, s, f.right)
    if isinstance(f, Iff):
        return sat(universe, s, f.left) == sat(universe, s, f.right)
    if isinstance(f, BoxRight):
        return all(sat(universe, t, f.consequent) for t in closest(universe, s, f.antecedent))
    if isinstance(f, DiamondRight):
        return any(sat(universe, t, f.consequent) for t in closest(universe, s, f.antecedent))
    raise TypeError(f)


def closest(universe, s, phi):
    cands = [t for t in universe if sat(universe, t, phi)]
    strictly = lambda a, b: as_similar(s, a, b) and not as_similar(s, b, a)  # noqa: E731
    return [t for t in cands if not any(strictly(u, t) for u in cands)]


def oracle_model_check(psi, gamma, state, constraint=Top(), extra_atoms=()):
    """Relativized model checking, with the vocabulary built the same documented way."""
    from ctrfact.formulas import atoms_of

    sigma = set(extra_atoms) | atoms_of(constraint) | atoms_of(psi)
    for w in gamma:
        sigma |= atoms_of(w)
    universe = states_of(frozenset(gamma), sigma, constraint)
    s = (frozenset(state.base), frozenset(state.valuation) & sigma)
    return sat(universe, s, psi)


# -- equational states --------------------------------------------------------

def _equations(state) -> dict:
    return {e.head: e.body for e in state.equations}


def successors(state, intervention):
    """All valuations over the base atoms satisfying the intervened base and the actual exogenous values."""
    eqs = _equations(state)
    for p, value in intervention.items():
        eqs[p] = Top() if value else Bot()
    atoms = sorted(state.atoms)
    exo = state.exogenous
    out = []
    for val in powerset(atoms):
        if any((u in val) != (u in state.valuation) for u in exo):
            continue
        if all((h in val) == prop(b, val) for h, b in eqs.items()):
            out.append(val)
    return out


def _interventions(state, term):
    atoms = sorted(term)
    free = sorted(state.endogenous - set(atoms))
    for signs in itertools.product((True, False), repeat=len(atoms)):
        for frozen in powerset(free):
            e = dict(zip(atoms, signs))
            e.update({z: z in state.valuation for z in frozen})
            yield e


def but_condition_forall(state, term, effect) -> bool:
    """Some intervention on the term's atoms plus freezing makes every successor falsify the effect."""
    for e in _interventions(state, term):
        succ = successors(state, e)
        if succ and all(not prop(effect, v) for v in succ):
            return True
    return False


def actual_cause_oracle(state, term, effect) -> bool:
    if not all((a in state.valuation) == pol for a, pol in term.items()):
        return False
    if not prop(effect, state.valuation):
        return False
    if not but_condition_forall(state, term, effect):
        return False
    items = sorted(term.items())
    for k in range(len(items)):
        for sub in itertools.combinations(items, k):
            if but_condition_forall(state, dict(sub), effect):
                return False
    return True
