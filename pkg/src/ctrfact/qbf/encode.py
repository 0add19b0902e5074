"""QBF encodings of relativized model checking and actual cause, and the hardness reduction."""

from __future__ import annotations

import itertools
from collections.abc import Iterable

from ..formulas import (
    BOT, TOP, And, Atom, Bot, BoxRight, Delta, DiamondRight, Formula, Iff, Implies, Not, Or, Term, Top,
    conjoin, disjoin,
)
from ..states import Context, State
from .formula import (
    QFALSE, QTRUE, QAnd, QConst, QIff, QImplies, QNot, QOr, QVar, Forall, QbfFormula,
    bound_vars, exists, forall, free_vars, iff, implies, qand, qnot, qor, rename_apart,
)

__all__ = [
    "McEncoder", "CauseEncoder", "encode_mc", "encode_actual_cause", "encode_hardness",
    "hardness_fresh_names",
]


class McEncoder:
    """Builds the QBF predicates over numbered copies X^i of a state.

    Copy ``i`` of a state is the variable family ``xb_i_g`` (formula ``gamma[g]``
    is in the base) and ``xv_i_p`` (atom ``p`` is true).
    """

    def __init__(self, gamma: Iterable[Formula], sigma: Iterable[str], constraint: Formula = TOP):
        ctx = Context(gamma, sigma, constraint)
        self.context = ctx
        self.gamma = ctx.gamma
        self.sigma = ctx.sigma
        self.constraint = constraint
        self.slot = {w: g for g, w in enumerate(self.gamma)}
        self._fresh = itertools.count()

    # -- variables

    def xb(self, i: int, w: Formula) -> QVar:
        return QVar(f"xb_{i}_{self.slot[w]}")

    def xv(self, i: int, p: str) -> QVar:
        return QVar(f"xv_{i}_{p}")

    def family(self, i: int) -> tuple[str, ...]:
        return (tuple(f"xb_{i}_{g}" for g in range(len(self.gamma)))
                + tuple(f"xv_{i}_{p}" for p in self.sigma))

    def fresh(self) -> str:
        return f"r_{next(self._fresh)}"

    # -- predicates

    def sat(self, f: Formula, i: int) -> QbfFormula:
        """Truth of ``f`` at the state encoded by X^i."""
        if isinstance(f, Atom):
            return self.xv(i, f.name) if f.name in self.sigma else QFALSE
        if isinstance(f, Top):
            return QTRUE
        if isinstance(f, Bot):
            return QFALSE
        if isinstance(f, Not):
            return qnot(self.sat(f.operand, i))
        if isinstance(f, And):
            return qand(self.sat(f.left, i), self.sat(f.right, i))
        if isinstance(f, Or):
            return qor(self.sat(f.left, i), self.sat(f.right, i))
        if isinstance(f, Implies):
            return implies(self.sat(f.left, i), self.sat(f.right, i))
        if isinstance(f, Iff):
            return iff(self.sat(f.left, i), self.sat(f.right, i))
        if isinstance(f, Delta):
            # a formula outside the vocabulary is never in any base of the context
            return self.xb(i, f.body) if f.body in self.slot else QFALSE
        if isinstance(f, BoxRight):
            return self._box(f.antecedent, f.consequent, i, negate=False)
        if isinstance(f, DiamondRight):
            return qnot(self._box(f.antecedent, f.consequent, i, negate=True))
        raise TypeError(f"unknown formula node {f!r}")

    def _box(self, antecedent: Formula, consequent: Formula, i: int, negate: bool) -> QbfFormula:
        j = i + 1
        cons = self.sat(consequent, j)
        if negate:
            cons = qnot(cons)
        return forall(self.family(j), implies(self.state(j), implies(self.closest(antecedent, i, j), cons)))

    def state(self, i: int) -> QbfFormula:
        """X^i encodes a state of the context: compatible base and constraint satisfied."""
        parts = [implies(self.xb(i, w), self.sat(w, i)) for w in self.gamma]
        if not isinstance(self.constraint, Top):
            parts.append(self.sat(self.constraint, i))
        return qand(*parts)

    def eq(self, j: int, k: int) -> QbfFormula:
        a, b = self.family(j), self.family(k)
        return qand(*(iff(QVar(x), QVar(y)) for x, y in zip(a, b)))

    def closereq(self, i: int, j: int, k: int) -> QbfFormula:
        """X^k is at least as similar to X^i as X^j is."""
        parts = [implies(qand(self.xb(i, w), self.xb(j, w)), self.xb(k, w)) for w in self.gamma]
        for p in self.sigma:
            vi, vj, vk = self.xv(i, p), self.xv(j, p), self.xv(k, p)
            parts.append(implies(qand(vi, qnot(vk)), qnot(vj)))
            parts.append(implies(qand(qnot(vi), vk), vj))
        return qand(*parts)

    def closer(self, i: int, j: int, k: int) -> QbfFormula:
        """X^k is strictly more similar to X^i than X^j is."""
        return qand(self.closereq(i, j, k), qnot(self.closereq(i, k, j)))

    def closest(self, f: Formula, i: int, j: int) -> QbfFormula:
        """X^j is an f-state with no strictly closer f-state (relative to X^i)."""
        k = max(i, j) + 1
        r = self.fresh()
        rv = QVar(r)
        body = implies(self.state(k), implies(
            iff(self.sat(f, k), rv),
            qand(implies(self.eq(j, k), rv), implies(self.closer(i, j, k), qnot(rv)))))
        return forall(self.family(k) + (r,), body)

    def init(self, i: int, state: State) -> QbfFormula:
        """Pin X^i to ``state``."""
        parts = [self.xb(i, w) if w in state.base else qnot(self.xb(i, w)) for w in self.gamma]
        parts += [self.xv(i, p) if p in state.valuation else qnot(self.xv(i, p)) for p in self.sigma]
        return qand(*parts)

    def encode(self, psi: Formula, state: State) -> QbfFormula:
        return exists(self.family(0), qand(self.init(0, state), self.sat(psi, 0)))


def encode_mc(psi: Formula, gamma: Iterable[Formula], state: State,
              constraint: Formula = TOP, extra_atoms: Iterable[str] = ()) -> QbfFormula:
    """Closed QBF that is true iff ``(state, U^gamma) |= psi``.

    Sigma is chosen exactly as in ``model_check``.
    """
    from ..checker import relativize

    restricted, ctx = relativize(psi, gamma, state, constraint, extra_atoms)
    return McEncoder(ctx.gamma, ctx.sigma, constraint).encode(psi, restricted)


# --------------------------------------------------------------------------
# actual cause

class CauseEncoder(McEncoder):
    """Adds term families L^i: ``lp_i_p`` (literal p) and ``ln_i_p`` (literal ~p)."""

    def __init__(self, state, exact_merge: bool = True):
        # state is an EquationalState; imported lazily to keep the module graph acyclic
        atoms = sorted(state.atoms)
        super().__init__(state.base, atoms)
        self.cause_state = state
        self.exogenous = sorted(state.exogenous)
        self.exact_merge = exact_merge

    def lp(self, i: int, p: str) -> QVar:
        return QVar(f"lp_{i}_{p}")

    def ln(self, i: int, p: str) -> QVar:
        return QVar(f"ln_{i}_{p}")

    def term_family(self, *indices: int) -> tuple[str, ...]:
        return tuple(f"{kind}_{i}_{p}" for i in indices for p in self.sigma for kind in ("lp", "ln"))

    def term(self, i: int) -> QbfFormula:
        """L^i holds no complementary pair."""
        return qand(*(qnot(qand(self.lp(i, p), self.ln(i, p))) for p in self.sigma))

    def term_init(self, i: int, term: Term) -> QbfFormula:
        parts = []
        for p in self.sigma:
            sign = term.get(p)
            parts.append(self.lp(i, p) if sign is True else qnot(self.lp(i, p)))
            parts.append(self.ln(i, p) if sign is False else qnot(self.ln(i, p)))
        return qand(*parts)

    def inv_term(self, i: int, j: int) -> QbfFormula:
        """L^i is the literal-wise negation of L^j."""
        return qand(*(qand(iff(self.lp(i, p), self.ln(j, p)), iff(self.ln(i, p), self.lp(j, p)))
                      for p in self.sigma))

    def merge_terms(self, i: int, j: int, k: int) -> QbfFormula:
        """L^k is the union of L^i and L^j.

        With ``exact_merge`` off only the inclusion of the union in L^k is
        required, which lets L^k carry extra literals.
        """
        parts = []
        for lit in (self.lp, self.ln):
            for p in self.sigma:
                union = qor(lit(i, p), lit(j, p))
                parts.append(iff(lit(k, p), union) if self.exact_merge else implies(union, lit(k, p)))
        return qand(*parts)

    def _mentions(self, i: int, p: str) -> QbfFormula:
        return qor(self.lp(i, p), self.ln(i, p))

    def term_vars_subseteq(self, i: int, j: int) -> QbfFormula:
        return qand(*(implies(self._mentions(i, p), self._mentions(j, p)) for p in self.sigma))

    def term_vars_subset(self, i: int, j: int) -> QbfFormula:
        return qand(self.term_vars_subseteq(i, j), qnot(self.term_vars_subseteq(j, i)))

    def term_exo(self, i: int, j: int) -> QbfFormula:
        """L^i is the term fixing the exogenous atoms to their values in X^j."""
        exo = set(self.exogenous)
        parts = []
        for p in self.sigma:
            if p in exo:
                parts.append(iff(self.lp(i, p), self.xv(j, p)))
                parts.append(iff(self.ln(i, p), qnot(self.xv(j, p))))
            else:
                parts.append(qand(qnot(self.lp(i, p)), qnot(self.ln(i, p))))
        return qand(*parts)

    def term_sat(self, t: int, j: int) -> QbfFormula:
        return qand(*(qand(implies(self.lp(t, p), self.xv(j, p)),
                           implies(self.ln(t, p), qnot(self.xv(j, p)))) for p in self.sigma))

    def term_closest(self, t: int, i: int, j: int) -> QbfFormula:
        k = max(t, i, j) + 1
        r = self.fresh()
        rv = QVar(r)
        body = implies(self.state(k), implies(
            iff(self.term_sat(t, k), rv),
            qand(implies(self.eq(j, k), rv), implies(self.closer(i, j, k), qnot(rv)))))
        return forall(self.family(k) + (r,), body)

    def term_ctrfact(self, t: int, effect: Formula, i: int) -> QbfFormula:
        """(L^t) []-> effect at X^i."""
        n = max(t, i) + 1
        return forall(self.family(n), implies(
            self.state(n), implies(self.term_closest(t, i, n), self.sat(effect, n))))

    def might_block(self, t: int, effect: Formula, i: int) -> QbfFormula:
        """Some sign flip of L^t, with exogenous atoms fixed, might falsify the effect."""
        n = max(t, i) + 1
        return exists(self.term_family(n, n + 1, n + 2), qand(
            self.inv_term(n, t), self.term_exo(n + 1, i), self.merge_terms(n, n + 1, n + 2),
            qnot(self.term_ctrfact(n + 2, effect, i))))

    def minimality_block(self, t: int, effect: Formula, i: int) -> QbfFormula:
        """Every term over strictly fewer atoms than L^t, with exogenous atoms fixed, would keep the effect."""
        n = max(t, i) + 1
        return forall(self.term_family(n, n + 1, n + 2), implies(self.term(n), implies(
            self.term_vars_subset(n, t), implies(self.term_exo(n + 1, i), implies(
                self.merge_terms(n, n + 1, n + 2), self.term_ctrfact(n + 2, effect, i))))))

    def actual_cause(self, t: int, effect: Formula, i: int) -> QbfFormula:
        return qand(self.term_sat(t, i), self.might_block(t, effect, i), self.minimality_block(t, effect, i))

    def encode(self, term: Term, effect: Formula) -> QbfFormula:  # type: ignore[override]
        s = self.cause_state
        state = State(s.base, s.valuation & set(self.sigma))
        return exists(self.family(0) + self.term_family(0), qand(
            self.init(0, state), self.term_init(0, term), self.actual_cause(0, effect, 0)))


def encode_actual_cause(term: Term, effect: Formula, state, exact_merge: bool = True) -> QbfFormula:
    """Closed QBF that is true iff ``term`` is an actual cause of ``effect`` at ``state``.

    ``state`` is an acyclic equational state and ``term`` a nonempty term over
    its endogenous atoms.
    """
    from ..causal import CauseQueryError, _check_query

    _check_query(state, term, effect)
    if not term:
        raise CauseQueryError("the counterfactual characterization needs a nonempty cause term")
    return CauseEncoder(state, exact_merge).encode(term, effect)


# --------------------------------------------------------------------------
# hardness

def _atom_name(name: str, used: set[str]) -> str:
    base = "".join(ch if ch.isalnum() or ch == "_" else "_" for ch in name)
    if not base or base[0].isdigit() or base in ("true", "false"):
        base = "v_" + base
    cand, n = base, 0
    while cand in used:
        n += 1
        cand = f"{base}_{n}"
    used.add(cand)
    return cand


def hardness_fresh_names(tau: QbfFormula) -> dict[str, tuple[str, str]]:
    """For a closed QBF whose bound variables are distinct, map each variable to (atom, fresh partner atom)."""
    names = bound_vars(tau)
    used: set[str] = set()
    atoms = {v: _atom_name(v, used) for v in names}
    out = {}
    for v in names:
        partner = atoms[v] + "_xi"
        while partner in used:
            partner += "_xi"
        used.add(partner)
        out[v] = (atoms[v], partner)
    return out


def encode_hardness(tau: QbfFormula) -> Formula:
    """Conditional formula that holds at ((), ()) in the empty-vocabulary context iff ``tau`` is true.

    Each quantified variable p gets a fresh partner atom; ``forall p`` becomes
    ``(p | p_xi) []->`` and ``exists p`` becomes ``(p | p_xi) <>->``.
    """
    if free_vars(tau):
        raise ValueError(f"the QBF has free variables {sorted(free_vars(tau))}")
    tau = rename_apart(tau)
    names = hardness_fresh_names(tau)

    def go(g: QbfFormula) -> Formula:
        if isinstance(g, QVar):
            return Atom(names[g.name][0])
        if isinstance(g, QConst):
            return TOP if g.value else BOT
        if isinstance(g, QNot):
            return Not(go(g.operand))
        if isinstance(g, QAnd):
            return conjoin(go(a) for a in g.args)
        if isinstance(g, QOr):
            return disjoin(go(a) for a in g.args)
        if isinstance(g, QImplies):
            return Implies(go(g.left), go(g.right))
        if isinstance(g, QIff):
            return Iff(go(g.left), go(g.right))
        body = go(g.body)
        cond = BoxRight if isinstance(g, Forall) else DiamondRight
        for v in reversed(g.vars):
            atom, partner = names[v]
            body = cond(Or(Atom(atom), Atom(partner)), body)
        return body

    return go(tau)
