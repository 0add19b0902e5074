"""Quantified boolean formulas and their evaluation.

Quantifier nodes bind a tuple of variables (a block); ``Forall(("x", "y"), b)``
abbreviates ``Forall(("x",), Forall(("y",), b))``.  Conjunction and
disjunction are n-ary.
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

__all__ = [
    "QbfFormula", "QVar", "QConst", "QNot", "QAnd", "QOr", "QImplies", "QIff",
    "Forall", "Exists", "QTRUE", "QFALSE",
    "qvar", "qnot", "qand", "qor", "implies", "iff", "forall", "exists",
    "free_vars", "bound_vars", "qbf_size", "is_closed", "rename_apart",
    "eval_qbf", "OpenFormulaError", "default_var_order",
]


class QbfFormula:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class QVar(QbfFormula):
    name: str


@dataclass(frozen=True, slots=True)
class QConst(QbfFormula):
    value: bool


QTRUE = QConst(True)
QFALSE = QConst(False)


@dataclass(frozen=True, slots=True)
class QNot(QbfFormula):
    operand: QbfFormula


@dataclass(frozen=True, slots=True)
class QAnd(QbfFormula):
    args: tuple


@dataclass(frozen=True, slots=True)
class QOr(QbfFormula):
    args: tuple


@dataclass(frozen=True, slots=True)
class QImplies(QbfFormula):
    left: QbfFormula
    right: QbfFormula


@dataclass(frozen=True, slots=True)
class QIff(QbfFormula):
    left: QbfFormula
    right: QbfFormula


@dataclass(frozen=True, slots=True)
class Forall(QbfFormula):
    vars: tuple
    body: QbfFormula


@dataclass(frozen=True, slots=True)
class Exists(QbfFormula):
    vars: tuple
    body: QbfFormula


class OpenFormulaError(ValueError):
    pass


# -- smart constructors ------------------------------------------------------

def qvar(name: str) -> QVar:
    return QVar(name)


def qnot(f: QbfFormula) -> QbfFormula:
    return QNot(f)


def qand(*args: QbfFormula) -> QbfFormula:
    flat = []
    for a in args:
        if isinstance(a, QAnd):
            flat.extend(a.args)
        else:
            flat.append(a)
    if not flat:
        return QTRUE
    return flat[0] if len(flat) == 1 else QAnd(tuple(flat))


def qor(*args: QbfFormula) -> QbfFormula:
    flat = []
    for a in args:
        if isinstance(a, QOr):
            flat.extend(a.args)
        else:
            flat.append(a)
    if not flat:
        return QFALSE
    return flat[0] if len(flat) == 1 else QOr(tuple(flat))


def implies(a: QbfFormula, b: QbfFormula) -> QbfFormula:
    return QImplies(a, b)


def iff(a: QbfFormula, b: QbfFormula) -> QbfFormula:
    return QIff(a, b)


def forall(names: Iterable[str], body: QbfFormula) -> QbfFormula:
    names = tuple(names)
    return Forall(names, body) if names else body


def exists(names: Iterable[str], body: QbfFormula) -> QbfFormula:
    names = tuple(names)
    return Exists(names, body) if names else body


# -- structure -----------------------------------------------------------------

def _children(f: QbfFormula) -> tuple:
    if isinstance(f, QNot):
        return (f.operand,)
    if isinstance(f, (QAnd, QOr)):
        return f.args
    if isinstance(f, (QImplies, QIff)):
        return (f.left, f.right)
    if isinstance(f, (Forall, Exists)):
        return (f.body,)
    return ()


def free_vars(f: QbfFormula, _memo: dict | None = None) -> frozenset[str]:
    memo = {} if _memo is None else _memo
    key = id(f)
    if key in memo:
        return memo[key][1]
    if isinstance(f, QVar):
        out = frozenset((f.name,))
    elif isinstance(f, (Forall, Exists)):
        out = free_vars(f.body, memo) - set(f.vars)
    else:
        out = frozenset().union(*(free_vars(c, memo) for c in _children(f)))
    memo[key] = (f, out)
    return out


def bound_vars(f: QbfFormula) -> list[str]:
    """Quantified variable names in pre-order (with repetitions if re-bound)."""
    out = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Forall, Exists)):
            out.extend(g.vars)
        stack.extend(reversed(_children(g)))
    return out


def qbf_size(f: QbfFormula) -> int:
    """Node count, counting an n-ary connective as n-1 binary nodes and a block of k variables as k quantifiers."""
    total = 0
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (QAnd, QOr)):
            total += max(len(g.args) - 1, 1)
        elif isinstance(g, (Forall, Exists)):
            total += len(g.vars)
        else:
            total += 1
        stack.extend(_children(g))
    return total


def is_closed(f: QbfFormula) -> bool:
    return not free_vars(f)


def rename_apart(f: QbfFormula, fresh=None) -> QbfFormula:
    """Rename bound variables so each is quantified once and none clashes with a free variable.

    ``fresh(name, taken)`` picks a replacement name; the default appends ``_<n>``.
    """
    taken = set(free_vars(f))
    if fresh is None:
        def fresh(name: str, used: set) -> str:
            for n in itertools.count(1):
                cand = f"{name}_{n}"
                if cand not in used:
                    return cand

    all_names = taken | set(bound_vars(f))

    def go(g: QbfFormula, env: dict) -> QbfFormula:
        if isinstance(g, QVar):
            return QVar(env.get(g.name, g.name))
        if isinstance(g, QConst):
            return g
        if isinstance(g, QNot):
            return QNot(go(g.operand, env))
        if isinstance(g, QAnd):
            return QAnd(tuple(go(a, env) for a in g.args))
        if isinstance(g, QOr):
            return QOr(tuple(go(a, env) for a in g.args))
        if isinstance(g, QImplies):
            return QImplies(go(g.left, env), go(g.right, env))
        if isinstance(g, QIff):
            return QIff(go(g.left, env), go(g.right, env))
        new_env = dict(env)
        names = []
        for v in g.vars:
            name = v
            if v in taken:
                name = fresh(v, all_names | taken)
                all_names.add(name)
            taken.add(name)
            new_env[v] = name
            names.append(name)
        return type(g)(tuple(names), go(g.body, new_env))

    return go(f, {})


# -- evaluation ----------------------------------------------------------------

def eval_qbf(f: QbfFormula, valuation: Iterable[str] | Mapping[str, bool] = (),
             method: str = "auto", var_order: list[str] | None = None) -> bool:
    """Truth value of ``f``.

    ``valuation`` is either the set of variables that are true (all others are
    false), or a mapping that must interpret every free variable of ``f``.

    ``method`` selects the strategy: ``"recursive"`` expands each quantifier
    into both branches with short-circuiting; ``"bdd"`` builds a binary
    decision diagram bottom-up and quantifies symbolically; ``"auto"`` uses
    the recursive evaluator when at most 16 distinct variables are bound.
    """
    if isinstance(valuation, Mapping):
        missing = free_vars(f) - set(valuation)
        if missing:
            raise OpenFormulaError(f"free variables without a value: {sorted(missing)}")
        env = {k: bool(v) for k, v in valuation.items()}
    else:
        true_vars = set(valuation)
        env = {v: v in true_vars for v in free_vars(f)}
    if method == "auto":
        method = "recursive" if len(set(bound_vars(f))) <= 16 else "bdd"
    if method == "recursive":
        return _RecursiveEvaluator().run(f, env)
    if method == "bdd":
        return _eval_bdd(f, env, var_order)
    raise ValueError(f"unknown evaluation method {method!r}")


class _RecursiveEvaluator:
    """Direct two-branch expansion, memoizing quantified subformulas on their free variables."""

    def __init__(self):
        self.fv_memo: dict = {}
        self.fv_sorted: dict = {}
        self.cache: dict = {}

    def run(self, f: QbfFormula, env: dict) -> bool:
        return self.ev(f, env)

    def ev(self, f: QbfFormula, env: dict) -> bool:
        t = type(f)
        if t is QVar:
            return env[f.name]
        if t is QConst:
            return f.value
        if t is QNot:
            return not self.ev(f.operand, env)
        if t is QAnd:
            return all(self.ev(a, env) for a in f.args)
        if t is QOr:
            return any(self.ev(a, env) for a in f.args)
        if t is QImplies:
            return (not self.ev(f.left, env)) or self.ev(f.right, env)
        if t is QIff:
            return self.ev(f.left, env) == self.ev(f.right, env)
        fv = self.fv_sorted.get(id(f))
        if fv is None:
            fv = self.fv_sorted[id(f)] = sorted(free_vars(f, self.fv_memo))
        key = (id(f), tuple(env[v] for v in fv))
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        want = t is Exists
        saved = {v: env.get(v) for v in f.vars}
        result = not want
        for values in itertools.product((False, True), repeat=len(f.vars)):
            env.update(zip(f.vars, values))
            if self.ev(f.body, env) == want:
                result = want
                break
        for v, old in saved.items():
            if old is None:
                env.pop(v, None)
            else:
                env[v] = old
        self.cache[key] = result
        return result


_FAMILY_RE = re.compile(r"([A-Za-z]+)_(\d+)_(.+)\Z")


def default_var_order(names: Iterable[str]) -> list[str]:
    """Variable order for BDD evaluation.

    Names shaped ``<family>_<index>_<slot>`` are grouped by slot so that the
    copies of one state component sit next to each other; other names keep
    their first-seen order and go last.
    """
    names = list(dict.fromkeys(names))
    plain = [n for n in names if not _FAMILY_RE.match(n)]
    shaped = [n for n in names if _FAMILY_RE.match(n)]

    def key(n: str):
        fam, idx, slot = _FAMILY_RE.match(n).groups()
        return (slot, fam, int(idx))

    return sorted(shaped, key=key) + plain


def _all_vars(f: QbfFormula) -> list[str]:
    out = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, QVar):
            out.append(g.name)
        elif isinstance(g, (Forall, Exists)):
            out.extend(g.vars)
        stack.extend(reversed(_children(g)))
    return out


def _bdd_manager():
    try:
        from dd import cudd
        return cudd.BDD()
    except ImportError:  # pragma: no cover - pure-Python fallback
        from dd import autoref
        return autoref.BDD()


def _eval_bdd(f: QbfFormula, env: dict, var_order: list[str] | None) -> bool:
    bdd = _bdd_manager()
    names = _all_vars(f)
    order = default_var_order(names) if var_order is None else list(var_order)
    missing = set(names) - set(order)
    order.extend(sorted(missing))
    bdd.declare(*order)
    memo: dict[int, object] = {}
    alive = []  # keeps ids in memo valid

    def build(g: QbfFormula):
        key = id(g)
        u = memo.get(key)
        if u is not None:
            return u
        t = type(g)
        if t is QVar:
            u = bdd.var(g.name)
        elif t is QConst:
            u = bdd.true if g.value else bdd.false
        elif t is QNot:
            u = ~build(g.operand)
        elif t is QAnd:
            u = bdd.true
            for a in g.args:
                u = u & build(a)
                if u == bdd.false:
                    break
        elif t is QOr:
            u = bdd.false
            for a in g.args:
                u = u | build(a)
                if u == bdd.true:
                    break
        elif t is QImplies:
            left = build(g.left)
            u = bdd.true if left == bdd.false else (~left | build(g.right))
        elif t is QIff:
            u = bdd.apply("<=>", build(g.left), build(g.right))
        elif t is Forall:
            u = bdd.forall(set(g.vars), build(g.body))
        else:
            u = bdd.exist(set(g.vars), build(g.body))
        alive.append(g)
        memo[key] = u
        return u

    root = build(f)
    if root == bdd.true or root == bdd.false:
        result = root == bdd.true
    else:
        subst = {v: (bdd.true if val else bdd.false) for v, val in env.items() if v in bdd.vars}
        result = bdd.let(subst, root) == bdd.true
        subst.clear()
    # drop node references before the manager is torn down
    memo.clear()
    del root
    return result
