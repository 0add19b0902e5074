"""States, finite contexts and comparative similarity.

A state pairs a causal base (a set of propositional formulas) with a
valuation (the atoms that are true).  A context fixes the vocabulary ``gamma``
that bases are drawn from, the relevant atoms ``sigma`` that valuations are
drawn from, and an optional propositional constraint every valuation must
satisfy.  ``Universe`` materializes a context as integer bitmasks so that the
similarity order can be evaluated with numpy.
"""

from __future__ import annotations

import functools
import os
from collections.abc import Callable, Iterable
from dataclasses import dataclass

import numpy as np

from .formulas import (
    TOP, And, Atom, Bot, Formula, Iff, Implies, Not, Or, Top,
    atoms_of, holds, is_propositional, render_formula,
)

__all__ = [
    "State", "Context", "Model", "Universe", "IncompatibleStateError", "BoundExceededError",
    "is_compatible", "enumerate_context", "at_least_as_close", "strictly_closer",
    "closest", "universe", "state_bound", "DEFAULT_STATE_BOUND",
]

DEFAULT_STATE_BOUND = 20
# bitmasks live in int64 arrays
_MAX_BITS = 62


class IncompatibleStateError(ValueError):
    pass


class BoundExceededError(ValueError):
    pass


def state_bound() -> int:
    """Enumeration bound on |gamma| + |sigma|; ``CTRFACT_STATE_BOUND`` overrides it."""
    raw = os.environ.get("CTRFACT_STATE_BOUND")
    return int(raw) if raw else DEFAULT_STATE_BOUND


def is_compatible(base: Iterable[Formula], valuation: Iterable[str]) -> bool:
    valuation = frozenset(valuation)
    return all(holds(w, valuation) for w in base)


@dataclass(frozen=True)
class State:
    base: frozenset
    valuation: frozenset

    def __init__(self, base: Iterable[Formula] = (), valuation: Iterable[str] = ()):
        base = frozenset(base)
        valuation = frozenset(valuation)
        for w in base:
            if not is_propositional(w):
                raise ValueError(f"causal base formulas must be propositional: {render_formula(w)}")
        bad = [render_formula(w) for w in base if not holds(w, valuation)]
        if bad:
            raise IncompatibleStateError(
                f"valuation {sorted(valuation)} violates base formula(s) {', '.join(sorted(bad))}")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "valuation", valuation)

    def __str__(self) -> str:
        base = ", ".join(sorted(render_formula(w) for w in self.base))
        return f"({{{base}}}, {{{', '.join(sorted(self.valuation))}}})"


def _formula_key(f: Formula) -> str:
    return render_formula(f)


@dataclass(frozen=True)
class Context:
    """Finite universe: bases from ``gamma``, valuations over ``sigma`` satisfying ``constraint``."""

    gamma: tuple
    sigma: tuple
    constraint: Formula = TOP

    def __init__(self, gamma: Iterable[Formula] = (), sigma: Iterable[str] = (),
                 constraint: Formula = TOP):
        gamma = tuple(sorted(set(gamma), key=_formula_key))
        for w in gamma:
            if not is_propositional(w):
                raise ValueError(f"vocabulary formulas must be propositional: {render_formula(w)}")
        if not is_propositional(constraint):
            raise ValueError("the context constraint must be propositional")
        sigma = frozenset(sigma)
        needed = set(atoms_of(constraint)).union(*(atoms_of(w) for w in gamma))
        missing = needed - sigma
        if missing:
            raise ValueError(f"sigma is missing atoms {sorted(missing)} used by gamma or the constraint")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "sigma", tuple(sorted(sigma)))
        object.__setattr__(self, "constraint", constraint)

    @classmethod
    def around(cls, gamma: Iterable[Formula], *formulas: Formula, constraint: Formula = TOP,
               extra_atoms: Iterable[str] = ()) -> "Context":
        """Context whose sigma is exactly the atoms of gamma, the formulas, the constraint and extras."""
        gamma = list(gamma)
        sigma = set(extra_atoms) | atoms_of(constraint)
        for f in [*gamma, *formulas]:
            sigma |= atoms_of(f)
        return cls(gamma, sigma, constraint)

    def contains(self, state: State) -> bool:
        return (state.base <= set(self.gamma) and state.valuation <= set(self.sigma)
                and holds(self.constraint, state.valuation))


@dataclass(frozen=True)
class Model:
    state: State
    context: Context

    def __post_init__(self):
        if not self.context.contains(self.state):
            raise ValueError(f"state {self.state} is not a member of the context")


def at_least_as_close(anchor: State, a: State, b: State) -> bool:
    """``a`` is at least as similar to ``anchor`` as ``b`` is."""
    return ((anchor.base & b.base) <= (anchor.base & a.base)
            and (anchor.valuation ^ a.valuation) <= (anchor.valuation ^ b.valuation))


def strictly_closer(anchor: State, a: State, b: State) -> bool:
    """``a`` is strictly more similar to ``anchor`` than ``b`` is."""
    return at_least_as_close(anchor, a, b) and not at_least_as_close(anchor, b, a)


class Universe:
    """A context materialized as parallel arrays of base and valuation bitmasks.

    Bit ``g`` of a base mask stands for ``gamma[g]``; bit ``j`` of a valuation
    mask stands for ``sigma[j]``.  States are ordered by valuation mask, then by
    base mask.
    """

    def __init__(self, context: Context, bound: int | None = None):
        bound = state_bound() if bound is None else bound
        n_gamma, n_sigma = len(context.gamma), len(context.sigma)
        if n_gamma + n_sigma > bound:
            raise BoundExceededError(
                f"|gamma| + |sigma| = {n_gamma + n_sigma} exceeds the enumeration bound {bound}")
        if max(n_gamma, n_sigma) > _MAX_BITS or n_gamma + n_sigma > 63:
            raise BoundExceededError("context too large for the bitmask representation")
        self.context = context
        self.gamma = context.gamma
        self.sigma = context.sigma
        self.gamma_index = {w: g for g, w in enumerate(self.gamma)}
        self.sigma_index = {p: j for j, p in enumerate(self.sigma)}

        valuations = np.arange(1 << n_sigma, dtype=np.int64)
        allowed = self._table(context.constraint, valuations)
        sat_bases = np.zeros(len(valuations), dtype=np.int64)
        for g, w in enumerate(self.gamma):
            sat_bases |= self._table(w, valuations).astype(np.int64) << g

        cmasks, vmasks = [], []
        for v in np.flatnonzero(allowed):
            sat = int(sat_bases[v])
            bits = [g for g in range(n_gamma) if sat >> g & 1]
            for sub in range(1 << len(bits)):
                c = 0
                for t, g in enumerate(bits):
                    if sub >> t & 1:
                        c |= 1 << g
                cmasks.append(c)
                vmasks.append(int(v))
        self.cmask = np.array(cmasks, dtype=np.int64)
        self.vmask = np.array(vmasks, dtype=np.int64)
        self.index = {(c, v): i for i, (c, v) in enumerate(zip(cmasks, vmasks))}
        self._states: list[State | None] = [None] * len(cmasks)

    def __len__(self) -> int:
        return len(self.cmask)

    def _table(self, f: Formula, vmask: np.ndarray) -> np.ndarray:
        """Vectorized truth of a propositional formula over valuation masks."""
        if isinstance(f, Atom):
            j = self.sigma_index.get(f.name)
            if j is None:
                return np.zeros(len(vmask), dtype=bool)
            return (vmask >> j & 1).astype(bool)
        if isinstance(f, Top):
            return np.ones(len(vmask), dtype=bool)
        if isinstance(f, Bot):
            return np.zeros(len(vmask), dtype=bool)
        if isinstance(f, Not):
            return ~self._table(f.operand, vmask)
        if isinstance(f, And):
            return self._table(f.left, vmask) & self._table(f.right, vmask)
        if isinstance(f, Or):
            return self._table(f.left, vmask) | self._table(f.right, vmask)
        if isinstance(f, Implies):
            return ~self._table(f.left, vmask) | self._table(f.right, vmask)
        if isinstance(f, Iff):
            return self._table(f.left, vmask) == self._table(f.right, vmask)
        raise ValueError(f"not a propositional formula: {render_formula(f)}")

    def prop_vector(self, f: Formula) -> np.ndarray:
        """Truth of a propositional formula at every state of the universe."""
        return self._table(f, self.vmask)

    def delta_vector(self, w: Formula) -> np.ndarray:
        g = self.gamma_index.get(w)
        if g is None:
            return np.zeros(len(self), dtype=bool)
        return (self.cmask >> g & 1).astype(bool)

    def state(self, i: int) -> State:
        s = self._states[i]
        if s is None:
            c, v = int(self.cmask[i]), int(self.vmask[i])
            s = State((w for g, w in enumerate(self.gamma) if c >> g & 1),
                      (p for j, p in enumerate(self.sigma) if v >> j & 1))
            self._states[i] = s
        return s

    def states(self) -> list[State]:
        return [self.state(i) for i in range(len(self))]

    def index_of(self, state: State) -> int:
        try:
            c = sum(1 << self.gamma_index[w] for w in state.base)
            v = sum(1 << self.sigma_index[p] for p in state.valuation)
            return self.index[(c, v)]
        except KeyError:
            raise ValueError(f"state {state} is not a member of the context") from None

    def closest_indices(self, candidates: np.ndarray, anchor: int, chunk: int = 1024) -> np.ndarray:
        """Indices of candidate states not strictly dominated by another candidate.

        ``candidates`` is a boolean mask over the universe (the states
        satisfying the antecedent).
        """
        cand = np.flatnonzero(candidates)
        if len(cand) == 0:
            return cand
        shared = self.cmask[anchor] & self.cmask[cand]
        diff = self.vmask[anchor] ^ self.vmask[cand]
        n_v = len(self.sigma)
        # two candidates with the same (shared, diff) pair are tied, never strictly ordered
        keys, inverse = np.unique((shared << n_v) | diff, return_inverse=True)
        ushared = keys >> n_v
        udiff = keys & ((1 << n_v) - 1)
        dominated = np.zeros(len(keys), dtype=bool)
        for lo in range(0, len(keys), chunk):
            bs, bd = ushared[lo:lo + chunk, None], udiff[lo:lo + chunk, None]
            # a dominates b: shared_b within shared_a and diff_a within diff_b
            dom = ((bs & ~ushared[None, :]) == 0) & ((udiff[None, :] & ~bd) == 0)
            rows = np.arange(dom.shape[0])
            dom[rows, lo + rows] = False
            dominated[lo:lo + chunk] = dom.any(axis=1)
        return cand[~dominated[inverse.ravel()]]


@functools.lru_cache(maxsize=128)
def _cached_universe(context: Context, bound: int) -> Universe:
    return Universe(context, bound)


def universe(context: Context, bound: int | None = None) -> Universe:
    """Materialize ``context`` (memoized per context and bound)."""
    return _cached_universe(context, state_bound() if bound is None else bound)


def enumerate_context(context: Context, bound: int | None = None) -> list[State]:
    """All states of the context, ordered by valuation then base bitmask."""
    return universe(context, bound).states()


def closest(phi: Formula, anchor: State, context: Context,
            satisfies: Callable[[State, Context, Formula], bool]) -> set[State]:
    """The phi-states of ``context`` with no strictly more similar phi-state."""
    u = universe(context)
    a = u.index_of(anchor)
    mask = np.array([satisfies(u.state(i), context, phi) for i in range(len(u))], dtype=bool)
    return {u.state(i) for i in u.closest_indices(mask, a)}
