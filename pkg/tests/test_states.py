import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from ctrfact.checker import satisfies
from ctrfact.formulas import TOP, Atom, Implies, Not, Or, parse_formula
from ctrfact.generators import random_context, random_prop, random_state
from ctrfact.states import (
    BoundExceededError, Context, IncompatibleStateError, Model, State, at_least_as_close, closest,
    enumerate_context, state_bound, strictly_closer, universe,
)

p, q = Atom("p"), Atom("q")


def test_state_rejects_incompatible_valuation():
    with pytest.raises(IncompatibleStateError):
        State([Implies(p, q)], ["p"])
    assert State([Implies(p, q)], ["p", "q"]).valuation == {"p", "q"}


def test_state_rejects_conditional_base():
    with pytest.raises(ValueError):
        State([parse_formula("p []-> q")], [])


def test_context_needs_its_atoms():
    with pytest.raises(ValueError, match="missing"):
        Context([Implies(p, q)], ["p"])
    ctx = Context.around([Implies(p, q)], Atom("r"), constraint=Not(p), extra_atoms=["z"])
    assert ctx.sigma == ("p", "q", "r", "z")


def test_model_membership():
    ctx = Context([p], ["p"], constraint=Not(p))
    with pytest.raises(ValueError):
        Model(State((), ["p"]), ctx)
    Model(State(), ctx)


@pytest.mark.parametrize("gamma, sigma, constraint", [
    ((), ("p",), TOP),
    ((p,), ("p",), TOP),
    ((Implies(p, q), Or(p, q)), ("p", "q"), TOP),
    ((Implies(p, q),), ("p", "q", "r"), Not(p)),
])
def test_enumeration_matches_oracle(gamma, sigma, constraint):
    ctx = Context(gamma, sigma, constraint)
    got = {(s.base, s.valuation) for s in enumerate_context(ctx)}
    assert got == set(oracles.states_of(gamma, sigma, constraint))
    assert len(got) == len(enumerate_context(ctx))


def test_enumeration_order_is_by_valuation_then_base():
    ctx = Context([p], ["p"])
    assert [str(s) for s in enumerate_context(ctx)] == ["({}, {})", "({}, {p})", "({p}, {p})"]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_similarity_matches_definition(seed):
    rng = random.Random(seed)
    ctx = random_context(rng, 3, 3)
    s, a, b = (random_state(rng, ctx) for _ in range(3))
    raw = lambda x: (x.base, x.valuation)  # noqa: E731
    assert at_least_as_close(s, a, b) == oracles.as_similar(raw(s), raw(a), raw(b))
    assert strictly_closer(s, a, b) == (at_least_as_close(s, a, b) and not at_least_as_close(s, b, a))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_similarity_is_a_preorder_centred_on_the_anchor(seed):
    rng = random.Random(seed)
    ctx = random_context(rng, 2, 3)
    s, a, b, c = (random_state(rng, ctx) for _ in range(4))
    assert at_least_as_close(s, a, a)
    if at_least_as_close(s, a, b) and at_least_as_close(s, b, c):
        assert at_least_as_close(s, a, c)
    # the anchor is at least as close to itself as anything
    assert at_least_as_close(s, s, a)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_closest_matches_oracle(seed):
    rng = random.Random(seed)
    ctx = random_context(rng, 2, 3, constraint_prob=0.3)
    s = random_state(rng, ctx)
    phi = random_prop(rng, ctx.sigma, 2)
    got = {(t.base, t.valuation) for t in closest(phi, s, ctx, satisfies)}
    univ = oracles.states_of(ctx.gamma, ctx.sigma, ctx.constraint)
    assert got == set(oracles.closest(univ, (s.base, s.valuation), phi))


def test_strong_centering_fails():
    ctx = Context([p], ["p"])
    members = closest(p, State((), ["p"]), ctx, satisfies)
    assert members == {State((), ["p"]), State([p], ["p"])}


def test_bound_is_enforced_and_overridable(monkeypatch):
    ctx = Context((), [f"x{k}" for k in range(8)])
    with pytest.raises(BoundExceededError):
        universe(ctx, bound=5)
    monkeypatch.setenv("CTRFACT_STATE_BOUND", "7")
    assert state_bound() == 7
    with pytest.raises(BoundExceededError):
        enumerate_context(ctx)
    monkeypatch.delenv("CTRFACT_STATE_BOUND")
    assert len(enumerate_context(ctx)) == 256
