"""Property and differential suites shared by the ``validate`` command and the test-suite.

Every suite is deterministic given its seed and returns a ``SuiteResult``.
"""

from __future__ import annotations

import itertools
import random
import time
from collections.abc import Callable
from dataclasses import dataclass, field

from .causal import (
    actual_cause_via_counterfactuals, but_condition, but_condition_via_might, is_actual_cause,
)
from .checker import RM_SCHEMA, VALIDITIES, Evaluator, check_validity, model_check, satisfies
from .formulas import (
    TOP, And, Atom, Delta, Formula, Not, Or, Term, delta_bodies, render_formula,
)
from .generators import (
    random_context, random_equational_state, random_formula, random_prop, random_qbf,
    random_state, random_true_term,
)
from .qbf import encode_actual_cause, encode_hardness, encode_mc, eval_qbf
from .states import Context, State

__all__ = [
    "SuiteResult", "schemas_exhaustive", "schemas_random", "strong_centering_witness", "rm_search",
    "but_might_suite", "cause_counterfactual_suite", "vocabulary_suite", "encoding_suite", "hardness_suite",
    "cause_encoding_suite", "SUITES", "DEFAULT_SUITES", "run_suites",
]

MAX_REPORTED = 5


@dataclass
class SuiteResult:
    name: str
    instances: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0
    stats: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def failure_count(self) -> int:
        return len(self.failures) + self.stats.get("unreported_failures", 0)

    def fail(self, message: str) -> None:
        if len(self.failures) < MAX_REPORTED:
            self.failures.append(message)
        else:
            self.stats["unreported_failures"] = self.stats.get("unreported_failures", 0) + 1

    def count(self, key: str) -> None:
        self.stats[key] = self.stats.get(key, 0) + 1

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "instances": self.instances,
                "failures": list(self.failures), "failure_count": self.failure_count, "seconds": round(self.seconds, 3),
                "stats": dict(self.stats)}


def _timed(name: str):
    def wrap(fn: Callable[..., SuiteResult]):
        def run(*args, **kwargs) -> SuiteResult:
            start = time.perf_counter()
            result = SuiteResult(name)
            fn(result, *args, **kwargs)
            result.seconds = time.perf_counter() - start
            return result
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        run.suite_name = name
        return run
    return wrap


# -- schema validity ----------------------------------------------------------

_SCHEMA_ARGS = {
    "identity": ("phi",),
    "weak-centering": ("phi", "psi"),
    "disjunction": ("phi", "psi", "chi"),
    "cumulation-atom": ("phi", "psi", "p"),
    "cumulation-negated-atom": ("phi", "psi", "p"),
    "cumulation-causal": ("phi", "psi", "omega"),
    "relevance": ("omega",),
}


def _small_pool(sigma: tuple[str, ...]) -> list[Formula]:
    a = [Atom(p) for p in sigma]
    pool = [a[0], Not(a[0])]
    if len(a) > 1:
        pool += [Or(a[0], a[1]), And(Not(a[0]), a[1])]
    return pool


def _exhaustive_contexts(max_gamma: int, max_sigma: int):
    names = ("p", "q", "r")[:max_sigma]
    for n in range(1, max_sigma + 1):
        sigma = names[:n]
        vocab = _small_pool(sigma)
        for k in range(max_gamma + 1):
            for gamma in itertools.combinations(vocab, k):
                yield Context(gamma, sigma)


def _instances(schema: str, ctx: Context):
    params = _small_pool(ctx.sigma) + [Delta(w) for w in ctx.gamma[:1]]
    omegas = list(ctx.gamma) + [Atom(ctx.sigma[0])]
    slots = {"phi": params, "psi": params, "chi": params, "p": list(ctx.sigma), "omega": omegas}
    names = _SCHEMA_ARGS[schema]
    for combo in itertools.product(*(slots[n] for n in names)):
        args = dict(phi=TOP, psi=TOP, chi=TOP, omega=TOP, p=Atom(ctx.sigma[0]))
        args.update(zip(names, combo))
        if isinstance(args["p"], str):
            args["p"] = Atom(args["p"])
        yield VALIDITIES[schema](**args)


@_timed("schemas-exhaustive")
def schemas_exhaustive(result: SuiteResult, max_gamma: int = 2, max_sigma: int = 3) -> None:
    """Validities (1)-(7) at every state of every small context, over a fixed parameter pool."""
    for ctx in _exhaustive_contexts(max_gamma, max_sigma):
        result.count("contexts")
        for schema in VALIDITIES:
            for formula in _instances(schema, ctx):
                result.instances += 1
                bad = check_validity(formula, [ctx])
                if bad is not None:
                    result.fail(f"{schema}: {bad}")


@_timed("schemas-random")
def schemas_random(result: SuiteResult, seed: int = 0, samples: int = 1000,
                 max_gamma: int = 3, max_sigma: int = 5) -> None:
    """Validities (1)-(7) at random states of random (possibly constrained) contexts."""
    rng = random.Random(seed)
    for schema in VALIDITIES:
        for _ in range(samples):
            ctx = random_context(rng, max_gamma, max_sigma, constraint_prob=0.2)
            atoms, gamma = ctx.sigma, ctx.gamma
            args = dict(
                phi=random_formula(rng, atoms, gamma, 2, 1),
                psi=random_formula(rng, atoms, gamma, 2, 1),
                chi=random_formula(rng, atoms, gamma, 2, 1),
                omega=rng.choice(gamma) if gamma and rng.random() < 0.8 else random_prop(rng, atoms, 2),
                p=Atom(rng.choice(atoms)),
            )
            formula = VALIDITIES[schema](**args)
            state = random_state(rng, ctx)
            result.instances += 1
            if not satisfies(state, ctx, formula):
                result.fail(f"{schema}: {render_formula(formula)} fails at {state}")


@_timed("strong-centering")
def strong_centering_witness(result: SuiteResult) -> None:
    """A p-state other than the actual p-state is equally close, so strong centering fails."""
    p = Atom("p")
    ctx = Context([p], ["p"])
    actual = State((), ["p"])
    ev = Evaluator(ctx)
    members = [ev.universe.state(int(i)) for i in ev.closest(p, ev.universe.index_of(actual))]
    result.instances = 1
    result.stats["closest"] = [str(s) for s in members]
    if len(members) != 2 or actual not in members:
        result.fail(f"expected two closest p-states including the actual one, got {members}")


def _rm_pool(sigma):
    a = [Atom(p) for p in sigma]
    pool = list(a) + [Not(x) for x in a]
    pool += [Or(x, y) for x, y in itertools.combinations(a, 2)]
    return pool


@_timed("rm-countermodel")
def rm_search(result: SuiteResult, max_sigma: int = 3) -> None:
    """Bounded search for a countermodel to rational monotonicity."""
    names = ("a", "b", "c")[:max_sigma]
    for n in range(1, max_sigma + 1):
        sigma = names[:n]
        pool = _rm_pool(sigma)
        for gamma_size in range(2):
            for gamma in itertools.combinations(pool[:n], gamma_size):
                ctx = Context(gamma, sigma)
                for phi, psi, chi in itertools.product(pool, repeat=3):
                    result.instances += 1
                    formula = RM_SCHEMA(phi, psi, chi, TOP, Atom(sigma[0]))
                    bad = check_validity(formula, [ctx])
                    if bad is not None:
                        result.stats["countermodel"] = str(bad)
                        return
    result.fail("no countermodel found within the search bounds")


# -- causal suites -------------------------------------------------------------

def _random_effect(rng: random.Random, state) -> Formula:
    atoms = sorted(state.atoms)
    if rng.random() < 0.5:
        return Atom(rng.choice(sorted(state.endogenous)))
    return random_prop(rng, atoms, 2)


@_timed("but-might")
def but_might_suite(result: SuiteResult, seed: int = 0, samples: int = 200) -> None:
    """but_condition agrees with the might-counterfactual characterization."""
    rng = random.Random(seed)
    for _ in range(samples):
        state = random_equational_state(rng)
        term = random_true_term(rng, state, 3, min_size=0)
        effect = _random_effect(rng, state)
        a = but_condition(state, term, effect)
        b = but_condition_via_might(state, term, effect)
        result.instances += 1
        result.count("true" if a else "false")
        if a != b:
            result.fail(f"{state} term={term} effect={render_formula(effect)}: interventions={a} might={b}")


@_timed("cause-counterfactual")
def cause_counterfactual_suite(result: SuiteResult, seed: int = 0, samples: int = 200, max_term: int = 2) -> None:
    """is_actual_cause agrees with the counterfactual characterization."""
    rng = random.Random(seed)
    for _ in range(samples):
        state = random_equational_state(rng)
        term = random_true_term(rng, state, max_term)
        if rng.random() < 0.2:
            # occasionally a term that is false at the state
            p = rng.choice(sorted(term.atoms))
            term = Term({**term, p: not term[p]})
        effect = _random_effect(rng, state)
        a = is_actual_cause(state, term, effect)
        b = actual_cause_via_counterfactuals(state, term, effect)
        result.instances += 1
        result.count("cause" if a else "not-cause")
        if a != b:
            result.fail(f"{state} term={term} effect={render_formula(effect)}: interventions={a} counterfactuals={b}")


@_timed("vocabulary")
def vocabulary_suite(result: SuiteResult, seed: int = 0, samples: int = 100) -> None:
    """Unnested formulas get the same verdict over base-plus-Delta-bodies and over larger vocabularies."""
    rng = random.Random(seed)
    while result.instances < samples:
        ctx = random_context(rng, 2, 4)
        state = random_state(rng, ctx)
        psi = random_formula(rng, ctx.sigma, ctx.gamma, 3, 1)
        small = set(state.base) | set(delta_bodies(psi))
        verdicts = [model_check(psi, small, state)]
        for _ in range(2):
            extra = {random_prop(rng, list(ctx.sigma) + ["z"], 2) for _ in range(rng.randint(1, 2))}
            verdicts.append(model_check(psi, small | extra, state))
        result.instances += 1
        result.count("true" if verdicts[0] else "false")
        if len(set(verdicts)) != 1:
            result.fail(f"{render_formula(psi)} at {state}: verdicts {verdicts}")


@_timed("encoding")
def encoding_suite(result: SuiteResult, seed: int = 0, samples: int = 300, max_gamma: int = 3,
                   max_sigma: int = 4, depth: int = 4, nesting: int = 1) -> None:
    """Brute-force model checking agrees with evaluating the QBF encoding."""
    rng = random.Random(seed)
    for _ in range(samples):
        ctx = random_context(rng, max_gamma, max_sigma, constraint_prob=0.2)
        psi = random_formula(rng, ctx.sigma, ctx.gamma, depth, nesting)
        state = random_state(rng, ctx)
        a = model_check(psi, ctx.gamma, state, ctx.constraint)
        b = eval_qbf(encode_mc(psi, ctx.gamma, state, ctx.constraint))
        result.instances += 1
        result.count("true" if a else "false")
        if a != b:
            result.fail(f"{render_formula(psi)} at {state} gamma={[render_formula(w) for w in ctx.gamma]}: brute={a} qbf={b}")


@_timed("hardness")
def hardness_suite(result: SuiteResult, seed: int = 0, samples: int = 200) -> None:
    """A QBF and its conditional-logic translation have the same truth value."""
    rng = random.Random(seed)
    for _ in range(samples):
        tau = random_qbf(rng, rng.randint(1, 4), 4)
        a = eval_qbf(tau)
        b = model_check(encode_hardness(tau), (), State())
        result.instances += 1
        result.count("true" if a else "false")
        if a != b:
            result.fail(f"qbf {tau}: eval={a} translation={b}")


@_timed("cause-encoding")
def cause_encoding_suite(result: SuiteResult, seed: int = 0, samples: int = 100, max_endo: int = 4) -> None:
    """The QBF encoding of actual cause agrees with the interventionist definition."""
    rng = random.Random(seed)
    for _ in range(samples):
        state = random_equational_state(rng, max_endo=max_endo)
        term = random_true_term(rng, state, 2)
        effect = _random_effect(rng, state)
        a = is_actual_cause(state, term, effect)
        b = eval_qbf(encode_actual_cause(term, effect, state), method="bdd")
        result.instances += 1
        result.count("cause" if a else "not-cause")
        if a != b:
            result.fail(f"{state} term={term} effect={render_formula(effect)}: interventions={a} qbf={b}")


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "schemas-exhaustive": lambda seed, samples: schemas_exhaustive(),
    "schemas-random": lambda seed, samples: schemas_random(seed, samples),
    "strong-centering": lambda seed, samples: strong_centering_witness(),
    "rm-countermodel": lambda seed, samples: rm_search(),
    "but-might": lambda seed, samples: but_might_suite(seed, samples),
    "cause-counterfactual": lambda seed, samples: cause_counterfactual_suite(seed, samples),
    "vocabulary": lambda seed, samples: vocabulary_suite(seed, samples),
    "encoding": lambda seed, samples: encoding_suite(seed, samples),
    "hardness": lambda seed, samples: hardness_suite(seed, samples),
    "cause-encoding": lambda seed, samples: cause_encoding_suite(seed, samples),
}

# what ``validate`` runs without an explicit suite selection
DEFAULT_SUITES = ("schemas-exhaustive", "schemas-random", "strong-centering", "rm-countermodel",
                  "but-might", "cause-counterfactual")


def run_suites(names=None, seed: int = 0, samples: int = 200) -> list[SuiteResult]:
    """Run the named suites (``DEFAULT_SUITES`` if none are given) with one seed and sample count."""
    names = list(DEFAULT_SUITES) if not names else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suites {unknown}; choose from {sorted(SUITES)}")
    return [SUITES[n](seed, samples) for n in names]
