import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from ctrfact.causal import EquationalState, is_actual_cause
from ctrfact.checker import closest_states, model_check, satisfies
from ctrfact.formulas import Atom, Implies, Or, Term, atoms_of, formula_size, parse_formula
from ctrfact.generators import random_context, random_formula, random_qbf, random_state
from ctrfact.qbf import (
    QFALSE, QTRUE, CauseEncoder, Exists, Forall, McEncoder, QAnd, QConst, QIff, QImplies, QNot, QOr,
    QVar, OpenFormulaError, QbfFormatError,
    alternation_depth, bound_vars, default_var_order, encode_actual_cause, encode_hardness,
    encode_mc, eval_qbf, exists, export_qcir, export_qdimacs, forall, free_vars, iff, implies,
    is_closed, nnf, parse_qcir, parse_qdimacs, prenex, qand, qbf_size, qnot, qor, quantifier_prefix,
    qvar, rename_apart,
)
from ctrfact.states import Context, State, at_least_as_close, enumerate_context, strictly_closer

p, q = qvar("p"), qvar("q")

SUZY = EquationalState(
    {"st": parse_formula("sd"), "bt": parse_formula("bd"), "sh": parse_formula("st"),
     "bh": parse_formula("bt & ~sh"), "bs": parse_formula("sh | bh")},
    ["sd", "bd", "st", "bt", "sh", "bs"])


# -- evaluation ---------------------------------------------------------------

@pytest.mark.parametrize("f, expected", [
    (exists(["p"], forall(["q"], iff(p, q))), False),
    (forall(["q"], exists(["p"], iff(p, q))), True),
    (forall(["p"], qor(p, qnot(p))), True),
    (exists(["p"], qand(p, qnot(p))), False),
    (forall(["p"], p), False),
    (QTRUE, True),
    (qnot(QFALSE), True),
    (exists(["p"], forall(["p"], p)), False),  # inner binding shadows
])
@pytest.mark.parametrize("method", ["recursive", "bdd"])
def test_eval_examples(f, expected, method):
    assert eval_qbf(f, method=method) is expected


def test_eval_with_free_variables():
    f = qand(p, forall(["q"], implies(q, p)))
    assert eval_qbf(f, {"p"})
    assert not eval_qbf(f, {"p": False})
    with pytest.raises(OpenFormulaError):
        eval_qbf(f, {"r": True})
    with pytest.raises(ValueError):
        eval_qbf(f, method="magic")


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_evaluators_agree_with_brute_expansion(seed):
    f = random_qbf(random.Random(seed), 4, 4)

    def brute(g, env):
        if isinstance(g, (Forall, Exists)):
            vals = []
            for bits in itertools.product((False, True), repeat=len(g.vars)):
                vals.append(brute(g.body, {**env, **dict(zip(g.vars, bits))}))
            return all(vals) if isinstance(g, Forall) else any(vals)
        if isinstance(g, QConst):
            return g.value
        if isinstance(g, QVar):
            return env[g.name]
        if isinstance(g, QNot):
            return not brute(g.operand, env)
        if isinstance(g, QAnd):
            return all(brute(a, env) for a in g.args)
        if isinstance(g, QOr):
            return any(brute(a, env) for a in g.args)
        if isinstance(g, QImplies):
            return not brute(g.left, env) or brute(g.right, env)
        if isinstance(g, QIff):
            return brute(g.left, env) == brute(g.right, env)
        raise TypeError(g)

    expected = brute(f, {})
    assert eval_qbf(f, method="recursive") is expected
    assert eval_qbf(f, method="bdd") is expected


def test_structure_helpers():
    f = qand(p, exists(["q"], qor(q, qvar("r"))))
    assert free_vars(f) == {"p", "r"}
    assert bound_vars(f) == ["q"]
    assert not is_closed(f)
    assert qbf_size(qand(p, q)) == 3
    g = rename_apart(qand(forall(["p"], p), exists(["p"], qnot(p))))
    assert len(set(bound_vars(g))) == 2
    assert eval_qbf(g) is False
    assert default_var_order(["xv_1_p", "plain", "xv_0_p", "xb_0_0"]) [-1] == "plain"


# -- formats ------------------------------------------------------------------

def test_qcir_forall_p():
    assert export_qcir(forall(["p"], p)).splitlines() == [
        "#QCIR-G14", "forall(p)", "output(g1)", "g1 = and(p)"]


def test_qdimacs_prefix_lines():
    text = export_qdimacs(exists(["p"], forall(["q"], iff(p, q))))
    lines = text.splitlines()
    assert lines[0].startswith("p cnf ")
    n_vars, n_clauses = map(int, lines[0].split()[2:])
    assert lines[1:4] == ["e 1 0", "a 2 0", "e 3 4 5 0"]
    assert len(lines) == 4 + n_clauses
    assert all(line.endswith(" 0") for line in lines[1:])
    assert n_vars == 5


def test_qdimacs_needs_a_closed_formula():
    with pytest.raises(QbfFormatError, match="closed"):
        export_qdimacs(qand(p, q))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**9))
def test_format_round_trips(seed):
    f = random_qbf(random.Random(seed), 4, 4)
    value = eval_qbf(f)
    assert eval_qbf(parse_qcir(export_qcir(f))) is value
    assert eval_qbf(parse_qdimacs(export_qdimacs(f))) is value
    assert eval_qbf(nnf(f)) is value
    assert eval_qbf(_rebuild(prenex(f))) is value


def _rebuild(pf):
    body = pf.matrix
    for kind, names in reversed(pf.prefix):
        body = (forall if kind == "a" else exists)(names, body)
    return body


@pytest.mark.parametrize("text", [
    "forall(p)\noutput(g1)\ng1 = and(p)\n",          # no header
    "#QCIR-G14\noutput(g9)\n",                        # undefined gate
    "#QCIR-G14\nforall(p)\noutput(g1)\ng1 = nand(p)\n",
])
def test_qcir_parse_errors(text):
    with pytest.raises(QbfFormatError):
        parse_qcir(text)


def test_qcir_parser_accepts_xor_ite_and_free():
    text = "#QCIR-G14\nfree(z)\nexists(a)\noutput(g2)\ng1 = xor(a, z)\ng2 = ite(z, g1, a)\n"
    f = parse_qcir(text)
    assert free_vars(f) == {"z"}
    assert eval_qbf(f, {"z"}) and eval_qbf(f, set())


def test_qdimacs_parser_quantifies_loose_variables():
    f = parse_qdimacs("c hi\np cnf 2 2\na 1 0\n1 2 0\n-1 2 0\n")
    assert eval_qbf(f)
    with pytest.raises(QbfFormatError):
        parse_qdimacs("p cnf 1 1\n1 2\n")


def test_prefix_and_alternations():
    f = exists(["p"], forall(["q"], exists(["r"], qand(p, q, qvar("r")))))
    assert quantifier_prefix(f) == "eae"
    assert alternation_depth(f) == 3


# -- model-checking encoding --------------------------------------------------

def _bits(enc: McEncoder, i: int, s: State) -> dict:
    out = {f"xb_{i}_{g}": w in s.base for g, w in enumerate(enc.gamma)}
    out.update({f"xv_{i}_{a}": a in s.valuation for a in enc.sigma})
    return out


def test_closereq_and_closer_match_similarity():
    ctx = Context([Implies(Atom("a"), Atom("b")), Atom("a")], ["a", "b"])
    enc = McEncoder(ctx.gamma, ctx.sigma)
    states = enumerate_context(ctx)
    for si, sj, sk in itertools.product(states, repeat=3):
        env = {**_bits(enc, 0, si), **_bits(enc, 1, sj), **_bits(enc, 2, sk)}
        assert eval_qbf(enc.closereq(0, 1, 2), env) == at_least_as_close(si, sk, sj)
        assert eval_qbf(enc.closer(0, 1, 2), env) == strictly_closer(si, sk, sj)


def test_state_and_closest_predicates():
    ctx = Context([Implies(Atom("a"), Atom("b"))], ["a", "b"], Or(Atom("a"), Atom("b")))
    enc = McEncoder(ctx.gamma, ctx.sigma, ctx.constraint)
    states = enumerate_context(ctx)
    phi = Atom("a")
    for s in states:
        members = set(closest_states(phi, s, ctx))
        for t in states:
            env = {**_bits(enc, 0, s), **_bits(enc, 1, t)}
            assert eval_qbf(enc.state(1), env)
            assert eval_qbf(enc.closest(phi, 0, 1), env) == (t in members)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**9))
def test_encode_mc_matches_brute_force(seed):
    rng = random.Random(seed)
    ctx = random_context(rng, 2, 3, constraint_prob=0.2)
    psi = random_formula(rng, ctx.sigma, ctx.gamma, 3, 2)
    state = random_state(rng, ctx)
    f = encode_mc(psi, ctx.gamma, state, ctx.constraint)
    assert is_closed(f)
    assert eval_qbf(f) == model_check(psi, ctx.gamma, state, ctx.constraint)


SIZE_CONSTANT = 16


@pytest.mark.parametrize("nesting", [1, 2])
def test_encoding_size_is_bounded(nesting):
    rng = random.Random(nesting)
    for _ in range(150):
        ctx = random_context(rng, 3, 4)
        psi = random_formula(rng, ctx.sigma, ctx.gamma, 4, nesting)
        state = random_state(rng, ctx)
        f = encode_mc(psi, ctx.gamma, state)
        weight = len(ctx.gamma) + len(set(ctx.sigma) | _atoms(psi)) + sum(
            formula_size(w) for w in ctx.gamma)
        assert qbf_size(f) <= SIZE_CONSTANT * formula_size(psi) * max(weight, 1)


def _atoms(f):
    return set(atoms_of(f))


# -- actual-cause encoding ----------------------------------------------------

@pytest.mark.parametrize("term, cause", [("st", True), ("bt", False), ("sh", True)])
def test_suzy_cause_encoding(term, cause):
    t = Term({term: True})
    assert eval_qbf(encode_actual_cause(t, Atom("bs"), SUZY), method="bdd") is cause
    assert is_actual_cause(SUZY, t, Atom("bs")) is cause


def test_cause_encoding_prefixes():
    f = encode_actual_cause(Term({"st": True}), Atom("bs"), SUZY)
    assert quantifier_prefix(f) == "eae"
    enc = CauseEncoder(SUZY)
    assert quantifier_prefix(exists(enc.family(0) + enc.term_family(0),
                                    enc.might_block(0, Atom("bs"), 0))) == "ea"
    assert quantifier_prefix(enc.minimality_block(0, Atom("bs"), 0)) == "ae"


def test_inclusion_only_merge_loses_true_causes():
    # with an inclusion-only merge the merged term may pick up extra literals,
    # which lets the minimality block fail for genuine causes
    for term in ("st", "sh"):
        t = Term({term: True})
        assert eval_qbf(encode_actual_cause(t, Atom("bs"), SUZY, exact_merge=True), method="bdd")
        assert not eval_qbf(encode_actual_cause(t, Atom("bs"), SUZY, exact_merge=False), method="bdd")


def test_cause_encoding_survives_qcir_round_trip():
    f = encode_actual_cause(Term({"st": True}), Atom("bs"), SUZY)
    assert eval_qbf(parse_qcir(export_qcir(f)), method="bdd")


def test_term_predicates():
    enc = CauseEncoder(SUZY)
    t = Term({"st": True, "bt": False})

    def env_of(i, term):
        out = {}
        for a in enc.sigma:
            out[f"lp_{i}_{a}"] = term.get(a) is True
            out[f"ln_{i}_{a}"] = term.get(a) is False
        return out

    neg = Term({"st": False, "bt": True})
    assert eval_qbf(enc.inv_term(1, 0), {**env_of(0, t), **env_of(1, neg)})
    assert eval_qbf(enc.term_vars_subset(1, 0), {**env_of(0, t), **env_of(1, Term({"bt": True}))})
    assert not eval_qbf(enc.term_vars_subset(1, 0), {**env_of(0, t), **env_of(1, neg)})
    merged = {**env_of(0, Term({"st": True})), **env_of(1, Term({"sd": True})),
              **env_of(2, Term({"st": True, "sd": True}))}
    assert eval_qbf(enc.merge_terms(0, 1, 2), merged)


# -- hardness -----------------------------------------------------------------

@pytest.mark.parametrize("f, expected", [
    (forall(["p"], p), False),
    (exists(["p"], p), True),
    (exists(["p"], forall(["q"], iff(p, q))), False),
    (forall(["q"], exists(["p"], iff(p, q))), True),
    (forall(["p"], qor(p, qnot(p))), True),
])
def test_hardness_examples(f, expected):
    t = encode_hardness(f)
    assert model_check(t, (), State()) is expected
    assert oracles.oracle_model_check(t, (), State()) is expected


def test_hardness_translation_shape():
    t = encode_hardness(forall(["p"], p))
    assert t == parse_formula("p | p_xi []-> p")
    with pytest.raises(ValueError):
        encode_hardness(p)


@pytest.mark.parametrize("seed", range(3))
def test_hardness_random(seed):
    rng = random.Random(seed)
    for _ in range(40):
        f = random_qbf(rng, rng.randint(1, 3), 3)
        assert model_check(encode_hardness(f), (), State()) == eval_qbf(f)


def test_hardness_names_avoid_clashes():
    f = exists(["p_xi"], forall(["p"], qor(qvar("p_xi"), qvar("p"))))
    t = encode_hardness(f)
    assert model_check(t, (), State()) == eval_qbf(f)


def test_satisfies_and_encoding_agree_on_videogame():
    base = [parse_formula(s) for s in ("ac1 -> fo", "ac2 -> ba", "ac3 -> ju")]
    psi = parse_formula("(ac3 <>-> ju) & ((ac3 & D(ac3 -> ju)) []-> ju)")
    excl = parse_formula("~(ac1 & ac2) & ~(ac1 & ac3) & ~(ac2 & ac3)")
    assert eval_qbf(encode_mc(psi, base, State(base, []), excl))
    ctx = Context.around(base, psi, constraint=excl)
    assert satisfies(State(base, []), ctx, psi)
