import json
from pathlib import Path

import pytest

from ctrfact.causal import EquationalState
from ctrfact.formulas import parse_formula
from ctrfact.modelfile import ModelError, load_model, parse_model

ROOT = Path(__file__).resolve().parent.parent
MODELS = ROOT / "models"


def test_videogame_fixture():
    model = load_model(MODELS / "videogame.json")
    state, ctx = model
    assert not model.equational
    assert state.valuation == frozenset()
    assert len(state.base) == 3 and set(ctx.gamma) == state.base
    assert ctx.sigma == ("ac1", "ac2", "ac3", "ba", "fo", "ju")
    assert ctx.constraint == parse_formula(
        "(ac1 -> ~ac2) & (ac1 -> ~ac3) & (ac2 -> ~ac1) & (ac2 -> ~ac3) & (ac3 -> ~ac1) & (ac3 -> ~ac2)")


def test_suzy_fixture():
    model = load_model(MODELS / "suzy.json")
    assert model.equational and model.acyclic
    assert isinstance(model.state, EquationalState)
    assert model.state.exogenous == {"sd", "bd"}
    assert set(model.context.gamma) == model.state.base


def test_base_outside_gamma():
    with pytest.raises(ModelError) as info:
        load_model(ROOT / "tests" / "data" / "bad_base.json")
    assert info.value.diagnostics == [("base[0]", "q -> p does not appear in gamma")]


@pytest.mark.parametrize("doc, field", [
    ({"gamma": ["p -> q"], "base": ["p -> q"], "valuation": ["p"]}, "valuation"),
    ({"gamma": ["p &"], "base": [], "valuation": []}, "gamma[0]"),
    ({"gamma": ["p []-> q"], "base": [], "valuation": []}, "gamma[0]"),
    ({"gamma": [], "base": [], "valuation": ["1x"]}, "valuation[0]"),
    ({"gamma": [], "base": [], "valuation": [], "colour": "red"}, "colour"),
    ({"gamma": [], "base": []}, "valuation"),
    ({"gamma": [], "base": [], "valuation": ["p"], "constraint": "~p"}, "valuation"),
    ({"equations": {"p": "p | q"}, "valuation": []}, "equations.p"),
    ({"equations": {"p": "q"}, "valuation": ["q"]}, "valuation"),
    ({"equations": ["p"], "valuation": []}, "equations"),
])
def test_field_level_diagnostics(doc, field):
    with pytest.raises(ModelError) as info:
        parse_model(json.dumps(doc))
    assert field in [f for f, _ in info.value.diagnostics]


def test_duplicate_equation_heads_are_rejected():
    text = '{"equations": {"p": "q", "p": "~q"}, "valuation": []}'
    with pytest.raises(ModelError, match="duplicate key 'p'"):
        parse_model(text)


def test_all_problems_reported_together():
    doc = {"gamma": ["p &", "q |"], "base": ["r"], "valuation": []}
    with pytest.raises(ModelError) as info:
        parse_model(json.dumps(doc))
    assert [f for f, _ in info.value.diagnostics] == ["gamma[0]", "gamma[1]", "base[0]"]


def test_cyclic_model_loads_with_a_note():
    model = parse_model(json.dumps({"equations": {"p": "q", "q": "p"}, "valuation": []}))
    assert model.acyclic is False
    assert any("cycle" in n for n in model.notes)


def test_sigma_extra_and_missing_file(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"gamma": ["p"], "base": [], "valuation": [], "sigma_extra": ["z"]}))
    assert load_model(path).context.sigma == ("p", "z")
    with pytest.raises(ModelError, match="<file>"):
        load_model(tmp_path / "absent.json")
