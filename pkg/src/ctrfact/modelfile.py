"""JSON model files.

Two layouts are accepted. A general model::

    {"gamma": [...], "base": [...], "valuation": [...],
     "sigma_extra": [...], "constraint": "..."}

and an equational model::

    {"equations": {"head": "body", ...}, "valuation": [...]}

Formulas are strings in the concrete syntax of ``parse_formula``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .causal import EquationalState, build_causal_graph, is_dag
from .formulas import (
    TOP, Equation, Formula, ParseError, atoms_of, holds, is_propositional, parse_formula,
    render_formula,
)
from .states import Context, State

__all__ = ["ModelError", "LoadedModel", "load_model", "parse_model"]

_GENERAL_FIELDS = {"gamma", "base", "valuation", "sigma_extra", "constraint"}
_EQUATIONAL_FIELDS = {"equations", "valuation"}


class ModelError(ValueError):
    """Invalid model file; ``diagnostics`` lists ``(field, message)`` pairs."""

    def __init__(self, source: str, diagnostics: list[tuple[str, str]]):
        self.source = source
        self.diagnostics = list(diagnostics)
        lines = [f"{source}: {fld}: {msg}" for fld, msg in self.diagnostics]
        super().__init__("\n".join(lines))


@dataclass
class LoadedModel:
    state: State | EquationalState
    context: Context
    equational: bool = False
    acyclic: bool | None = None
    notes: list[str] = field(default_factory=list)

    def __iter__(self):
        # allows ``state, context = load_model(path)``
        return iter((self.state, self.context))

    @property
    def plain_state(self) -> State:
        s = self.state
        return s.as_state() if isinstance(s, EquationalState) else s


def _no_duplicates(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise ValueError(f"duplicate key {key!r}")
        out[key] = value
    return out


class _Collector:
    def __init__(self):
        self.errors: list[tuple[str, str]] = []

    def add(self, fld: str, msg: str) -> None:
        self.errors.append((fld, msg))

    def formula(self, fld: str, text) -> Formula | None:
        if not isinstance(text, str):
            self.add(fld, f"expected a formula string, got {type(text).__name__}")
            return None
        try:
            return parse_formula(text)
        except ParseError as exc:
            self.add(fld, str(exc))
            return None

    def string_list(self, data: dict, key: str, required: bool) -> list:
        if key not in data:
            if required:
                self.add(key, "missing field")
            return []
        value = data[key]
        if not isinstance(value, list):
            self.add(key, "expected a list")
            return []
        return value

    def atoms(self, data: dict, key: str, required: bool) -> set[str]:
        out = set()
        for k, item in enumerate(self.string_list(data, key, required)):
            if not isinstance(item, str) or not item.isidentifier():
                self.add(f"{key}[{k}]", f"not an atom name: {item!r}")
            else:
                out.add(item)
        return out


def _parse_general(data: dict, diag: _Collector) -> LoadedModel | None:
    gamma = []
    for k, text in enumerate(diag.string_list(data, "gamma", True)):
        f = diag.formula(f"gamma[{k}]", text)
        if f is not None:
            if not is_propositional(f):
                diag.add(f"gamma[{k}]", "vocabulary formulas must be propositional")
            else:
                gamma.append(f)
    base = []
    for k, text in enumerate(diag.string_list(data, "base", True)):
        f = diag.formula(f"base[{k}]", text)
        if f is None:
            continue
        if f not in gamma:
            diag.add(f"base[{k}]", f"{render_formula(f)} does not appear in gamma")
        else:
            base.append(f)
    valuation = diag.atoms(data, "valuation", True)
    extra = diag.atoms(data, "sigma_extra", False)
    constraint = TOP
    if "constraint" in data:
        c = diag.formula("constraint", data["constraint"])
        if c is not None:
            if not is_propositional(c):
                diag.add("constraint", "the constraint must be propositional")
            else:
                constraint = c
    if diag.errors:
        return None
    for w in base:
        if not holds(w, valuation):
            diag.add("valuation", f"violates base formula {render_formula(w)}")
    if not holds(constraint, valuation):
        diag.add("valuation", "violates the constraint")
    if diag.errors:
        return None
    sigma = set(extra) | atoms_of(constraint)
    for w in gamma:
        sigma |= atoms_of(w)
    notes = []
    outside = sorted(valuation - sigma)
    if outside:
        notes.append(f"valuation atoms {outside} are outside the vocabulary and only matter "
                     "for formulas that mention them")
    return LoadedModel(State(base, valuation), Context(gamma, sigma, constraint), notes=notes)


def _parse_equational(data: dict, diag: _Collector) -> LoadedModel | None:
    equations = data.get("equations")
    eqs = []
    if not isinstance(equations, dict):
        diag.add("equations", "expected a map from atom to formula string")
    else:
        for head, text in equations.items():
            fld = f"equations.{head}"
            if not head.isidentifier():
                diag.add(fld, f"not an atom name: {head!r}")
                continue
            body = diag.formula(fld, text)
            if body is None:
                continue
            if not is_propositional(body):
                diag.add(fld, "equation bodies must be propositional")
            elif head in atoms_of(body):
                diag.add(fld, f"head {head!r} occurs in its own body")
            else:
                eqs.append(Equation(head, body))
    valuation = diag.atoms(data, "valuation", True)
    if diag.errors:
        return None
    for e in eqs:
        if not holds(e.as_formula(), valuation):
            diag.add("valuation", f"violates equation {e}")
    if diag.errors:
        return None
    state = EquationalState(eqs, valuation)
    acyclic = is_dag(build_causal_graph(state))
    notes = [] if acyclic else ["the causal graph has a cycle; cause queries are unavailable"]
    outside = sorted(valuation - state.atoms)
    if outside:
        notes.append(f"valuation atoms {outside} do not occur in the causal base")
    context = Context(state.base, state.atoms)
    return LoadedModel(state, context, equational=True, acyclic=acyclic, notes=notes)


def parse_model(text: str, source: str = "<model>") -> LoadedModel:
    try:
        data = json.loads(text, object_pairs_hook=_no_duplicates)
    except (json.JSONDecodeError, ValueError) as exc:
        raise ModelError(source, [("<json>", str(exc))]) from None
    if not isinstance(data, dict):
        raise ModelError(source, [("<json>", "the top level must be an object")])
    diag = _Collector()
    if "equations" in data:
        allowed, parse = _EQUATIONAL_FIELDS, _parse_equational
    else:
        allowed, parse = _GENERAL_FIELDS, _parse_general
    for key in sorted(set(data) - allowed):
        diag.add(key, "unknown field")
    model = parse(data, diag)
    if diag.errors or model is None:
        raise ModelError(source, diag.errors)
    return model


def load_model(path: str | Path) -> LoadedModel:
    """Read and validate a model file; raises ModelError with field-level diagnostics."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelError(str(path), [("<file>", exc.strerror or str(exc))]) from None
    return parse_model(text, str(path))
