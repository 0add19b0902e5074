"""Formula ASTs, concrete syntax, and term utilities.

Three nested languages share one set of node classes:

* propositional formulas (atoms, constants, boolean connectives),
* causal-information formulas, which add ``D(w)`` ("w is in the causal base"),
* conditional formulas, which add the would-counterfactual ``[]->`` and the
  might-counterfactual ``<>->``.

Concrete syntax, highest precedence first::

    ~    &    |    ->  (right assoc)    <->    []->  <>->  (non-assoc)

Constants are ``true`` and ``false``; ``D(...)`` only accepts a propositional
argument.
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from typing import Union

__all__ = [
    "Formula", "Atom", "Top", "Bot", "Not", "And", "Or", "Implies", "Iff",
    "Delta", "BoxRight", "DiamondRight", "TOP", "BOT",
    "ParseError", "parse_formula", "render_formula",
    "atoms_of", "delta_bodies", "is_unnested", "is_propositional",
    "subformulas", "formula_size", "holds", "conjoin", "disjoin",
    "Term", "negate_term", "enumerate_terms", "is_strict_subterm", "term_from_formula",
    "Equation", "equation_from_formula", "TERM_BOUND",
]

ATOM_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
RESERVED = frozenset({"true", "false"})

# enumerate_terms refuses atom sets larger than this
TERM_BOUND = 12


def _check_atom_name(name: str) -> None:
    if not isinstance(name, str) or not ATOM_RE.match(name):
        raise ValueError(f"invalid atom name {name!r}")
    if name in RESERVED:
        raise ValueError(f"{name!r} is a reserved word, not an atom")


class Formula:
    """Base class of all formula nodes. Nodes are immutable and compare structurally."""

    __slots__ = ()

    def __str__(self) -> str:
        return render_formula(self)


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str

    def __post_init__(self):
        _check_atom_name(self.name)


@dataclass(frozen=True, slots=True)
class Top(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Bot(Formula):
    pass


TOP = Top()
BOT = Bot()


@dataclass(frozen=True, slots=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Delta(Formula):
    """Causal relevance: true at a state iff ``body`` belongs to its causal base."""

    body: Formula

    def __post_init__(self):
        if not is_propositional(self.body):
            raise ValueError("D(...) only applies to propositional formulas")


@dataclass(frozen=True, slots=True)
class BoxRight(Formula):
    """Would-counterfactual ``antecedent []-> consequent``."""

    antecedent: Formula
    consequent: Formula


@dataclass(frozen=True, slots=True)
class DiamondRight(Formula):
    """Might-counterfactual, by definition ``~(antecedent []-> ~consequent)``."""

    antecedent: Formula
    consequent: Formula


_BINARY = (And, Or, Implies, Iff)
_CONDITIONAL = (BoxRight, DiamondRight)

PropFormula = Formula
CondFormula = Formula
Valuation = Union[frozenset, set]


def _children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.operand,)
    if isinstance(f, _BINARY):
        return (f.left, f.right)
    if isinstance(f, _CONDITIONAL):
        return (f.antecedent, f.consequent)
    if isinstance(f, Delta):
        return (f.body,)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order walk over ``f`` and all its subformulas (Delta bodies included)."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(_children(g)))


def formula_size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


def is_propositional(f: Formula) -> bool:
    return all(not isinstance(g, (Delta, BoxRight, DiamondRight)) for g in subformulas(f))


def atoms_of(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))


def delta_bodies(f: Formula) -> frozenset[Formula]:
    return frozenset(g.body for g in subformulas(f) if isinstance(g, Delta))


def is_unnested(f: Formula) -> bool:
    """True iff no counterfactual occurs inside another counterfactual."""

    def depth(g: Formula) -> int:
        inner = max((depth(c) for c in _children(g)), default=0)
        return inner + 1 if isinstance(g, _CONDITIONAL) else inner

    return depth(f) <= 1


def holds(f: Formula, valuation) -> bool:
    """Classical truth of a propositional formula; atoms outside ``valuation`` are false."""
    if isinstance(f, Atom):
        return f.name in valuation
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Not):
        return not holds(f.operand, valuation)
    if isinstance(f, And):
        return holds(f.left, valuation) and holds(f.right, valuation)
    if isinstance(f, Or):
        return holds(f.left, valuation) or holds(f.right, valuation)
    if isinstance(f, Implies):
        return (not holds(f.left, valuation)) or holds(f.right, valuation)
    if isinstance(f, Iff):
        return holds(f.left, valuation) == holds(f.right, valuation)
    raise ValueError(f"not a propositional formula: {render_formula(f)}")


def conjoin(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``true``."""
    parts = list(parts)
    if not parts:
        return TOP
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disjoin(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return BOT
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


# --------------------------------------------------------------------------
# Parsing

class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<box>\[\]->)|(?P<dia><>->)|(?P<iff><->)|(?P<imp>->)"
    r"|(?P<not>~)|(?P<and>&)|(?P<or>\|)|(?P<lp>\()|(?P<rp>\))|(?P<comma>,)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
)


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), line, pos - line_start + 1))
        else:
            for i, ch in enumerate(m.group()):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.column)

    def expect(self, kind: str, what: str) -> _Token:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            self.error(f"expected {what}, found {found!r}")
        return self.advance()

    def parse(self) -> Formula:
        f = self.conditional()
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")
        return f

    def conditional(self) -> Formula:
        left = self.iff()
        if self.tok.kind in ("box", "dia"):
            op = self.advance()
            right = self.iff()
            if self.tok.kind in ("box", "dia"):
                self.error("counterfactuals are non-associative; add parentheses")
            return BoxRight(left, right) if op.kind == "box" else DiamondRight(left, right)
        return left

    def iff(self) -> Formula:
        left = self.implication()
        while self.tok.kind == "iff":
            self.advance()
            left = Iff(left, self.implication())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.tok.kind == "imp":
            self.advance()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.tok.kind == "or":
            self.advance()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.tok.kind == "and":
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        if self.tok.kind == "not":
            self.advance()
            return Not(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        tok = self.tok
        if tok.kind == "lp":
            self.advance()
            f = self.conditional()
            self.expect("rp", "')'")
            return f
        if tok.kind == "ident":
            self.advance()
            if tok.text == "true":
                return TOP
            if tok.text == "false":
                return BOT
            if tok.text == "D" and self.tok.kind == "lp":
                self.advance()
                body = self.conditional()
                self.expect("rp", "')'")
                if not is_propositional(body):
                    self.error("D(...) only accepts a propositional formula", tok)
                return Delta(body)
            return Atom(tok.text)
        self.error(f"expected a formula, found {tok.text or 'end of input'!r}")


def parse_formula(text: str) -> Formula:
    """Parse the concrete syntax into a formula AST.

    >>> render_formula(parse_formula("(ac3 & D(ac3 -> ju)) []-> ju"))
    'ac3 & D(ac3 -> ju) []-> ju'
    """
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# Rendering

_PREC = {BoxRight: 1, DiamondRight: 1, Iff: 2, Implies: 3, Or: 4, And: 5, Not: 6}
_OPS = {BoxRight: "[]->", DiamondRight: "<>->", Iff: "<->", Implies: "->", Or: "|", And: "&"}
_RIGHT_ASSOC = {Implies}
_NON_ASSOC = {BoxRight, DiamondRight}


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), 7)


def render_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Delta):
        return f"D({render_formula(f.body)})"
    if isinstance(f, Not):
        inner = render_formula(f.operand)
        return "~" + (inner if _prec(f.operand) >= _prec(f) else f"({inner})")
    cls = type(f)
    left, right = _children(f)
    p = _PREC[cls]
    ls, rs = render_formula(left), render_formula(right)
    lp, rp = _prec(left), _prec(right)
    if lp < p or (lp == p and (cls in _RIGHT_ASSOC or cls in _NON_ASSOC)):
        ls = f"({ls})"
    if rp < p or (rp == p and cls not in _RIGHT_ASSOC):
        rs = f"({rs})"
    return f"{ls} {_OPS[cls]} {rs}"


# --------------------------------------------------------------------------
# Terms

class Term(Mapping):
    """A conjunction of literals with at most one literal per atom.

    Stored as a map ``atom -> polarity`` (True for ``p``, False for ``~p``).
    The empty term stands for ``true``.
    """

    __slots__ = ("_lits", "_hash")

    def __init__(self, literals: Mapping[str, bool] | Iterable[tuple[str, bool]] = ()):
        pairs = literals.items() if isinstance(literals, Mapping) else literals
        lits: dict[str, bool] = {}
        for atom, pol in pairs:
            _check_atom_name(atom)
            pol = bool(pol)
            if lits.get(atom, pol) != pol:
                raise ValueError(f"atom {atom!r} occurs with both polarities")
            lits[atom] = pol
        self._lits = dict(sorted(lits.items()))
        self._hash = hash(frozenset(self._lits.items()))

    def __getitem__(self, atom: str) -> bool:
        return self._lits[atom]

    def __iter__(self):
        return iter(self._lits)

    def __len__(self) -> int:
        return len(self._lits)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, Term):
            return self._lits == other._lits
        return NotImplemented

    def __repr__(self) -> str:
        return f"Term({self._lits!r})"

    def __str__(self) -> str:
        return render_formula(self.to_formula())

    @property
    def atoms(self) -> frozenset[str]:
        return frozenset(self._lits)

    @property
    def literals(self) -> frozenset[tuple[str, bool]]:
        return frozenset(self._lits.items())

    def to_formula(self) -> Formula:
        return conjoin(Atom(a) if pol else Not(Atom(a)) for a, pol in self._lits.items())

    def holds_in(self, valuation) -> bool:
        return all((a in valuation) == pol for a, pol in self._lits.items())

    def merge(self, other: "Term") -> "Term":
        """Union of literal sets; raises if the two terms disagree on an atom."""
        return Term(itertools.chain(self.items(), other.items()))


def negate_term(term: Term) -> Term:
    """Flip every literal: the overline operation on terms."""
    return Term({a: not pol for a, pol in term.items()})


def enumerate_terms(atoms: Iterable[str], bound: int = TERM_BOUND) -> list[Term]:
    """All full-polarity terms over exactly ``atoms``, positive literals first."""
    atoms = sorted(set(atoms))
    if len(atoms) > bound:
        raise ValueError(f"{len(atoms)} atoms exceed the term enumeration bound {bound}")
    return [Term(zip(atoms, pols)) for pols in itertools.product((True, False), repeat=len(atoms))]


def is_strict_subterm(sub: Term, term: Term) -> bool:
    return sub.literals < term.literals


def term_from_formula(f: Formula) -> Term:
    """Read a conjunction of literals (or ``true``) back as a Term."""
    if isinstance(f, Top):
        return Term()
    lits = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, And):
            stack.extend((g.right, g.left))
        elif isinstance(g, Atom):
            lits.append((g.name, True))
        elif isinstance(g, Not) and isinstance(g.operand, Atom):
            lits.append((g.operand.name, False))
        else:
            raise ValueError(f"not a conjunction of literals: {render_formula(f)}")
    atoms = [a for a, _ in lits]
    if len(set(atoms)) != len(atoms):
        raise ValueError(f"an atom occurs twice in term {render_formula(f)}")
    return Term(lits)


# --------------------------------------------------------------------------
# Equational formulas

@dataclass(frozen=True, slots=True)
class Equation:
    """Structural equation ``head <-> body`` with ``head`` not occurring in ``body``."""

    head: str
    body: Formula

    def __post_init__(self):
        _check_atom_name(self.head)
        if not is_propositional(self.body):
            raise ValueError("equation bodies must be propositional")
        if self.head in atoms_of(self.body):
            raise ValueError(f"equation head {self.head!r} occurs in its own body")

    def as_formula(self) -> Formula:
        return Iff(Atom(self.head), self.body)

    def __str__(self) -> str:
        return render_formula(self.as_formula())


def equation_from_formula(f: Formula) -> Equation | None:
    """Return the Equation read off ``p <-> w`` if ``f`` has that shape, else None."""
    if isinstance(f, Iff) and isinstance(f.left, Atom) and is_propositional(f.right):
        if f.left.name not in atoms_of(f.right):
            return Equation(f.left.name, f.right)
    return None
