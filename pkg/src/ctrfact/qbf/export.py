"""Export to the QCIR-G14 and QDIMACS solver formats, and parsers for both."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import (
    QFALSE, QTRUE, QAnd, QConst, QIff, QImplies, QNot, QOr, QVar, Exists, Forall, QbfFormula,
    bound_vars, free_vars, rename_apart,
)

__all__ = [
    "nnf", "prenex", "quantifier_prefix", "alternation_depth",
    "export_qcir", "parse_qcir", "export_qdimacs", "parse_qdimacs", "QbfFormatError",
]


class QbfFormatError(ValueError):
    pass


# -- normal forms --------------------------------------------------------------

def nnf(f: QbfFormula) -> QbfFormula:
    """Negation normal form over and/or/quantifiers with constants folded away.

    Implications and biconditionals are expanded, which may duplicate
    quantified subformulas; rename apart afterwards if that matters.
    """
    memo: dict = {}
    alive = []

    def go(g: QbfFormula, pos: bool) -> QbfFormula:
        key = (id(g), pos)
        hit = memo.get(key)
        if hit is not None:
            return hit
        out = _nnf(g, pos)
        alive.append(g)
        memo[key] = out
        return out

    def fold(kind, parts):
        unit, zero = (QTRUE, QFALSE) if kind is QAnd else (QFALSE, QTRUE)
        flat = []
        for p in parts:
            if p == zero:
                return zero
            if p == unit:
                continue
            if isinstance(p, kind):
                flat.extend(p.args)
            else:
                flat.append(p)
        if not flat:
            return unit
        return flat[0] if len(flat) == 1 else kind(tuple(flat))

    def _nnf(g: QbfFormula, pos: bool) -> QbfFormula:
        t = type(g)
        if t is QVar:
            return g if pos else QNot(g)
        if t is QConst:
            return QConst(g.value == pos)
        if t is QNot:
            return go(g.operand, not pos)
        if t is QAnd or t is QOr:
            kind = t if pos else (QOr if t is QAnd else QAnd)
            return fold(kind, [go(a, pos) for a in g.args])
        if t is QImplies:
            if pos:
                return fold(QOr, [go(g.left, False), go(g.right, True)])
            return fold(QAnd, [go(g.left, True), go(g.right, False)])
        if t is QIff:
            a, b = g.left, g.right
            if pos:
                return fold(QAnd, [fold(QOr, [go(a, False), go(b, True)]),
                                   fold(QOr, [go(a, True), go(b, False)])])
            return fold(QAnd, [fold(QOr, [go(a, True), go(b, True)]),
                               fold(QOr, [go(a, False), go(b, False)])])
        body = go(g.body, pos)
        if isinstance(body, QConst):
            return body
        kind = t if pos else (Exists if t is Forall else Forall)
        return kind(g.vars, body)

    return go(f, True)


@dataclass(frozen=True)
class Prenex:
    """``prefix`` is a list of (kind, vars) blocks with kind ``"a"`` or ``"e"``; ``matrix`` is quantifier-free NNF."""

    prefix: list
    matrix: QbfFormula


def prenex(f: QbfFormula) -> Prenex:
    """Prenex form of a formula: NNF, rename apart, pull quantifiers out in depth-first order.

    Consecutive blocks of the same kind are merged.
    """
    g = rename_apart(nnf(f))
    prefix: list = []

    def pull(h: QbfFormula) -> QbfFormula:
        if isinstance(h, (Forall, Exists)):
            kind = "a" if isinstance(h, Forall) else "e"
            if prefix and prefix[-1][0] == kind:
                prefix[-1] = (kind, prefix[-1][1] + tuple(h.vars))
            else:
                prefix.append((kind, tuple(h.vars)))
            return pull(h.body)
        if isinstance(h, QAnd):
            return QAnd(tuple(pull(a) for a in h.args))
        if isinstance(h, QOr):
            return QOr(tuple(pull(a) for a in h.args))
        return h

    matrix = pull(g)
    return Prenex(prefix, matrix)


def quantifier_prefix(f: QbfFormula) -> str:
    """Kinds of the merged prenex blocks, outermost first, e.g. ``"eae"``."""
    return "".join(kind for kind, _ in prenex(f).prefix)


def alternation_depth(f: QbfFormula) -> int:
    return len(quantifier_prefix(f))


# -- QCIR ----------------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z0-9_]+\Z")


def export_qcir(f: QbfFormula) -> str:
    """QCIR-G14 text.  Bound variables are renamed apart first; leading quantifier blocks become the prefix."""
    f = rename_apart(f)
    for v in free_vars(f) | _bound(f):
        if not _IDENT.match(v):
            raise QbfFormatError(f"variable name {v!r} is not a QCIR identifier")
    lines = ["#QCIR-G14"]
    fv = sorted(free_vars(f))
    if fv:
        lines.append(f"free({', '.join(fv)})")
    while isinstance(f, (Forall, Exists)):
        kind = "forall" if isinstance(f, Forall) else "exists"
        lines.append(f"{kind}({', '.join(f.vars)})")
        f = f.body

    gates: list[str] = []
    memo: dict = {}
    alive = []
    taken = free_vars(f) | _bound(f)
    counter = [0]

    def new_gate(text: str) -> str:
        counter[0] += 1
        name = f"g{counter[0]}"
        while name in taken:
            counter[0] += 1
            name = f"g{counter[0]}"
        gates.append(f"{name} = {text}")
        return name

    def neg(lit: str) -> str:
        return lit[1:] if lit.startswith("-") else "-" + lit

    def lit(g: QbfFormula) -> str:
        key = id(g)
        hit = memo.get(key)
        if hit is not None:
            return hit
        t = type(g)
        if t is QVar:
            out = g.name
        elif t is QConst:
            out = new_gate("and()" if g.value else "or()")
        elif t is QNot:
            out = neg(lit(g.operand))
        elif t is QAnd:
            out = new_gate(f"and({', '.join(lit(a) for a in g.args)})")
        elif t is QOr:
            out = new_gate(f"or({', '.join(lit(a) for a in g.args)})")
        elif t is QImplies:
            out = new_gate(f"or({neg(lit(g.left))}, {lit(g.right)})")
        elif t is QIff:
            a, b = lit(g.left), lit(g.right)
            out = new_gate(f"and({new_gate(f'or({neg(a)}, {b})')}, {new_gate(f'or({a}, {neg(b)})')})")
        else:
            kind = "forall" if t is Forall else "exists"
            out = new_gate(f"{kind}({', '.join(g.vars)}; {lit(g.body)})")
        alive.append(g)
        memo[key] = out
        return out

    root = lit(f)
    if not (gates and root == gates[-1].split(" ", 1)[0]):
        root = new_gate(f"and({root})")
    lines.append(f"output({root})")
    lines.extend(gates)
    return "\n".join(lines) + "\n"


def _bound(f: QbfFormula) -> set[str]:
    return set(bound_vars(f))


_QCIR_LINE = re.compile(r"(\w+)\s*\((.*)\)\Z")
_QCIR_GATE = re.compile(r"(\w+)\s*=\s*(\w+)\s*\((.*)\)\Z")


def _split_lits(text: str) -> list[str]:
    text = text.strip()
    return [t.strip() for t in text.split(",")] if text else []


def parse_qcir(text: str) -> QbfFormula:
    """Parse QCIR-G14 (cleansed or not) into a formula."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].upper().startswith("#QCIR-G14"):
        raise QbfFormatError("missing '#QCIR-G14' header")
    lines = [ln for ln in lines[1:] if not ln.startswith("#")]
    prefix: list = []
    output = None
    gates: dict[str, tuple[str, str]] = {}
    order: list[str] = []
    for n, ln in enumerate(lines, 1):
        m = _QCIR_GATE.match(ln)
        if m:
            name, op, args = m.groups()
            if name in gates:
                raise QbfFormatError(f"gate {name} defined twice (line {n})")
            gates[name] = (op.lower(), args)
            order.append(name)
            continue
        m = _QCIR_LINE.match(ln)
        if not m:
            raise QbfFormatError(f"cannot parse QCIR line {n}: {ln!r}")
        kw, args = m.groups()
        kw = kw.lower()
        if kw in ("forall", "exists", "free"):
            if output is not None:
                raise QbfFormatError(f"quantifier block after output (line {n})")
            prefix.append((kw, _split_lits(args)))
        elif kw == "output":
            output = args.strip()
        else:
            raise QbfFormatError(f"unknown QCIR statement {kw!r} (line {n})")
    if output is None:
        raise QbfFormatError("missing output statement")
    if output.lstrip("-") not in gates:
        raise QbfFormatError(f"output {output} is not a defined gate")

    built: dict[str, QbfFormula] = {}

    def resolve(lit: str) -> QbfFormula:
        if lit.startswith("-"):
            return QNot(resolve(lit[1:]))
        if lit in built:
            return built[lit]
        if lit in gates:
            raise QbfFormatError(f"gate {lit} used before its definition")
        return QVar(lit)

    for name in order:
        op, args = gates[name]
        if op in ("and", "or"):
            parts = tuple(resolve(a) for a in _split_lits(args))
            if not parts:
                node = QTRUE if op == "and" else QFALSE
            else:
                node = QAnd(parts) if op == "and" else QOr(parts)
        elif op in ("forall", "exists"):
            if ";" not in args:
                raise QbfFormatError(f"quantifier gate {name} lacks ';'")
            vs, body = args.split(";", 1)
            cls = Forall if op == "forall" else Exists
            node = cls(tuple(_split_lits(vs)), resolve(body.strip()))
        elif op == "xor":
            a, b = (resolve(x) for x in _split_lits(args))
            node = QNot(QIff(a, b))
        elif op == "ite":
            c, a, b = (resolve(x) for x in _split_lits(args))
            node = QOr((QAnd((c, a)), QAnd((QNot(c), b))))
        else:
            raise QbfFormatError(f"unknown gate type {op!r} for {name}")
        built[name] = node

    f = resolve(output)
    for kw, vs in reversed(prefix):
        if kw == "forall":
            f = Forall(tuple(vs), f)
        elif kw == "exists":
            f = Exists(tuple(vs), f)
    return f


# -- QDIMACS -------------------------------------------------------------------

def export_qdimacs(f: QbfFormula, comments: bool = False) -> str:
    """QDIMACS text for a closed formula.

    The formula is put in prenex NNF and its matrix is Tseitin-encoded; the
    auxiliary variables form the innermost existential block.
    """
    if free_vars(f):
        raise QbfFormatError(f"QDIMACS export needs a closed formula; free: {sorted(free_vars(f))}")
    pf = prenex(f)
    index: dict[str, int] = {}
    for _, vs in pf.prefix:
        for v in vs:
            index[v] = len(index) + 1
    clauses: list[list[int]] = []
    aux: list[int] = []
    next_var = [len(index)]

    def fresh() -> int:
        next_var[0] += 1
        aux.append(next_var[0])
        return next_var[0]

    def lit(g: QbfFormula) -> int:
        if isinstance(g, QVar):
            return index[g.name]
        if isinstance(g, QNot):
            return -lit(g.operand)
        lits = [lit(a) for a in g.args]
        x = fresh()
        if isinstance(g, QAnd):
            clauses.extend([-x, a] for a in lits)
            clauses.append([x] + [-a for a in lits])
        else:
            clauses.extend([x, -a] for a in lits)
            clauses.append([-x] + lits)
        return x

    m = pf.matrix
    if isinstance(m, QConst):
        if not m.value:
            x = fresh()
            clauses.extend([[x], [-x]])
    else:
        clauses.append([lit(m)])

    prefix = [(k, [index[v] for v in vs]) for k, vs in pf.prefix]
    if aux:
        if prefix and prefix[-1][0] == "e":
            prefix[-1][1].extend(aux)
        else:
            prefix.append(("e", aux))
    out = []
    if comments:
        out.extend(f"c {i} {v}" for v, i in index.items())
    out.append(f"p cnf {next_var[0]} {len(clauses)}")
    out.extend(f"{k} {' '.join(map(str, vs))} 0" for k, vs in prefix if vs)
    out.extend(" ".join(map(str, c + [0])) for c in clauses)
    return "\n".join(out) + "\n"


def parse_qdimacs(text: str) -> QbfFormula:
    """Parse QDIMACS; variable ``n`` becomes ``QVar("v<n>")``.  Unquantified variables are existential and outermost."""
    header = None
    prefix: list = []
    clauses: list[list[int]] = []
    tokens: list[int] = []
    for n, raw in enumerate(text.splitlines(), 1):
        ln = raw.strip()
        if not ln or ln.startswith("c"):
            continue
        if ln.startswith("p"):
            parts = ln.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise QbfFormatError(f"bad problem line {n}: {ln!r}")
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise QbfFormatError(f"line {n} precedes the problem line")
        if ln[0] in "ae":
            nums = [int(x) for x in ln[1:].split()]
            if not nums or nums[-1] != 0:
                raise QbfFormatError(f"quantifier line {n} must end with 0")
            if clauses or tokens:
                raise QbfFormatError(f"quantifier line {n} after clauses")
            prefix.append((ln[0], nums[:-1]))
            continue
        for x in ln.split():
            v = int(x)
            if v == 0:
                clauses.append(tokens)
                tokens = []
            else:
                tokens.append(v)
    if header is None:
        raise QbfFormatError("missing problem line")
    if tokens:
        raise QbfFormatError("the last clause is not terminated by 0")
    used = {abs(v) for c in clauses for v in c} | {v for _, vs in prefix for v in vs}
    if used and max(used) > header[0]:
        raise QbfFormatError(f"variable {max(used)} exceeds the declared count {header[0]}")

    def var(v: int) -> QbfFormula:
        q = QVar(f"v{abs(v)}")
        return q if v > 0 else QNot(q)

    matrix = QAnd(tuple(QOr(tuple(var(v) for v in c)) if c else QFALSE for c in clauses)) if clauses else QTRUE
    quantified = {v for _, vs in prefix for v in vs}
    loose = sorted({abs(v) for c in clauses for v in c} - quantified)
    f = matrix
    for kind, vs in reversed(prefix):
        names = tuple(f"v{v}" for v in vs)
        f = Forall(names, f) if kind == "a" else Exists(names, f)
    if loose:
        f = Exists(tuple(f"v{v}" for v in loose), f)
    return f
