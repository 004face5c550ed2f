"""Parser and serializer for the model description language and its JSON mirror.

The text format is line-oriented; ``#`` starts a comment.  Directives:

    vertex <name>[, <name>...] [: <alphabet>]
        alphabet is ``0..k`` (the numeric alphabet 0,...,k) or
        ``{tok, tok, ...}``; omitted means binary ``0..1``.
    edge <name> -> <name>
    error <name> ~ uniform | {tok: p/q, tok: p/q, ...}
        ``uniform`` spreads over the vertex's own alphabet.  A vertex with
        an error declaration but no func/table gets the identity mechanism
        u -> u (its error symbols must then lie in its alphabet).  Without
        an error declaration the mechanism is deterministic (singleton
        error).
    func <name> := <expr>
        Operators ``xor``, ``+``, ``*``, ``mod`` (loosest binding) over
        integer literals, parent names and the error symbol ``u``;
        symbols used arithmetically must be integers, and results must
        land in the vertex alphabet.
    table <name> | <parent>, ... : <in>, ... -> <out>; ...
        Parents may be listed in any order (they are a permutation of the
        graph parents); each row lists the parent symbols in header order,
        then the error symbol if the error alphabet has more than one
        element, then the outcome.

Probabilities are exact rationals ``p/q`` (or integers); decimal literals
are rejected.  Parsing either returns a validated model or raises
:class:`ModelFormatError` carrying line/column diagnostics.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .errors import CfcmError
from .graph import DirectedGraph, build_graph
from .model import (
    Alphabet,
    ErrorVariable,
    FunctionalCausalModel,
    Mechanism,
    SINGLETON_SYMBOL,
    validate_model,
)

_WORD = re.compile(r"[A-Za-z0-9_]+")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.message}"


class ModelFormatError(CfcmError):
    """Parse or semantic failure; carries the full diagnostic list."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class _Halt(Exception):
    """Internal: abort parsing the current line."""

    def __init__(self, column: int, message: str):
        self.column = column
        self.message = message
        super().__init__(message)


class _Cursor:
    def __init__(self, text: str, line_no: int):
        self.text = text
        self.pos = 0
        self.line_no = line_no

    @property
    def column(self) -> int:
        return self.pos + 1

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self, literal: str) -> bool:
        self.skip_ws()
        return self.text.startswith(literal, self.pos)

    def eat(self, literal: str) -> bool:
        if self.peek(literal):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal: str):
        if not self.eat(literal):
            raise _Halt(self.column, f"expected {literal!r}")

    def word(self, what: str = "symbol") -> str:
        self.skip_ws()
        m = _WORD.match(self.text, self.pos)
        if not m:
            raise _Halt(self.column, f"expected {what}")
        self.pos = m.end()
        return m.group(0)

    def name(self, what: str = "name") -> str:
        self.skip_ws()
        m = _NAME.match(self.text, self.pos)
        if not m:
            raise _Halt(self.column, f"expected {what}")
        self.pos = m.end()
        return m.group(0)

    def expect_end(self):
        if not self.at_end():
            raise _Halt(self.column, f"unexpected trailing input {self.text[self.pos:]!r}")


# -- declaration records ---------------------------------------------------


@dataclass
class _Decls:
    vertices: list = field(default_factory=list)  # (name, Alphabet, line, col)
    edges: list = field(default_factory=list)  # (tail, head, line, col)
    errors: dict = field(default_factory=dict)  # name -> ("uniform" | entries, line, col)
    funcs: dict = field(default_factory=dict)  # name -> (ast, line, col)
    tables: dict = field(default_factory=dict)  # name -> (header, rows, line, col)
    kind_lines: int = 0  # count of error/func/table directives


def _parse_rational(cur: _Cursor) -> Fraction:
    cur.skip_ws()
    start = cur.column
    tok = cur.word("rational")
    if not tok.isdigit():
        raise _Halt(start, f"expected integer or p/q rational, got {tok!r}")
    num = int(tok)
    if cur.peek("."):
        raise _Halt(cur.column, "decimal literals are not supported; write p/q")
    if cur.eat("/"):
        dtok = cur.word("denominator")
        if not dtok.isdigit() or int(dtok) == 0:
            raise _Halt(start, f"bad denominator {dtok!r}")
        return Fraction(num, int(dtok))
    return Fraction(num)


def _parse_alphabet(cur: _Cursor) -> Alphabet:
    cur.skip_ws()
    start = cur.column
    if cur.eat("{"):
        symbols = []
        while True:
            symbols.append(cur.word("alphabet token"))
            if cur.eat(","):
                continue
            cur.expect("}")
            break
        if len(set(symbols)) != len(symbols):
            raise _Halt(start, "alphabet has duplicate tokens")
        return Alphabet(tuple(symbols))
    tok = cur.word("alphabet")
    if not tok.isdigit() or int(tok) != 0:
        raise _Halt(start, f"alphabet range must start at 0, got {tok!r}")
    cur.expect("..")
    top = cur.word("alphabet upper bound")
    if not top.isdigit():
        raise _Halt(cur.column, f"bad alphabet upper bound {top!r}")
    return Alphabet.of_size(int(top) + 1)


# -- expression mini-language ----------------------------------------------


def _tokenize_expr(cur: _Cursor):
    tokens = []
    while not cur.at_end():
        cur.skip_ws()
        col = cur.column
        ch = cur.text[cur.pos]
        if ch.isdigit():
            tok = cur.word()
            if not tok.isdigit():
                raise _Halt(col, f"bad number {tok!r}")
            if cur.peek("."):
                raise _Halt(cur.column, "decimal literals are not supported")
            tokens.append(("num", int(tok), col))
        elif _NAME.match(ch):
            name = cur.name()
            if name in ("xor", "mod"):
                tokens.append(("op", name, col))
            else:
                tokens.append(("name", name, col))
        elif ch in "+*()":
            cur.pos += 1
            tokens.append(("op", ch, col))
        else:
            raise _Halt(col, f"unexpected character {ch!r} in expression")
    tokens.append(("end", None, cur.column))
    return tokens


class _ExprParser:
    """Precedence (loosest first): mod, xor, +, *."""

    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def _peek_op(self, *names):
        kind, value, _ = self.tokens[self.i]
        return kind == "op" and value in names

    def _next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self):
        node = self._mod()
        kind, value, col = self.tokens[self.i]
        if kind != "end":
            raise _Halt(col, f"unexpected token {value!r}")
        return node

    def _mod(self):
        node = self._xor()
        while self._peek_op("mod"):
            _, _, col = self._next()
            node = ("mod", node, self._xor(), col)
        return node

    def _xor(self):
        node = self._add()
        while self._peek_op("xor"):
            _, _, col = self._next()
            node = ("xor", node, self._add(), col)
        return node

    def _add(self):
        node = self._mul()
        while self._peek_op("+"):
            _, _, col = self._next()
            node = ("+", node, self._mul(), col)
        return node

    def _mul(self):
        node = self._atom()
        while self._peek_op("*"):
            _, _, col = self._next()
            node = ("*", node, self._atom(), col)
        return node

    def _atom(self):
        kind, value, col = self._next()
        if kind == "num":
            return ("num", value, col)
        if kind == "name":
            return ("name", value, col)
        if kind == "op" and value == "(":
            node = self._mod()
            kind, value, col = self._next()
            if not (kind == "op" and value == ")"):
                raise _Halt(col, "expected ')'")
            return node
        raise _Halt(col, f"expected a value, got {value!r}")


class _EvalError(Exception):
    def __init__(self, column, message):
        self.column = column
        self.message = message


def _eval_expr(node, env: dict, error_symbol: str):
    kind = node[0]
    if kind == "num":
        return node[1]
    if kind == "name":
        name, col = node[1], node[2]
        if name == "u":
            return error_symbol
        if name not in env:
            raise _EvalError(col, f"{name!r} is not a parent of this vertex")
        return env[name]

    def as_int(value, col):
        if isinstance(value, int):
            return value
        try:
            return int(value)
        except ValueError:
            raise _EvalError(col, f"symbol {value!r} is not numeric") from None

    _, left, right, col = node
    lv = as_int(_eval_expr(left, env, error_symbol), col)
    rv = as_int(_eval_expr(right, env, error_symbol), col)
    if kind == "+":
        return lv + rv
    if kind == "*":
        return lv * rv
    if kind == "xor":
        return lv ^ rv
    if kind == "mod":
        if rv == 0:
            raise _EvalError(col, "mod by zero")
        return lv % rv
    raise AssertionError(kind)


# -- line scanner ------------------------------------------------------------


def _scan_dsl(text: str) -> tuple[_Decls, list[Diagnostic]]:
    decls = _Decls()
    diagnostics: list[Diagnostic] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        cur = _Cursor(line, line_no)
        try:
            _scan_line(cur, decls, diagnostics)
        except _Halt as halt:
            diagnostics.append(Diagnostic(line_no, halt.column, halt.message))
    return decls, diagnostics


def _scan_line(cur: _Cursor, decls: _Decls, diagnostics: list[Diagnostic]):
    line_no = cur.line_no
    col = cur.column
    keyword = cur.name("directive")
    if keyword == "vertex":
        cur.skip_ws()
        ncol = cur.column
        names = [(cur.name("vertex name"), ncol)]
        while cur.eat(","):
            cur.skip_ws()
            ncol = cur.column
            names.append((cur.name("vertex name"), ncol))
        alphabet = Alphabet.of_size(2)
        if cur.eat(":"):
            alphabet = _parse_alphabet(cur)
        cur.expect_end()
        for name, ncol in names:
            decls.vertices.append((name, alphabet, line_no, ncol))
    elif keyword == "edge":
        tail = cur.name("vertex name")
        cur.expect("->")
        head = cur.name("vertex name")
        cur.expect_end()
        decls.edges.append((tail, head, line_no, col))
    elif keyword == "error":
        decls.kind_lines += 1
        name = cur.name("vertex name")
        cur.expect("~")
        if cur.peek("uniform"):
            cur.eat("uniform")
            cur.expect_end()
            payload = "uniform"
        else:
            cur.expect("{")
            entries = []
            while True:
                tok = cur.word("error symbol")
                cur.expect(":")
                entries.append((tok, _parse_rational(cur)))
                if cur.eat(","):
                    continue
                cur.expect("}")
                break
            cur.expect_end()
            payload = entries
        if name in decls.errors:
            diagnostics.append(Diagnostic(line_no, col, f"duplicate error declaration for {name!r}"))
        else:
            decls.errors[name] = (payload, line_no, col)
    elif keyword == "func":
        decls.kind_lines += 1
        name = cur.name("vertex name")
        cur.expect(":=")
        ast = _ExprParser(_tokenize_expr(cur)).parse()
        if name in decls.funcs or name in decls.tables:
            diagnostics.append(Diagnostic(line_no, col, f"duplicate mechanism for {name!r}"))
        else:
            decls.funcs[name] = (ast, line_no, col)
    elif keyword == "table":
        decls.kind_lines += 1
        name = cur.name("vertex name")
        cur.expect("|")
        header = []
        if not cur.peek(":"):
            header.append(cur.name("parent name"))
            while cur.eat(","):
                header.append(cur.name("parent name"))
        cur.expect(":")
        rows = []
        while True:
            rcol = cur.column
            inputs = []
            if not cur.peek("->"):
                inputs.append(cur.word("input symbol"))
                while cur.eat(","):
                    inputs.append(cur.word("input symbol"))
            cur.expect("->")
            out = cur.word("outcome symbol")
            rows.append((tuple(inputs), out, rcol))
            if cur.eat(";"):
                if cur.at_end():
                    break
                continue
            cur.expect_end()
            break
        if name in decls.funcs or name in decls.tables:
            diagnostics.append(Diagnostic(line_no, col, f"duplicate mechanism for {name!r}"))
        else:
            decls.tables[name] = (header, rows, line_no, col)
    else:
        raise _Halt(col, f"unknown directive {keyword!r}")


# -- assembly ----------------------------------------------------------------


def _assemble(decls: _Decls, diagnostics: list[Diagnostic]) -> FunctionalCausalModel:
    names = []
    alphabets: dict[str, Alphabet] = {}
    for name, alphabet, line, col in decls.vertices:
        if name in alphabets:
            diagnostics.append(Diagnostic(line, col, f"duplicate vertex {name!r}"))
            continue
        names.append(name)
        alphabets[name] = alphabet
    if not names:
        diagnostics.append(Diagnostic(1, 1, "document declares no vertices"))
        raise ModelFormatError(diagnostics)

    edges = []
    seen_edges = set()
    for tail, head, line, col in decls.edges:
        bad = False
        for endpoint in (tail, head):
            if endpoint not in alphabets:
                diagnostics.append(Diagnostic(line, col, f"edge endpoint {endpoint!r} is not a declared vertex"))
                bad = True
        if bad:
            continue
        if (tail, head) in seen_edges:
            diagnostics.append(Diagnostic(line, col, f"duplicate edge {tail} -> {head}"))
            continue
        seen_edges.add((tail, head))
        edges.append((tail, head))

    for store in (decls.errors, decls.funcs, decls.tables):
        for name, decl in store.items():
            if name not in alphabets:
                line, col = decl[-2], decl[-1]
                diagnostics.append(Diagnostic(line, col, f"unknown vertex {name!r}"))

    if diagnostics:
        raise ModelFormatError(diagnostics)

    graph = build_graph(names, edges)
    errors: dict[str, ErrorVariable] = {}
    mechanisms: dict[str, Mechanism] = {}

    for name in names:
        if name in decls.errors:
            payload, line, col = decls.errors[name]
            if payload == "uniform":
                errors[name] = ErrorVariable.uniform(alphabets[name])
                continue
            tokens = [tok for tok, _ in payload]
            if len(set(tokens)) != len(tokens):
                diagnostics.append(Diagnostic(line, col, f"error {name}: duplicate symbol in distribution"))
                continue
            total = sum((p for _, p in payload), Fraction(0))
            if total != 1:
                diagnostics.append(Diagnostic(line, col, f"error {name}: distribution sums to {total}"))
                continue
            errors[name] = ErrorVariable(Alphabet(tuple(tokens)), dict(payload))
        else:
            errors[name] = ErrorVariable.trivial()

    for name in names:
        if name not in errors:
            continue  # its error declaration was already diagnosed
        parents = graph.parents(name)
        err = errors[name]
        if name in decls.funcs:
            mech = _compile_func(name, decls.funcs[name], graph, alphabets, err, diagnostics)
        elif name in decls.tables:
            mech = _compile_table(name, decls.tables[name], graph, alphabets, err, diagnostics)
        elif not parents and name in decls.errors:
            if all(u in alphabets[name] for u in err.alphabet):
                mech = Mechanism((), {((), u): u for u in err.alphabet})
            else:
                _, line, col = decls.errors[name]
                diagnostics.append(Diagnostic(
                    line, col,
                    f"{name}: cannot default to the identity mechanism, "
                    f"error symbols are not all in the vertex alphabet",
                ))
                mech = None
        else:
            where = decls.vertices[[v[0] for v in decls.vertices].index(name)]
            diagnostics.append(Diagnostic(
                where[2], where[3],
                f"{name}: no mechanism (give func, table, or an error distribution "
                f"over its own alphabet)",
            ))
            mech = None
        if mech is not None:
            mechanisms[name] = mech

    if diagnostics:
        raise ModelFormatError(diagnostics)

    model = FunctionalCausalModel(graph, alphabets, errors, mechanisms)
    leftover = validate_model(model)
    if leftover:
        raise ModelFormatError([Diagnostic(1, 1, msg) for msg in leftover])
    return model


def _compile_func(name, decl, graph, alphabets, err, diagnostics):
    ast, line, col = decl
    parents = graph.parents(name)
    table = {}
    for combo in product(*(alphabets[p].symbols for p in parents)):
        env = dict(zip(parents, combo))
        for u in err.alphabet:
            try:
                value = _eval_expr(ast, env, u)
            except _EvalError as exc:
                diagnostics.append(Diagnostic(line, exc.column, f"func {name}: {exc.message}"))
                return None
            token = str(value)
            if token not in alphabets[name]:
                diagnostics.append(Diagnostic(
                    line, col,
                    f"func {name}: value {token!r} outside alphabet "
                    f"at {', '.join(f'{p}={s}' for p, s in env.items()) or 'no parents'}, u={u}",
                ))
                return None
            table[(combo, u)] = token
    return Mechanism(parents, table)


def _compile_table(name, decl, graph, alphabets, err, diagnostics):
    header, rows, line, col = decl
    parents = graph.parents(name)
    if sorted(header) != sorted(parents):
        diagnostics.append(Diagnostic(
            line, col,
            f"table {name}: header {header} is not a permutation of parents {list(parents)}",
        ))
        return None
    stochastic = len(err.alphabet) > 1
    arity = len(header) + (1 if stochastic else 0)
    entries = {}
    for inputs, out, rcol in rows:
        if len(inputs) != arity:
            diagnostics.append(Diagnostic(
                line, rcol,
                f"table {name}: row has {len(inputs)} inputs, expected {arity} "
                f"({len(header)} parents{' + error symbol' if stochastic else ''})",
            ))
            return None
        psyms = dict(zip(header, inputs[: len(header)]))
        u = inputs[len(header)] if stochastic else err.alphabet.symbols[0]
        bad = False
        for p, s in psyms.items():
            if s not in alphabets[p]:
                diagnostics.append(Diagnostic(line, rcol, f"table {name}: symbol {s!r} outside alphabet of {p}"))
                bad = True
        if u not in err.alphabet:
            diagnostics.append(Diagnostic(line, rcol, f"table {name}: error symbol {u!r} outside its alphabet"))
            bad = True
        if out not in alphabets[name]:
            diagnostics.append(Diagnostic(line, rcol, f"table {name}: outcome {out!r} outside alphabet of {name}"))
            bad = True
        if bad:
            return None
        key = (tuple(psyms[p] for p in parents), u)
        if key in entries:
            diagnostics.append(Diagnostic(line, rcol, f"table {name}: duplicate row for {key}"))
            return None
        entries[key] = out
    expected = {
        (combo, u)
        for combo in product(*(alphabets[p].symbols for p in parents))
        for u in err.alphabet
    }
    missing = expected - set(entries)
    if missing:
        sample = sorted(missing)[0]
        diagnostics.append(Diagnostic(
            line, col,
            f"table {name}: mechanism not total, {len(missing)} entries missing (first: {sample})",
        ))
        return None
    return Mechanism(parents, entries)


# -- JSON mirror --------------------------------------------------------------


def _rat_from_json(value, where, diagnostics) -> Fraction | None:
    try:
        if isinstance(value, str):
            if "/" in value:
                num, denom = value.split("/", 1)
                return Fraction(int(num), int(denom))
            return Fraction(int(value))
        if isinstance(value, int):
            return Fraction(value)
    except (ValueError, ZeroDivisionError):
        pass
    diagnostics.append(Diagnostic(1, 1, f"{where}: expected a rational like \"1/2\", got {value!r}"))
    return None


def _decls_from_json(tree, diagnostics) -> _Decls:
    decls = _Decls()
    if not isinstance(tree, dict):
        diagnostics.append(Diagnostic(1, 1, "top level JSON value must be an object"))
        return decls
    for entry in tree.get("vertices", []):
        if not isinstance(entry, dict) or "name" not in entry:
            diagnostics.append(Diagnostic(1, 1, f"vertices[]: expected an object with a name, got {entry!r}"))
            continue
        symbols = entry.get("alphabet", ["0", "1"])
        try:
            alphabet = Alphabet(tuple(str(s) for s in symbols))
        except CfcmError as exc:
            diagnostics.append(Diagnostic(1, 1, f"vertex {entry['name']}: {exc}"))
            continue
        decls.vertices.append((str(entry["name"]), alphabet, 1, 1))
    for pair in tree.get("edges", []):
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
            diagnostics.append(Diagnostic(1, 1, f"edges[]: expected [tail, head], got {pair!r}"))
            continue
        decls.edges.append((str(pair[0]), str(pair[1]), 1, 1))
    for name, spec in (tree.get("errors") or {}).items():
        decls.kind_lines += 1
        if not isinstance(spec, dict) or "dist" not in spec:
            diagnostics.append(Diagnostic(1, 1, f"errors.{name}: expected an object with a dist"))
            continue
        entries = []
        ok = True
        symbols = spec.get("alphabet") or list(spec["dist"].keys())
        for tok in symbols:
            raw = spec["dist"].get(str(tok))
            if raw is None:
                diagnostics.append(Diagnostic(1, 1, f"errors.{name}: missing probability for {tok!r}"))
                ok = False
                break
            p = _rat_from_json(raw, f"errors.{name}.dist.{tok}", diagnostics)
            if p is None:
                ok = False
                break
            entries.append((str(tok), p))
        if ok:
            decls.errors[name] = (entries, 1, 1)
    for name, spec in (tree.get("mechanisms") or {}).items():
        decls.kind_lines += 1
        if not isinstance(spec, dict) or "table" not in spec:
            diagnostics.append(Diagnostic(1, 1, f"mechanisms.{name}: expected an object with a table"))
            continue
        header = [str(p) for p in spec.get("parents", [])]
        rows = []
        ok = True
        for row in spec["table"]:
            if not isinstance(row, dict) or "out" not in row:
                diagnostics.append(Diagnostic(1, 1, f"mechanisms.{name}: bad table row {row!r}"))
                ok = False
                break
            inputs = [str(s) for s in row.get("in", [])]
            if "u" in row:
                inputs.append(str(row["u"]))
            rows.append((tuple(inputs), str(row["out"]), 1))
        if ok:
            decls.tables[name] = (header, rows, 1, 1)
    return decls


def parse_model(text: str) -> FunctionalCausalModel:
    """Parse DSL or JSON text into a validated model.

    Raises :class:`ModelFormatError` with a non-empty diagnostic list on
    any syntax or semantic problem.
    """
    diagnostics: list[Diagnostic] = []
    if text.lstrip()[:1] == "{":
        try:
            tree = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ModelFormatError([Diagnostic(exc.lineno, exc.colno, exc.msg)]) from None
        decls = _decls_from_json(tree, diagnostics)
    else:
        decls, diagnostics = _scan_dsl(text)
    return _assemble(decls, diagnostics)


def is_graph_only(text: str) -> bool:
    """True when the document declares structure but no mechanisms at all."""
    if text.lstrip()[:1] == "{":
        try:
            tree = json.loads(text)
        except json.JSONDecodeError:
            return False
        return isinstance(tree, dict) and not tree.get("errors") and not tree.get("mechanisms")
    for raw in text.splitlines():
        words = raw.split("#", 1)[0].split()
        if words and words[0] in ("error", "func", "table"):
            return False
    return True


def parse_graph(text: str) -> DirectedGraph:
    """Parse a graph-only document (vertices and edges, no mechanisms)."""
    diagnostics: list[Diagnostic] = []
    if text.lstrip()[:1] == "{":
        try:
            tree = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ModelFormatError([Diagnostic(exc.lineno, exc.colno, exc.msg)]) from None
        decls = _decls_from_json(tree, diagnostics)
    else:
        decls, diagnostics = _scan_dsl(text)
    if decls.kind_lines:
        diagnostics.append(Diagnostic(1, 1, "document is not graph-only: it declares mechanisms"))

    names, alphabets = [], set()
    for name, _, line, col in decls.vertices:
        if name in alphabets:
            diagnostics.append(Diagnostic(line, col, f"duplicate vertex {name!r}"))
            continue
        alphabets.add(name)
        names.append(name)
    if not names:
        diagnostics.append(Diagnostic(1, 1, "document declares no vertices"))
    edges = []
    for tail, head, line, col in decls.edges:
        for endpoint in (tail, head):
            if endpoint not in alphabets:
                diagnostics.append(Diagnostic(line, col, f"edge endpoint {endpoint!r} is not a declared vertex"))
        edges.append((tail, head))
    if diagnostics:
        raise ModelFormatError(diagnostics)
    return build_graph(names, edges)


# -- serialization ------------------------------------------------------------


def _render_alphabet(alphabet: Alphabet) -> str:
    canonical = tuple(str(i) for i in range(len(alphabet)))
    if alphabet.symbols == canonical:
        return f"0..{len(alphabet) - 1}"
    return "{" + ", ".join(alphabet.symbols) + "}"


def _render_rational(p: Fraction) -> str:
    return f"{p.numerator}/{p.denominator}"


def _is_identity_exogenous(m: FunctionalCausalModel, name: str) -> bool:
    mech = m.mechanisms[name]
    err = m.errors[name]
    return (
        not mech.parent_order
        and all(u in m.alphabets[name] for u in err.alphabet)
        and all(mech.table[((), u)] == u for u in err.alphabet)
    )


def _check_dsl_tokens(m: FunctionalCausalModel):
    for name in m.graph.labels:
        for sym in list(m.alphabets[name]) + list(m.errors[name].alphabet):
            if not _WORD.fullmatch(sym):
                raise ModelFormatError([Diagnostic(0, 0, f"symbol {sym!r} of {name} is not writable in the DSL")])
        if not _NAME.fullmatch(name):
            raise ModelFormatError([Diagnostic(0, 0, f"vertex name {name!r} is not writable in the DSL")])


def serialize_model(m: FunctionalCausalModel, format: str = "dsl") -> str:
    """Render a model so that parsing the output reproduces it pointwise.

    Mechanisms are always written as tables; expressions are not
    reconstructed.
    """
    if format == "json":
        return _serialize_json(m)
    if format != "dsl":
        raise ValueError(f"unknown format {format!r}")
    _check_dsl_tokens(m)
    lines = []
    for name in m.graph.labels:
        lines.append(f"vertex {name} : {_render_alphabet(m.alphabets[name])}")
    for tail, head in sorted(m.graph.edges, key=lambda e: (m.graph.index_of(e[0]), m.graph.index_of(e[1]))):
        lines.append(f"edge {tail} -> {head}")
    for name in m.graph.labels:
        err = m.errors[name]
        singleton_default = err.alphabet.symbols == (SINGLETON_SYMBOL,)
        if not singleton_default:
            dist = ", ".join(f"{u}: {_render_rational(err.dist[u])}" for u in err.alphabet)
            lines.append(f"error {name} ~ {{{dist}}}")
        if _is_identity_exogenous(m, name) and not singleton_default:
            continue
        mech = m.mechanisms[name]
        stochastic = len(err.alphabet) > 1
        rows = []
        for combo in product(*(m.alphabets[p].symbols for p in mech.parent_order)):
            for u in err.alphabet:
                inputs = list(combo) + ([u] if stochastic else [])
                rows.append(f"{','.join(inputs)} -> {mech.table[(combo, u)]}")
        header = ",".join(mech.parent_order)
        lines.append(f"table {name} | {header} : {'; '.join(rows)}")
    return "\n".join(lines) + "\n"


def _serialize_json(m: FunctionalCausalModel) -> str:
    doc: dict = {
        "vertices": [
            {"name": name, "alphabet": list(m.alphabets[name].symbols)}
            for name in m.graph.labels
        ],
        "edges": [
            [tail, head]
            for tail, head in sorted(
                m.graph.edges, key=lambda e: (m.graph.index_of(e[0]), m.graph.index_of(e[1]))
            )
        ],
        "errors": {},
        "mechanisms": {},
    }
    for name in m.graph.labels:
        err = m.errors[name]
        if err.alphabet.symbols == (SINGLETON_SYMBOL,):
            continue
        doc["errors"][name] = {
            "alphabet": list(err.alphabet.symbols),
            "dist": {u: _render_rational(err.dist[u]) for u in err.alphabet},
        }
    for name in m.graph.labels:
        if _is_identity_exogenous(m, name) and name in doc["errors"]:
            continue
        mech = m.mechanisms[name]
        err = m.errors[name]
        stochastic = len(err.alphabet) > 1
        rows = []
        for combo in product(*(m.alphabets[p].symbols for p in mech.parent_order)):
            for u in err.alphabet:
                row: dict = {"in": list(combo)}
                if stochastic:
                    row["u"] = u
                row["out"] = mech.table[(combo, u)]
                rows.append(row)
        doc["mechanisms"][name] = {"parents": list(mech.parent_order), "table": rows}
    return json.dumps(doc, indent=2) + "\n"


__all__ = [
    "Diagnostic",
    "ModelFormatError",
    "is_graph_only",
    "parse_graph",
    "parse_model",
    "serialize_model",
]
