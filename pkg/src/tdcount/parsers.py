"""Parsers for the textual rule grammar, the SModels numeric format,
and DIMACS CNF with optional literal weight lines."""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import (
    FormatError,
    HeaderMismatchError,
    ParseError,
    UnsupportedRuleError,
    VariableTokenError,
)
from .model import Atom, CnfFormula, GroundProgram, MinimizeStatement, Rule

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>%[^\n]*)
      | (?P<arrow>:-)
      | (?P<int>\d+)
      | (?P<ident>[a-z][A-Za-z0-9]*)
      | (?P<var>[A-Z_][A-Za-z0-9]*)
      | (?P<directive>\#[a-z]+)
      | (?P<punct>[.,|{};:])
    """,
    re.VERBOSE,
)


class _Token:
    __slots__ = ("kind", "text", "line", "column")

    def __init__(self, kind, text, line, column):
        self.kind = kind
        self.text = text
        self.line = line
        self.column = column


def _tokenize(text):
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        value = m.group()
        column = pos - line_start + 1
        if kind == "var":
            raise VariableTokenError(
                f"variable token {value!r}; input must be ground", line, column
            )
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, value, line, column))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rfind("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _ProgramParser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0
        self.atom_ids: dict[str, int] = {}
        self.atoms: list[Atom] = []
        self.rules: list[Rule] = []
        self.minimize: MinimizeStatement | None = None

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind, text=None):
        tok = self.take()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            raise ParseError(f"expected {want!r}, got {tok.text!r}", tok.line, tok.column)
        return tok

    def atom_id(self, name):
        if name not in self.atom_ids:
            self.atom_ids[name] = len(self.atoms)
            self.atoms.append(Atom(len(self.atoms), name))
        return self.atom_ids[name]

    def parse(self):
        while self.peek().kind != "eof":
            if self.peek().kind == "directive":
                self.parse_minimize()
            else:
                self.parse_rule()
        return GroundProgram(self.atoms, self.rules, self.minimize)

    def parse_atom(self):
        tok = self.expect("ident")
        if tok.text == "not":
            raise ParseError("'not' is not a valid atom name", tok.line, tok.column)
        return self.atom_id(tok.text)

    def parse_rule(self):
        head = set()
        tok = self.peek()
        if tok.kind == "ident" and tok.text != "not":
            head.add(self.parse_atom())
            while self.peek().text == "|":
                self.take()
                head.add(self.parse_atom())
        body_pos, body_neg = set(), set()
        if self.peek().kind == "arrow":
            self.take()
            # an immediately following '.' is the always-violated constraint
            while self.peek().text != ".":
                if body_pos or body_neg:
                    self.expect("punct", ",")
                tok = self.peek()
                if tok.kind == "ident" and tok.text == "not":
                    self.take()
                    body_neg.add(self.parse_atom())
                else:
                    body_pos.add(self.parse_atom())
        self.expect("punct", ".")
        self.rules.append(
            Rule(frozenset(head), frozenset(body_pos), frozenset(body_neg))
        )

    def parse_minimize(self):
        tok = self.take()
        if tok.text != "#minimize":
            raise ParseError(f"unknown directive {tok.text!r}", tok.line, tok.column)
        self.expect("punct", "{")
        if self.minimize is None:
            self.minimize = MinimizeStatement()
        while self.peek().text != "}":
            if self.minimize.weights or self.peek().text == ";":
                if self.peek().text == ";":
                    self.take()
            wtok = self.expect("int")
            self.expect("punct", ":")
            sign = True
            if self.peek().kind == "ident" and self.peek().text == "not":
                self.take()
                sign = False
            atom = self.parse_atom()
            self.minimize.add(atom, sign, int(wtok.text))
        self.expect("punct", "}")
        self.expect("punct", ".")


def parse_ground_program(text: str) -> GroundProgram:
    """Parse the textual grammar; atom ids follow first occurrence."""
    return _ProgramParser(text).parse()


# --- SModels numeric format (subset: basic 1, minimize 6, disjunctive 8) ---

_BASIC_RULE = 1
_CONSTRAINT_RULE = 2
_CHOICE_RULE = 3
_WEIGHT_RULE = 5
_MINIMIZE_RULE = 6
_DISJUNCTIVE_RULE = 8


class _SmodelsReader:
    def __init__(self, data):
        if isinstance(data, bytes):
            data = data.decode("ascii")
        self.lines = data.splitlines()
        self.i = 0
        self.atom_map: dict[int, int] = {}
        self.atoms: list[Atom] = []

    def next_line(self, context):
        while self.i < len(self.lines):
            line = self.lines[self.i].strip()
            self.i += 1
            if line:
                return line
        raise FormatError(f"unexpected end of input in {context}", line=self.i)

    def at_eof(self):
        return all(not line.strip() for line in self.lines[self.i :])

    def intern(self, smodels_atom, line_no):
        if smodels_atom < 1:
            raise FormatError(f"atom number {smodels_atom} out of range", line=line_no)
        if smodels_atom not in self.atom_map:
            self.atom_map[smodels_atom] = len(self.atoms)
            self.atoms.append(Atom(len(self.atoms), None))
        return self.atom_map[smodels_atom]


def _ints(line, line_no, context):
    try:
        return [int(t) for t in line.split()]
    except ValueError:
        raise FormatError(f"non-numeric token in {context}", line=line_no) from None


def parse_smodels(data) -> GroundProgram:
    """Parse grounder output: rules, symbol table, compute section.

    Rule types 2 (constraint), 3 (choice) and 5 (weight) are reported as
    unsupported; B+/B- compute entries become integrity constraints."""
    reader = _SmodelsReader(data)
    rules: list[Rule] = []
    minimize: MinimizeStatement | None = None

    while True:
        line_no = reader.i + 1
        line = reader.next_line("rules section")
        fields = _ints(line, line_no, "rules section")
        if fields == [0]:
            break
        rtype = fields[0]
        rest = fields[1:]
        if rtype in (_CONSTRAINT_RULE, _CHOICE_RULE, _WEIGHT_RULE):
            raise UnsupportedRuleError(rtype, line=line_no)
        if rtype == _BASIC_RULE:
            if len(rest) < 3:
                raise FormatError("truncated basic rule", line=line_no)
            head, nbody, nneg = rest[0], rest[1], rest[2]
            lits = rest[3:]
            if nneg < 0 or nbody < nneg or len(lits) != nbody:
                raise FormatError("bad literal counts in basic rule", line=line_no)
            head_ids = [reader.intern(head, line_no)]
            neg = [reader.intern(a, line_no) for a in lits[:nneg]]
            pos = [reader.intern(a, line_no) for a in lits[nneg:]]
        elif rtype == _DISJUNCTIVE_RULE:
            if not rest:
                raise FormatError("truncated disjunctive rule", line=line_no)
            nheads = rest[0]
            if nheads < 0 or len(rest) < 1 + nheads + 2:
                raise FormatError("bad head count in disjunctive rule", line=line_no)
            head_ids = [reader.intern(a, line_no) for a in rest[1 : 1 + nheads]]
            nbody, nneg = rest[1 + nheads], rest[2 + nheads]
            lits = rest[3 + nheads :]
            if nneg < 0 or nbody < nneg or len(lits) != nbody:
                raise FormatError("bad literal counts in disjunctive rule", line=line_no)
            neg = [reader.intern(a, line_no) for a in lits[:nneg]]
            pos = [reader.intern(a, line_no) for a in lits[nneg:]]
        elif rtype == _MINIMIZE_RULE:
            if len(rest) < 3 or rest[0] != 0:
                raise FormatError("truncated minimize rule", line=line_no)
            nbody, nneg = rest[1], rest[2]
            tail = rest[3:]
            if nneg < 0 or nbody < nneg or len(tail) != 2 * nbody:
                raise FormatError("bad literal counts in minimize rule", line=line_no)
            lits, wlist = tail[:nbody], tail[nbody:]
            if minimize is None:
                minimize = MinimizeStatement()
            for k, a in enumerate(lits):
                atom = reader.intern(a, line_no)
                minimize.add(atom, k >= nneg, wlist[k])
            continue
        else:
            raise FormatError(f"unknown rule type {rtype}", line=line_no)
        rules.append(Rule(frozenset(head_ids), frozenset(pos), frozenset(neg)))

    # symbol table
    while True:
        line_no = reader.i + 1
        line = reader.next_line("symbol table")
        if line == "0":
            break
        parts = line.split(maxsplit=1)
        if len(parts) != 2 or not parts[0].isdigit():
            raise FormatError("bad symbol table entry", line=line_no)
        atom = reader.intern(int(parts[0]), line_no)
        reader.atoms[atom] = Atom(atom, parts[1])

    # compute sections may be absent entirely but must not be cut short
    if not reader.at_eof():
        for marker in ("B+", "B-"):
            line_no = reader.i + 1
            line = reader.next_line("compute section")
            if line != marker:
                raise FormatError(f"expected {marker!r}", line=line_no)
            while True:
                line_no = reader.i + 1
                line = reader.next_line(f"compute section {marker}")
                if line == "0":
                    break
                fields = _ints(line, line_no, "compute section")
                for a in fields:
                    atom = reader.intern(a, line_no)
                    if marker == "B+":
                        rules.append(
                            Rule(frozenset(), frozenset(), frozenset({atom}))
                        )
                    else:
                        rules.append(
                            Rule(frozenset(), frozenset({atom}), frozenset())
                        )
        # trailing model count is accepted and ignored
        if not reader.at_eof():
            line_no = reader.i + 1
            line = reader.next_line("model count")
            _ints(line, line_no, "model count")
            if not reader.at_eof():
                raise FormatError("trailing content after model count", line=reader.i + 1)

    return GroundProgram(reader.atoms, rules, minimize)


# --- DIMACS CNF with optional weight lines ---


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF.  Weight lines `w <lit> <num>/<den> 0` must
    precede the clauses; clause and variable counts must match the header."""
    num_vars = None
    num_clauses = None
    weights: dict[int, Fraction] = {}
    saw_weights = False
    clause_tokens: list[tuple[int, int]] = []  # (literal-or-0, line number)

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise ParseError("duplicate header", line_no)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("malformed header; expected 'p cnf <vars> <clauses>'", line_no)
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError("non-numeric header counts", line_no) from None
            if num_vars < 0 or num_clauses < 0:
                raise ParseError("negative header counts", line_no)
            continue
        if line.startswith("w"):
            if num_vars is None:
                raise ParseError("weight line before header", line_no)
            if clause_tokens:
                raise ParseError("weight line after clauses", line_no)
            parts = line.split()
            if len(parts) != 4 or parts[3] != "0":
                raise ParseError("malformed weight line; expected 'w <lit> <weight> 0'", line_no)
            try:
                lit = int(parts[1])
                value = Fraction(parts[2])
            except (ValueError, ZeroDivisionError):
                raise ParseError("malformed weight value", line_no) from None
            if lit == 0 or abs(lit) > num_vars:
                raise ParseError(f"weight literal {lit} out of range", line_no)
            if value < 0:
                raise ParseError("negative weight", line_no)
            if lit in weights:
                raise ParseError(f"duplicate weight for literal {lit}", line_no)
            weights[lit] = value
            saw_weights = True
            continue
        if num_vars is None:
            raise ParseError("clause before header", line_no)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"unexpected token {tok!r}", line_no) from None
            clause_tokens.append((lit, line_no))

    if num_vars is None:
        raise ParseError("missing 'p cnf' header")

    clauses: list[frozenset[int]] = []
    current: set[int] = set()
    last_line = None
    for lit, line_no in clause_tokens:
        last_line = line_no
        if lit == 0:
            clauses.append(frozenset(current))
            current = set()
            continue
        if abs(lit) > num_vars:
            raise ParseError(f"literal {lit} exceeds declared variables", line_no)
        if -lit in current:
            raise ParseError(f"tautological clause mixes {lit} and {-lit}", line_no)
        current.add(lit)
    if current:
        raise ParseError("unterminated clause at end of input", last_line)
    if len(clauses) != num_clauses:
        raise HeaderMismatchError(
            f"header declares {num_clauses} clauses, found {len(clauses)}"
        )
    return CnfFormula(num_vars, clauses, weights if saw_weights else None)
