"""OpenQASM 2.0 reader and writer for a restricted single-register dialect.

Supported statements: the version header, ``include "qelib1.inc"`` (ignored),
one ``qreg``, at most one ``creg``, applications of the gates handled by the
IR, ``measure`` and ``barrier``. Bare register operands broadcast for
single-qubit gates, measure and barrier. Anything else is rejected with the
offending line and column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import QasmParseError, ValidationError
from .ir import ONE_QUBIT_GATES, PARAM_COUNTS, TWO_QUBIT_GATES, Circuit, Gate

_SYMBOLS = {";", ",", "(", ")", "[", "]", "{", "}", "+", "*", "/", "^"}
_FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "ln": math.log,
    "sqrt": math.sqrt,
}


@dataclass(frozen=True)
class _Token:
    kind: str  # "id" | "int" | "real" | "string" | "sym" | "eof"
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise QasmParseError("unterminated string", start_line, start_col)
            tokens.append(_Token("string", text[i + 1 : j], start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("id", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_dot = seen_exp = False
            while j < n:
                c = text[j]
                if c.isdigit():
                    j += 1
                elif c == "." and not seen_dot and not seen_exp:
                    seen_dot = True
                    j += 1
                elif c in "eE" and not seen_exp and j + 1 < n and (
                    text[j + 1].isdigit() or text[j + 1] in "+-"
                ):
                    seen_exp = True
                    j += 2 if text[j + 1] in "+-" else 1
                else:
                    break
            lexeme = text[i:j]
            kind = "real" if (seen_dot or seen_exp) else "int"
            tokens.append(_Token(kind, lexeme, start_line, start_col))
            col += j - i
            i = j
            continue
        if text.startswith("->", i):
            tokens.append(_Token("sym", "->", start_line, start_col))
            i += 2
            col += 2
            continue
        if ch == "-":
            tokens.append(_Token("sym", "-", start_line, start_col))
            i += 1
            col += 1
            continue
        if ch in _SYMBOLS:
            tokens.append(_Token("sym", ch, start_line, start_col))
            i += 1
            col += 1
            continue
        raise QasmParseError(f"unexpected character {ch!r}", start_line, start_col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = _tokenize(text)
        self.pos = 0
        self.qreg: tuple[str, int] | None = None
        self.creg: tuple[str, int] | None = None
        self.circuit: Circuit | None = None

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self.advance()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            raise QasmParseError(f"expected {want}, found {tok.text!r}", tok.line, tok.column)
        return tok

    def fail(self, message: str, tok: _Token) -> QasmParseError:
        return QasmParseError(message, tok.line, tok.column)

    # Grammar

    def parse(self) -> Circuit:
        head = self.expect("id")
        if head.text != "OPENQASM":
            raise self.fail("file must start with an OPENQASM 2.0 header", head)
        version = self.expect("real")
        if version.text != "2.0":
            raise self.fail(f"unsupported OPENQASM version {version.text}", version)
        self.expect("sym", ";")
        while self.peek().kind != "eof":
            self.statement()
        if self.circuit is None:
            tok = self.peek()
            raise self.fail("no qreg declared", tok)
        return self.circuit

    def statement(self) -> None:
        tok = self.peek()
        if tok.kind != "id":
            raise self.fail(f"expected a statement, found {tok.text!r}", tok)
        if tok.text == "include":
            self.advance()
            name = self.expect("string")
            if name.text != "qelib1.inc":
                raise self.fail(f"unsupported include {name.text!r}", name)
            self.expect("sym", ";")
            return
        if tok.text in ("qreg", "creg"):
            self.register_decl()
            return
        if tok.text == "measure":
            self.measure_stmt()
            return
        if tok.text == "barrier":
            self.barrier_stmt()
            return
        if tok.text in ("gate", "opaque", "if", "reset"):
            raise self.fail(f"unsupported statement '{tok.text}'", tok)
        self.gate_stmt()

    def register_decl(self) -> None:
        kw = self.advance()
        name = self.expect("id")
        self.expect("sym", "[")
        size_tok = self.expect("int")
        self.expect("sym", "]")
        self.expect("sym", ";")
        size = int(size_tok.text)
        if size <= 0:
            raise self.fail("register size must be positive", size_tok)
        if kw.text == "qreg":
            if self.qreg is not None:
                raise self.fail("only one qreg is supported", kw)
            self.qreg = (name.text, size)
        else:
            if self.creg is not None:
                raise self.fail("only one creg is supported", kw)
            self.creg = (name.text, size)
        self.circuit = Circuit(
            self.qreg[1] if self.qreg else 0,
            self.creg[1] if self.creg else 0,
            gates=self.circuit.gates if self.circuit else [],
        )

    def operand(self) -> tuple[str, int | None, _Token]:
        """A register reference, optionally indexed."""
        name = self.expect("id")
        if self.peek().kind == "sym" and self.peek().text == "[":
            self.advance()
            idx = self.expect("int")
            self.expect("sym", "]")
            return name.text, int(idx.text), name
        return name.text, None, name

    def resolve_qubit(self, ref: tuple[str, int | None, _Token]) -> int:
        name, idx, tok = ref
        if self.qreg is None or name != self.qreg[0]:
            raise self.fail(f"undeclared quantum register '{name}'", tok)
        if idx is None or not 0 <= idx < self.qreg[1]:
            raise self.fail(f"index out of range for '{name}'", tok)
        return idx

    def apply(self, gate: Gate, tok: _Token) -> None:
        assert self.circuit is not None
        try:
            self.circuit.append(gate)
        except ValidationError as exc:
            raise self.fail(str(exc), tok) from exc

    def measure_stmt(self) -> None:
        kw = self.advance()
        src = self.operand()
        self.expect("sym", "->")
        dst = self.operand()
        self.expect("sym", ";")
        if self.qreg is None or src[0] != self.qreg[0]:
            raise self.fail(f"undeclared quantum register '{src[0]}'", src[2])
        if self.creg is None or dst[0] != self.creg[0]:
            raise self.fail(f"undeclared classical register '{dst[0]}'", dst[2])
        if src[1] is None and dst[1] is None:
            if self.qreg[1] != self.creg[1]:
                raise self.fail("register sizes differ in broadcast measure", kw)
            for i in range(self.qreg[1]):
                self.apply(Gate("measure", (i,), (), (i,)), kw)
            return
        if src[1] is None or dst[1] is None:
            raise self.fail("measure operands must both be indexed or both bare", kw)
        if not 0 <= dst[1] < self.creg[1]:
            raise self.fail(f"index out of range for '{dst[0]}'", dst[2])
        self.apply(Gate("measure", (self.resolve_qubit(src),), (), (dst[1],)), kw)

    def barrier_stmt(self) -> None:
        kw = self.advance()
        refs = [self.operand()]
        while self.peek().text == ",":
            self.advance()
            refs.append(self.operand())
        self.expect("sym", ";")
        qubits: list[int] = []
        for ref in refs:
            if ref[1] is None:
                if self.qreg is None or ref[0] != self.qreg[0]:
                    raise self.fail(f"undeclared quantum register '{ref[0]}'", ref[2])
                qubits.extend(range(self.qreg[1]))
            else:
                qubits.append(self.resolve_qubit(ref))
        self.apply(Gate("barrier", tuple(qubits)), kw)

    def gate_stmt(self) -> None:
        head = self.advance()
        name = head.text
        if name not in ONE_QUBIT_GATES and name not in TWO_QUBIT_GATES:
            raise self.fail(f"unsupported gate '{name}'", head)
        params: tuple[float, ...] = ()
        if self.peek().text == "(":
            self.advance()
            values = []
            if self.peek().text != ")":
                values.append(self.expression())
                while self.peek().text == ",":
                    self.advance()
                    values.append(self.expression())
            self.expect("sym", ")")
            params = tuple(values)
        if len(params) != PARAM_COUNTS.get(name, 0):
            raise self.fail(
                f"gate '{name}' expects {PARAM_COUNTS.get(name, 0)} parameter(s)", head
            )
        refs = [self.operand()]
        while self.peek().text == ",":
            self.advance()
            refs.append(self.operand())
        self.expect("sym", ";")
        if name in TWO_QUBIT_GATES:
            if len(refs) != 2:
                raise self.fail(f"gate '{name}' expects 2 operands", head)
            if refs[0][1] is None or refs[1][1] is None:
                raise self.fail("broadcast is not supported for two-qubit gates", head)
            a, b = self.resolve_qubit(refs[0]), self.resolve_qubit(refs[1])
            self.apply(Gate(name, (a, b), params), head)
            return
        if len(refs) != 1:
            raise self.fail(f"gate '{name}' expects 1 operand", head)
        if refs[0][1] is None:
            if self.qreg is None or refs[0][0] != self.qreg[0]:
                raise self.fail(f"undeclared quantum register '{refs[0][0]}'", refs[0][2])
            for i in range(self.qreg[1]):
                self.apply(Gate(name, (i,), params), head)
        else:
            self.apply(Gate(name, (self.resolve_qubit(refs[0]),), params), head)

    # Parameter expressions: numbers, pi, + - * / ^, unary minus, functions.

    def expression(self) -> float:
        value = self.term()
        while self.peek().text in ("+", "-"):
            op = self.advance().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> float:
        value = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.advance().text
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                value = value / rhs
        return value

    def unary(self) -> float:
        if self.peek().text == "-":
            self.advance()
            return -self.unary()
        return self.power()

    def power(self) -> float:
        value = self.atom()
        if self.peek().text == "^":
            self.advance()
            return value ** self.unary()
        return value

    def atom(self) -> float:
        tok = self.advance()
        if tok.kind in ("int", "real"):
            return float(tok.text)
        if tok.kind == "id" and tok.text == "pi":
            return math.pi
        if tok.kind == "id" and tok.text in _FUNCTIONS:
            self.expect("sym", "(")
            value = self.expression()
            self.expect("sym", ")")
            return _FUNCTIONS[tok.text](value)
        if tok.text == "(":
            value = self.expression()
            self.expect("sym", ")")
            return value
        raise self.fail(f"expected a parameter expression, found {tok.text!r}", tok)


def parse_qasm(text: str, name: str = "") -> Circuit:
    """Parse OpenQASM 2.0 source into a circuit."""
    circuit = _Parser(text).parse()
    circuit.name = name
    return circuit


def _fmt_param(value: float) -> str:
    return repr(float(value))


def emit_qasm(circuit: Circuit, comments: list[str] | None = None) -> str:
    """Serialize a circuit; ``comments[i]`` is placed before gate i when given."""
    header = f"// circuit: {circuit.name or '(unnamed)'}, qubits: {circuit.num_qubits}"
    lines = [header, 'OPENQASM 2.0;', 'include "qelib1.inc";', f"qreg q[{circuit.num_qubits}];"]
    if circuit.num_clbits:
        lines.append(f"creg c[{circuit.num_clbits}];")
    for i, gate in enumerate(circuit.gates):
        if comments is not None and comments[i]:
            lines.append(comments[i])
        lines.append(_gate_line(gate))
    return "\n".join(lines) + "\n"


def _gate_line(gate: Gate) -> str:
    if gate.name == "measure":
        return f"measure q[{gate.qubits[0]}] -> c[{gate.cbits[0]}];"
    if gate.name == "barrier":
        ops = ",".join(f"q[{q}]" for q in gate.qubits)
        return f"barrier {ops};"
    ops = ",".join(f"q[{q}]" for q in gate.qubits)
    if gate.params:
        args = ",".join(_fmt_param(p) for p in gate.params)
        return f"{gate.name}({args}) {ops};"
    return f"{gate.name} {ops};"
