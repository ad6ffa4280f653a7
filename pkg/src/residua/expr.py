"""Guard and action mini-language.

Guards are boolean expressions over the monitoring variables; actions are
sequences of assignments executed left to right.  The language is closed
(no host callbacks) so the analyses can inspect guards syntactically.

Integers are 64-bit signed and every arithmetic result wraps in two's
complement.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Mapping, Union

from .errors import SpecError

INT = "int"
BOOL = "bool"

INT_MIN = -(1 << 63)
INT_MAX = (1 << 63) - 1


def wrap64(value: int) -> int:
    return ((value - INT_MIN) & 0xFFFFFFFFFFFFFFFF) + INT_MIN


# -- AST ---------------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "not" | "-"
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[IntLit, BoolLit, Var, Unary, Binary]


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr


Action = tuple  # tuple[Assign, ...]; the empty tuple is skip

TRUE = BoolLit(True)
FALSE = BoolLit(False)
SKIP: Action = ()

ARITH = ("+", "-", "*")
COMPARE = ("<", "<=", "==", "!=", ">=", ">")
LOGIC = ("and", "or")

# precedence, low to high
_PREC = {"or": 1, "and": 2, "not": 3, "cmp": 4, "+": 5, "-": 5, "*": 6, "neg": 7, "atom": 8}


def _prec(e: Expr) -> int:
    if isinstance(e, Binary):
        return _PREC["cmp"] if e.op in COMPARE else _PREC[e.op]
    if isinstance(e, Unary):
        return _PREC["not"] if e.op == "not" else _PREC["neg"]
    if isinstance(e, IntLit) and e.value < 0:
        return _PREC["neg"]
    return _PREC["atom"]


# -- lexer -------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>:=|\+\+|--|<=|>=|==|!=|≤|≥|≠|[-+*<>=();])
    """,
    re.VERBOSE,
)

_OP_ALIASES = {"≤": "<=", "≥": ">=", "≠": "!=", "=": "=="}
KEYWORDS = {"and", "or", "not", "true", "false"}


@dataclass(frozen=True)
class _Tok:
    kind: str  # "int" | "name" | "op" | "eof"
    text: str
    col: int  # 1-based


def _lex(text: str, line: int | None, col0: int) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SpecError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), col0 + pos))
        pos = m.end()
    toks.append(_Tok("eof", "", col0 + len(text)))
    return toks


# -- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, line: int | None, col0: int):
        self.toks = _lex(text, line, col0)
        self.i = 0
        self.line = line

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.tok
        raise SpecError(msg, self.line, tok.col)

    def accept(self, text: str) -> bool:
        t = self.tok
        if t.kind in ("op", "name") and _OP_ALIASES.get(t.text, t.text) == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")

    def done(self):
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")

    def expr(self) -> Expr:
        left = self.and_expr()
        while self.accept("or"):
            left = Binary("or", left, self.and_expr())
        return left

    def and_expr(self) -> Expr:
        left = self.not_expr()
        while self.accept("and"):
            left = Binary("and", left, self.not_expr())
        return left

    def not_expr(self) -> Expr:
        if self.accept("not"):
            return Unary("not", self.not_expr())
        return self.cmp_expr()

    def cmp_expr(self) -> Expr:
        left = self.add_expr()
        t = self.tok
        if t.kind == "op" and _OP_ALIASES.get(t.text, t.text) in COMPARE:
            self.i += 1
            op = _OP_ALIASES.get(t.text, t.text)
            right = self.add_expr()
            nxt = self.tok
            if nxt.kind == "op" and _OP_ALIASES.get(nxt.text, nxt.text) in COMPARE:
                self.error("comparisons do not chain; use parentheses", nxt)
            return Binary(op, left, right)
        return left

    def add_expr(self) -> Expr:
        left = self.mul_expr()
        while True:
            if self.accept("+"):
                left = Binary("+", left, self.mul_expr())
            elif self.accept("-"):
                left = Binary("-", left, self.mul_expr())
            else:
                return left

    def mul_expr(self) -> Expr:
        left = self.unary()
        while self.accept("*"):
            left = Binary("*", left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.accept("-"):
            t = self.tok
            if t.kind == "int":
                self.i += 1
                return self.int_literal(-int(t.text), t)
            return Unary("-", self.unary())
        return self.atom()

    def int_literal(self, value: int, tok: _Tok) -> IntLit:
        if not INT_MIN <= value <= INT_MAX:
            self.error("integer literal out of 64-bit range", tok)
        return IntLit(value)

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return self.int_literal(int(t.text), t)
        if t.kind == "name":
            self.i += 1
            if t.text == "true":
                return TRUE
            if t.text == "false":
                return FALSE
            if t.text in KEYWORDS:
                self.error(f"unexpected keyword {t.text!r}", t)
            return Var(t.text)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.error(f"expected an expression, found {t.text or 'end of input'!r}")

    def assignments(self) -> Action:
        out = [self.assignment()]
        while self.accept(";"):
            if self.tok.kind == "eof":
                break
            out.append(self.assignment())
        return tuple(out)

    def assignment(self) -> Assign:
        t = self.tok
        if t.kind != "name" or t.text in KEYWORDS:
            self.error("expected a variable name")
        self.i += 1
        if self.accept("++"):
            return Assign(t.text, Binary("+", Var(t.text), IntLit(1)))
        if self.accept("--"):
            return Assign(t.text, Binary("-", Var(t.text), IntLit(1)))
        self.expect(":=")
        return Assign(t.text, self.expr())


def parse_expr(text: str, line: int | None = None, col: int = 1) -> Expr:
    p = _Parser(text, line, col)
    e = p.expr()
    p.done()
    return e


def parse_action(text: str, line: int | None = None, col: int = 1) -> Action:
    p = _Parser(text, line, col)
    if p.tok.kind == "eof":
        return SKIP
    if p.accept("skip"):
        p.done()
        return SKIP
    a = p.assignments()
    p.done()
    return a


# -- printer -----------------------------------------------------------------


def format_expr(e: Expr) -> str:
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        if e.op == "not":
            return "not " + _wrap(e.operand, _PREC["not"])
        inner = e.operand
        if isinstance(inner, IntLit) or (isinstance(inner, Unary) and inner.op == "-"):
            return f"-({format_expr(inner)})"
        return "-" + _wrap(inner, _PREC["neg"])
    p = _prec(e)
    if e.op in COMPARE:
        return f"{_wrap(e.left, p + 1)} {e.op} {_wrap(e.right, p + 1)}"
    # left-associative: the right operand of an equal-precedence op needs parens
    return f"{_wrap(e.left, p)} {e.op} {_wrap(e.right, p + 1)}"


def _wrap(e: Expr, min_prec: int) -> str:
    s = format_expr(e)
    return s if _prec(e) >= min_prec else f"({s})"


def format_action(a: Action) -> str:
    return "; ".join(f"{x.var} := {format_expr(x.expr)}" for x in a)


# -- static checks -------------------------------------------------------------


def variables(e: Expr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Unary):
        return variables(e.operand)
    if isinstance(e, Binary):
        return variables(e.left) | variables(e.right)
    return frozenset()


def check_expr(e: Expr, env: Mapping[str, str], line=None) -> str:
    """Return the type of ``e`` under ``env`` (name -> kind) or raise SpecError."""
    if isinstance(e, BoolLit):
        return BOOL
    if isinstance(e, IntLit):
        return INT
    if isinstance(e, Var):
        if e.name not in env:
            raise SpecError(f"undeclared variable {e.name!r}", line)
        return env[e.name]
    if isinstance(e, Unary):
        t = check_expr(e.operand, env, line)
        want = BOOL if e.op == "not" else INT
        if t != want:
            raise SpecError(f"operator {e.op!r} expects {want}, got {t}", line)
        return want
    lt = check_expr(e.left, env, line)
    rt = check_expr(e.right, env, line)
    if e.op in LOGIC:
        if lt != BOOL or rt != BOOL:
            raise SpecError(f"operator {e.op!r} expects bool operands", line)
        return BOOL
    if e.op in ARITH:
        if lt != INT or rt != INT:
            raise SpecError(f"operator {e.op!r} expects int operands", line)
        return INT
    if e.op in ("==", "!="):
        if lt != rt:
            raise SpecError(f"cannot compare {lt} with {rt}", line)
        return BOOL
    if lt != INT or rt != INT:
        raise SpecError(f"operator {e.op!r} expects int operands", line)
    return BOOL


def check_action(a: Action, env: Mapping[str, str], line=None) -> None:
    for asg in a:
        if asg.var not in env:
            raise SpecError(f"assignment to undeclared variable {asg.var!r}", line)
        t = check_expr(asg.expr, env, line)
        if t != env[asg.var]:
            raise SpecError(f"cannot assign {t} to {env[asg.var]} variable {asg.var!r}", line)


# -- evaluation ----------------------------------------------------------------

_BINOPS: dict[str, Callable] = {
    "+": lambda a, b: wrap64(a + b),
    "-": lambda a, b: wrap64(a - b),
    "*": lambda a, b: wrap64(a * b),
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
    "and": lambda a, b: a and b,
    "or": lambda a, b: a or b,
}


def evaluate(e: Expr, env: Mapping):
    if isinstance(e, (IntLit, BoolLit)):
        return e.value
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Unary):
        v = evaluate(e.operand, env)
        return (not v) if e.op == "not" else wrap64(-v)
    return _BINOPS[e.op](evaluate(e.left, env), evaluate(e.right, env))


def compile_expr(e: Expr) -> Callable[[Mapping], object]:
    """Closure equivalent of ``lambda env: evaluate(e, env)``, built once."""
    if isinstance(e, (IntLit, BoolLit)):
        v = e.value
        return lambda env: v
    if isinstance(e, Var):
        name = e.name
        return lambda env: env[name]
    if isinstance(e, Unary):
        f = compile_expr(e.operand)
        if e.op == "not":
            return lambda env: not f(env)
        return lambda env: wrap64(-f(env))
    op = _BINOPS[e.op]
    lf, rf = compile_expr(e.left), compile_expr(e.right)
    return lambda env: op(lf(env), rf(env))


def eval_guard(g: Expr, theta: Mapping) -> bool:
    return bool(evaluate(g, theta))


def apply_action(a: Action, theta: Mapping) -> dict:
    out = dict(theta)
    for asg in a:
        out[asg.var] = evaluate(asg.expr, out)
    return out


def literal_value(e: Expr):
    """Value of ``e`` if it references no variables (constant folding), else None."""
    if variables(e):
        return None
    return evaluate(e, {})


def is_literally(e: Expr, value: bool) -> bool:
    v = literal_value(e)
    return v is not None and v is value
