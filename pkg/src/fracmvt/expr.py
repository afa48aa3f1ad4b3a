"""Arithmetic expressions in ``x`` and ``y``.

Grammar, loosest to tightest binding::

    expr   := expr ('+' | '-') expr
            | expr ('*' | '/') expr
            | '-' expr
            | expr '^' expr            (right associative)
            | NUMBER | 'x' | 'y' | 'pi' | NAME '(' expr [',' expr] ')' | '(' expr ')'

Unary minus binds looser than ``^`` so ``-x^2`` is ``-(x^2)``, and the
exponent of ``^`` may itself start with a minus (``2^-x``).

Functions: sin, cos, exp, ln, abs, sqrt, gamma (one argument) and pow (two).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    DifferentiationError,
    DomainError,
    EvalError,
    ExprSyntaxError,
    UnboundVariableError,
)
from .special import gammafn

VARIABLES = ("x", "y")
CONSTANTS = {"pi": math.pi}
FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "exp": 1,
    "ln": 1,
    "abs": 1,
    "sqrt": 1,
    "gamma": 1,
    "pow": 2,
}


# {{{ AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Ast"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Ast"
    right: "Ast"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Ast = Union[Num, Var, Const, Neg, BinOp, Call]


def free_vars(node: Ast) -> frozenset:
    if isinstance(node, Var):
        return frozenset((node.name,))
    if isinstance(node, Neg):
        return free_vars(node.operand)
    if isinstance(node, BinOp):
        return free_vars(node.left) | free_vars(node.right)
    if isinstance(node, Call):
        out = frozenset()
        for arg in node.args:
            out |= free_vars(arg)
        return out
    return frozenset()


# }}}


# {{{ tokenizer


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "op", "eof"
    text: str
    offset: int  # byte offset into the UTF-8 source


_OPERATOR_CHARS = "+-*/^(),"


def tokenize(source: str) -> list[Token]:
    tokens = []
    i = 0
    n = len(source)

    def byte_offset(idx: int) -> int:
        return len(source[:idx].encode("utf-8"))

    while i < n:
        c = source[i]
        if c.isspace():
            i += 1
            continue
        start = i
        if c.isascii() and (c.isdigit() or (c == "." and i + 1 < n and source[i + 1].isdigit())):
            while i < n and source[i].isascii() and source[i].isdigit():
                i += 1
            if i < n and source[i] == ".":
                i += 1
                while i < n and source[i].isascii() and source[i].isdigit():
                    i += 1
            if i < n and source[i] in "eE":
                j = i + 1
                if j < n and source[j] in "+-":
                    j += 1
                if j < n and source[j].isascii() and source[j].isdigit():
                    while j < n and source[j].isascii() and source[j].isdigit():
                        j += 1
                    i = j
            text = source[start:i]
            if not math.isfinite(float(text)):
                raise ExprSyntaxError(byte_offset(start), "a finite number", text)
            tokens.append(Token("num", text, byte_offset(start)))
        elif c.isascii() and (c.isalpha() or c == "_"):
            while i < n and source[i].isascii() and (source[i].isalnum() or source[i] == "_"):
                i += 1
            tokens.append(Token("name", source[start:i], byte_offset(start)))
        elif c in _OPERATOR_CHARS:
            i += 1
            tokens.append(Token("op", c, byte_offset(start)))
        else:
            raise ExprSyntaxError(byte_offset(start), "an operator, number or name", c)
    tokens.append(Token("eof", "", byte_offset(n)))
    return tokens


# }}}


# {{{ parser

_INFIX_BP = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
_NEG_BP = 30


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind != "op" or tok.text != text:
            raise ExprSyntaxError(tok.offset, repr(text), tok.text or "end of input")
        return self.advance()

    def parse(self) -> Ast:
        node = self.expression(0)
        tok = self.peek()
        if tok.kind != "eof":
            raise ExprSyntaxError(tok.offset, "operator or end of input", tok.text)
        return node

    def expression(self, min_bp: int) -> Ast:
        left = self.prefix()
        while True:
            tok = self.peek()
            if tok.kind != "op" or tok.text not in _INFIX_BP:
                break
            bp = _INFIX_BP[tok.text]
            if bp <= min_bp:
                break
            self.advance()
            # right associativity for ^: parse the right side one notch looser
            right = self.expression(bp - 1 if tok.text == "^" else bp)
            left = BinOp(tok.text, left, right)
        return left

    def prefix(self) -> Ast:
        tok = self.advance()
        if tok.kind == "num":
            return Num(float(tok.text))
        if tok.kind == "op" and tok.text == "-":
            return Neg(self.expression(_NEG_BP))
        if tok.kind == "op" and tok.text == "(":
            node = self.expression(0)
            self.expect(")")
            return node
        if tok.kind == "name":
            if tok.text in VARIABLES:
                return Var(tok.text)
            if tok.text in CONSTANTS:
                return Const(tok.text)
            if tok.text in FUNCTIONS:
                return self.call(tok)
            raise ExprSyntaxError(tok.offset, "variable x/y, pi or a function name", tok.text)
        raise ExprSyntaxError(tok.offset, "expression", tok.text or "end of input")

    def call(self, name_tok: Token) -> Call:
        arity = FUNCTIONS[name_tok.text]
        self.expect("(")
        args = [self.expression(0)]
        for _ in range(arity - 1):
            self.expect(",")
            args.append(self.expression(0))
        self.expect(")")
        return Call(name_tok.text, tuple(args))


def parse(source: str) -> Ast:
    """Parse ``source`` into an AST; raises ExprSyntaxError with a byte offset."""
    return _Parser(source).parse()


# }}}


# {{{ pretty printing

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e16:
        text = str(int(value))
    else:
        text = repr(value)
    if value < 0 or text.startswith("-"):
        return f"({text})"
    return text


def _pretty(node: Ast) -> tuple[str, int]:
    if isinstance(node, Num):
        return _format_number(node.value), _PREC_ATOM
    if isinstance(node, (Var, Const)):
        return node.name, _PREC_ATOM
    if isinstance(node, Call):
        return f"{node.name}({', '.join(pretty(a) for a in node.args)})", _PREC_ATOM
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _PREC_NEG), _PREC_NEG
    if isinstance(node, BinOp):
        if node.op in "+-":
            text = f"{_wrap(node.left, _PREC_ADD)} {node.op} {_wrap(node.right, _PREC_MUL)}"
            return text, _PREC_ADD
        if node.op in "*/":
            return f"{_wrap(node.left, _PREC_MUL)}{node.op}{_wrap(node.right, _PREC_NEG)}", _PREC_MUL
        return f"{_wrap(node.left, _PREC_ATOM)}^{_wrap(node.right, _PREC_NEG)}", _PREC_POW
    raise TypeError(f"not an expression node: {node!r}")


def _wrap(node: Ast, min_prec: int) -> str:
    text, prec = _pretty(node)
    return text if prec >= min_prec else f"({text})"


def pretty(node: Ast) -> str:
    """Render ``node`` so that ``parse(pretty(node)) == node``."""
    return _pretty(node)[0]


# }}}


# {{{ evaluation


def evaluate(node: Ast, x=None, y=None):
    """Evaluate ``node`` at scalar or array arguments (numpy broadcasting).

    Returns a float for scalar input. Domain violations (ln or sqrt of a
    negative number, division by zero, 0^negative, negative base with a
    non-integer exponent) raise DomainError.
    """
    env = {}
    if x is not None:
        env["x"] = np.asarray(x, dtype=float)
    if y is not None:
        env["y"] = np.asarray(y, dtype=float)
    with np.errstate(all="ignore"):
        result = _eval(node, env)
    if not np.all(np.isfinite(result)):
        raise EvalError(f"non-finite value while evaluating {pretty(node)!r}")
    if np.ndim(result) == 0:
        return float(result)
    return result


def _eval(node: Ast, env: dict):
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise UnboundVariableError(f"variable {node.name!r} is not bound") from None
    if isinstance(node, Const):
        return np.float64(CONSTANTS[node.name])
    if isinstance(node, Neg):
        return -_eval(node.operand, env)
    if isinstance(node, BinOp):
        a = _eval(node.left, env)
        b = _eval(node.right, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if np.any(b == 0):
                raise DomainError("division by zero")
            return a / b
        return _power(a, b)
    if isinstance(node, Call):
        args = [_eval(arg, env) for arg in node.args]
        return _call(node.name, args)
    raise TypeError(f"not an expression node: {node!r}")


def _power(base, expo):
    base, expo = np.broadcast_arrays(base, expo)
    if np.any((base < 0) & (expo != np.floor(expo))):
        raise DomainError("negative base raised to a non-integer power")
    if np.any((base == 0) & (expo < 0)):
        raise DomainError("zero raised to a negative power")
    out = np.power(base, expo)
    return out if out.ndim else out[()]


def _call(name: str, args: list):
    u = args[0]
    if name == "sin":
        return np.sin(u)
    if name == "cos":
        return np.cos(u)
    if name == "exp":
        return np.exp(u)
    if name == "ln":
        if np.any(u <= 0):
            raise DomainError("ln of a non-positive argument")
        return np.log(u)
    if name == "sqrt":
        if np.any(u < 0):
            raise DomainError("sqrt of a negative argument")
        return np.sqrt(u)
    if name == "abs":
        return np.abs(u)
    if name == "pow":
        return _power(u, args[1])
    if name == "gamma":
        if np.ndim(u) == 0:
            return np.float64(gammafn(float(u)))
        return np.vectorize(gammafn, otypes=[float])(u)
    raise EvalError(f"unknown function {name!r}")


# }}}


# {{{ differentiation and simplification

ZERO = Num(0.0)
ONE = Num(1.0)


def differentiate(node: Ast, var: str = "x") -> Ast:
    """Exact symbolic derivative with respect to ``var``, lightly simplified."""
    if var not in VARIABLES:
        raise DifferentiationError(f"unknown variable {var!r}")
    return simplify(_d(node, var))


def _d(node: Ast, var: str) -> Ast:
    if var not in free_vars(node):
        return ZERO
    if isinstance(node, Var):
        return ONE
    if isinstance(node, Neg):
        return Neg(_d(node.operand, var))
    if isinstance(node, BinOp):
        u, v = node.left, node.right
        if node.op in "+-":
            return BinOp(node.op, _d(u, var), _d(v, var))
        if node.op == "*":
            return BinOp("+", BinOp("*", _d(u, var), v), BinOp("*", u, _d(v, var)))
        if node.op == "/":
            num = BinOp("-", BinOp("*", _d(u, var), v), BinOp("*", u, _d(v, var)))
            return BinOp("/", num, BinOp("^", v, Num(2.0)))
        return _d_power(u, v, var)
    if isinstance(node, Call):
        u = node.args[0]
        du = _d(u, var)
        if node.name == "sin":
            return BinOp("*", Call("cos", (u,)), du)
        if node.name == "cos":
            return Neg(BinOp("*", Call("sin", (u,)), du))
        if node.name == "exp":
            return BinOp("*", node, du)
        if node.name == "ln":
            return BinOp("/", du, u)
        if node.name == "sqrt":
            return BinOp("/", du, BinOp("*", Num(2.0), node))
        if node.name == "pow":
            return _d_power(u, node.args[1], var)
        raise DifferentiationError(f"{node.name}() is not symbolically differentiable")
    raise DifferentiationError(f"cannot differentiate {node!r}")


def _d_power(u: Ast, v: Ast, var: str) -> Ast:
    if var not in free_vars(v):
        # v * u^(v-1) * u'
        return BinOp("*", BinOp("*", v, BinOp("^", u, BinOp("-", v, ONE))), _d(u, var))
    power = BinOp("^", u, v)
    if var not in free_vars(u):
        return BinOp("*", BinOp("*", power, Call("ln", (u,))), _d(v, var))
    inner = BinOp(
        "+",
        BinOp("*", _d(v, var), Call("ln", (u,))),
        BinOp("/", BinOp("*", v, _d(u, var)), u),
    )
    return BinOp("*", power, inner)


def _is_num(node: Ast, value: float | None = None) -> bool:
    return isinstance(node, Num) and (value is None or node.value == value)


def _fold(op: str, a: float, b: float) -> float | None:
    try:
        if op == "+":
            r = a + b
        elif op == "-":
            r = a - b
        elif op == "*":
            r = a * b
        elif op == "/":
            r = a / b
        else:
            if a < 0 and not float(b).is_integer():
                return None
            r = math.pow(a, b)
    except (ZeroDivisionError, ValueError, OverflowError):
        return None
    return r if math.isfinite(r) else None


def simplify(node: Ast) -> Ast:
    """Constant folding plus removal of 0+e, e-0, 0*e, 1*e, e/1, e^1, e^0."""
    if isinstance(node, Neg):
        inner = simplify(node.operand)
        if isinstance(inner, Num):
            return Num(-inner.value)
        if isinstance(inner, Neg):
            return inner.operand
        return Neg(inner)
    if isinstance(node, Call):
        args = tuple(simplify(a) for a in node.args)
        if all(isinstance(a, Num) for a in args) and node.name != "gamma":
            try:
                value = evaluate(Call(node.name, args))
            except EvalError:
                return Call(node.name, args)
            return Num(value)
        return Call(node.name, args)
    if not isinstance(node, BinOp):
        return node

    a = simplify(node.left)
    b = simplify(node.right)
    op = node.op
    if isinstance(a, Num) and isinstance(b, Num):
        folded = _fold(op, a.value, b.value)
        if folded is not None:
            return Num(folded)
    if op == "+":
        if _is_num(a, 0.0):
            return b
        if _is_num(b, 0.0):
            return a
    elif op == "-":
        if _is_num(b, 0.0):
            return a
        if _is_num(a, 0.0):
            return simplify(Neg(b))
    elif op == "*":
        if _is_num(a, 0.0) or _is_num(b, 0.0):
            return ZERO
        if _is_num(a, 1.0):
            return b
        if _is_num(b, 1.0):
            return a
    elif op == "/":
        if _is_num(b, 1.0):
            return a
        if _is_num(a, 0.0):
            return ZERO
    elif op == "^":
        if _is_num(b, 1.0):
            return a
        if _is_num(b, 0.0):
            return ONE
    return BinOp(op, a, b)


# }}}


def compile_expr(source: str | Ast) -> Ast:
    """Accept either source text or an already parsed AST."""
    if isinstance(source, str):
        return parse(source)
    return source
