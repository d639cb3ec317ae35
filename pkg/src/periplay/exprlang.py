"""Tiny arithmetic expression language for run-configuration files.

Model data (source terms, constraint curves) are written as strings over the
variables ``t``, ``u``, ``v``, the constant ``pi``, the operators ``+ - * /``
(plus unary minus) and a fixed set of functions.  A recursive-descent parser
produces an immutable AST; evaluation is numpy-aware, so the same tree can be
applied to scalars or to whole grid fields.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Expr",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "ExprSyntaxError",
    "EvalError",
    "parse",
    "to_string",
    "evaluate",
    "compile_expr",
    "estimate_lipschitz",
]

VARIABLES = ("t", "u", "v")

# name -> arity
FUNCTIONS = {
    "min": 2,
    "max": 2,
    "abs": 1,
    "tanh": 1,
    "sin": 1,
    "cos": 1,
    "exp_neg": 1,
    "clamp": 3,
}

MAX_DEPTH = 64


class ExprSyntaxError(SyntaxError):
    """Parse failure; ``offset`` is the 0-based byte offset into the source."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class EvalError(ValueError):
    """Evaluation failure (division by zero, non-finite result)."""


@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # one of + - * /
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    func: str
    args: tuple[Expr, ...]


# ---------------------------------------------------------------------------
# tokenizer / parser
# ---------------------------------------------------------------------------

_PUNCT = set("+-*/(),")


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    """Return (kind, text, offset) triples; kinds: num, ident, punct, end."""
    tokens = []
    i, n = 0, len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _PUNCT:
            tokens.append(("punct", ch, i))
            i += 1
            continue
        if ch.isdigit() or ch == ".":
            j = i
            while j < n and (src[j].isdigit() or src[j] == "."):
                j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    j = k
                    while j < n and src[j].isdigit():
                        j += 1
            text = src[i:j]
            try:
                float(text)
            except ValueError:
                raise ExprSyntaxError(f"bad number literal {text!r}", i) from None
            tokens.append(("num", text, i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append(("ident", src[i:j], i))
            i = j
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_punct(self, ch: str):
        kind, text, off = self.peek()
        if kind != "punct" or text != ch:
            raise ExprSyntaxError(f"expected {ch!r}", off)
        return self.advance()

    def parse(self) -> Expr:
        tree = self.expr(0)
        kind, text, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected trailing input {text!r}", off)
        return tree

    def expr(self, depth: int) -> Expr:
        self._check_depth(depth)
        node = self.term(depth + 1)
        while True:
            kind, text, _ = self.peek()
            if kind == "punct" and text in "+-":
                self.advance()
                node = BinOp(text, node, self.term(depth + 1))
            else:
                return node

    def term(self, depth: int) -> Expr:
        self._check_depth(depth)
        node = self.unary(depth + 1)
        while True:
            kind, text, _ = self.peek()
            if kind == "punct" and text in "*/":
                self.advance()
                node = BinOp(text, node, self.unary(depth + 1))
            else:
                return node

    def unary(self, depth: int) -> Expr:
        self._check_depth(depth)
        kind, text, _ = self.peek()
        if kind == "punct" and text == "-":
            self.advance()
            return Neg(self.unary(depth + 1))
        return self.primary(depth + 1)

    def primary(self, depth: int) -> Expr:
        self._check_depth(depth)
        kind, text, off = self.advance()
        if kind == "num":
            return Num(float(text))
        if kind == "punct" and text == "(":
            node = self.expr(depth + 1)
            self.expect_punct(")")
            return node
        if kind == "ident":
            if text in FUNCTIONS:
                self.expect_punct("(")
                args = [self.expr(depth + 1)]
                while True:
                    k2, t2, o2 = self.peek()
                    if k2 == "punct" and t2 == ",":
                        self.advance()
                        args.append(self.expr(depth + 1))
                    elif k2 == "punct" and t2 == ")":
                        self.advance()
                        break
                    else:
                        raise ExprSyntaxError("expected ',' or ')'", o2)
                if len(args) != FUNCTIONS[text]:
                    raise ExprSyntaxError(
                        f"{text} takes {FUNCTIONS[text]} argument(s), got {len(args)}", off
                    )
                return Call(text, tuple(args))
            if text == "pi":
                return Num(np.pi)
            if text in VARIABLES:
                return Var(text)
            raise ExprSyntaxError(f"unknown identifier {text!r}", off)
        raise ExprSyntaxError("expected an expression", off)

    def _check_depth(self, depth: int):
        if depth > MAX_DEPTH:
            raise ExprSyntaxError("expression too deeply nested", self.peek()[2])


def parse(src: str) -> Expr:
    """Parse ``src`` into an AST, raising :class:`ExprSyntaxError` on failure."""
    if not src or not src.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(src).parse()


# ---------------------------------------------------------------------------
# canonical printer
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _print(e: Expr) -> tuple[str, int]:
    """Return (text, precedence); precedence 9 marks atoms."""
    if isinstance(e, Num):
        return repr(e.value), 9
    if isinstance(e, Var):
        return e.name, 9
    if isinstance(e, Neg):
        text, prec = _print(e.operand)
        if prec < 3:
            text = f"({text})"
        return f"-{text}", 3
    if isinstance(e, Call):
        args = ", ".join(_print(a)[0] for a in e.args)
        return f"{e.func}({args})", 9
    if isinstance(e, BinOp):
        level = _PREC[e.op]
        lt, lp = _print(e.left)
        rt, rp = _print(e.right)
        if lp < level:
            lt = f"({lt})"
        # operators are left-associative: a same-level right child only occurs
        # in hand-built trees, and keeping its parentheses makes the printed
        # form reparse to the identical tree
        if rp <= level:
            rt = f"({rt})"
        return f"{lt} {e.op} {rt}", level
    raise TypeError(f"not an Expr node: {e!r}")


def to_string(e: Expr) -> str:
    """Canonical textual form; ``parse(to_string(parse(s))) == parse(s)``."""
    return _print(e)[0]


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _exp_neg(x):
    with np.errstate(over="ignore"):
        return np.exp(-np.asarray(x, dtype=float))


_FUNC_IMPL = {
    "min": np.minimum,
    "max": np.maximum,
    "abs": np.abs,
    "tanh": np.tanh,
    "sin": np.sin,
    "cos": np.cos,
    "exp_neg": _exp_neg,
    "clamp": np.clip,
}


def _ev(e: Expr, env: dict):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Neg):
        return -_ev(e.operand, env)
    if isinstance(e, BinOp):
        a = _ev(e.left, env)
        b = _ev(e.right, env)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if np.any(np.asarray(b) == 0.0):
            raise EvalError(f"division by zero in {to_string(e)!r}")
        return a / b
    if isinstance(e, Call):
        return _FUNC_IMPL[e.func](*(_ev(a, env) for a in e.args))
    raise TypeError(f"not an Expr node: {e!r}")


def evaluate(e: Expr, t=0.0, u=0.0, v=0.0):
    """Evaluate ``e``; scalars in give a float back, arrays broadcast.

    Raises :class:`EvalError` on division by zero or a non-finite result.
    """
    result = _ev(e, {"t": t, "u": u, "v": v})
    if not np.all(np.isfinite(result)):
        raise EvalError(f"non-finite value from {to_string(e)!r}")
    if np.isscalar(t) and np.isscalar(u) and np.isscalar(v):
        return float(result)
    return result


def compile_expr(source) -> "tuple[Expr, callable]":
    """Parse ``source`` (or accept an Expr) and return ``(tree, f(t, u, v))``."""
    tree = parse(source) if isinstance(source, str) else source
    if not isinstance(tree, Expr):
        raise TypeError("expected an expression string or Expr")

    def fn(t, u, v):
        return evaluate(tree, t, u, v)

    return tree, fn


def estimate_lipschitz(
    e: Expr,
    var: str,
    box: tuple[tuple[float, float], tuple[float, float]] = ((-5.0, 5.0), (-5.0, 5.0)),
    samples: int = 100_000,
    seed: int = 0,
    t_range: tuple[float, float] = (0.0, 1.0),
) -> float:
    """Sampled Lipschitz constant of ``e`` in ``var`` (one of ``u``, ``v``).

    Maximum difference quotient over ``samples`` random pairs differing only
    in ``var``, inflated by a 5% safety factor.  An estimate, never a
    certificate; user-supplied constants should take precedence.
    """
    if var not in ("u", "v"):
        raise ValueError("var must be 'u' or 'v'")
    if samples < 1000:
        raise ValueError("samples must be at least 1000")
    rng = np.random.default_rng(seed)
    (ulo, uhi), (vlo, vhi) = box
    t = rng.uniform(t_range[0], t_range[1], samples)
    u = rng.uniform(ulo, uhi, samples)
    v = rng.uniform(vlo, vhi, samples)
    lo, hi = (ulo, uhi) if var == "u" else (vlo, vhi)
    x1 = rng.uniform(lo, hi, samples)
    x2 = rng.uniform(lo, hi, samples)
    gap = np.abs(x1 - x2)
    keep = gap > 1e-9
    if var == "u":
        f1 = evaluate(e, t, x1, v)
        f2 = evaluate(e, t, x2, v)
    else:
        f1 = evaluate(e, t, u, x1)
        f2 = evaluate(e, t, u, x2)
    diff = np.broadcast_to(np.abs(np.asarray(f1) - np.asarray(f2)), gap.shape)
    if not np.any(keep):
        return 0.0
    quot = diff[keep] / gap[keep]
    return 1.05 * float(np.max(quot))
