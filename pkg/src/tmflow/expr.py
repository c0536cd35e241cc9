"""Closed-form expression trees: the compile target for the analytic
kernels (variables, named constants, +, -, ×, ÷, sin, cos, arcsin, arctan,
exp, log2, integer powers).

Trees are immutable, evaluate at any RealContext precision (with guard
bits), have a rigorous interval evaluator, and print to a canonical
s-expression (parse → print is the identity) plus a readable infix form.
No simplification is performed beyond constant folding at build time.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .numerics import (
    DEFAULT_CTX,
    Interval,
    RealContext,
    iv_add,
    iv_asin,
    iv_atan,
    iv_cos,
    iv_div,
    iv_exp,
    iv_log2,
    iv_mul,
    iv_pi,
    iv_pow_int,
    iv_sin,
    iv_sub,
)

__all__ = [
    "Expr", "Var", "Const", "Add", "Sub", "Mul", "Div", "Pow",
    "Sin", "Cos", "ArcSin", "ArcTan", "Exp", "Log2",
    "UnknownKernel", "ArityMismatch", "DomainError",
    "arity", "eval_expr", "eval_interval", "compose",
    "to_sexpr", "parse_sexpr", "to_infix", "build_kernel", "constants_of",
]


class UnknownKernel(ValueError):
    pass


class ArityMismatch(ValueError):
    pass


class DomainError(ArithmeticError):
    pass


class Expr:
    """Base class; concrete nodes are frozen dataclasses below."""

    __slots__ = ()


@dataclass(frozen=True)
class Var(Expr):
    index: int


@dataclass(frozen=True)
class Const(Expr):
    text: str                   # "pi", "e" or an exact rational/decimal literal
    provenance: str | None = None

    def value(self):
        if self.text == "pi":
            return +mp.pi
        if self.text == "e":
            return +mp.e
        fr = Fraction(self.text)
        return mp.mpf(fr.numerator) / fr.denominator

    def value_iv(self, bits: int) -> Interval:
        if self.text == "pi":
            return iv_pi(bits)
        if self.text == "e":
            return iv_exp(Interval.point(mp.mpf(1)), bits)
        fr = Fraction(self.text)
        num = Interval.point(mp.mpf(fr.numerator))
        return iv_div(num, Interval.point(mp.mpf(fr.denominator)), bits)


@dataclass(frozen=True)
class Add(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Sub(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Mul(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Div(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True)
class Sin(Expr):
    a: Expr


@dataclass(frozen=True)
class Cos(Expr):
    a: Expr


@dataclass(frozen=True)
class ArcSin(Expr):
    a: Expr
    cert: str | None = None     # analyticity note: why the child stays in (-1,1)


@dataclass(frozen=True)
class ArcTan(Expr):
    a: Expr


@dataclass(frozen=True)
class Exp(Expr):
    a: Expr


@dataclass(frozen=True)
class Log2(Expr):
    a: Expr


_BINARY = {Add: "add", Sub: "sub", Mul: "mul", Div: "div"}
_UNARY = {Sin: "sin", Cos: "cos", ArcSin: "asin", ArcTan: "atan", Exp: "exp", Log2: "log2"}
_BY_NAME = {v: k for k, v in _BINARY.items()} | {v: k for k, v in _UNARY.items()}


def arity(e: Expr) -> int:
    if isinstance(e, Var):
        return e.index + 1
    if isinstance(e, Const):
        return 0
    if isinstance(e, Pow):
        return arity(e.base)
    if type(e) in _BINARY:
        return max(arity(e.a), arity(e.b))
    return arity(e.a)


def eval_expr(e: Expr, args, ctx: RealContext = DEFAULT_CTX):
    """Evaluate at the context precision (64 guard bits internally)."""
    args = tuple(args)
    if arity(e) > len(args):
        raise ArityMismatch(f"expression needs {arity(e)} args, got {len(args)}")
    with mp.workprec(ctx.precision_bits + 64):
        args_w = tuple(mp.mpf(a) for a in args)
        val = _eval(e, args_w)
    with ctx.workprec():
        return +val


def _eval(e: Expr, args):
    if isinstance(e, Var):
        return args[e.index]
    if isinstance(e, Const):
        return e.value()
    if isinstance(e, Add):
        return _eval(e.a, args) + _eval(e.b, args)
    if isinstance(e, Sub):
        return _eval(e.a, args) - _eval(e.b, args)
    if isinstance(e, Mul):
        return _eval(e.a, args) * _eval(e.b, args)
    if isinstance(e, Div):
        return _eval(e.a, args) / _eval(e.b, args)
    if isinstance(e, Pow):
        return _eval(e.base, args) ** e.exponent
    if isinstance(e, Sin):
        return mp.sin(_eval(e.a, args))
    if isinstance(e, Cos):
        return mp.cos(_eval(e.a, args))
    if isinstance(e, ArcSin):
        v = _eval(e.a, args)
        if abs(v) > 1:
            raise DomainError(f"arcsin argument {v} outside [-1, 1]")
        return mp.asin(v)
    if isinstance(e, ArcTan):
        return mp.atan(_eval(e.a, args))
    if isinstance(e, Exp):
        return mp.exp(_eval(e.a, args))
    if isinstance(e, Log2):
        v = _eval(e.a, args)
        if v <= 0:
            raise DomainError(f"log2 argument {v} not positive")
        return mp.log(v) / mp.log(2)
    raise TypeError(f"unknown node {e!r}")


def eval_interval(e: Expr, boxes, ctx: RealContext = DEFAULT_CTX) -> Interval:
    """Rigorous enclosure of the expression over input boxes."""
    boxes = tuple(b if isinstance(b, Interval) else Interval.point(mp.mpf(b)) for b in boxes)
    if arity(e) > len(boxes):
        raise ArityMismatch(f"expression needs {arity(e)} boxes, got {len(boxes)}")
    return _eval_iv(e, boxes, ctx.precision_bits)


def _eval_iv(e: Expr, boxes, bits: int) -> Interval:
    if isinstance(e, Var):
        return boxes[e.index]
    if isinstance(e, Const):
        return e.value_iv(bits)
    if isinstance(e, Add):
        return iv_add(_eval_iv(e.a, boxes, bits), _eval_iv(e.b, boxes, bits), bits)
    if isinstance(e, Sub):
        return iv_sub(_eval_iv(e.a, boxes, bits), _eval_iv(e.b, boxes, bits), bits)
    if isinstance(e, Mul):
        return iv_mul(_eval_iv(e.a, boxes, bits), _eval_iv(e.b, boxes, bits), bits)
    if isinstance(e, Div):
        den = _eval_iv(e.b, boxes, bits)
        if den.lo <= 0 <= den.hi:
            raise DomainError("division by an interval containing zero")
        return iv_div(_eval_iv(e.a, boxes, bits), den, bits)
    if isinstance(e, Pow):
        return iv_pow_int(_eval_iv(e.base, boxes, bits), e.exponent, bits)
    if isinstance(e, Sin):
        return iv_sin(_eval_iv(e.a, boxes, bits), bits)
    if isinstance(e, Cos):
        return iv_cos(_eval_iv(e.a, boxes, bits), bits)
    if isinstance(e, ArcSin):
        child = _eval_iv(e.a, boxes, bits)
        if child.lo < -1 or child.hi > 1:
            if e.cert is None:
                raise DomainError(f"arcsin child enclosure {child} exits [-1, 1]")
            # certified analytic: spill is rounding only, clip soundly
            return iv_asin(child, bits, clip=True)
        return iv_asin(child, bits)
    if isinstance(e, ArcTan):
        return iv_atan(_eval_iv(e.a, boxes, bits), bits)
    if isinstance(e, Exp):
        return iv_exp(_eval_iv(e.a, boxes, bits), bits)
    if isinstance(e, Log2):
        child = _eval_iv(e.a, boxes, bits)
        if child.lo <= 0:
            raise DomainError("log2 of a nonpositive interval")
        return iv_log2(child, bits)
    raise TypeError(f"unknown node {e!r}")


def compose(outer: Expr, inners) -> Expr:
    """Substitute inners[i] for Var(i) in outer."""
    inners = tuple(inners)
    if arity(outer) > len(inners):
        raise ArityMismatch(f"outer needs {arity(outer)} inner expressions")

    def sub(e: Expr) -> Expr:
        if isinstance(e, Var):
            return inners[e.index]
        if isinstance(e, Const):
            return e
        if isinstance(e, Pow):
            return Pow(sub(e.base), e.exponent)
        if type(e) in _BINARY:
            return type(e)(sub(e.a), sub(e.b))
        if isinstance(e, ArcSin):
            return ArcSin(sub(e.a), e.cert)
        return type(e)(sub(e.a))

    return sub(outer)


def constants_of(e: Expr) -> list:
    """All named constants with provenance, in print order."""
    out = []

    def walk(n):
        if isinstance(n, Const):
            out.append(n)
        elif isinstance(n, Pow):
            walk(n.base)
        elif type(n) in _BINARY:
            walk(n.a), walk(n.b)
        elif not isinstance(n, Var):
            walk(n.a)

    walk(e)
    return out


# ---------------------------------------------------------------------------
# Text renderings
# ---------------------------------------------------------------------------


def to_sexpr(e: Expr) -> str:
    if isinstance(e, Var):
        return f"(var {e.index})"
    if isinstance(e, Const):
        if e.provenance:
            return f'(const {e.text} "{e.provenance}")'
        return f"(const {e.text})"
    if isinstance(e, Pow):
        return f"(pow {to_sexpr(e.base)} {e.exponent})"
    if type(e) in _BINARY:
        return f"({_BINARY[type(e)]} {to_sexpr(e.a)} {to_sexpr(e.b)})"
    if isinstance(e, ArcSin) and e.cert:
        return f'(asin {to_sexpr(e.a)} "{e.cert}")'
    return f"({_UNARY[type(e)]} {to_sexpr(e.a)})"


def _tokenize(text: str):
    out, i = [], 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            out.append(ch)
            i += 1
        elif ch == '"':
            j = text.index('"', i + 1)
            out.append(text[i:j + 1])
            i = j + 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "()":
                j += 1
            out.append(text[i:j])
            i = j
    return out


def parse_sexpr(text: str) -> Expr:
    tokens = _tokenize(text)
    pos = 0

    def parse():
        nonlocal pos
        if tokens[pos] != "(":
            raise ValueError(f"expected '(' at token {pos}")
        pos += 1
        head = tokens[pos]
        pos += 1
        if head == "var":
            node = Var(int(tokens[pos])); pos += 1
        elif head == "const":
            text_ = tokens[pos]; pos += 1
            prov = None
            if tokens[pos].startswith('"'):
                prov = tokens[pos][1:-1]; pos += 1
            node = Const(text_, prov)
        elif head == "pow":
            base = parse()
            node = Pow(base, int(tokens[pos])); pos += 1
        elif head in ("add", "sub", "mul", "div"):
            a = parse(); b = parse()
            node = _BY_NAME[head](a, b)
        elif head == "asin":
            a = parse()
            cert = None
            if tokens[pos].startswith('"'):
                cert = tokens[pos][1:-1]; pos += 1
            node = ArcSin(a, cert)
        elif head in _BY_NAME:
            node = _BY_NAME[head](parse())
        else:
            raise ValueError(f"unknown head {head!r}")
        if tokens[pos] != ")":
            raise ValueError(f"expected ')' after {head}")
        pos += 1
        return node

    node = parse()
    if pos != len(tokens):
        raise ValueError("trailing tokens")
    return node


_VAR_NAMES = ("x", "y", "z", "w")


def _var_name(i: int) -> str:
    return _VAR_NAMES[i] if i < len(_VAR_NAMES) else f"x{i}"


def to_infix(e: Expr) -> str:
    def render(n, parent_prec):
        if isinstance(n, Var):
            return _var_name(n.index)
        if isinstance(n, Const):
            return n.text
        if isinstance(n, Add):
            s = f"{render(n.a, 1)} + {render(n.b, 1)}"
            return f"({s})" if parent_prec > 1 else s
        if isinstance(n, Sub):
            s = f"{render(n.a, 1)} - {render(n.b, 2)}"
            return f"({s})" if parent_prec > 1 else s
        if isinstance(n, Mul):
            if isinstance(n.a, Const) and n.a.text == "-1":
                s = f"-{render(n.b, 3)}"
                return f"({s})" if parent_prec > 2 else s
            s = f"{render(n.a, 2)}*{render(n.b, 2)}"
            return f"({s})" if parent_prec > 2 else s
        if isinstance(n, Div):
            s = f"{render(n.a, 2)}/{render(n.b, 3)}"
            return f"({s})" if parent_prec > 2 else s
        if isinstance(n, Pow):
            return f"{render(n.base, 4)}^{n.exponent}"
        name = {Sin: "sin", Cos: "cos", ArcSin: "arcsin", ArcTan: "arctan",
                Exp: "exp", Log2: "log2"}[type(n)]
        return f"{name}({render(n.a, 0)})"

    return render(e, 0)


# ---------------------------------------------------------------------------
# Kernel constructors
# ---------------------------------------------------------------------------


def _two_pi_times(e: Expr) -> Expr:
    return Mul(Mul(Const("2"), Const("pi")), e)


def _sigma_expr(x: Expr) -> Expr:
    return Sub(x, Mul(Const("0.2", "contraction amplitude of sigma"),
                      Sin(_two_pi_times(x))))


def _psi_expr(x: Expr, y: Expr) -> Expr:
    damp = Sub(Const("1"), Exp(Sub(Mul(Const("-1"), y), Const("2"))))
    inner = Mul(Sin(_two_pi_times(x)), damp)
    asin = ArcSin(inner, cert="|sin(2*pi*x)|*(1-exp(-y-2)) < 1 for y >= 0")
    return Sub(x, Div(asin, Mul(Const("2"), Const("pi"))))


def _s_expr(t: Expr) -> Expr:
    w = Sin(_two_pi_times(t))
    return Div(Add(Pow(w, 2), w), Const("2"))


def _pair2_expr(x: Expr, y: Expr) -> Expr:
    return Div(Add(Pow(Add(x, y), 2), Add(Mul(Const("3"), x), y)), Const("2"))


def _upsilon2_expr(x1: Expr, x2: Expr) -> Expr:
    norm = Mul(Const("32", "accuracy gain of the pairing extension"),
               Add(Const("1"), Add(Pow(x1, 2), Pow(x2, 2))))
    return _pair2_expr(_psi_expr(x1, norm), _psi_expr(x2, norm))


def build_kernel(name: str, l: int | None = None, k: int | None = None) -> Expr:
    """Expression form of a named closed-form kernel.

    Supported: sigma, psi_correct, sigma_iter (iterate depth l), s,
    gate_phi, pair2, upsilon_k (width k >= 2).
    """
    if name == "sigma":
        return _sigma_expr(Var(0))
    if name == "psi_correct":
        return _psi_expr(Var(0), Var(1))
    if name == "sigma_iter":
        if not l or l < 1:
            raise UnknownKernel("sigma_iter needs an iterate depth l >= 1")
        e = _sigma_expr(Var(0))
        for _ in range(l - 1):
            e = compose(_sigma_expr(Var(0)), [e])
        return e
    if name == "s":
        return _s_expr(Var(0))
    if name == "gate_phi":
        return compose(_psi_expr(Var(0), Var(1)), [_s_expr(Var(0)), Var(1)])
    if name == "pair2":
        return _pair2_expr(Var(0), Var(1))
    if name == "upsilon_k":
        if not k or k < 2:
            raise UnknownKernel("upsilon_k needs k >= 2")
        e = _upsilon2_expr(Var(0), Var(1))
        for i in range(2, k):
            e = _upsilon2_expr(compose(e, [Var(j) for j in range(i)]), Var(i))
        return e
    raise UnknownKernel(f"no kernel named {name!r}")
