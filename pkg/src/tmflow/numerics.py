"""Extended-precision scalars, intervals, adaptive quadrature and an
adaptive Runge-Kutta 5(4) solver with dense output.

Everything downstream (kernels, compiled maps, ODE simulations, the sphere
transport) runs on the primitives in this module.  Scalars are mpmath ``mpf``
values computed under an explicit :class:`RealContext`; intervals wrap
mpmath's rigorous ``iv`` arithmetic and always return enclosures.
"""

from __future__ import annotations

import bisect
import contextlib
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
from mpmath import iv, mp

__all__ = [
    "DEFAULT_PRECISION_BITS",
    "RealContext",
    "DEFAULT_CTX",
    "Interval",
    "NonConvergence",
    "StepUnderflow",
    "BlowUp",
    "quad_adaptive",
    "IvpSpec",
    "Trajectory",
    "solve_ivp",
]

_ENV_PRECISION = "TA_PRECISION_BITS"
DEFAULT_PRECISION_BITS = int(os.environ.get(_ENV_PRECISION, "256"))


class NonConvergence(ArithmeticError):
    """Adaptive quadrature exceeded its refinement depth."""


class StepUnderflow(ArithmeticError):
    """The step controller drove the step below the precision floor."""


class BlowUp(ArithmeticError):
    """State norm exceeded the configured ceiling during integration."""


@dataclass(frozen=True)
class RealContext:
    """Carrier for the working mantissa width.

    All arithmetic performed through a context is correctly rounded to
    ``precision_bits`` by mpmath; helper conversions guarantee the
    decimal-string round trip is the identity at the same precision.
    """

    precision_bits: int = DEFAULT_PRECISION_BITS

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be >= 64")

    def workprec(self):
        return mp.workprec(self.precision_bits)

    def mpf(self, x) -> mp.mpf:
        with self.workprec():
            if isinstance(x, float):
                # floats are exact binary values; widen without rounding
                return +mp.mpf(x)
            return mp.mpf(x) if not isinstance(x, str) else mp.mpf(x)

    @property
    def eps(self) -> mp.mpf:
        with self.workprec():
            return mp.mpf(2) ** (-self.precision_bits + 1)

    def to_decimal(self, x) -> str:
        """Decimal rendering with enough digits to round-trip exactly."""
        digits = int(self.precision_bits * 0.30103) + 8
        with self.workprec():
            return mp.nstr(mp.mpf(x), digits, strip_zeros=True)

    def from_decimal(self, s: str) -> mp.mpf:
        with self.workprec():
            return mp.mpf(s)


DEFAULT_CTX = RealContext()


@contextlib.contextmanager
def _iv_prec(bits: int):
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


iv_prec = _iv_prec


def _mpi_endpoints(x) -> tuple[mp.mpf, mp.mpf]:
    lo, hi = x._mpi_
    return mp.make_mpf(lo), mp.make_mpf(hi)


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi]; all operations return enclosures."""

    lo: mp.mpf
    hi: mp.mpf

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"interval endpoints out of order: {self.lo} > {self.hi}")

    @classmethod
    def point(cls, x) -> "Interval":
        x = mp.mpf(x)
        return cls(x, x)

    @classmethod
    def from_iv(cls, x) -> "Interval":
        lo, hi = _mpi_endpoints(x)
        return cls(lo, hi)

    def to_iv(self, bits: int):
        with _iv_prec(bits):
            return iv.mpf([self.lo, self.hi])

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    @property
    def width(self) -> mp.mpf:
        return self.hi - self.lo

    @property
    def mid(self) -> mp.mpf:
        return (self.lo + self.hi) / 2

    def abs(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return Interval(-self.hi, -self.lo)
        return Interval(mp.mpf(0), max(-self.lo, self.hi))

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


def _binary_iv(op: str, bits: int, a: Interval, b: Interval) -> Interval:
    with _iv_prec(bits):
        x, y = a.to_iv(bits), b.to_iv(bits)
        return Interval.from_iv(getattr(x, op)(y))


def iv_add(a: Interval, b: Interval, bits: int) -> Interval:
    return _binary_iv("__add__", bits, a, b)


def iv_sub(a: Interval, b: Interval, bits: int) -> Interval:
    return _binary_iv("__sub__", bits, a, b)


def iv_mul(a: Interval, b: Interval, bits: int) -> Interval:
    return _binary_iv("__mul__", bits, a, b)


def iv_div(a: Interval, b: Interval, bits: int) -> Interval:
    return _binary_iv("__truediv__", bits, a, b)


def _unary_iv(fn: str, bits: int, a: Interval) -> Interval:
    with _iv_prec(bits):
        return Interval.from_iv(getattr(iv, fn)(a.to_iv(bits)))


def iv_sin(a: Interval, bits: int) -> Interval:
    return _unary_iv("sin", bits, a)


def iv_cos(a: Interval, bits: int) -> Interval:
    return _unary_iv("cos", bits, a)


def iv_exp(a: Interval, bits: int) -> Interval:
    return _unary_iv("exp", bits, a)


def iv_sqrt(a: Interval, bits: int) -> Interval:
    return _unary_iv("sqrt", bits, a)


def iv_pi(bits: int) -> Interval:
    with _iv_prec(bits):
        return Interval.from_iv(+iv.pi)


def iv_intersect(a: Interval, b: Interval) -> Interval:
    lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
    if lo > hi:
        raise ValueError("empty interval intersection")
    return Interval(lo, hi)


def iv_asin(a: Interval, bits: int, clip: bool = False) -> Interval:
    """Rigorous interval arcsine via asin(x) = atan2(x, sqrt(1-x²)).

    mpmath.iv does not ship asin; atan2 and sqrt are rigorous and the
    identity holds on [-1, 1], so the composition is an enclosure.  With
    `clip` the argument is intersected with [-1, 1] first (sound when the
    true value is known to lie there and only rounding spilled outside).
    """
    if clip:
        a = Interval(max(a.lo, mp.mpf(-1)), min(a.hi, mp.mpf(1)))
        if a.lo > a.hi:
            raise ValueError("iv_asin argument entirely outside [-1, 1]")
    elif a.lo < -1 or a.hi > 1:
        raise ValueError(f"iv_asin argument {a} exits [-1, 1]")
    with _iv_prec(bits):
        x = a.to_iv(bits)
        one = iv.mpf(1)
        sq = one - x * x
        sq = iv.mpf([max(mp.mpf(0), Interval.from_iv(sq).lo), Interval.from_iv(sq).hi])
        return Interval.from_iv(iv.atan2(x, iv.sqrt(sq)))


def iv_atan(a: Interval, bits: int) -> Interval:
    with _iv_prec(bits):
        x = a.to_iv(bits)
        return Interval.from_iv(iv.atan2(x, iv.mpf(1)))


def iv_log2(a: Interval, bits: int) -> Interval:
    if a.lo <= 0:
        raise ValueError("iv_log2 argument must be positive")
    with _iv_prec(bits):
        x = a.to_iv(bits)
        return Interval.from_iv(iv.log(x) / iv.log(iv.mpf(2)))


def iv_pow_int(a: Interval, n: int, bits: int) -> Interval:
    with _iv_prec(bits):
        return Interval.from_iv(a.to_iv(bits) ** n)


# ---------------------------------------------------------------------------
# Gauss-Legendre nodes and adaptive quadrature
# ---------------------------------------------------------------------------

_GL_CACHE: dict[tuple[int, int], tuple[list, list]] = {}


def _legendre_nodes(n: int, bits: int) -> tuple[list, list]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    key = (n, bits)
    if key in _GL_CACHE:
        return _GL_CACHE[key]
    work = bits + 32
    nodes, weights = [], []
    with mp.workprec(work):
        for i in range(n):
            x = mp.cos(mp.pi * (i + mp.mpf(3) / 4) / (n + mp.mpf(1) / 2))
            for _ in range(100):
                p = mp.legendre(n, x)
                pm1 = mp.legendre(n - 1, x)
                dp = n * (x * p - pm1) / (x * x - 1)
                dx = p / dp
                x -= dx
                if abs(dx) < mp.mpf(2) ** (-work + 8):
                    break
            p = mp.legendre(n, x)
            pm1 = mp.legendre(n - 1, x)
            dp = n * (x * p - pm1) / (x * x - 1)
            w = 2 / ((1 - x * x) * dp * dp)
            nodes.append(x)
            weights.append(w)
    _GL_CACHE[key] = (nodes, weights)
    return nodes, weights


def _gauss_panel(f, a, b, n, bits):
    nodes, weights = _legendre_nodes(n, bits)
    half = (b - a) / 2
    mid = (a + b) / 2
    acc = mp.mpf(0)
    for x, w in zip(nodes, weights):
        acc += w * f(mid + half * x)
    return acc * half


def quad_adaptive(
    f: Callable,
    a,
    b,
    tol,
    ctx: RealContext = DEFAULT_CTX,
    max_depth: int = 48,
) -> mp.mpf:
    """Adaptive bisection quadrature with an embedded Gauss pair estimate.

    Each panel is integrated with 7- and 15-point Gauss rules; their
    difference drives refinement.  Returns Q with |Q - ∫f| <= tol·max(1,|Q|)
    under the (checked) assumption that the panel estimates converge.
    """
    bits = ctx.precision_bits
    work = bits + 48  # guard bits: panel arithmetic must outresolve tol
    with mp.workprec(work):
        a, b, tol = mp.mpf(a), mp.mpf(b), mp.mpf(tol)
        if tol <= 0:
            raise ValueError("tol must be positive")
        if a > b:
            raise ValueError("need a <= b")
        if a == b:
            result = mp.mpf(0)
        else:
            total_len = b - a
            result = mp.mpf(0)
            err_acc = mp.mpf(0)
            floor = mp.mpf(2) ** (-bits - 16)
            stack = [(a, b, 0)]
            while stack:
                lo, hi, depth = stack.pop()
                coarse = _gauss_panel(f, lo, hi, 7, work)
                fine = _gauss_panel(f, lo, hi, 15, work)
                err = abs(fine - coarse)
                local_budget = tol * (hi - lo) / total_len / 2
                if err <= local_budget or err <= floor * max(1, abs(fine)):
                    result += fine
                    err_acc += err
                else:
                    if depth >= max_depth:
                        raise NonConvergence(
                            f"quadrature failed to converge on [{lo}, {hi}] at depth {depth}"
                        )
                    mid = (lo + hi) / 2
                    stack.append((lo, mid, depth + 1))
                    stack.append((mid, hi, depth + 1))
            if err_acc > tol * max(1, abs(result)):
                raise NonConvergence("accumulated quadrature error above tolerance")
    with ctx.workprec():
        return +result


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) with 4th order dense output
# ---------------------------------------------------------------------------

_DOPRI_A = [
    [],
    [Fraction(1, 5)],
    [Fraction(3, 40), Fraction(9, 40)],
    [Fraction(44, 45), Fraction(-56, 15), Fraction(32, 9)],
    [Fraction(19372, 6561), Fraction(-25360, 2187), Fraction(64448, 6561), Fraction(-212, 729)],
    [Fraction(9017, 3168), Fraction(-355, 33), Fraction(46732, 5247), Fraction(49, 176), Fraction(-5103, 18656)],
    [Fraction(35, 384), Fraction(0), Fraction(500, 1113), Fraction(125, 192), Fraction(-2187, 6784), Fraction(11, 84)],
]
_DOPRI_C = [Fraction(0), Fraction(1, 5), Fraction(3, 10), Fraction(4, 5), Fraction(8, 9), Fraction(1), Fraction(1)]
_DOPRI_B5 = _DOPRI_A[6] + [Fraction(0)]
_DOPRI_B4 = [
    Fraction(5179, 57600), Fraction(0), Fraction(7571, 16695), Fraction(393, 640),
    Fraction(-92097, 339200), Fraction(187, 2100), Fraction(1, 40),
]
# Hairer's CONTD5 coefficients for the quartic interpolant.
_DOPRI_D = {
    0: Fraction(-12715105075, 11282082432),
    2: Fraction(87487479700, 32700410799),
    3: Fraction(-10690763975, 1880347072),
    4: Fraction(701980252875, 199316789632),
    5: Fraction(-1453857185, 822651844),
    6: Fraction(69997945, 29380423),
}

_TABLEAU_CACHE: dict[int, dict] = {}


def _tableau(bits: int) -> dict:
    if bits in _TABLEAU_CACHE:
        return _TABLEAU_CACHE[bits]
    with mp.workprec(bits):
        conv = lambda fr: mp.mpf(fr.numerator) / fr.denominator
        tab = {
            "a": [[conv(x) for x in row] for row in _DOPRI_A],
            "c": [conv(x) for x in _DOPRI_C],
            "b5": [conv(x) for x in _DOPRI_B5],
            "e": [conv(b5 - b4) for b5, b4 in zip(_DOPRI_B5, _DOPRI_B4)],
            "d": {i: conv(x) for i, x in _DOPRI_D.items()},
        }
    _TABLEAU_CACHE[bits] = tab
    return tab


@dataclass(frozen=True)
class IvpSpec:
    """An initial value problem y' = rhs(t, y) plus solver tolerances."""

    rhs: Callable
    t0: mp.mpf
    state0: tuple
    abs_tol: mp.mpf
    rel_tol: mp.mpf
    max_step: mp.mpf

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")

    @classmethod
    def make(cls, rhs, t0, state0, abs_tol="1e-12", rel_tol="1e-12",
             max_step="1e-2", ctx: RealContext = DEFAULT_CTX) -> "IvpSpec":
        with ctx.workprec():
            return cls(
                rhs=rhs,
                t0=mp.mpf(t0),
                state0=tuple(mp.mpf(s) for s in state0),
                abs_tol=mp.mpf(abs_tol),
                rel_tol=mp.mpf(rel_tol),
                max_step=mp.mpf(max_step),
            )


@dataclass(frozen=True)
class _Segment:
    t0: mp.mpf
    t1: mp.mpf
    y0: tuple
    y1: tuple
    rcont: tuple  # 5 coefficient vectors for the quartic interpolant


@dataclass(frozen=True)
class Trajectory:
    """Dense-output solution of an IVP on [t0, t_end].

    Segments tile the time range with no gaps; querying at a stored node
    returns the stored state exactly.
    """

    spec: IvpSpec
    segments: tuple
    t_end: mp.mpf
    ctx: RealContext = field(default=DEFAULT_CTX, compare=False)

    @property
    def dim(self) -> int:
        return len(self.spec.state0)

    def nodes(self):
        ts = [self.segments[0].t0] if self.segments else [self.spec.t0]
        for seg in self.segments:
            ts.append(seg.t1)
        return ts

    def states(self):
        ys = [self.segments[0].y0] if self.segments else [self.spec.state0]
        for seg in self.segments:
            ys.append(seg.y1)
        return ys

    def value(self, t) -> tuple:
        with self.ctx.workprec():
            t = mp.mpf(t)
            if not self.segments:
                if t == self.spec.t0:
                    return self.spec.state0
                raise ValueError("empty trajectory")
            lo = self.segments[0].t0
            if t < lo or t > self.t_end:
                raise ValueError(f"query time {t} outside [{lo}, {self.t_end}]")
            starts = [seg.t0 for seg in self.segments]
            i = bisect.bisect_right(starts, t) - 1
            i = max(0, min(i, len(self.segments) - 1))
            seg = self.segments[i]
            if t == seg.t0:
                return seg.y0
            if t == seg.t1:
                return seg.y1
            h = seg.t1 - seg.t0
            theta = (t - seg.t0) / h
            om = 1 - theta
            r1, r2, r3, r4, r5 = seg.rcont
            return tuple(
                r1[j] + theta * (r2[j] + om * (r3[j] + theta * (r4[j] + om * r5[j])))
                for j in range(len(r1))
            )

    def to_csv(self, path, sample_times: Sequence | None = None):
        """Write `t,state_0,...` rows at nodes (default) or given times."""
        times = list(sample_times) if sample_times is not None else self.nodes()
        n = self.dim
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t," + ",".join(f"state_{i}" for i in range(n)) + "\n")
            for t in times:
                y = self.value(t)
                row = [self.ctx.to_decimal(t)] + [self.ctx.to_decimal(c) for c in y]
                fh.write(",".join(row) + "\n")


def _vec(scalars):
    return tuple(scalars)


def solve_ivp(
    spec: IvpSpec,
    t_end,
    ctx: RealContext = DEFAULT_CTX,
    blowup_ceiling="1e120",
    record: bool = True,
) -> Trajectory:
    """Integrate the IVP with the adaptive Dormand-Prince 5(4) pair.

    Error per step is controlled against abs_tol + rel_tol·|y| in the max
    norm; dense output is Hairer's quartic interpolant.  Raises StepUnderflow
    when the controller drives the step below the precision floor and BlowUp
    when the state norm passes `blowup_ceiling`.
    """
    with ctx.workprec():
        bits = ctx.precision_bits
        tab = _tableau(bits)
        a_tab, c_tab, b5, e_tab, d_tab = tab["a"], tab["c"], tab["b5"], tab["e"], tab["d"]
        t_end = mp.mpf(t_end)
        t = mp.mpf(spec.t0)
        y = tuple(mp.mpf(s) for s in spec.state0)
        n = len(y)
        ceiling = mp.mpf(blowup_ceiling)
        if t_end < t:
            raise ValueError("t_end must be >= t0")
        segments = []
        if t_end == t:
            return Trajectory(spec=spec, segments=(), t_end=t_end, ctx=ctx)

        f = spec.rhs
        k1 = _vec(f(t, y))
        if len(k1) != n:
            raise ValueError("rhs dimension mismatch")

        # initial step: conservative fraction of max_step scaled by |f|
        fn = max((abs(c) for c in k1), default=mp.mpf(0))
        yn = max((abs(c) for c in y), default=mp.mpf(0))
        scale0 = spec.abs_tol + spec.rel_tol * yn
        if fn > 0:
            h = min(spec.max_step, mp.mpf("0.01") * (scale0 / fn) ** mp.mpf("0.2"),
                    t_end - t)
        else:
            h = min(spec.max_step, t_end - t)
        h = max(h, mp.mpf(2) ** (-bits // 2))

        h_floor_factor = mp.mpf(2) ** (-bits + 16)
        safety = mp.mpf("0.9")
        k = [k1] + [None] * 6
        while t < t_end:
            h = min(h, spec.max_step, t_end - t)
            last = h == t_end - t
            if not last and h < h_floor_factor * max(1, abs(t)):
                raise StepUnderflow(f"step {h} underflowed at t={t}")
            # stages
            for i in range(1, 7):
                ti = t + c_tab[i] * h
                yi = tuple(
                    y[j] + h * mp.fsum(a_tab[i][m] * k[m][j] for m in range(i))
                    for j in range(n)
                )
                k[i] = _vec(f(ti, yi))
            y1 = tuple(
                y[j] + h * mp.fsum(b5[m] * k[m][j] for m in range(7) if b5[m] != 0)
                for j in range(n)
            )
            err = mp.mpf(0)
            for j in range(n):
                ej = h * mp.fsum(e_tab[m] * k[m][j] for m in range(7) if e_tab[m] != 0)
                sc = spec.abs_tol + spec.rel_tol * max(abs(y[j]), abs(y1[j]))
                err = max(err, abs(ej) / sc)
            if err <= 1:
                t_next = t_end if last else t + h
                if record:
                    ydiff = tuple(y1[j] - y[j] for j in range(n))
                    bspl = tuple(h * k[0][j] - ydiff[j] for j in range(n))
                    r5 = tuple(
                        h * mp.fsum(d_tab[m] * k[m][j] for m in d_tab)
                        for j in range(n)
                    )
                    r4 = tuple(ydiff[j] - h * k[6][j] - bspl[j] for j in range(n))
                    segments.append(_Segment(t, t_next, y, y1, (y, ydiff, bspl, r4, r5)))
                t = t_next
                y = y1
                k[0] = k[6]  # FSAL
                if max(abs(c) for c in y) > ceiling:
                    raise BlowUp(f"state norm exceeded {ceiling} at t={t}")
                fac = safety * err ** mp.mpf("-0.2") if err > 0 else mp.mpf(5)
                h = h * min(mp.mpf(5), max(mp.mpf("0.2"), fac))
            else:
                fac = safety * err ** mp.mpf("-0.2")
                h = h * max(mp.mpf("0.1"), fac)
        return Trajectory(spec=spec, segments=tuple(segments), t_end=t_end, ctx=ctx)
