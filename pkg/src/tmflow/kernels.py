"""Scalar special functions shared by the map and ODE constructions.

Point evaluation uses exact mod-1 argument reduction (``sinpi``), so the
integer fixed points of Ψ and σ and the plateaus of the θ-built functions
v, r and ξ are returned exactly rather than through quadrature.  Interval
variants return rigorous enclosures built on mpmath.iv.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

import mpmath
from mpmath import iv, mp

from .numerics import (
    iv_prec,
    DEFAULT_CTX,
    Interval,
    RealContext,
    iv_asin,
    iv_intersect,
    quad_adaptive,
)

__all__ = [
    "KernelParams",
    "kernel_params",
    "theta",
    "psi_correct",
    "sigma",
    "sigma_iter",
    "s_gate",
    "gate_phi",
    "v_accum",
    "r_floor",
    "xi",
    "theta_iv",
    "psi_correct_iv",
    "sigma_iv",
    "s_gate_iv",
    "gate_phi_iv",
    "r_floor_iv",
    "xi_iv",
]


def theta(x, ctx: RealContext = DEFAULT_CTX):
    """C∞ bump activation: 0 for x <= 0, exp(-1/x) for x > 0."""
    with ctx.workprec():
        x = mp.mpf(x)
        if x <= 0:
            return mp.mpf(0)
        return mp.exp(-1 / x)


def _sin2pi(x):
    # sinpi reduces mod 2 exactly on dyadic arguments: sin(2*pi*n) == 0
    return mp.sinpi(2 * x)


def psi_correct(x, y, ctx: RealContext = DEFAULT_CTX):
    """Targetable error correction Ψ(x,y) = x - arcsin(sin(2πx)(1-e^(-y-2)))/2π.

    For |x-k| <= 1/5, k integer and y >= 0: |Ψ(x,y)-k| < e^(-y)|x-k|.
    """
    with ctx.workprec():
        x, y = mp.mpf(x), mp.mpf(y)
        s = _sin2pi(x)
        if s == 0:
            return x
        damp = 1 - mp.exp(-y - 2)
        return x - mp.asin(s * damp) / (2 * mp.pi)


def sigma(x, ctx: RealContext = DEFAULT_CTX):
    """Uniform contraction around integers: σ(x) = x - 0.2 sin(2πx)."""
    with ctx.workprec():
        x = mp.mpf(x)
        return x - _sin2pi(x) / 5


def sigma_iter(x, l: int, ctx: RealContext = DEFAULT_CTX):
    if l < 0:
        raise ValueError("iterate count must be >= 0")
    with ctx.workprec():
        x = mp.mpf(x)
        for _ in range(l):
            x = x - _sin2pi(x) / 5
        return x


def s_gate(t, ctx: RealContext = DEFAULT_CTX):
    """Clock s(t) = (sin²(2πt) + sin(2πt))/2: in [0,1] on [0,1/2], in [-1/8,0] after."""
    with ctx.workprec():
        w = _sin2pi(mp.mpf(t))
        return (w * w + w) / 2


def gate_phi(t, y, ctx: RealContext = DEFAULT_CTX):
    """Analytic gate φ(t,y) = Ψ(s(t), y), 1-periodic in t."""
    with ctx.workprec():
        return psi_correct(s_gate(t, ctx), y, ctx)


# ---------------------------------------------------------------------------
# Bump CDFs: the accumulator v, the staircase r and the switch ξ
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Piece:
    a: mp.mpf
    b: mp.mpf
    offset: mp.mpf              # cumulative mass strictly before this piece
    cheb: tuple                 # local antiderivative, cheb[0] halved in eval


@dataclass(frozen=True)
class _BumpCdf:
    """Normalized CDF of a positive C∞ bump on [lo, hi].

    Exact 0/1 on the plateaus.  The bump is C∞-flat at both endpoints, so
    the fit uses dyadically graded pieces toward them: each piece is then
    analytic with a uniform Bernstein radius and a modest Chebyshev degree
    reaches far below the consumers' tolerances.  Fit accuracy is tracked
    in `tail`.
    """

    lo: mp.mpf
    hi: mp.mpf
    inv_mass: mp.mpf            # 1 / ∫ bump
    pieces: tuple
    tail: mp.mpf                # accuracy estimate for rise()
    bits: int

    def rise(self, x):
        if x <= self.lo:
            return mp.mpf(0)
        if x >= self.hi:
            return mp.mpf(1)
        pieces = self.pieces
        if x < pieces[0].a:      # dead zone at the flat left end
            return mp.mpf(0)
        if x >= pieces[-1].b:    # dead zone at the flat right end
            return mp.mpf(1)
        i = bisect.bisect_right([p.a for p in pieces], x) - 1
        p = pieces[max(0, i)]
        u = (2 * x - p.a - p.b) / (p.b - p.a)
        b1, b2 = mp.mpf(0), mp.mpf(0)
        for c in reversed(p.cheb[1:]):
            b1, b2 = 2 * u * b1 - b2 + c, b1
        local = u * b1 - b2 + p.cheb[0] / 2
        val = (p.offset + local) * self.inv_mass
        return min(max(val, mp.mpf(0)), mp.mpf(1))


def _fit_piece_antiderivative(bump, a, b, n, tab):
    """Local Chebyshev antiderivative on [a, b] with G(a) = 0.

    Returns (coefficients with c0 halved at eval, local mass, tail bound).
    """
    mid, half = (a + b) / 2, (b - a) / 2
    vals = [bump(mid + half * tab[(2 * j + 1) % (4 * n)]) for j in range(n)]
    coeff = [
        2 * mp.fsum(vals[j] * tab[(m * (2 * j + 1)) % (4 * n)] for j in range(n)) / n
        for m in range(n)
    ]
    C = [mp.mpf(0)] * (n + 1)
    for m in range(1, n + 1):
        bm1 = coeff[m - 1]
        bp1 = coeff[m + 1] if m + 1 < n else mp.mpf(0)
        C[m] = (bm1 - bp1) * half / (2 * m)
    g0 = -mp.fsum(C[m] * (-1) ** m for m in range(1, n + 1))
    mass = g0 + mp.fsum(C[m] for m in range(1, n + 1))
    tail = max(abs(c) for c in coeff[-4:]) * (b - a)
    # trim negligible high-order terms (keeps Clenshaw short mid-interval)
    cut = len(C)
    floor = max(tail, mp.mpf(2) ** (-4 * n))
    while cut > 8 and abs(C[cut - 1]) < floor / 16:
        cut -= 1
    return [2 * g0] + C[1:cut], mass, tail


def _build_cdf(bump, lo, hi, ctx: RealContext, degree: int = 96,
               grade_bits: int = 11) -> _BumpCdf:
    """Graded piecewise Chebyshev fit of the bump, integrated analytically."""
    bits = ctx.precision_bits
    work = bits + 48
    with mp.workprec(work):
        lo, hi = mp.mpf(lo), mp.mpf(hi)
        span = hi - lo
        n = degree
        tab = [mp.cospi(mp.mpf(i) / (2 * n)) for i in range(4 * n)]
        cuts = [lo + span * mp.mpf(2) ** (-k) for k in range(grade_bits, 0, -1)]
        cuts += [hi - span * mp.mpf(2) ** (-k) for k in range(2, grade_bits + 1)]
        pieces = []
        offset = mp.mpf(0)
        tail = mp.mpf(0)
        for a, b in zip(cuts, cuts[1:]):
            cheb, mass, ptail = _fit_piece_antiderivative(bump, a, b, n, tab)
            pieces.append(_Piece(a=a, b=b, offset=offset, cheb=tuple(cheb)))
            offset += mass
            tail = max(tail, ptail)
        total = offset
        inv_mass = 1 / total
        return _BumpCdf(lo=lo, hi=hi, inv_mass=+inv_mass, pieces=tuple(pieces),
                        tail=+(tail * inv_mass), bits=bits)


@dataclass(frozen=True)
class KernelParams:
    """Normalizing constants and contraction factor at the working precision."""

    lambda_quarter: mp.mpf     # 0.4π - 1
    c_bar: mp.mpf              # (∫₀¹ θ(-sin 2πx) dx)⁻¹
    c_xi: mp.mpf               # (∫ θ(-(x-1/4)(x-3/4)) dx)⁻¹
    v_cdf: _BumpCdf
    xi_cdf: _BumpCdf


_PARAMS_CACHE: dict[int, KernelParams] = {}


def kernel_params(ctx: RealContext = DEFAULT_CTX) -> KernelParams:
    bits = ctx.precision_bits
    if bits in _PARAMS_CACHE:
        return _PARAMS_CACHE[bits]
    with ctx.workprec():
        lam = mp.mpf(2) * mp.pi / 5 - 1

        # bumps evaluated at the ambient (quadrature guard) precision
        def v_bump(x):
            s = mp.sinpi(2 * x)
            return mp.exp(1 / s) if s < 0 else mp.mpf(0)

        def xi_bump(x):
            g = -(x - mp.mpf(1) / 4) * (x - mp.mpf(3) / 4)
            return mp.exp(-1 / g) if g > 0 else mp.mpf(0)

        v_cdf = _build_cdf(v_bump, mp.mpf(1) / 2, mp.mpf(1), ctx)
        xi_cdf = _build_cdf(xi_bump, mp.mpf(1) / 4, mp.mpf(3) / 4, ctx)
        params = KernelParams(
            lambda_quarter=lam,
            c_bar=v_cdf.inv_mass,
            c_xi=xi_cdf.inv_mass,
            v_cdf=v_cdf,
            xi_cdf=xi_cdf,
        )
    _PARAMS_CACHE[bits] = params
    return params


def v_accum(x, ctx: RealContext = DEFAULT_CTX):
    """v(0)=0, v'(x) = c̄ θ(-sin 2πx): the plateau v(x)=n on [n, n+1/2]."""
    with ctx.workprec():
        x = mp.mpf(x)
        n = mp.floor(x)
        fr = x - n
        if fr <= mp.mpf(1) / 2:
            return n
        return n + kernel_params(ctx).v_cdf.rise(fr)


def r_floor(x, ctx: RealContext = DEFAULT_CTX):
    """Staircase r(x) = v(x + 1/4): exactly n on [n - 1/4, n + 1/4]."""
    with ctx.workprec():
        return v_accum(mp.mpf(x) + mp.mpf(1) / 4, ctx)


def xi(x, ctx: RealContext = DEFAULT_CTX):
    """Monotone C∞ switch: 0 for x <= 1/4, 1 for x >= 3/4."""
    with ctx.workprec():
        x = mp.mpf(x)
        if x <= mp.mpf(1) / 4:
            return mp.mpf(0)
        if x >= mp.mpf(3) / 4:
            return mp.mpf(1)
        return kernel_params(ctx).xi_cdf.rise(x)


def v_accum_quad(x, ctx: RealContext = DEFAULT_CTX, tol="1e-40"):
    """Direct-quadrature evaluation of v (no Chebyshev cache); test oracle."""
    with ctx.workprec():
        x = mp.mpf(x)
        n = mp.floor(x)
        fr = x - n
        if fr <= mp.mpf(1) / 2:
            return n
        params = kernel_params(ctx)
        q = quad_adaptive(lambda s: theta(-_sin2pi(s), ctx), mp.mpf(1) / 2, fr,
                          mp.mpf(tol), ctx)
        return n + params.c_bar * q


# ---------------------------------------------------------------------------
# Interval variants
# ---------------------------------------------------------------------------


def _to_interval(x) -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval.point(mp.mpf(x))


def theta_iv(x: Interval, bits: int) -> Interval:
    """Enclosure of θ; monotone, so endpoint evaluation is rigorous up to
    the rounding of exp, widened through iv."""
    x = _to_interval(x)
    if x.hi <= 0:
        return Interval(mp.mpf(0), mp.mpf(0))
    with iv_prec(bits):
        hi_iv = iv.exp(-1 / iv.mpf(x.hi))
        hi = Interval.from_iv(hi_iv).hi
        if x.lo <= 0:
            lo = mp.mpf(0)
        else:
            lo = Interval.from_iv(iv.exp(-1 / iv.mpf(x.lo))).lo
    return Interval(lo, hi)


def _sin2pi_iv(x: Interval, bits: int) -> Interval:
    with iv_prec(bits):
        xi_ = x.to_iv(bits)
        return Interval.from_iv(iv.sin(2 * iv.pi * xi_))


def _psi_iv_direct(x: Interval, y: Interval, bits: int) -> Interval:
    with iv_prec(bits):
        xi_, yi_ = x.to_iv(bits), y.to_iv(bits)
        s = iv.sin(2 * iv.pi * xi_)
        damp = 1 - iv.exp(-yi_ - 2)
        arg = Interval.from_iv(s * damp)
        asn = iv_asin(arg, bits, clip=True).to_iv(bits)
        return Interval.from_iv(xi_ - asn / (2 * iv.pi))


def psi_minus_k_iv(x: Interval, k: int, y: Interval, bits: int) -> Interval:
    """Tight enclosure of Ψ(x, y) - k for integer k.

    Uses the exact identity Ψ(k+δ, y) - k = Ψ(δ, y): the integer shift is
    exact in interval arithmetic and sin(2πx) = sin(2π(x-k)), so enclosure
    widths scale with |x-k| rather than |k| (needed to certify the
    contraction at large k and y).
    """
    x, y = _to_interval(x), _to_interval(y)
    with iv_prec(bits):
        dx = x.to_iv(bits) - mp.mpf(k)
        yi_ = y.to_iv(bits)
        s = iv.sin(2 * iv.pi * dx)
        damp = 1 - iv.exp(-yi_ - 2)
        arg = Interval.from_iv(s * damp)
        asn = iv_asin(arg, bits, clip=True).to_iv(bits)
        return Interval.from_iv(dx - asn / (2 * iv.pi))


def psi_correct_iv(x: Interval, y: Interval, bits: int) -> Interval:
    """Rigorous enclosure of Ψ(x, y).

    Wide x boxes lying inside (k-1/4, k+1/4) additionally go through the
    mean-value form Ψ(x) ∈ Ψ(mid) + ∂ₓΨ(box)·(x - mid), with the derivative
    written as 1 - (1-e^(-y-2))/sqrt(1 + q·tan²(2πx)), q = e^(-y-2)(2-e^(-y-2)).
    That form keeps the sin/cos correlation, so the enclosure stays e^(-y)-thin;
    the two enclosures are intersected.
    """
    x, y = _to_interval(x), _to_interval(y)
    direct = _psi_iv_direct(x, y, bits)
    if x.lo == x.hi:
        return direct
    with mp.workprec(bits):
        k = mp.nint(x.mid)
        quarter = mp.mpf(1) / 4
        if not (x.lo > k - quarter and x.hi < k + quarter):
            return direct
    base = _psi_iv_direct(Interval.point(x.mid), y, bits)
    with iv_prec(bits):
        xs = iv.mpf([x.lo - k, x.hi - k])  # shifted box inside (-1/4, 1/4)
        yi_ = y.to_iv(bits)
        ed = iv.exp(-yi_ - 2)
        q = ed * (2 - ed)
        tn = iv.tan(2 * iv.pi * xs)
        deriv = 1 - (1 - ed) / iv.sqrt(1 + q * tn * tn)
        dx = iv.mpf([x.lo, x.hi]) - iv.mpf([x.mid, x.mid])
        centered = Interval.from_iv(base.to_iv(bits) + deriv * dx)
    try:
        return iv_intersect(direct, centered)
    except ValueError:
        return direct


def sigma_iv(x: Interval, bits: int) -> Interval:
    x = _to_interval(x)
    with iv_prec(bits):
        xi_ = x.to_iv(bits)
        s = iv.sin(2 * iv.pi * xi_)
        return Interval.from_iv(xi_ - s / 5)


def s_gate_iv(t: Interval, bits: int) -> Interval:
    t = _to_interval(t)
    with iv_prec(bits):
        w = iv.sin(2 * iv.pi * t.to_iv(bits))
        return Interval.from_iv((w * w + w) / 2)


def gate_phi_iv(t: Interval, y: Interval, bits: int) -> Interval:
    return psi_correct_iv(s_gate_iv(t, bits), _to_interval(y), bits)


def _monotone_cdf_iv(value_fn, x: Interval, ctx: RealContext, cdf_attr: str) -> Interval:
    """Enclosure of a nondecreasing kernel from endpoint values widened by
    the Chebyshev-fit slack (empirical enclosure; plateaus stay exact)."""
    with ctx.workprec():
        lo = value_fn(x.lo, ctx)
        hi = lo if x.hi == x.lo else value_fn(x.hi, ctx)
        cdf = getattr(kernel_params(ctx), cdf_attr)
        pad = 16 * cdf.tail + mp.mpf(2) ** (-ctx.precision_bits + 16)
        return Interval(lo - pad, hi + pad)


def r_floor_iv(x: Interval, ctx: RealContext = DEFAULT_CTX) -> Interval:
    return _monotone_cdf_iv(r_floor, _to_interval(x), ctx, "v_cdf")


def xi_iv(x: Interval, ctx: RealContext = DEFAULT_CTX) -> Interval:
    return _monotone_cdf_iv(xi, _to_interval(x), ctx, "xi_cdf")
