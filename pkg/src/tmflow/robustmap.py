"""Robust extensions of the encoded transition: the pairing extension
Υ_k, the exact-robust unpairing Ω, the reference 3-D extension of ψ, the
compiled one-dimensional map g = σ^[j] ∘ Υ₃ ∘ f ∘ Ω₃, and the perturbed
iteration verifier.

The reference extension realizes the robustness contracts with zero slack
(round to the nearest configuration, step exactly); the analytic pairing
extension Υ is evaluated in closed form, so the compiled map is exact on
integer codes and contracts everything within 1/5 of one.
"""

from __future__ import annotations

import random as _random
from dataclasses import dataclass, field

from mpmath import mp

from .encoding import pair2, psi3, unpair_k
from .kernels import psi_correct, r_floor, sigma_iter
from .numerics import DEFAULT_CTX, RealContext
from .tm import TuringMachine

__all__ = [
    "NotNearConfiguration",
    "NotNearInteger",
    "BadDelta",
    "NoiseSpec",
    "RobustExtension3",
    "f_ref",
    "upsilon_k",
    "omega_exact",
    "CompiledMap",
    "compile_map",
    "iterate_noisy",
    "decode_margin",
]


class NotNearConfiguration(ValueError):
    pass


class NotNearInteger(ValueError):
    pass


class BadDelta(ValueError):
    pass


def _near_guard(ctx: RealContext):
    # 1/5 plus precision slack: iterates may sit exactly on the contract edge
    return mp.mpf(1) / 5 + mp.mpf(2) ** (-ctx.precision_bits // 2)


@dataclass(frozen=True)
class RobustExtension3:
    """Reference realization of the 3-D robust extension contract."""

    machine: TuringMachine
    eps_in: mp.mpf = None
    tag: str = "reference"

    def __post_init__(self):
        if self.eps_in is None:
            object.__setattr__(self, "eps_in", mp.mpf(1) / 5)
        if not 0 < self.eps_in <= mp.mpf(1) / 5:
            raise ValueError("eps_in must lie in (0, 1/5]")

    def apply(self, x3, ctx: RealContext = DEFAULT_CTX):
        return f_ref(self.machine, x3, eps_in=self.eps_in, ctx=ctx)


def f_ref(machine: TuringMachine, x3, eps_in=None, ctx: RealContext = DEFAULT_CTX):
    """Round each coordinate, apply the exact encoded step, return exactly.

    Raises NotNearConfiguration when a coordinate is farther than eps_in
    from an integer or the rounded triple does not decode.
    """
    with ctx.workprec():
        if eps_in is None:
            eps_in = mp.mpf(1) / 5
        guard = eps_in + mp.mpf(2) ** (-ctx.precision_bits // 2)
        rounded = []
        for c in x3:
            c = mp.mpf(c)
            n = mp.nint(c)
            if abs(c - n) > guard or n < 0:
                raise NotNearConfiguration(f"coordinate {c} not within {eps_in} of a natural")
            rounded.append(int(n))
        y1, y2, q = rounded
        if not 1 <= q <= machine.m:
            raise NotNearConfiguration(f"rounded triple {rounded} does not decode")
        out = psi3(machine, (y1, y2, q))
        return tuple(mp.mpf(v) for v in out)


def upsilon_k(xs, ctx: RealContext = DEFAULT_CTX, smooth: bool = False):
    """Analytic extension of the pairing I_k (Υ₂ cascaded).

    Υ₂(x₁,x₂) = I₂(Ψ(x₁, 32(1+|x|₂²)), Ψ(x₂, 32(1+|x|₂²))); with `smooth`
    the corrector Ψ(x, y) is replaced by the C∞ staircase r(x).
    """
    xs = list(xs)
    if len(xs) < 2:
        raise ValueError("upsilon_k needs k >= 2")
    with ctx.workprec():
        def correct(x, ynorm):
            if smooth:
                return r_floor(x, ctx)
            return psi_correct(x, ynorm, ctx)

        def ups2(a, b):
            a, b = mp.mpf(a), mp.mpf(b)
            ynorm = 32 * (1 + a * a + b * b)
            ca, cb = correct(a, ynorm), correct(b, ynorm)
            return ((ca + cb) ** 2 + 3 * ca + cb) / 2

        acc = ups2(xs[0], xs[1])
        for x in xs[2:]:
            acc = ups2(acc, x)
        return acc


def omega_exact(x, k: int, i: int, ctx: RealContext = DEFAULT_CTX, guarded: bool = True):
    """Exact-robust unpairing: J_{k,i}(round(x)), zero slack.

    Satisfies |Ω_{k,i}(x) - J_{k,i}(n)| <= 1/5 whenever |x - n| <= 1/5
    (the value is exactly J of the rounded point).
    """
    if not 1 <= i <= k:
        raise ValueError("component index out of range")
    with ctx.workprec():
        x = mp.mpf(x)
        n = mp.nint(x)
        if guarded and (abs(x - n) > _near_guard(ctx) or n < 0):
            raise NotNearInteger(f"{x} not within 1/5 of a natural")
        n = max(0, int(n))
        return mp.mpf(unpair_k(n, k)[i - 1])


@dataclass
class CompiledMap:
    """The 1-D robust simulating map g = σ^[j] ∘ Υ₃ ∘ f ∘ (Ω₃,₁, Ω₃,₂, Ω₃,₃).

    The reference Ω and f stages depend only on round(x), so values are
    memoized by the rounded code; σ^[j] and Υ₃ are evaluated in closed form.
    """

    machine: TuringMachine
    delta_budget: mp.mpf
    j_contract: int
    ctx: RealContext = DEFAULT_CTX
    smooth: bool = False
    guarded: bool = True
    eps_in: mp.mpf = None
    _memo: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.eps_in is None:
            self.eps_in = mp.mpf(1) / 5

    def apply(self, x):
        with self.ctx.workprec():
            x = mp.mpf(x)
            n = mp.nint(x)
            if self.guarded and (abs(x - n) > _near_guard(self.ctx) or n < 0):
                raise NotNearConfiguration(f"{x} not within 1/5 of a code")
            key = max(0, int(n))
            val = self._memo.get(key)
            if val is None:
                triple = unpair_k(key, 3)
                if self.guarded and not 1 <= triple[2] <= self.machine.m:
                    raise NotNearConfiguration(f"code {key} does not decode")
                stepped = psi3(self.machine, triple)
                bar = upsilon_k([mp.mpf(v) for v in stepped], self.ctx, smooth=self.smooth)
                val = sigma_iter(bar, self.j_contract, self.ctx)
                self._memo[key] = val
            return val


def contract_depth(delta, ctx: RealContext = DEFAULT_CTX) -> int:
    """Minimal j with λ_{1/4}^j / 5 < 1/5 - δ."""
    with ctx.workprec():
        delta = mp.mpf(delta)
        lam = 2 * mp.pi / 5 - 1
        j = 1
        while lam ** j / 5 >= mp.mpf(1) / 5 - delta:
            j += 1
            if j > 10_000:
                raise BadDelta("no contraction depth satisfies the margin")
        return j


def compile_map(machine: TuringMachine, delta, ctx: RealContext = DEFAULT_CTX,
                smooth: bool = False, guarded: bool = True) -> CompiledMap:
    with ctx.workprec():
        delta = mp.mpf(delta)
        if not 0 <= delta < mp.mpf(1) / 5:
            raise BadDelta("delta must lie in [0, 1/5)")
        return CompiledMap(
            machine=machine,
            delta_budget=delta,
            j_contract=contract_depth(delta, ctx),
            ctx=ctx,
            smooth=smooth,
            guarded=guarded,
        )


@dataclass(frozen=True)
class NoiseSpec:
    """Per-step perturbation: seeded uniform, constant ±δ, or alternating."""

    mode: str
    delta: mp.mpf
    seed: int = 0

    _MODES = ("seeded", "plus", "minus", "alternating", "none")

    def __post_init__(self):
        if self.mode not in self._MODES:
            raise ValueError(f"mode must be one of {self._MODES}")
        object.__setattr__(self, "delta", mp.mpf(self.delta))
        if self.delta < 0:
            raise ValueError("noise delta must be >= 0")

    def samples(self, steps: int, ctx: RealContext = DEFAULT_CTX):
        with ctx.workprec():
            if self.mode == "none" or self.delta == 0:
                return [mp.mpf(0)] * steps
            if self.mode == "plus":
                return [+self.delta] * steps
            if self.mode == "minus":
                return [-self.delta] * steps
            if self.mode == "alternating":
                return [self.delta if j % 2 == 0 else -self.delta for j in range(steps)]
            rng = _random.Random(self.seed)
            return [self.delta * (2 * mp.mpf(rng.random()) - 1) for _ in range(steps)]


def iterate_noisy(cmap: CompiledMap, x0bar, steps: int, noise: NoiseSpec):
    """Iterate x -> g(x) + e_j with |e_j| <= δ; returns all iterates.

    The perturbed map stands in for any g with |g - g_M| <= δ in the map
    theorem; NotNearConfiguration failures carry the failing step index.
    """
    if noise.delta > cmap.delta_budget:
        raise BadDelta(
            f"noise magnitude {noise.delta} exceeds map budget {cmap.delta_budget}")
    ctx = cmap.ctx
    with ctx.workprec():
        xs = [mp.mpf(x0bar)]
        offsets = noise.samples(steps, ctx)
        for j in range(steps):
            try:
                nxt = cmap.apply(xs[-1]) + offsets[j]
            except NotNearConfiguration as exc:
                raise NotNearConfiguration(f"step {j}: {exc}") from exc
            xs.append(nxt)
        return xs


def decode_margin(x, ctx: RealContext = DEFAULT_CTX):
    """Nearest code and distance to it (the observability margin)."""
    with ctx.workprec():
        x = mp.mpf(x)
        n = int(mp.nint(x))
        return n, abs(x - n)
