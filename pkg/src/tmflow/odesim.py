"""Continuous-time machinery: the targeting equation (exact and
perturbed), the C∞ two-phase iteration ODE, the analytic 2-D simulation
ODE with its gate exponents, and the 4-state ODE realizations of the
unpairing components J_2,1 / J_2,2.

Phase conventions: gates driven by θ(±sin 2πt) vanish identically on
their off half-periods, so those right-hand-side components are skipped
exactly; the analytic gates φ(±t, y) are merely e^(-y)-small there and are
always evaluated.
"""

from __future__ import annotations

import random as _random
from dataclasses import dataclass

from mpmath import mp

from .encoding import encode_config, psi
from .kernels import gate_phi, r_floor, sigma_iter, theta, xi
from .numerics import DEFAULT_CTX, IvpSpec, RealContext, Trajectory, quad_adaptive, solve_ivp
from .robustmap import CompiledMap, NoiseSpec, compile_map
from .tm import TuringMachine, initial_config, run_n

__all__ = [
    "TargetingSpec",
    "target_solve",
    "target_perturbed",
    "iterate_ode",
    "SimulationParams",
    "simulate_2d",
    "verify_windows",
    "halting_persistence",
    "omega_tilde",
    "omega_tilde_trajectory",
    "omega_tilde_read",
    "noise_handle",
]

_C_TILDE_DEFAULT = 206


@dataclass(frozen=True)
class TargetingSpec:
    """Targeting equation y' = c (b - y)³ φ(t) on [t0, t1].

    The gain must satisfy c >= 1 / (2 γ² ∫φ); `make` computes the minimal
    admissible gain when none is given.
    """

    b: mp.mpf
    gamma: mp.mpf
    t0: mp.mpf
    t1: mp.mpf
    phi: object
    c: mp.mpf
    rho: mp.mpf = mp.mpf(0)
    delta: mp.mpf = mp.mpf(0)

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise ValueError("need t1 > t0")
        if not self.gamma > 0:
            raise ValueError("targeting error gamma must be positive")
        if self.rho < 0 or self.delta < 0:
            raise ValueError("perturbation bounds must be >= 0")

    @classmethod
    def make(cls, b, gamma, t0, t1, phi, c=None, rho=0, delta=0,
             ctx: RealContext = DEFAULT_CTX, quad_tol="1e-25") -> "TargetingSpec":
        with ctx.workprec():
            b, gamma = mp.mpf(b), mp.mpf(gamma)
            t0, t1 = mp.mpf(t0), mp.mpf(t1)
            mass = quad_adaptive(phi, t0, t1, mp.mpf(quad_tol), ctx)
            if not mass > 0:
                raise ValueError("gate integral over [t0, t1] must be positive")
            c_min = 1 / (2 * gamma ** 2 * mass)
            if c is None:
                c = c_min * (1 + mp.mpf("1e-8"))
            else:
                c = mp.mpf(c)
                if c < c_min:
                    raise ValueError(f"gain {c} below the admissible minimum {c_min}")
            return cls(b=b, gamma=gamma, t0=t0, t1=t1, phi=phi, c=c,
                       rho=mp.mpf(rho), delta=mp.mpf(delta))


def target_solve(spec: TargetingSpec, y0, ctx: RealContext = DEFAULT_CTX,
                 abs_tol="1e-14", rel_tol="1e-14", max_step="1e-2") -> Trajectory:
    """Integrate the unperturbed targeting equation from y(t0) = y0."""
    with ctx.workprec():
        def rhs(t, y):
            return (spec.c * (spec.b - y[0]) ** 3 * spec.phi(t),)

        ivp = IvpSpec.make(rhs, spec.t0, (y0,), abs_tol=abs_tol, rel_tol=rel_tol,
                           max_step=max_step, ctx=ctx)
        return solve_ivp(ivp, spec.t1, ctx)


def target_perturbed(spec: TargetingSpec, y0, bbar, E,
                     ctx: RealContext = DEFAULT_CTX,
                     abs_tol="1e-14", rel_tol="1e-14", max_step="1e-2") -> Trajectory:
    """Integrate z' = c (b̄(t) - z)³ φ(t) + E(t); |b̄-b| <= ρ and |E| <= δ
    are the caller's obligations, checked here by sampling."""
    with ctx.workprec():
        for t in (spec.t0, (spec.t0 + spec.t1) / 2, spec.t1):
            if abs(bbar(t) - spec.b) > spec.rho + mp.mpf("1e-30"):
                raise ValueError("target wobble exceeds rho")
            if abs(E(t)) > spec.delta + mp.mpf("1e-30"):
                raise ValueError("additive noise exceeds delta")

        def rhs(t, y):
            return (spec.c * (bbar(t) - y[0]) ** 3 * spec.phi(t) + E(t),)

        ivp = IvpSpec.make(rhs, spec.t0, (y0,), abs_tol=abs_tol, rel_tol=rel_tol,
                           max_step=max_step, ctx=ctx)
        return solve_ivp(ivp, spec.t1, ctx)


# ---------------------------------------------------------------------------
# Two-phase map iteration (C∞ gates)
# ---------------------------------------------------------------------------


def iterate_ode(f_tilde, x0, t_end, ctx: RealContext = DEFAULT_CTX,
                c_tilde=_C_TILDE_DEFAULT, abs_tol="1e-12", rel_tol="1e-12",
                max_step="1e-2", blowup_ceiling="1e120") -> Trajectory:
    """Iterate a map with the gated pair
    z1' = c̃ (f̃(r(z2)) - z1)³ θ(sin 2πt), z2' = c̃ (r(z1) - z2)³ θ(-sin 2πt).

    From z1(0) = z2(0) = x0 ∈ ℕ, z2 holds the k-th iterate on [k, k+1/2].
    """
    with ctx.workprec():
        x0 = mp.mpf(x0)
        if x0 != mp.nint(x0):
            raise ValueError("iteration ODE starts on an integer")
        ct = mp.mpf(c_tilde)

        def rhs(t, z):
            w = mp.sinpi(2 * t)
            d1 = mp.mpf(0)
            d2 = mp.mpf(0)
            if w > 0:
                gate = mp.exp(-1 / w)
                d1 = ct * (f_tilde(r_floor(z[1], ctx)) - z[0]) ** 3 * gate
            elif w < 0:
                gate = mp.exp(1 / w)
                d2 = ct * (r_floor(z[0], ctx) - z[1]) ** 3 * gate
            return (d1, d2)

        ivp = IvpSpec.make(rhs, 0, (x0, x0), abs_tol=abs_tol, rel_tol=rel_tol,
                           max_step=max_step, ctx=ctx)
        return solve_ivp(ivp, t_end, ctx, blowup_ceiling=blowup_ceiling)


# ---------------------------------------------------------------------------
# The 2-D simulation ODE
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimulationParams:
    """Constants of the 2-D simulation: targeting error γ, RHS noise bound
    δ, window tolerance η = (γ+δ)/2 + 1/5, contraction depth l with
    |σ^[l](η)| <= γ, and gains c1 = c2 = 4/γ²."""

    gamma: mp.mpf
    delta: mp.mpf
    eta: mp.mpf
    l: int
    c1: mp.mpf
    c2: mp.mpf

    def __post_init__(self):
        fifth = mp.mpf(1) / 5
        if not (self.gamma > 0 and 2 * self.gamma + self.delta / 2 <= fifth + mp.mpf("1e-40")):
            raise ValueError("need 2γ + δ/2 <= 1/5")
        if not self.eta < 2 * fifth:
            raise ValueError("need η < 2/5")

    @classmethod
    def from_delta(cls, delta, ctx: RealContext = DEFAULT_CTX) -> "SimulationParams":
        with ctx.workprec():
            delta = mp.mpf(delta)
            if not 0 <= delta < mp.mpf(2) / 5:
                raise ValueError("delta must lie in [0, 2/5)")
            gamma = (mp.mpf(1) / 5 - delta / 2) / 2
            eta = (gamma + delta) / 2 + mp.mpf(1) / 5
            l = 1
            while abs(sigma_iter(eta, l, ctx)) > gamma:
                l += 1
                if l > 64:
                    raise ValueError("no contraction depth reaches gamma")
            c = 4 / gamma ** 2
            return cls(gamma=gamma, delta=delta, eta=eta, l=l, c1=c, c2=c)


def noise_handle(spec: NoiseSpec | None, ctx: RealContext = DEFAULT_CTX, salt: int = 0):
    """Smooth |E(t)| <= δ realization of a NoiseSpec for ODE right sides."""
    if spec is None or spec.mode == "none" or spec.delta == 0:
        return lambda t: mp.mpf(0)
    with ctx.workprec():
        d = mp.mpf(spec.delta)
    if spec.mode == "plus":
        return lambda t: d
    if spec.mode == "minus":
        return lambda t: -d
    if spec.mode == "alternating":
        return lambda t: d * mp.cospi(2 * t)
    rng = _random.Random(1000003 * spec.seed + salt)
    omega = 2 + 4 * mp.mpf(rng.random())
    phase = 2 * mp.mpf(rng.random())
    return lambda t: d * mp.cospi(omega * t + phase)


def simulation_rhs(machine: TuringMachine, params: SimulationParams,
                   noise: NoiseSpec | None = None,
                   ctx: RealContext = DEFAULT_CTX, smooth: bool = False):
    """The 2-D simulation right-hand side g(t, z) as a callable.

    Built unguarded: the field is total (junk codes are fixed points), so
    trial stages with wild values yield huge-but-finite derivatives rather
    than exceptions.  With `smooth`, the analytic gates Ψ(s(±t), ·) are
    replaced by the C∞ staircase r(s(±t)), which vanishes identically on
    the off phase.  Returns (rhs, compiled_map).
    """
    cmap = compile_map(machine, params.eta / 2, ctx=ctx, smooth=smooth,
                       guarded=False)
    l, c1, c2, gamma = params.l, params.c1, params.c2, params.gamma
    e1 = noise_handle(noise, ctx, salt=1)
    e2 = noise_handle(noise, ctx, salt=2)

    def gate(tt, y):
        if smooth:
            w = mp.sinpi(2 * tt)
            return r_floor((w * w + w) / 2, ctx)
        return gate_phi(tt, y, ctx)

    def rhs(t, z):
        z1, z2 = z
        target1 = sigma_iter(cmap.apply(sigma_iter(z2, l, ctx)), l, ctx)
        q1 = z1 - target1
        y1 = c1 / gamma * q1 ** 4 + c1 / gamma + 10
        phi1 = gate(t, y1)
        d1 = c1 * (target1 - z1) ** 3 * phi1 + e1(t)
        target2 = sigma_iter(z1, l, ctx)
        q2 = z2 - target2
        y2 = c2 / gamma * q2 ** 4 + c2 / gamma + 10
        phi2 = gate(-t, y2)
        d2 = c2 * (target2 - z2) ** 3 * phi2 + e2(t)
        return (d1, d2)

    return rhs, cmap


def simulate_2d(machine: TuringMachine, params: SimulationParams, x0bar, y0bar,
                steps: int, noise: NoiseSpec | None = None,
                ctx: RealContext = DEFAULT_CTX, smooth: bool = False,
                abs_tol="1e-10", rel_tol="1e-10", max_step="1e-2",
                blowup_ceiling="1e120"):
    """Integrate the gated 2-D simulation ODE for `steps` time units.

    Returns (trajectory, compiled_map).  The inner 1-D map runs with noise
    budget η/2; gate exponents follow the quartic form that pins the
    off-phase drift below (γ+δ)/2 per half unit.
    """
    with ctx.workprec():
        rhs, cmap = simulation_rhs(machine, params, noise, ctx, smooth)
        ivp = IvpSpec.make(rhs, 0, (x0bar, y0bar), abs_tol=abs_tol, rel_tol=rel_tol,
                           max_step=max_step, ctx=ctx)
        traj = solve_ivp(ivp, steps, ctx, blowup_ceiling=blowup_ceiling)
        return traj, cmap


def _window_sup(traj: Trajectory, lo, hi, component: int, target, probes: int):
    """Sup of |state[component] - target| over probes plus stored nodes."""
    sup = mp.mpf(0)
    for i in range(probes):
        t = lo + (hi - lo) * mp.mpf(2 * i + 1) / (2 * probes)
        sup = max(sup, abs(traj.value(t)[component] - target))
    for t in (lo, hi):
        sup = max(sup, abs(traj.value(t)[component] - target))
    for seg in traj.segments:
        if lo <= seg.t0 <= hi:
            sup = max(sup, abs(seg.y0[component] - target))
    return sup


def verify_windows(traj: Trajectory, machine: TuringMachine, x0: int,
                   params: SimulationParams, steps: int, probes: int = 8,
                   ctx: RealContext = DEFAULT_CTX):
    """Per-window report: sup over [j, j+1/2] of |z2(t) - psi^[j](x0)|."""
    with ctx.workprec():
        code = x0
        report = []
        for j in range(steps + 1):
            lo, hi = mp.mpf(j), mp.mpf(j) + mp.mpf(1) / 2
            if hi > traj.t_end:
                break
            sup = _window_sup(traj, lo, hi, 1, mp.mpf(code), probes)
            report.append({
                "j": j,
                "expected_code": code,
                "sup_error": sup,
                "eta": params.eta,
                "pass": bool(sup <= params.eta),
            })
            code = psi(machine, code)
        return report


def halting_persistence(traj: Trajectory, machine: TuringMachine, x0: int,
                        probes_per_unit: int = 16,
                        ctx: RealContext = DEFAULT_CTX):
    """After the halting step n0, sup over t >= n0 + 1/2 of |z2 - c_h|.

    Returns (n0, halted_code, sup); meaningful for δ = 0 runs, where the
    bound 1/5 holds for all later times.
    """
    with ctx.workprec():
        halt_idx = machine.state_index(machine.halt)
        code, n0 = x0, 0
        from .encoding import decode_config
        while decode_config(machine, code).q != halt_idx:
            code = psi(machine, code)
            n0 += 1
            if n0 > 10_000:
                raise ValueError("machine did not halt within 10000 steps")
        start = mp.mpf(n0) + mp.mpf(1) / 2
        if start > traj.t_end:
            raise ValueError("trajectory ends before the halting window")
        n_probes = int(probes_per_unit * float(traj.t_end - start)) + 2
        sup = mp.mpf(0)
        for i in range(n_probes + 1):
            t = start + (traj.t_end - start) * mp.mpf(i) / n_probes
            sup = max(sup, abs(traj.value(t)[1] - code))
        for seg in traj.segments:
            if seg.t0 >= start:
                sup = max(sup, abs(seg.y0[1] - code))
        return n0, code, sup


# ---------------------------------------------------------------------------
# ODE realizations of the unpairing components
# ---------------------------------------------------------------------------


def _omega_rhs(which: str, reading: str, ct, ctx: RealContext):
    if which not in ("J21", "J22"):
        raise ValueError("which must be J21 or J22")
    if reading not in ("corrected", "printed"):
        raise ValueError("reading must be corrected or printed")

    def rhs(t, state):
        x1, x2, s1, s2 = state
        w = mp.sinpi(2 * t)
        if w > 0:
            gate = mp.exp(-1 / w)
            rx2, rs2 = r_floor(x2, ctx), r_floor(s2, ctx)
            if which == "J21":
                tx1 = xi(rs2 - rx2, ctx) * (1 + rx2)
                ts1 = rs2 + xi(rx2 + 1 - rs2, ctx)
            else:
                xi_up, xi_dn = xi(x2, ctx), xi(1 - x2, ctx)
                tx1 = xi_up * (rx2 - 1) + xi_dn * (1 + rs2)
                if reading == "corrected":
                    ts1 = xi_up * rs2 + xi_dn * (rs2 + 1)
                else:
                    ts1 = xi_up * (rs2 + xi_dn * (rs2 + 1))
            return (ct * (tx1 - x1) ** 3 * gate, mp.mpf(0),
                    ct * (ts1 - s1) ** 3 * gate, mp.mpf(0))
        if w < 0:
            gate = mp.exp(1 / w)
            if reading == "corrected":
                d2 = ct * (r_floor(x1, ctx) - x2) ** 3 * gate
                ds2 = ct * (r_floor(s1, ctx) - s2) ** 3 * gate
            else:
                d2 = ct * (r_floor(x1, ctx) - x1) ** 3 * gate
                ds2 = ct * (r_floor(s1, ctx) - s1) ** 3 * gate
            return (mp.mpf(0), d2, mp.mpf(0), ds2)
        return (mp.mpf(0),) * 4

    return rhs


def omega_tilde_trajectory(which: str, t_end, ctx: RealContext = DEFAULT_CTX,
                           reading: str = "corrected", c_tilde=_C_TILDE_DEFAULT,
                           abs_tol="1e-12", rel_tol="1e-12",
                           max_step="1e-2") -> Trajectory:
    """Integrate the 4-state gated ODE from the all-zero state."""
    with ctx.workprec():
        rhs = _omega_rhs(which, reading, mp.mpf(c_tilde), ctx)
        ivp = IvpSpec.make(rhs, 0, (0, 0, 0, 0), abs_tol=abs_tol, rel_tol=rel_tol,
                           max_step=max_step, ctx=ctx)
        return solve_ivp(ivp, t_end, ctx)


def omega_tilde_read(traj: Trajectory, z, ctx: RealContext = DEFAULT_CTX):
    """Wrapped read: σ(x2(z + 1/4)); |result - J(n)| <= 1/5 for |z-n| <= 1/4."""
    with ctx.workprec():
        z = mp.mpf(z)
        if z < -mp.mpf(1) / 4:
            raise ValueError("need z >= -1/4")
        return sigma_iter(traj.value(z + mp.mpf(1) / 4)[1], 1, ctx)


def omega_tilde(which: str, z, ctx: RealContext = DEFAULT_CTX,
                reading: str = "corrected", **solver_kw):
    """One-shot Ω̄_{2,i}(z) = σ(Ω̃_{2,i}(z + 1/4)) from a fresh integration."""
    with ctx.workprec():
        z = mp.mpf(z)
        if z < -mp.mpf(1) / 4:
            raise ValueError("need z >= -1/4")
        t_read = z + mp.mpf(1) / 4
        if t_read == 0:
            return mp.mpf(0)
        traj = omega_tilde_trajectory(which, t_read, ctx, reading, **solver_kw)
        return sigma_iter(traj.value(t_read)[1], 1, ctx)
