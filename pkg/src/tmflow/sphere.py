"""Transport of a planar simulating field onto the sphere S^n:
stereographic projection, the pushforward frame, time reparametrization by
a positive factor K, and the extension of the field by zero through the
north pole.

Two K handles are provided.  `k_vanishing` (default) decays
superpolynomially in r, which is what makes the transported field extend
smoothly by 0 at the north pole; `k_printed` is the bounded variant, under
which finite planar horizons map to finite sphere horizons (used for orbit
correspondence runs).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from mpmath import mp

from .numerics import DEFAULT_CTX, IvpSpec, RealContext, Trajectory, solve_ivp

__all__ = [
    "NorthPoleError",
    "stereo",
    "stereo_inv",
    "pushforward",
    "k_printed",
    "k_vanishing",
    "reparam_field",
    "SphereField",
    "SphereTrajectory",
    "integrate_sphere",
    "tau_inv",
]


class NorthPoleError(ValueError):
    pass


def stereo(x, ctx: RealContext = DEFAULT_CTX) -> tuple:
    """Inverse stereographic projection ℝⁿ → Sⁿ ⊂ ℝ^(n+1)."""
    with ctx.workprec():
        x = tuple(mp.mpf(c) for c in x)
        r2 = mp.fsum(c * c for c in x)
        den = 1 + r2
        return ((r2 - 1) / den,) + tuple(2 * c / den for c in x)


def stereo_inv(y, ctx: RealContext = DEFAULT_CTX, np_guard=None) -> tuple:
    """Chart map Sⁿ \\ {NP} → ℝⁿ; raises NorthPoleError inside the guard."""
    with ctx.workprec():
        y = tuple(mp.mpf(c) for c in y)
        gap = 1 - y[0]
        if np_guard is None:
            np_guard = mp.mpf(2) ** (-(ctx.precision_bits // 2))
        if gap < np_guard:
            raise NorthPoleError(f"1 - y0 = {gap} inside the north-pole guard")
        return tuple(c / gap for c in y[1:])


def pushforward(f_values, y, ctx: RealContext = DEFAULT_CTX) -> tuple:
    """Pushforward of the planar vector f through the projection at y ∈ Sⁿ.

    Coefficient frame: component i contributes (1-y0)·yᵢ on ∂/∂y0,
    (1-y0-yᵢ²) on ∂/∂yᵢ and -yᵢ·yⱼ on the other ∂/∂yⱼ.  The result is
    tangent: <V, y> = 0 up to rounding whenever |y| = 1.
    """
    with ctx.workprec():
        f_values = tuple(mp.mpf(c) for c in f_values)
        y = tuple(mp.mpf(c) for c in y)
        n = len(f_values)
        if len(y) != n + 1:
            raise ValueError("dimension mismatch between field and point")
        y0, ys = y[0], y[1:]
        gap = 1 - y0
        v0 = mp.fsum(f_values[i] * gap * ys[i] for i in range(n))
        out = [v0]
        for j in range(n):
            acc = f_values[j] * (gap - ys[j] ** 2)
            acc -= ys[j] * mp.fsum(f_values[i] * ys[i] for i in range(n) if i != j)
            out.append(acc)
        return tuple(out)


def k_printed(x, ctx: RealContext = DEFAULT_CTX):
    """Bounded reparametrization factor exp(-2/(1+r²)) ∈ [e^-2, 1)."""
    with ctx.workprec():
        r2 = mp.fsum(mp.mpf(c) ** 2 for c in x)
        return mp.exp(-2 / (1 + r2))


def k_vanishing(x, ctx: RealContext = DEFAULT_CTX):
    """Superpolynomially decaying factor exp(-2(1+r²)); K(0) = e^-2.

    This is the orientation of K under which K·(polynomially bounded
    field) vanishes at the north pole together with its derivatives.
    """
    with ctx.workprec():
        r2 = mp.fsum(mp.mpf(c) ** 2 for c in x)
        return mp.exp(-2 * (1 + r2))


def reparam_field(f, K=k_vanishing, ctx: RealContext = DEFAULT_CTX):
    """h(t, x) = K(x)·f(t, x): the time-rescaled planar field."""
    def h(t, x):
        k = K(x, ctx)
        return tuple(k * c for c in f(t, x))
    return h


@dataclass(frozen=True)
class SphereField:
    """A planar simulating field transported to Sⁿ with reparametrization K."""

    base_rhs: object                 # planar f(t, x) -> tuple of length n
    n: int = 2
    K: object = k_vanishing
    ctx: RealContext = field(default=DEFAULT_CTX, compare=False)

    @property
    def north_pole(self) -> tuple:
        return (mp.mpf(1),) + (mp.mpf(0),) * self.n

    def np_gap_guard(self):
        with self.ctx.workprec():
            return mp.mpf(2) ** (-(self.ctx.precision_bits // 2))

    def value(self, t, y) -> tuple:
        """φ*(K·f)(t, y); exactly the zero vector inside the NP guard."""
        with self.ctx.workprec():
            y = tuple(mp.mpf(c) for c in y)
            if 1 - y[0] < self.np_gap_guard():
                return (mp.mpf(0),) * (self.n + 1)
            x = stereo_inv(y, self.ctx)
            k = self.K(x, self.ctx)
            fv = self.base_rhs(t, x)
            return pushforward(tuple(k * c for c in fv), y, self.ctx)


@dataclass(frozen=True)
class SphereTrajectory:
    """Sphere-time trajectory of the augmented state (τ, y).

    Built either from a chart integration (planar (τ, x̄) mapped through
    the projection) or from a direct ambient integration.
    """

    mode: str
    traj: Trajectory
    ctx: RealContext = field(default=DEFAULT_CTX, compare=False)

    @property
    def t_end(self):
        return self.traj.t_end

    def tau(self, s):
        return self.traj.value(s)[0]

    def planar(self, s) -> tuple:
        with self.ctx.workprec():
            st = self.traj.value(s)
            if self.mode == "chart":
                return st[1:]
            return stereo_inv(st[1:], self.ctx)

    def point(self, s) -> tuple:
        with self.ctx.workprec():
            st = self.traj.value(s)
            if self.mode == "chart":
                return stereo(st[1:], self.ctx)
            nrm = mp.sqrt(mp.fsum(c * c for c in st[1:]))
            return tuple(c / nrm for c in st[1:])

    def sphere_norm_drift(self, s):
        """|‖y(s)‖ - 1| of the raw ambient state (0 in chart mode)."""
        with self.ctx.workprec():
            if self.mode == "chart":
                return mp.mpf(0)
            st = self.traj.value(s)
            return abs(mp.sqrt(mp.fsum(c * c for c in st[1:])) - 1)


def integrate_sphere(F: SphereField, y0, t_end, mode: str = "chart",
                     ctx: RealContext | None = None,
                     abs_tol="1e-12", rel_tol="1e-12", max_step="1e-2",
                     renorm_span="0.25") -> SphereTrajectory:
    """Integrate the sphere flow to sphere-time t_end.

    chart mode integrates the planar reparametrized system (τ' = K,
    x̄' = K f(τ, x̄)) and maps through the projection (points exactly on
    the sphere); ambient mode integrates (τ, y) directly with periodic
    renormalization of y as the cross-check.
    """
    ctx = ctx or F.ctx
    if mode not in ("chart", "ambient"):
        raise ValueError("mode must be chart or ambient")
    with ctx.workprec():
        y0 = tuple(mp.mpf(c) for c in y0)
        if len(y0) != F.n + 1:
            raise ValueError("initial point dimension mismatch")
        t_end = mp.mpf(t_end)
        if mode == "chart":
            x0 = stereo_inv(y0, ctx)

            def rhs(s, state):
                tau, x = state[0], state[1:]
                k = F.K(x, ctx)
                fv = F.base_rhs(tau, x)
                return (k,) + tuple(k * c for c in fv)

            ivp = IvpSpec.make(rhs, 0, (mp.mpf(0),) + tuple(x0),
                               abs_tol=abs_tol, rel_tol=rel_tol,
                               max_step=max_step, ctx=ctx)
            traj = solve_ivp(ivp, t_end, ctx)
            return SphereTrajectory(mode="chart", traj=traj, ctx=ctx)

        def rhs(s, state):
            tau, y = state[0], state[1:]
            if 1 - y[0] < F.np_gap_guard():
                return (mp.mpf(0),) * (F.n + 2)
            x = stereo_inv(y, ctx)
            return (F.K(x, ctx),) + F.value(tau, y)

        span = mp.mpf(renorm_span)
        state = (mp.mpf(0),) + y0
        t = mp.mpf(0)
        segments = []
        base_spec = None
        while t < t_end:
            chunk_end = min(t_end, t + span)
            ivp = IvpSpec.make(rhs, t, state, abs_tol=abs_tol, rel_tol=rel_tol,
                               max_step=max_step, ctx=ctx)
            if base_spec is None:
                base_spec = ivp
            part = solve_ivp(ivp, chunk_end, ctx)
            segments.extend(part.segments)
            end_state = part.value(chunk_end)
            nrm = mp.sqrt(mp.fsum(c * c for c in end_state[1:]))
            state = (end_state[0],) + tuple(c / nrm for c in end_state[1:])
            t = chunk_end
        merged = Trajectory(spec=base_spec, segments=tuple(segments),
                            t_end=t_end, ctx=ctx)
        return SphereTrajectory(mode="ambient", traj=merged, ctx=ctx)


def tau_inv(planar_traj: Trajectory, a, K=k_vanishing,
            ctx: RealContext = DEFAULT_CTX,
            abs_tol="1e-14", rel_tol="1e-14", max_step="1e-1"):
    """τ⁻¹(a) from (τ⁻¹)'(u) = 1/K(x(u)), τ⁻¹(0) = 0, along the planar orbit.

    `planar_traj` is the unreparametrized planar solution (clock u); its
    horizon must reach a.
    """
    with ctx.workprec():
        a = mp.mpf(a)
        if a < 0:
            raise ValueError("need a >= 0")
        if a == 0:
            return mp.mpf(0)
        if a > planar_traj.t_end:
            raise ValueError("planar trajectory ends before the query time")

        def rhs(u, w):
            x = planar_traj.value(u)
            return (1 / K(x, ctx),)

        ivp = IvpSpec.make(rhs, 0, (0,), abs_tol=abs_tol, rel_tol=rel_tol,
                           max_step=max_step, ctx=ctx)
        return solve_ivp(ivp, a, ctx).value(a)[0]
