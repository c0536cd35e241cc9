import random

import pytest
from mpmath import mp

from tmflow.encoding import encode_config, psi
from tmflow.numerics import IvpSpec, solve_ivp
from tmflow.odesim import SimulationParams, simulation_rhs
from tmflow.robustmap import decode_margin
from tmflow.sphere import (
    NorthPoleError,
    SphereField,
    SphereTrajectory,
    integrate_sphere,
    k_printed,
    k_vanishing,
    pushforward,
    reparam_field,
    stereo,
    stereo_inv,
    tau_inv,
)
from tmflow.tm import initial_config, load_machine


class TestStereo:
    def test_origin_maps_to_south_pole(self, ctx):
        with ctx.workprec():
            assert stereo((0, 0), ctx) == (-1, 0, 0)

    def test_roundtrip_random_points(self, ctx):
        rng = random.Random(2)
        with ctx.workprec():
            for _ in range(10_000):
                scale = mp.mpf(10) ** rng.randint(0, 6)
                x = (mp.mpf(rng.uniform(-1, 1)) * scale,
                     mp.mpf(rng.uniform(-1, 1)) * scale)
                back = stereo_inv(stereo(x, ctx), ctx)
                for a, b in zip(back, x):
                    assert abs(a - b) <= mp.mpf(2) ** -200 * max(1, abs(b))

    def test_image_is_unit(self, ctx):
        rng = random.Random(3)
        with ctx.workprec():
            for _ in range(300):
                x = (mp.mpf(rng.uniform(-100, 100)), mp.mpf(rng.uniform(-100, 100)))
                y = stereo(x, ctx)
                assert abs(mp.fsum(c * c for c in y) - 1) <= mp.mpf(2) ** -240

    def test_north_pole_guard(self, ctx):
        with pytest.raises(NorthPoleError):
            stereo_inv((1, 0, 0), ctx)


class TestPushforward:
    def test_zero_field_maps_to_zero(self, ctx):
        with ctx.workprec():
            y = stereo((3, 4), ctx)
            assert pushforward((0, 0), y, ctx) == (0, 0, 0)

    def test_constant_field_at_south_pole(self, ctx):
        # f=(1,0) at (-1,0,0): coefficients give exactly (0, 2, 0)
        with ctx.workprec():
            v = pushforward((1, 0), (-1, 0, 0), ctx)
            assert v == (0, 2, 0)

    def test_tangency_random(self, ctx):
        rng = random.Random(5)
        with ctx.workprec():
            for _ in range(2000):
                x = (mp.mpf(rng.uniform(-30, 30)), mp.mpf(rng.uniform(-30, 30)))
                y = stereo(x, ctx)
                f = (mp.mpf(rng.uniform(-1e6, 1e6)), mp.mpf(rng.uniform(-1e6, 1e6)))
                v = pushforward(f, y, ctx)
                assert abs(mp.fsum(a * b for a, b in zip(v, y))) < mp.mpf("1e-30")

    def test_dimension_guard(self, ctx):
        with pytest.raises(ValueError):
            pushforward((1, 0), (1, 0), ctx)


class TestK:
    def test_value_at_origin(self, ctx):
        with ctx.workprec():
            e2 = mp.exp(-2)
            assert abs(k_printed((0, 0), ctx) - e2) <= mp.mpf(2) ** -250
            assert abs(k_vanishing((0, 0), ctx) - e2) <= mp.mpf(2) ** -250

    def test_orientations(self, ctx):
        with ctx.workprec():
            # printed form is bounded below; vanishing form decays
            assert k_printed((100, 0), ctx) > mp.exp(-2)
            assert k_vanishing((100, 0), ctx) < mp.mpf("1e-4000")

    def test_reparam_scales_field(self, ctx):
        with ctx.workprec():
            f = lambda t, x: (mp.mpf(2), mp.mpf(-1))
            h = reparam_field(f, k_printed, ctx)
            k = k_printed((1, 1), ctx)
            assert h(0, (mp.mpf(1), mp.mpf(1))) == (2 * k, -k)


class TestSphereField:
    @staticmethod
    def _field(ctx, K):
        machine = load_machine("successor")
        params = SimulationParams.from_delta(0, ctx)
        rhs, _ = simulation_rhs(machine, params, None, ctx, smooth=True)
        return SphereField(base_rhs=rhs, n=2, K=K, ctx=ctx)

    def test_north_pole_value_is_exact_zero(self, ctx):
        with ctx.workprec():
            F = self._field(ctx, k_vanishing)
            assert F.value(0, (1, 0, 0)) == (0, 0, 0)
            near = (1 - mp.mpf(2) ** -200, mp.mpf(2) ** -101, 0)
            assert F.value(0, near) == (0, 0, 0)

    def test_norm_decays_toward_north_pole(self, ctx):
        with ctx.workprec():
            F = self._field(ctx, k_vanishing)
            norms = []
            for d in range(2, 6):
                gap = mp.mpf(10) ** -d
                y0 = 1 - gap
                y = (y0, mp.sqrt(1 - y0 * y0), mp.mpf(0))
                norms.append(max(abs(c) for c in F.value(mp.mpf("0.3"), y)))
            assert all(b < a for a, b in zip(norms, norms[1:]))

    def test_tangency_of_field_values(self, ctx):
        with ctx.workprec():
            F = self._field(ctx, k_printed)
            y = stereo((mp.mpf(8), mp.mpf(8)), ctx)
            v = F.value(mp.mpf("0.2"), y)
            assert abs(mp.fsum(a * b for a, b in zip(v, y))) < mp.mpf("1e-40")


class TestIntegration:
    def test_zero_field_constant_orbit(self, ctx):
        with ctx.workprec():
            F = SphereField(base_rhs=lambda t, x: (mp.mpf(0), mp.mpf(0)),
                            n=2, K=k_printed, ctx=ctx)
            y0 = stereo((2, 3), ctx)
            sph = integrate_sphere(F, y0, 1, mode="chart", ctx=ctx)
            end = sph.point(1)
            for a, b in zip(end, y0):
                assert abs(a - b) <= mp.mpf(2) ** -200
            # tau advances at rate K even when x is frozen
            assert sph.tau(1) > 0

    def _sim_setup(self, ctx):
        machine = load_machine("successor")
        params = SimulationParams.from_delta(0, ctx)
        rhs, _ = simulation_rhs(machine, params, None, ctx, smooth=True)
        x0 = encode_config(machine, initial_config(machine, "1")).c
        return machine, rhs, x0

    def test_orbit_correspondence_and_decode(self, ctx):
        machine, rhs, x0 = self._sim_setup(ctx)
        with ctx.workprec():
            horizon = mp.mpf("2.3")
            plain = solve_ivp(IvpSpec.make(rhs, 0, (mp.mpf(x0), mp.mpf(x0)),
                                           abs_tol="1e-12", rel_tol="1e-12",
                                           max_step="1e-2", ctx=ctx),
                              horizon, ctx)
            s_end = tau_inv(plain, horizon, k_printed, ctx)
            F = SphereField(base_rhs=rhs, n=2, K=k_printed, ctx=ctx)
            y0pt = stereo((mp.mpf(x0), mp.mpf(x0)), ctx)
            sph = integrate_sphere(F, y0pt, s_end, mode="chart", ctx=ctx)
            # planar orbit read through the sphere trajectory
            sup = mp.mpf(0)
            for i in range(1, 11):
                s = s_end * mp.mpf(i) / 10
                xs = sph.planar(s)
                xp = plain.value(min(sph.tau(s), horizon))
                sup = max(sup, max(abs(a - b) for a, b in zip(xs, xp)))
            assert sup < mp.mpf("1e-9")
            # decoded configuration via tau^{-1} matches the psi orbit
            code = x0
            for j in range(3):
                s_j = tau_inv(plain, mp.mpf(j) + mp.mpf(1) / 4, k_printed, ctx)
                z2 = sph.planar(s_j)[1]
                assert decode_margin(z2, ctx)[0] == code
                code = psi(machine, code)

    def test_ambient_mode_agrees_and_stays_unit(self, ctx):
        machine, rhs, x0 = self._sim_setup(ctx)
        with ctx.workprec():
            F = SphereField(base_rhs=rhs, n=2, K=k_printed, ctx=ctx)
            y0pt = stereo((mp.mpf(x0), mp.mpf(x0)), ctx)
            chart = integrate_sphere(F, y0pt, 1, mode="chart", ctx=ctx)
            amb = integrate_sphere(F, y0pt, 1, mode="ambient", ctx=ctx)
            diff = max(abs(a - b) for a, b in zip(chart.point(1), amb.point(1)))
            assert diff < mp.mpf("1e-10")
            for s in ("0.3", "0.77", "0.999"):
                assert amb.sphere_norm_drift(mp.mpf(s)) < mp.mpf("1e-12")

    def test_mode_validation(self, ctx):
        F = SphereField(base_rhs=lambda t, x: (mp.mpf(0), mp.mpf(0)),
                        n=2, K=k_printed, ctx=ctx)
        with pytest.raises(ValueError):
            integrate_sphere(F, (1, 0, 0, 0), 1, mode="chart", ctx=ctx)
        with pytest.raises(ValueError):
            integrate_sphere(F, (-1, 0, 0), 1, mode="nope", ctx=ctx)


class TestTauInv:
    def test_zero_is_zero(self, ctx):
        with ctx.workprec():
            spec = IvpSpec.make(lambda t, y: (mp.mpf(0), mp.mpf(0)), 0, (2, 3),
                                ctx=ctx)
            plain = solve_ivp(spec, 1, ctx)
            assert tau_inv(plain, 0, k_printed, ctx) == 0

    def test_monotone_grid(self, ctx):
        with ctx.workprec():
            spec = IvpSpec.make(lambda t, y: (mp.cos(t), mp.sin(t)), 0, (0, 0),
                                ctx=ctx)
            plain = solve_ivp(spec, 2, ctx)
            vals = [tau_inv(plain, 2 * mp.mpf(i) / 100, k_printed, ctx)
                    for i in range(0, 101, 5)]
            assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_roundtrip_with_tau(self, ctx):
        # tau(tau^{-1}(a)) = a via the chart-augmented clock
        with ctx.workprec():
            f = lambda t, x: (mp.sin(t), mp.cos(t) / 2)
            spec = IvpSpec.make(f, 0, (1, -1), abs_tol="1e-14", rel_tol="1e-14",
                                max_step="0.05", ctx=ctx)
            plain = solve_ivp(spec, mp.mpf(6), ctx)
            F = SphereField(base_rhs=f, n=2, K=k_printed, ctx=ctx)
            y0pt = stereo((1, -1), ctx)
            for a in ("0.5", "1", "5"):
                a = mp.mpf(a)
                s_a = tau_inv(plain, a, k_printed, ctx)
                sph = integrate_sphere(F, y0pt, s_a, mode="chart", ctx=ctx,
                                       abs_tol="1e-14", rel_tol="1e-14")
                assert abs(sph.tau(s_a) - a) < mp.mpf("1e-10")

    def test_horizon_guard(self, ctx):
        with ctx.workprec():
            spec = IvpSpec.make(lambda t, y: (mp.mpf(0), mp.mpf(0)), 0, (0, 0),
                                ctx=ctx)
            plain = solve_ivp(spec, 1, ctx)
            with pytest.raises(ValueError):
                tau_inv(plain, 2, k_printed, ctx)
