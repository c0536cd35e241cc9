import random

import pytest
from mpmath import mp

from tmflow.kernels import theta
from tmflow.numerics import (
    BlowUp,
    DEFAULT_CTX,
    Interval,
    IvpSpec,
    NonConvergence,
    RealContext,
    StepUnderflow,
    iv_add,
    iv_asin,
    iv_exp,
    iv_mul,
    iv_sin,
    quad_adaptive,
    solve_ivp,
)


class TestRealContext:
    def test_minimum_width_enforced(self):
        with pytest.raises(ValueError):
            RealContext(53)

    def test_decimal_roundtrip_identity(self, ctx):
        rng = random.Random(1)
        with ctx.workprec():
            values = [mp.mpf(rng.uniform(-1e6, 1e6)) * mp.mpf(2) ** rng.randint(-80, 80)
                      for _ in range(200)]
            values += [mp.mpf(1) / 3, mp.pi, mp.mpf("1e-50"), mp.mpf(0), mp.mpf(-7)]
            for v in values:
                assert ctx.from_decimal(ctx.to_decimal(v)) == v

    def test_roundtrip_at_other_precisions(self):
        for bits in (64, 128, 512):
            ctx = RealContext(bits)
            with ctx.workprec():
                v = mp.pi / 7
                assert ctx.from_decimal(ctx.to_decimal(v)) == v


class TestInterval:
    def test_endpoint_order_enforced(self, ctx):
        with ctx.workprec():
            with pytest.raises(ValueError):
                Interval(mp.mpf(2), mp.mpf(1))

    def test_operations_enclose_points(self, ctx):
        rng = random.Random(3)
        bits = 128
        with ctx.workprec():
            for _ in range(500):
                a = mp.mpf(rng.uniform(-10, 10))
                b = mp.mpf(rng.uniform(-10, 10))
                ia, ib = Interval.point(a), Interval.point(b)
                assert a + b in iv_add(ia, ib, bits)
                assert a * b in iv_mul(ia, ib, bits)
                assert mp.sin(a) in iv_sin(ia, bits)
                assert mp.exp(b) in iv_exp(ib, bits)

    def test_asin_rigorous_and_guarded(self, ctx):
        with ctx.workprec():
            box = Interval(mp.mpf("-0.4"), mp.mpf("0.7"))
            out = iv_asin(box, 128)
            assert mp.asin(mp.mpf("-0.4")) in out
            assert mp.asin(mp.mpf("0.7")) in out
            with pytest.raises(ValueError):
                iv_asin(Interval(mp.mpf("0.5"), mp.mpf("1.5")), 128)


class TestQuadrature:
    def test_constant_is_exact(self, ctx):
        q = quad_adaptive(lambda x: mp.mpf(1), 0, 1, mp.mpf("1e-30"), ctx)
        assert q == 1

    def test_theta_bump_vanishing_half(self, ctx):
        # theta(-sin 2pi x) is identically zero on [0, 1/2]
        with ctx.workprec():
            q = quad_adaptive(lambda x: theta(-mp.sinpi(2 * x), ctx), 0,
                              mp.mpf(1) / 2, mp.mpf("1e-30"), ctx)
            assert q == 0

    def test_gate_integral_paper_bound_and_doubled_precision(self):
        # integral of theta(sin 2pi t) over [0, 1/2] is at least (1/4)e^(-sqrt 2)
        ctx = DEFAULT_CTX
        hi = RealContext(2 * ctx.precision_bits)
        with hi.workprec():
            q = quad_adaptive(lambda t: theta(mp.sinpi(2 * t), ctx), 0,
                              mp.mpf(1) / 2, mp.mpf("1e-30"), ctx)
            q_hi = quad_adaptive(lambda t: theta(mp.sinpi(2 * t), hi), 0,
                                 mp.mpf(1) / 2, mp.mpf("1e-60"), hi)
            assert q > mp.exp(-mp.sqrt(2)) / 4
            assert abs(q - q_hi) <= mp.mpf("1e-30") * max(1, abs(q))

    def test_nonconvergence_on_jump(self, ctx):
        with ctx.workprec():
            jump = mp.mpf(1) / 3

            def f(x):
                return mp.mpf(0) if x < jump else mp.mpf(1)

            with pytest.raises(NonConvergence):
                quad_adaptive(f, 0, 1, mp.mpf("1e-40"), ctx, max_depth=12)

    def test_rejects_bad_arguments(self, ctx):
        with ctx.workprec():
            with pytest.raises(ValueError):
                quad_adaptive(lambda x: x, 1, 0, mp.mpf("1e-10"), ctx)
            with pytest.raises(ValueError):
                quad_adaptive(lambda x: x, 0, 1, mp.mpf(0), ctx)


class TestSolveIvp:
    def test_zero_rhs_is_constant(self, ctx):
        spec = IvpSpec.make(lambda t, y: (mp.mpf(0),), 0, (3,), ctx=ctx)
        traj = solve_ivp(spec, 10, ctx)
        with ctx.workprec():
            assert traj.value(10)[0] == 3
            assert traj.value(mp.mpf("7.3"))[0] == 3

    def test_exponential_against_closed_form(self, ctx):
        with ctx.workprec():
            spec = IvpSpec.make(lambda t, y: (y[0],), 0, (1,),
                                abs_tol="1e-18", rel_tol="1e-18", max_step="0.05",
                                ctx=ctx)
            traj = solve_ivp(spec, 1, ctx)
            assert abs(traj.value(1)[0] - mp.e) <= 10 * mp.mpf("1e-18")
            t = mp.mpf("0.6180339")
            assert abs(traj.value(t)[0] - mp.exp(t)) <= mp.mpf("1e-16")

    def test_targeting_paper_instance(self, ctx):
        # Lem:Target with b=5, c=206, gamma=0.2 and the theta gate
        with ctx.workprec():
            def rhs(t, y):
                return (206 * (5 - y[0]) ** 3 * theta(mp.sinpi(2 * t), ctx),)

            spec = IvpSpec.make(rhs, 0, (-100,), abs_tol="1e-13", rel_tol="1e-13",
                                ctx=ctx)
            traj = solve_ivp(spec, mp.mpf(1) / 2, ctx)
            assert abs(traj.value(mp.mpf(1) / 2)[0] - 5) < mp.mpf("0.2")

    def test_dense_output_reproduces_nodes_exactly(self, ctx):
        with ctx.workprec():
            spec = IvpSpec.make(lambda t, y: (mp.cos(t),), 0, (0,), ctx=ctx)
            traj = solve_ivp(spec, 2, ctx)
            for seg in traj.segments[::7]:
                assert traj.value(seg.t0) == seg.y0
                assert traj.value(seg.t1) == seg.y1

    def test_segments_tile_without_gaps(self, ctx):
        with ctx.workprec():
            spec = IvpSpec.make(lambda t, y: (y[0],), 0, (1,), ctx=ctx)
            traj = solve_ivp(spec, 1, ctx)
            for a, b in zip(traj.segments, traj.segments[1:]):
                assert a.t1 == b.t0
            assert traj.segments[0].t0 == 0
            assert traj.segments[-1].t1 == 1

    def test_blowup_detected(self, ctx):
        with ctx.workprec():
            spec = IvpSpec.make(lambda t, y: (y[0] ** 2,), 0, (2,), ctx=ctx)
            with pytest.raises(BlowUp):
                solve_ivp(spec, 1, ctx, blowup_ceiling="1e10")

    def test_step_underflow_when_tolerance_outruns_precision(self, ctx):
        # a jump plus a tolerance below the mantissa floor: the controller
        # would need steps under 2^(-bits), which must raise, not loop
        with ctx.workprec():
            def rhs(t, y):
                return (mp.mpf(0) if t < mp.mpf(1) / 3 else mp.mpf("1e8"),)

            spec = IvpSpec.make(rhs, 0, (0,), abs_tol="1e-85", rel_tol="1e-85",
                                ctx=ctx)
            with pytest.raises(StepUnderflow):
                solve_ivp(spec, 1, ctx)

    def test_tolerance_halving_moves_endpoint_less_than_coarse_tol(self, ctx):
        with ctx.workprec():
            def rhs(t, y):
                return (206 * (5 - y[0]) ** 3 * theta(mp.sinpi(2 * t), ctx),)

            ends = []
            for tol in ("1e-12", "1e-13"):
                spec = IvpSpec.make(rhs, 0, (-10,), abs_tol=tol, rel_tol=tol, ctx=ctx)
                ends.append(solve_ivp(spec, mp.mpf(1) / 2, ctx).value(mp.mpf(1) / 2)[0])
            assert abs(ends[0] - ends[1]) < mp.mpf("1e-11")

    def test_csv_export(self, ctx, tmp_path):
        with ctx.workprec():
            spec = IvpSpec.make(lambda t, y: (y[0], -y[1]), 0, (1, 1), ctx=ctx)
            traj = solve_ivp(spec, mp.mpf(1) / 4, ctx)
            path = tmp_path / "traj.csv"
            traj.to_csv(path)
            lines = path.read_text().splitlines()
            assert lines[0] == "t,state_0,state_1"
            first = lines[1].split(",")
            assert ctx.from_decimal(first[1]) == 1
