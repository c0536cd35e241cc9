import random

import pytest
from mpmath import mp

from tmflow.encoding import pair2, pair_k
from tmflow.expr import (
    ArcSin,
    ArityMismatch,
    Const,
    DomainError,
    Mul,
    Sub,
    UnknownKernel,
    Var,
    arity,
    build_kernel,
    compose,
    constants_of,
    eval_expr,
    eval_interval,
    parse_sexpr,
    to_infix,
    to_sexpr,
)
from tmflow.kernels import gate_phi, psi_correct, s_gate, sigma, sigma_iter
from tmflow.numerics import Interval
from tmflow.robustmap import upsilon_k

KERNELS = {
    "sigma": (1, lambda args, ctx: sigma(args[0], ctx)),
    "psi_correct": (2, lambda args, ctx: psi_correct(args[0], args[1], ctx)),
    "s": (1, lambda args, ctx: s_gate(args[0], ctx)),
    "gate_phi": (2, lambda args, ctx: gate_phi(args[0], args[1], ctx)),
    "pair2": (2, lambda args, ctx: upsilon_k([args[0], args[1]], ctx) if False
              else ((args[0] + args[1]) ** 2 + 3 * args[0] + args[1]) / 2),
    "upsilon_k": (3, lambda args, ctx: upsilon_k(list(args), ctx)),
}


class TestBuild:
    def test_sigma_prints_exactly(self):
        assert to_infix(build_kernel("sigma")) == "x - 0.2*sin(2*pi*x)"

    def test_sigma_integer_fixed_point(self, ctx):
        with ctx.workprec():
            assert eval_expr(build_kernel("sigma"), (7,), ctx) == 7

    def test_unknown_kernel_rejected(self):
        with pytest.raises(UnknownKernel):
            build_kernel("frobnicate")
        with pytest.raises(UnknownKernel):
            build_kernel("sigma_iter")          # missing depth
        with pytest.raises(UnknownKernel):
            build_kernel("upsilon_k", k=1)

    def test_psi_arcsin_carries_certificate(self):
        e = build_kernel("psi_correct")

        def find_asin(node):
            if isinstance(node, ArcSin):
                return node
            for attr in ("a", "b", "base"):
                child = getattr(node, attr, None)
                if child is not None and not isinstance(child, int):
                    found = find_asin(child)
                    if found:
                        return found
            return None

        node = find_asin(e)
        assert node is not None and node.cert is not None

    def test_named_constants_carry_provenance(self):
        consts = constants_of(build_kernel("sigma"))
        assert any(c.text == "0.2" and c.provenance for c in consts)


class TestEval:
    def test_const_ignores_args(self, ctx):
        with ctx.workprec():
            assert eval_expr(Const("5"), (1, 2, 3), ctx) == 5

    def test_pair2_dovetail_value(self, ctx):
        with ctx.workprec():
            assert eval_expr(build_kernel("pair2"), (0, 1), ctx) == 1

    @pytest.mark.parametrize("name", sorted(KERNELS))
    def test_agreement_with_direct_kernels(self, name, ctx):
        nargs, direct = KERNELS[name]
        kw = {"k": 3} if name == "upsilon_k" else {}
        e = build_kernel(name, **kw)
        rng = random.Random(hash(name) % 2 ** 31)
        with ctx.workprec():
            bound = mp.mpf(2) ** (-(ctx.precision_bits - 8))
            for _ in range(1700):
                args = tuple(mp.mpf(rng.uniform(-15, 15)) for _ in range(nargs))
                if name in ("psi_correct", "gate_phi"):
                    args = (args[0], abs(args[1]))
                got = eval_expr(e, args, ctx)
                want = direct(args, ctx)
                assert abs(got - want) <= bound * max(1, abs(want))

    def test_sigma_iter_matches_iterated_kernel(self, ctx):
        e = build_kernel("sigma_iter", l=3)
        rng = random.Random(12)
        with ctx.workprec():
            for _ in range(1000):
                x = mp.mpf(rng.uniform(-20, 20))
                got = eval_expr(e, (x,), ctx)
                want = sigma_iter(x, 3, ctx)
                assert abs(got - want) <= mp.mpf(2) ** -240 * max(1, abs(want))

    def test_arity_mismatch(self, ctx):
        with pytest.raises(ArityMismatch):
            eval_expr(build_kernel("psi_correct"), (1,), ctx)

    def test_domain_error_on_bad_arcsin(self, ctx):
        with ctx.workprec():
            with pytest.raises(DomainError):
                eval_expr(ArcSin(Const("3/2")), (), ctx)


class TestIntervalEval:
    def test_encloses_point_evaluations(self, ctx):
        rng = random.Random(21)
        with ctx.workprec():
            for name in ("sigma", "s", "pair2", "psi_correct", "gate_phi", "upsilon_k"):
                kw = {"k": 3} if name == "upsilon_k" else {}
                nargs = KERNELS[name][0]
                e = build_kernel(name, **kw)
                for _ in range(1700):
                    args = tuple(mp.mpf(rng.uniform(-8, 8)) for _ in range(nargs))
                    if name in ("psi_correct", "gate_phi"):
                        args = (args[0], abs(args[1]))
                    pt = eval_expr(e, args, ctx)
                    box = eval_interval(e, tuple(Interval.point(a) for a in args),
                                        ctx)
                    assert box.lo <= pt <= box.hi

    def test_uncertified_arcsin_domain_guard(self, ctx):
        with ctx.workprec():
            bad = ArcSin(Var(0))    # no certificate
            with pytest.raises(DomainError):
                eval_interval(bad, (Interval(mp.mpf("0.5"), mp.mpf("1.5")),), ctx)


class TestCompose:
    def test_identity_composition(self, ctx):
        e = build_kernel("sigma")
        same = compose(Var(0), [e])
        with ctx.workprec():
            for x in (0, mp.mpf("0.3"), -2):
                assert eval_expr(same, (x,), ctx) == eval_expr(e, (x,), ctx)

    def test_composed_sigma_equals_iterated(self, ctx):
        s1 = build_kernel("sigma")
        s3 = compose(s1, [compose(s1, [s1])])
        rng = random.Random(31)
        with ctx.workprec():
            for _ in range(1000):
                x = mp.mpf(rng.uniform(-10, 10))
                want = sigma_iter(x, 3, ctx)
                got = eval_expr(s3, (x,), ctx)
                assert abs(got - want) <= mp.mpf(2) ** -240 * max(1, abs(want))

    def test_gate_print_shape(self):
        txt = to_infix(build_kernel("gate_phi"))
        assert "arcsin(sin(2*pi*" in txt
        assert "exp(-y - 2)" in txt or "exp(-y-2)" in txt

    def test_arity_guard(self):
        with pytest.raises(ArityMismatch):
            compose(build_kernel("psi_correct"), [Var(0)])


class TestText:
    @pytest.mark.parametrize("name,kw", [
        ("sigma", {}), ("psi_correct", {}), ("s", {}), ("gate_phi", {}),
        ("pair2", {}), ("upsilon_k", {"k": 2}), ("sigma_iter", {"l": 2}),
    ])
    def test_print_parse_print_fixpoint(self, name, kw):
        e = build_kernel(name, **kw)
        text = to_sexpr(e)
        again = to_sexpr(parse_sexpr(text))
        assert again == text
        assert to_sexpr(parse_sexpr(again)) == again

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_sexpr("(frob (var 0))")
        with pytest.raises(ValueError):
            parse_sexpr("(add (var 0) (var 1)) trailing")

    def test_infix_negative_constant_folding(self):
        e = Sub(Mul(Const("-1"), Var(1)), Const("2"))
        assert to_infix(e) == "-y - 2"
