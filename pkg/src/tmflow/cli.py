"""Command-line interface: encode/decode, map compilation and iteration,
ODE simulation, sphere transport, verification suites and figure traces.

Exit codes: 0 success, 1 contract violation, 2 usage/parse error.
Precision defaults to 256 bits, overridable by --precision-bits, a config
file line `precision_bits = N`, or the TA_PRECISION_BITS environment
variable (in that order of priority).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, fields

from mpmath import mp

from . import verify as verify_mod
from .encoding import DecodeError, decode_config, encode_config, psi, unpair_k
from .expr import build_kernel, to_infix, to_sexpr
from .numerics import RealContext
from .odesim import (
    SimulationParams,
    omega_tilde_read,
    omega_tilde_trajectory,
    simulate_2d,
    verify_windows,
)
from .robustmap import (
    BadDelta,
    NoiseSpec,
    NotNearConfiguration,
    compile_map,
    decode_margin,
    iterate_noisy,
)
from .sphere import SphereField, integrate_sphere, k_printed, stereo, tau_inv
from .tm import ParseError, ValidationError, initial_config, parse_tm, run_n
from .encoding import unpair2

EXIT_OK = 0
EXIT_CONTRACT = 1
EXIT_USAGE = 2


@dataclass
class RunConfig:
    """Aggregated run options; mirrors module-level preconditions."""

    precision_bits: int = 256
    abs_tol: str = "1e-10"
    rel_tol: str = "1e-10"
    max_step: str = "1e-2"
    delta: str = "0"
    offset: str = "0"
    seed: int = 0
    steps: int = 10
    noise: str = "none"
    out: str | None = None

    def validate(self):
        problems = []
        if self.precision_bits < 64:
            problems.append("precision_bits must be >= 64")
        if self.steps < 0:
            problems.append("steps must be >= 0")
        if self.noise not in ("none", "seeded", "plus", "minus", "alternating"):
            problems.append(f"unknown noise mode {self.noise!r}")
        for name in ("abs_tol", "rel_tol", "max_step"):
            try:
                if not mp.mpf(getattr(self, name)) > 0:
                    problems.append(f"{name} must be positive")
            except ValueError:
                problems.append(f"{name} is not a number")
        try:
            d = mp.mpf(self.delta)
            if d < 0:
                problems.append("delta must be >= 0")
        except ValueError:
            problems.append("delta is not a number")
        if problems:
            raise ValueError("invalid configuration: " + "; ".join(problems))

    @property
    def ctx(self) -> RealContext:
        return RealContext(self.precision_bits)


def _load_config_file(path: str) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{ln}: expected 'key = value'")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


def _build_config(args) -> RunConfig:
    cfg = RunConfig()
    if os.environ.get("TA_PRECISION_BITS"):
        cfg.precision_bits = int(os.environ["TA_PRECISION_BITS"])
    if getattr(args, "config", None):
        file_vals = _load_config_file(args.config)
        for f in fields(RunConfig):
            if f.name in file_vals:
                raw = file_vals[f.name]
                setattr(cfg, f.name, int(raw) if f.type == "int" else raw)
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            setattr(cfg, f.name, flag)
    cfg.validate()
    return cfg


def _load_tm(path: str):
    with open(path, encoding="utf-8") as fh:
        return parse_tm(fh.read())


def _print_json(obj):
    print(json.dumps(obj, indent=2, default=str))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_encode(args, cfg: RunConfig) -> int:
    machine = _load_tm(args.tm)
    config = initial_config(machine, args.input)
    enc = encode_config(machine, config)
    print(f"c = {enc.c}")
    print(f"y1 = {enc.y1}")
    print(f"y2 = {enc.y2}")
    print(f"q = {enc.q}")
    return EXIT_OK


def cmd_decode(args, cfg: RunConfig) -> int:
    machine = _load_tm(args.tm)
    config = decode_config(machine, int(args.code))
    y1, y2, q = unpair_k(int(args.code), 3)
    print(f"y1 = {y1}")
    print(f"y2 = {y2}")
    print(f"q = {q} ({machine.state_name(q)})")
    print(f"u = {''.join(config.u) or '(empty)'}")
    print(f"v = {''.join(config.v) or '(empty)'}")
    return EXIT_OK


def cmd_compile(args, cfg: RunConfig) -> int:
    machine = _load_tm(args.tm)
    ctx = cfg.ctx
    cmap = compile_map(machine, mp.mpf(cfg.delta), ctx)
    print(f"delta budget  : {cfg.delta}")
    print(f"j_contract    : {cmap.j_contract}")
    print(f"precision_bits: {ctx.precision_bits}")
    print("pipeline      : sigma^[j] . Upsilon_3 . f_ref . (Omega_3,1, Omega_3,2, Omega_3,3)")
    if args.emit_expr:
        print("\nclosed-form kernel stages:")
        for name, kw in (("sigma", {}), ("psi_correct", {}), ("s", {}),
                         ("gate_phi", {}), ("pair2", {}), ("upsilon_k", {"k": 2})):
            e = build_kernel(name, **kw)
            print(f"-- {name}")
            print(f"   infix: {to_infix(e)}")
            print(f"   sexpr: {to_sexpr(e)}")
        print("-- sigma_iter (j = contraction depth)")
        e = build_kernel("sigma_iter", l=cmap.j_contract)
        print(f"   infix: {to_infix(e)}")
        print("-- f_ref, Omega_3,i: exact round-and-step reference stages "
              "(no closed form; see package docs)")
    return EXIT_OK


def cmd_iterate_map(args, cfg: RunConfig) -> int:
    machine = _load_tm(args.tm)
    ctx = cfg.ctx
    with ctx.workprec():
        cmap = compile_map(machine, mp.mpf(cfg.delta), ctx)
        orbit_cfgs = run_n(machine, initial_config(machine, args.input), cfg.steps)
        orbit = [encode_config(machine, c).c for c in orbit_cfgs]
        noise = NoiseSpec(cfg.noise, mp.mpf(cfg.delta), seed=cfg.seed)
        x0 = orbit[0] + mp.mpf(cfg.offset)
        xs = iterate_noisy(cmap, x0, cfg.steps, noise)
        rows = []
        ok = True
        for j, x in enumerate(xs):
            dec, dist = decode_margin(x, ctx)
            match = dec == orbit[j]
            ok = ok and match and dist <= mp.mpf(1) / 5 + ctx.eps
            rows.append((j, x, dec, dist, orbit[j], match))
        out = cfg.out or "trace.csv"
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("step,x,decoded,margin,expected,match\n")
            for j, x, dec, dist, want, match in rows:
                fh.write(f"{j},{ctx.to_decimal(x)},{dec},{ctx.to_decimal(dist)},"
                         f"{want},{int(match)}\n")
        print(f"wrote {out} ({len(rows)} steps)")
        print(f"orbit matched: {ok}")
        return EXIT_OK if ok else EXIT_CONTRACT


def cmd_simulate_ode(args, cfg: RunConfig) -> int:
    machine = _load_tm(args.tm)
    ctx = cfg.ctx
    with ctx.workprec():
        delta = mp.mpf(cfg.delta)
        params = SimulationParams.from_delta(delta, ctx)
        x0 = encode_config(machine, initial_config(machine, args.input)).c
        noise = None if cfg.noise == "none" or delta == 0 else \
            NoiseSpec(cfg.noise, delta, seed=cfg.seed)
        start = x0 + mp.mpf(cfg.offset)
        traj, _ = simulate_2d(machine, params, start, start, cfg.steps, noise,
                              ctx, smooth=args.smooth,
                              abs_tol=cfg.abs_tol, rel_tol=cfg.rel_tol,
                              max_step=cfg.max_step)
        report = verify_windows(traj, machine, x0, params, cfg.steps, ctx=ctx)
        out = cfg.out or "trajectory.csv"
        traj.to_csv(out)
        payload = [{"j": r["j"], "expected_code": str(r["expected_code"]),
                    "sup_error": float(r["sup_error"]), "eta": float(r["eta"]),
                    "pass": r["pass"]} for r in report]
        _print_json({"machine": args.tm, "delta": str(delta),
                     "eta": float(params.eta), "windows": payload})
        print(f"wrote {out}")
        return EXIT_OK if all(r["pass"] for r in report) else EXIT_CONTRACT


def cmd_omega_ode(args, cfg: RunConfig) -> int:
    ctx = cfg.ctx
    with ctx.workprec():
        traj = omega_tilde_trajectory(args.which, mp.mpf(args.zmax) + mp.mpf(1) / 4,
                                      ctx, reading=args.reading,
                                      abs_tol=cfg.abs_tol, rel_tol=cfg.rel_tol)
        comp = 0 if args.which == "J21" else 1
        ok = True
        rows = []
        for z in range(args.zmax + 1):
            got = omega_tilde_read(traj, z, ctx)
            want = unpair2(z)[comp]
            good = abs(got - want) <= mp.mpf(1) / 5
            ok = ok and good
            rows.append((z, got, want, good))
        out = cfg.out or f"omega_{args.which}.csv"
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("z,value,exact,within_fifth\n")
            for z, got, want, good in rows:
                fh.write(f"{z},{ctx.to_decimal(got)},{want},{int(good)}\n")
        print(f"wrote {out}")
        print(f"all within 1/5: {ok}")
        return EXIT_OK if ok else EXIT_CONTRACT


def cmd_sphere(args, cfg: RunConfig) -> int:
    machine = _load_tm(args.tm)
    ctx = cfg.ctx
    with ctx.workprec():
        from .odesim import simulation_rhs
        from .numerics import IvpSpec, solve_ivp
        params = SimulationParams.from_delta(0, ctx)
        rhs, _ = simulation_rhs(machine, params, None, ctx, smooth=True)
        x0 = encode_config(machine, initial_config(machine, args.input)).c
        t_end = mp.mpf(args.t_end)
        plain = solve_ivp(
            IvpSpec.make(rhs, 0, (mp.mpf(x0), mp.mpf(x0)), abs_tol=cfg.abs_tol,
                         rel_tol=cfg.rel_tol, max_step=cfg.max_step, ctx=ctx),
            t_end, ctx)
        s_end = tau_inv(plain, t_end, k_printed, ctx)
        F = SphereField(base_rhs=rhs, n=2, K=k_printed, ctx=ctx)
        y_start = stereo((mp.mpf(x0), mp.mpf(x0)), ctx)
        sph = integrate_sphere(F, y_start, s_end, mode="chart", ctx=ctx,
                               abs_tol=cfg.abs_tol, rel_tol=cfg.rel_tol,
                               max_step=cfg.max_step)
        out = cfg.out or "orbit.csv"
        n_rows = 200
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("t,y0,y1,y2,decoded_code,margin\n")
            for i in range(n_rows + 1):
                s = s_end * mp.mpf(i) / n_rows
                y = sph.point(s)
                z2 = sph.planar(s)[1]
                dec, dist = decode_margin(z2, ctx)
                fh.write(",".join([ctx.to_decimal(s)] +
                                  [ctx.to_decimal(c) for c in y] +
                                  [str(dec), ctx.to_decimal(dist)]) + "\n")
        print(f"wrote {out} (sphere horizon {ctx.to_decimal(s_end)})")
        return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    reports = verify_mod.run_suite(args.suite)
    ok = all(r["pass"] for r in reports)
    _print_json({"reports": reports, "pass": ok})
    return EXIT_OK if ok else EXIT_CONTRACT


def cmd_trace(args, cfg: RunConfig) -> int:
    ctx = cfg.ctx
    out_dir = args.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    if args.emit_expr:
        for name, kw in (("sigma", {}), ("psi_correct", {}), ("s", {}),
                         ("gate_phi", {}), ("pair2", {}), ("upsilon_k", {"k": 3})):
            e = build_kernel(name, **kw)
            print(f"-- {name}: {to_infix(e)}")
    with ctx.workprec():
        from .odesim import iterate_ode
        t_end = mp.mpf(args.t_end)
        traj = iterate_ode(lambda x: 2 ** x, 1, t_end, ctx)
        csv_path = os.path.join(out_dir, "staircase.csv")
        n_rows = 400
        ts, z2s = [], []
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write("t,z1,z2\n")
            for i in range(n_rows + 1):
                t = t_end * mp.mpf(i) / n_rows
                z = traj.value(t)
                ts.append(float(t))
                z2s.append(float(z[1]))
                fh.write(f"{ctx.to_decimal(t)},{ctx.to_decimal(z[0])},{ctx.to_decimal(z[1])}\n")
        svg_path = os.path.join(out_dir, "staircase.svg")
        try:
            import matplotlib
            matplotlib.use("Agg")
            import matplotlib.pyplot as plt
            fig, ax = plt.subplots(figsize=(7, 4))
            ax.plot(ts, z2s, label="z2(t)")
            stair_t, stair_v, val = [], [], 1
            k = 0
            while k <= int(t_end):
                stair_t += [k, k + 0.5]
                stair_v += [val, val]
                val = 2 ** val
                k += 1
            ax.step(stair_t, stair_v, where="post", linestyle="--",
                    label="exact iterates")
            ax.set_yscale("log", base=2)
            ax.set_xlabel("t")
            ax.set_ylabel("z2")
            ax.legend()
            fig.savefig(svg_path)
            plt.close(fig)
            print(f"wrote {csv_path} and {svg_path}")
        except Exception as exc:  # plotting is best-effort
            print(f"wrote {csv_path} (svg skipped: {exc})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(p):
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--precision-bits", dest="precision_bits", type=int)
    p.add_argument("--abs-tol", dest="abs_tol")
    p.add_argument("--rel-tol", dest="rel_tol")
    p.add_argument("--max-step", dest="max_step")
    p.add_argument("--seed", type=int, dest="seed")
    p.add_argument("--out", dest="out")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tmflow",
                                 description="Robust Turing-machine simulation "
                                             "by maps, ODEs and sphere flows")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode an initial configuration")
    p.add_argument("--tm", required=True)
    p.add_argument("--input", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_encode)

    p = sub.add_parser("decode", help="decode a configuration code")
    p.add_argument("--tm", required=True)
    p.add_argument("--code", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_decode)

    p = sub.add_parser("compile", help="compile the 1-D simulating map")
    p.add_argument("--tm", required=True)
    p.add_argument("--delta", dest="delta")
    p.add_argument("--emit-expr", action="store_true")
    _add_common(p)
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("iterate-map", help="iterate the compiled map with noise")
    p.add_argument("--tm", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--steps", type=int, dest="steps")
    p.add_argument("--delta", dest="delta")
    p.add_argument("--noise", dest="noise")
    p.add_argument("--offset", dest="offset")
    _add_common(p)
    p.set_defaults(fn=cmd_iterate_map)

    p = sub.add_parser("simulate-ode", help="run the 2-D simulation ODE")
    p.add_argument("--tm", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--steps", type=int, dest="steps")
    p.add_argument("--delta", dest="delta")
    p.add_argument("--noise", dest="noise")
    p.add_argument("--offset", dest="offset")
    p.add_argument("--smooth", action="store_true")
    _add_common(p)
    p.set_defaults(fn=cmd_simulate_ode)

    p = sub.add_parser("omega-ode", help="ODE realization of the unpairing")
    p.add_argument("--which", choices=("J21", "J22"), required=True)
    p.add_argument("--zmax", type=int, default=10)
    p.add_argument("--reading", choices=("corrected", "printed"),
                   default="corrected")
    _add_common(p)
    p.set_defaults(fn=cmd_omega_ode)

    p = sub.add_parser("sphere", help="transport the simulation to S^2")
    p.add_argument("--tm", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--t-end", dest="t_end", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_sphere)

    p = sub.add_parser("verify", help="run acceptance suites")
    p.add_argument("--suite", default="all",
                   choices=sorted(verify_mod.ALL_SUITES) + ["all"])
    _add_common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("trace", help="figure traces (2^x staircase)")
    p.add_argument("--t-end", dest="t_end", default="4")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--emit-expr", action="store_true")
    _add_common(p)
    p.set_defaults(fn=cmd_trace)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = _build_config(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.fn(args, cfg)
    except (ParseError, ValidationError, DecodeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NotNearConfiguration, BadDelta) as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
