"""Transporting the simulation onto the sphere S^2.

The planar C∞ simulating field (gates built from the staircase r instead
of the analytic corrector) is pushed through the stereographic projection
with a time reparametrization K.  Two K orientations matter:

* the superpolynomially decaying K makes the transported field vanish at
  the north pole together with its derivatives (the field norms below
  collapse as the pole is approached);
* the bounded K keeps sphere horizons finite, so the machine's orbit can
  be decoded from the sphere trajectory via tau^{-1} sampling.
"""

from mpmath import mp

from tmflow import (
    DEFAULT_CTX as ctx,
    SimulationParams,
    encode_config,
    initial_config,
    load_machine,
    psi,
)
from tmflow.numerics import IvpSpec, solve_ivp
from tmflow.odesim import simulation_rhs
from tmflow.robustmap import decode_margin
from tmflow.sphere import (
    SphereField,
    integrate_sphere,
    k_printed,
    k_vanishing,
    stereo,
    tau_inv,
)

machine = load_machine("successor")

with ctx.workprec():
    params = SimulationParams.from_delta(0, ctx)
    rhs, _ = simulation_rhs(machine, params, None, ctx, smooth=True)
    x0 = encode_config(machine, initial_config(machine, "1")).c

    print("field norm on the way to the north pole (vanishing K):")
    F_v = SphereField(base_rhs=rhs, n=2, K=k_vanishing, ctx=ctx)
    for d in range(2, 7):
        gap = mp.mpf(10) ** -d
        y0 = 1 - gap
        y = (y0, mp.sqrt(1 - y0 * y0), mp.mpf(0))
        nrm = max(abs(c) for c in F_v.value(mp.mpf("0.3"), y))
        print(f"  1 - y0 = 1e-{d}:  |field| = {mp.nstr(nrm, 4)}")
    print("  at the pole itself the field is exactly", F_v.value(0, (1, 0, 0)))

    print("\ndecoding the orbit from the sphere (bounded K):")
    horizon = mp.mpf("3.3")
    plain = solve_ivp(IvpSpec.make(rhs, 0, (mp.mpf(x0), mp.mpf(x0)),
                                   abs_tol="1e-12", rel_tol="1e-12",
                                   max_step="1e-2", ctx=ctx), horizon, ctx)
    s_end = tau_inv(plain, horizon, k_printed, ctx)
    F_b = SphereField(base_rhs=rhs, n=2, K=k_printed, ctx=ctx)
    sph = integrate_sphere(F_b, stereo((mp.mpf(x0), mp.mpf(x0)), ctx),
                           s_end, mode="chart", ctx=ctx)
    code = x0
    for j in range(4):
        s_j = tau_inv(plain, mp.mpf(j) + mp.mpf(1) / 4, k_printed, ctx)
        z2 = sph.planar(s_j)[1]
        dec, margin = decode_margin(z2, ctx)
        y = sph.point(s_j)
        print(f"  j={j}: sphere time {mp.nstr(s_j, 6)}, "
              f"y0={mp.nstr(y[0], 8)}, decoded {dec} "
              f"(expected {code}, margin {mp.nstr(margin, 3)})")
        assert dec == code
        code = psi(machine, code)
    print("decoded sphere orbit matches the machine's orbit")
