"""One-dimensional robust simulation: iterate the compiled map under
adversarial per-step noise and watch the decoded orbit stay exact.

The compiled map g = sigma^[j] . Upsilon_3 . f . Omega_3 contracts any
point within 1/5 of a configuration code back onto the encoded orbit, so
a perturbation budget delta < 1/5 can never push the iterates off track.
"""

from mpmath import mp

from tmflow import (
    DEFAULT_CTX as ctx,
    NoiseSpec,
    compile_map,
    encode_config,
    initial_config,
    iterate_noisy,
    load_machine,
    run_n,
)
from tmflow.robustmap import decode_margin

machine = load_machine("successor")
steps, delta, offset = 12, "0.1", "0.19"

with ctx.workprec():
    orbit = [encode_config(machine, c).c
             for c in run_n(machine, initial_config(machine, "111"), steps)]
    cmap = compile_map(machine, mp.mpf(delta), ctx)
    print(f"delta budget {delta} -> contraction depth j = {cmap.j_contract}")

    for mode in ("plus", "alternating", "seeded"):
        noise = NoiseSpec(mode, mp.mpf(delta), seed=7)
        xs = iterate_noisy(cmap, orbit[0] + mp.mpf(offset), steps, noise)
        worst = max(abs(x - c) for x, c in zip(xs, orbit))
        decoded_ok = all(decode_margin(x, ctx)[0] == c for x, c in zip(xs, orbit))
        print(f"noise={mode:<12} max|x - code| = {mp.nstr(worst, 6):>10}  "
              f"decoded orbit exact: {decoded_ok}")

    print("\nstep-by-step margins (seeded noise):")
    xs = iterate_noisy(cmap, orbit[0] + mp.mpf(offset), steps,
                       NoiseSpec("seeded", mp.mpf(delta), seed=7))
    for j, (x, c) in enumerate(zip(xs, orbit)):
        print(f"  step {j:>2}: code {c:>6}  |x - code| = {mp.nstr(abs(x - c), 4)}")
