"""Exact layer: run a machine, encode configurations, watch psi commute.

The discrete stepper is the ground truth every continuous simulation in
this package is checked against.  This script runs the bundled 3-state
machine, prints its orbit with tape contents, and verifies that encoding
commutes with stepping (encode . step == psi . encode).
"""

from tmflow import (
    encode_config,
    initial_config,
    load_machine,
    psi,
    run_n,
    tape_string,
)

machine = load_machine("flip3")
start = initial_config(machine, "ab")
orbit = run_n(machine, start, 14)

print(f"machine: {machine.m} states over alphabet {machine.alphabet}")
print(f"{'step':>4}  {'tape':<8} {'state':>5}  code")
codes = []
for j, config in enumerate(orbit):
    enc = encode_config(machine, config)
    codes.append(enc.c)
    print(f"{j:>4}  {tape_string(machine, config):<8} "
          f"{machine.state_name(config.q):>5}  {enc.c}")

print("\nchecking encode . step == psi . encode along the orbit ...")
for j in range(len(codes) - 1):
    assert psi(machine, codes[j]) == codes[j + 1]
print("psi commutes with the stepper on all", len(codes) - 1, "transitions")
print("halting code is a fixed point:", psi(machine, codes[-1]) == codes[-1])
