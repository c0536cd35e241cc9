"""Exact Turing machine model: parsing, configurations and the discrete
stepper that serves as the ground-truth oracle for every continuous
simulation in this package.

Conventions (fixed once, consistency-tested in the suite): a configuration
is a pair of words plus a state.  The tape reads

    ... B v_p ... v2 v1 u1 u2 ... u_n B ...

and the head sits on v1 (on blank when v is empty).  A move L shifts the
head onto u1's cell, a move R onto v2's cell; words are stored with blanks
stripped at their far ends.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

__all__ = [
    "ParseError",
    "ValidationError",
    "TuringMachine",
    "Configuration",
    "parse_tm",
    "load_machine",
    "step",
    "run_n",
    "initial_config",
    "tape_string",
]

MOVES = ("L", "R", "S")


class ParseError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class TuringMachine:
    """Finite machine with a total transition table and an absorbing halt."""

    states: tuple          # names, indexed 1..m in declaration order
    alphabet: tuple        # tape symbols, blank excluded
    blank: str
    start: str
    halt: str
    delta: dict            # (state, symbol) -> (state, symbol, move)

    @property
    def m(self) -> int:
        return len(self.states)

    @property
    def k(self) -> int:
        """Encoding base 1 + #alphabet."""
        return 1 + len(self.alphabet)

    def state_index(self, name: str) -> int:
        return self.states.index(name) + 1

    def state_name(self, index: int) -> str:
        if not 1 <= index <= self.m:
            raise ValidationError(f"state index {index} out of range 1..{self.m}")
        return self.states[index - 1]

    def gamma(self, symbol: str) -> int:
        """Digit of a tape symbol: gamma(blank)=0, others 1..k-1 in order."""
        if symbol == self.blank:
            return 0
        return self.alphabet.index(symbol) + 1

    def symbol_of(self, digit: int) -> str:
        if digit == 0:
            return self.blank
        if not 1 <= digit < self.k:
            raise ValidationError(f"digit {digit} out of range for base {self.k}")
        return self.alphabet[digit - 1]

    def validate(self):
        if len(set(self.states)) != self.m:
            raise ValidationError("duplicate state names")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValidationError("duplicate alphabet symbols")
        if self.blank in self.alphabet:
            raise ValidationError("blank must not belong to the alphabet")
        for name in (self.start, self.halt):
            if name not in self.states:
                raise ValidationError(f"state {name!r} not declared")
        symbols = self.alphabet + (self.blank,)
        if not self.delta:
            raise ValidationError("empty delta section")
        for q in self.states:
            for s in symbols:
                if (q, s) not in self.delta:
                    raise ValidationError(f"delta missing entry for ({q}, {s})")
        for (q, s), (q2, s2, mv) in self.delta.items():
            if q not in self.states or q2 not in self.states:
                raise ValidationError(f"transition uses undeclared state: {q} -> {q2}")
            if s not in symbols or s2 not in symbols:
                raise ValidationError(f"transition uses undeclared symbol: {s} -> {s2}")
            if mv not in MOVES:
                raise ValidationError(f"bad move {mv!r}")
        for s in symbols:
            if self.delta[(self.halt, s)] != (self.halt, s, "S"):
                raise ValidationError(
                    f"halt state must be absorbing: delta({self.halt}, {s}) "
                    f"must be ({self.halt}, {s}, S)"
                )


@dataclass(frozen=True)
class Configuration:
    """Machine configuration (u, v, q): head on v1, q a 1-based state index."""

    u: tuple
    v: tuple
    q: int

    def head_symbol(self, machine: TuringMachine) -> str:
        return self.v[0] if self.v else machine.blank


def _strip(word: list, blank: str) -> tuple:
    while word and word[-1] == blank:
        word.pop()
    return tuple(word)


def initial_config(machine: TuringMachine, word: str | tuple) -> Configuration:
    """Canonical start (w, ε, q0) for input word w."""
    syms = tuple(word)
    for s in syms:
        if s not in machine.alphabet:
            raise ValidationError(f"input symbol {s!r} not in alphabet")
    return Configuration(u=syms, v=(), q=machine.state_index(machine.start))


def tape_string(machine: TuringMachine, config: Configuration) -> str:
    """Tape contents left to right: v reversed then u."""
    return "".join(reversed(config.v)) + "".join(config.u)


def step(machine: TuringMachine, config: Configuration) -> Configuration:
    """Apply one transition.

    Moves shift one symbol between u and v; blanks materialize at word ends
    and far-end blanks are stripped so encodings stay canonical.
    """
    read = config.head_symbol(machine)
    q_name = machine.state_name(config.q)
    q2, written, move = machine.delta[(q_name, read)]
    u, v = list(config.u), list(config.v)
    if move == "S":
        if v:
            v[0] = written
        else:
            v = [written]
    elif move == "L":
        # head onto u1's cell: v gains (u1, written), u loses its head symbol
        u1 = u[0] if u else machine.blank
        rest = v[1:] if v else []
        v = [u1, written] + rest
        u = u[1:]
    elif move == "R":
        # head onto v2's cell: u gains the written symbol, v shrinks
        u = [written] + u
        v = v[1:] if v else []
    return Configuration(
        u=_strip(u, machine.blank),
        v=_strip(v, machine.blank),
        q=machine.state_index(q2),
    )


def run_n(machine: TuringMachine, config: Configuration, n: int) -> list:
    """Orbit [c0, step(c0), ..., step^n(c0)] of length n+1."""
    if n < 0:
        raise ValueError("n must be >= 0")
    out = [config]
    for _ in range(n):
        config = step(machine, config)
        out.append(config)
    return out


def is_halted(machine: TuringMachine, config: Configuration) -> bool:
    return config.q == machine.state_index(machine.halt)


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

def parse_tm(text: str) -> TuringMachine:
    """Parse the line-oriented machine format.

    Sections: states, alphabet, blank, start, halt and one `delta:` line per
    transition `q s -> q' s' M`.  `#` starts a comment.
    """
    states = alphabet = None
    blank = start = halt = None
    delta = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError("expected 'key: value'", line=ln)
        key, _, value = line.partition(":")
        key = key.strip().lower()
        value = value.strip()
        if key == "states":
            states = tuple(value.split())
            if not states:
                raise ParseError("states line is empty", line=ln)
        elif key == "alphabet":
            alphabet = tuple(value.split())
        elif key == "blank":
            if len(value.split()) != 1:
                raise ParseError("blank must be a single symbol", line=ln)
            blank = value
        elif key == "start":
            start = value
        elif key == "halt":
            halt = value
        elif key == "delta":
            if "->" not in value:
                raise ParseError("delta line needs '->'", line=ln)
            lhs, _, rhs = value.partition("->")
            lhs, rhs = lhs.split(), rhs.split()
            if len(lhs) != 2 or len(rhs) != 3:
                raise ParseError("delta line must be 'q s -> q' s' M'", line=ln)
            q, s = lhs
            q2, s2, mv = rhs
            if mv not in MOVES:
                raise ParseError(f"bad move {mv!r} (want L, R or S)", line=ln)
            if (q, s) in delta:
                raise ParseError(f"duplicate delta entry for ({q}, {s})", line=ln)
            delta[(q, s)] = (q2, s2, mv)
        else:
            raise ParseError(f"unknown key {key!r}", line=ln)
    for name, val in (("states", states), ("alphabet", alphabet), ("blank", blank),
                      ("start", start), ("halt", halt)):
        if val is None:
            raise ParseError(f"missing {name!r} section")
    machine = TuringMachine(states=states, alphabet=alphabet, blank=blank,
                            start=start, halt=halt, delta=delta)
    machine.validate()
    return machine


def load_machine(name: str) -> TuringMachine:
    """Load one of the bundled machines (`successor`, `flip3`)."""
    data = resources.files("tmflow.machines").joinpath(f"{name}.tm").read_text("utf-8")
    return parse_tm(data)
