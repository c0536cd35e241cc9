import pytest

from tmflow.tm import (
    Configuration,
    ParseError,
    ValidationError,
    initial_config,
    load_machine,
    parse_tm,
    run_n,
    step,
    tape_string,
)

SAMPLE = """\
states: q0 qh
alphabet: 1
blank: B
start: q0
halt: qh
delta: q0 1 -> q0 1 R
delta: q0 B -> qh 1 S
delta: qh 1 -> qh 1 S
delta: qh B -> qh B S
"""


class TestParser:
    def test_sample_roundtrip(self):
        m = parse_tm(SAMPLE)
        assert m.m == 2
        assert m.alphabet == ("1",)
        assert m.k == 2
        assert m.start == "q0" and m.halt == "qh"

    def test_move_out_of_halt_rejected(self):
        bad = SAMPLE.replace("delta: qh 1 -> qh 1 S", "delta: qh 1 -> q0 1 R")
        with pytest.raises(ValidationError):
            parse_tm(bad)

    def test_empty_delta_rejected(self):
        text = "\n".join(l for l in SAMPLE.splitlines() if not l.startswith("delta"))
        with pytest.raises(ValidationError):
            parse_tm(text)

    def test_missing_delta_entry_rejected(self):
        text = "\n".join(l for l in SAMPLE.splitlines()
                         if "q0 B" not in l)
        with pytest.raises(ValidationError):
            parse_tm(text)

    def test_parse_error_carries_line_number(self):
        bad = SAMPLE + "delta: q0 1 q0 1 R\n"
        with pytest.raises(ParseError) as exc:
            parse_tm(bad)
        assert exc.value.line == 10

    def test_duplicate_delta_rejected(self):
        bad = SAMPLE + "delta: q0 1 -> qh 1 S\n"
        with pytest.raises(ParseError):
            parse_tm(bad)

    def test_comments_and_blanks_ignored(self):
        m = parse_tm("# header\n\n" + SAMPLE.replace("start: q0", "start: q0  # go"))
        assert m.start == "q0"

    def test_bundled_machines_load(self):
        assert load_machine("successor").m == 2
        assert load_machine("flip3").m == 3


class TestStep:
    def test_halting_configuration_maps_to_itself(self):
        m = parse_tm(SAMPLE)
        halted = Configuration(u=("1",), v=("1",), q=m.state_index("qh"))
        assert step(m, halted) == halted

    def test_successor_full_run_writes_next_numeral(self):
        # hand simulation: head reads blank (v empty), writes 1, halts
        m = parse_tm(SAMPLE)
        orbit = run_n(m, initial_config(m, "111"), 5)
        final = orbit[-1]
        assert final.q == m.state_index("qh")
        assert tape_string(m, final) == "1111"

    def test_write_then_move_left_shifts_into_v(self):
        # moving L: v gains the written symbol, u keeps the stripped rest
        m = parse_tm(SAMPLE.replace("delta: q0 B -> qh 1 S",
                                    "delta: q0 B -> qh 1 L"))
        start = Configuration(u=("1", "1"), v=(), q=m.state_index("q0"))
        nxt = step(m, start)
        assert nxt.v == ("1", "1")      # old u1, then the written symbol
        assert nxt.u == ("1",)          # remainder of u

    def test_blank_write_is_stripped_at_far_end(self):
        # overwriting the last nonblank of v with B leaves the empty word
        m = parse_tm(SAMPLE.replace("delta: q0 1 -> q0 1 R",
                                    "delta: q0 1 -> q0 B S"))
        start = Configuration(u=(), v=("1",), q=m.state_index("q0"))
        nxt = step(m, start)
        assert nxt.v == ()
        assert nxt.u == ()

    def test_interior_blank_kept_after_r_move(self):
        # writing B then moving R leaves an interior blank at the head side
        m = parse_tm(SAMPLE.replace("delta: q0 B -> qh 1 S",
                                    "delta: q0 B -> q0 B R"))
        start = Configuration(u=("1",), v=(), q=m.state_index("q0"))
        nxt = step(m, start)
        assert nxt.u == (m.blank, "1")
        assert nxt.v == ()


class TestRunN:
    def test_zero_steps_returns_start_only(self):
        m = parse_tm(SAMPLE)
        c0 = initial_config(m, "1")
        assert run_n(m, c0, 0) == [c0]

    def test_halted_start_absorbs(self):
        m = parse_tm(SAMPLE)
        halted = Configuration(u=(), v=("1",), q=m.state_index("qh"))
        orbit = run_n(m, halted, 5)
        assert len(orbit) == 6
        assert all(c == halted for c in orbit)

    def test_successor_on_11_stabilizes_at_111(self):
        m = parse_tm(SAMPLE)
        orbit = run_n(m, initial_config(m, "11"), 10)
        final = orbit[-1]
        assert final.q == m.state_index("qh")
        assert tape_string(m, final) == "111"
        assert orbit[-2] == final  # already stabilized

    def test_determinism(self):
        m = load_machine("flip3")
        c0 = initial_config(m, "ab")
        assert run_n(m, c0, 25) == run_n(m, c0, 25)

    def test_tape_conservation_one_cell_per_step(self):
        m = load_machine("flip3")
        orbit = run_n(m, initial_config(m, "ab"), 25)
        def nonblank(c):
            return sum(1 for s in c.u + c.v if s != m.blank)
        for a, b in zip(orbit, orbit[1:]):
            assert abs(nonblank(a) - nonblank(b)) <= 1

    def test_negative_count_rejected(self):
        m = parse_tm(SAMPLE)
        with pytest.raises(ValueError):
            run_n(m, initial_config(m, "1"), -1)
