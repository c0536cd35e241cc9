import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tmflow.encoding import (
    DecodeError,
    decode_config,
    encode_config,
    encode_word,
    pair2,
    pair_k,
    psi,
    psi3,
    unpair2,
    unpair_k,
)
from tmflow.tm import Configuration, initial_config, load_machine, run_n, step


def brute_force_unpair_table(n: int):
    """Independent oracle: enumerate diagonals in dovetail order."""
    table = []
    d = 0
    while len(table) < n:
        for x in range(d + 1):
            table.append((x, d - x))
        d += 1
    return table[:n]


class TestPair2:
    def test_dovetail_diagram_values(self):
        assert pair2(0, 0) == 0
        assert pair2(0, 1) == 1
        assert pair2(1, 0) == 2
        assert pair2(0, 2) == 3
        assert pair2(2, 0) == 5  # ((2)^2 + 6)/2

    def test_injective_below_200(self):
        seen = set()
        for x in range(201):
            for y in range(201):
                z = pair2(x, y)
                assert z not in seen
                seen.add(z)

    def test_enumerates_diagonals_in_order(self):
        # codes 0..N-1 are exactly the dovetail enumeration
        table = brute_force_unpair_table(500)
        for z, (x, y) in enumerate(table):
            assert pair2(x, y) == z

    def test_rejects_negatives(self):
        with pytest.raises(ValueError):
            pair2(-1, 0)


class TestUnpair2:
    def test_small_values(self):
        assert unpair2(0) == (0, 0)
        assert unpair2(2) == (1, 0)

    def test_first_component_prefix_vs_bruteforce(self):
        table = brute_force_unpair_table(6)
        assert [t[0] for t in table] == [0, 0, 1, 0, 1, 2]
        for z in range(6):
            assert unpair2(z) == table[z]

    def test_matches_bruteforce_oracle(self):
        table = brute_force_unpair_table(5000)
        for z in range(5000):
            assert unpair2(z) == table[z]

    def test_roundtrip_below_million(self):
        for z in range(1_000_000):
            x, y = unpair2(z)
            if pair2(x, y) != z:
                raise AssertionError(z)


class TestPairK:
    def test_examples(self):
        assert pair_k((0, 0, 0)) == 0
        assert pair_k((1, 0, 0)) == pair2(pair2(1, 0), 0) == 5

    def test_componentwise_dominance_exhaustive(self):
        for a in range(0, 61, 3):
            for b in range(0, 61, 3):
                for c in range(0, 61, 3):
                    z = pair_k((a, b, c))
                    assert z >= a and z >= b and z >= c

    def test_dominance_dense_small(self):
        for a in range(25):
            for b in range(25):
                for c in range(25):
                    z = pair_k((a, b, c))
                    assert z >= max(a, b, c)

    @settings(max_examples=300, deadline=None)
    @given(st.lists(st.integers(min_value=0, max_value=10**9),
                    min_size=2, max_size=6))
    def test_roundtrip_random_tuples(self, xs):
        xs = tuple(xs)
        assert unpair_k(pair_k(xs), len(xs)) == xs

    def test_rejects_short_tuples(self):
        with pytest.raises(ValueError):
            pair_k((3,))
        with pytest.raises(ValueError):
            unpair_k(5, 1)


class TestConfigCodec:
    def test_unary_word_code(self):
        m = load_machine("successor")
        assert encode_word(m, "111") == 7  # 1 + 2 + 4 = 2^3 - 1

    def test_empty_words_code_to_zero(self):
        m = load_machine("successor")
        enc = encode_config(m, initial_config(m, ""))
        assert enc.y1 == 0 and enc.y2 == 0 and enc.q == 1

    def test_decode_rejects_bad_state(self):
        m = load_machine("successor")
        bad = pair_k((0, 0, 7))
        with pytest.raises(DecodeError):
            decode_config(m, bad)

    def test_encode_decode_identity_below_1e5(self):
        m = load_machine("flip3")
        decoded = 0
        for c in range(100_000):
            try:
                config = decode_config(m, c)
            except DecodeError:
                continue
            decoded += 1
            assert encode_config(m, config).c == c
        assert decoded > 1000

    def test_mutual_inverse_on_orbit(self):
        m = load_machine("flip3")
        for config in run_n(m, initial_config(m, "ab"), 15):
            enc = encode_config(m, config)
            assert decode_config(m, enc) == config
            assert decode_config(m, enc.c) == config


class TestPsi:
    def test_halted_code_is_fixed_point(self):
        m = load_machine("successor")
        halted = encode_config(m, Configuration(u=("1",), v=("1",), q=2))
        assert psi(m, halted.c) == halted.c

    def test_successor_orbit_reaches_halted_code(self):
        m = load_machine("successor")
        c = encode_config(m, initial_config(m, "11")).c
        seen = [c]
        for _ in range(10):
            c = psi(m, c)
            seen.append(c)
        final = decode_config(m, seen[-1])
        assert final.q == m.state_index("qh")
        assert seen[-1] == seen[-2]

    def test_commutes_with_step_on_random_configs(self):
        m = load_machine("flip3")
        rng = random.Random(11)
        checked = 0
        while checked < 1000:
            c = pair_k((rng.randint(0, 10 ** 6), rng.randint(0, 10 ** 6),
                        rng.randint(1, m.m)))
            config = decode_config(m, c)
            assert psi(m, c) == encode_config(m, step(m, config)).c
            checked += 1

    def test_psi3_total_on_junk(self):
        m = load_machine("successor")
        assert psi3(m, (4, 2, 9)) == (4, 2, 9)  # bad state: fixed point
        stepped = psi3(m, (3, 0, 1))
        assert stepped != (3, 0, 1)

    def test_psi_raises_on_junk(self):
        m = load_machine("successor")
        with pytest.raises(DecodeError):
            psi(m, pair_k((0, 0, 5)))
