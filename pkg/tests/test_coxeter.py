"""
Unit tests for Coxeter groups of quiver graphs.
"""

import pytest
import random
import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))


def _system(arrows, vertices=("1", "2", "3")):
    from qpkit.coxeter import system_from_quiver
    from qpkit.quiver import quiver_from_dict

    q = quiver_from_dict(
        {
            "vertices": list(vertices),
            "arrows": [{"id": f"x{k}", "source": s, "target": t} for k, (s, t) in enumerate(arrows)],
        }
    )
    return system_from_quiver(q)


class TestSystem:
    """Tests for braid exponents."""

    def test_exponents_from_edges(self):
        """Test m = 2, 3, infinity for 0, 1, 2 edges."""
        from qpkit.coxeter import INFINITY

        s = _system([("1", "2"), ("3", "2"), ("3", "2")])

        assert s.exponent("1", "2") == 3
        assert s.exponent("2", "3") == INFINITY
        assert s.exponent("1", "3") == 2
        assert s.exponent("1", "1") == 1

    def test_orientation_does_not_matter(self):
        """Test that the graph, not the orientation, defines the group."""
        assert _system([("1", "2"), ("2", "3")]) == _system([("2", "1"), ("2", "3")])


class TestWords:
    """Tests for reducedness and length."""

    def test_slice_word(self):
        """Test the word 232132 in the group with m_23 = infinity."""
        from qpkit.coxeter import is_reduced, length, parse_word

        s = _system([("1", "2"), ("3", "2"), ("3", "2")])
        w = parse_word(s, "232132")

        assert is_reduced(s, w)
        assert length(s, w) == 6

    def test_square_is_not_reduced(self):
        """Test s s = 1."""
        from qpkit.coxeter import is_reduced, length

        s = _system([("1", "2")])

        assert not is_reduced(s, ["1", "1"])
        assert length(s, ["1", "1"]) == 0
        assert is_reduced(s, [])

    def test_braid_relation(self):
        """Test 121 = 212 and 1212 = 21 in type A2."""
        from qpkit.coxeter import equal_elements, is_reduced, length

        s = _system([("1", "2")], vertices=("1", "2"))

        assert equal_elements(s, ["1", "2", "1"], ["2", "1", "2"])
        assert is_reduced(s, ["1", "2", "1"])
        assert not is_reduced(s, ["1", "2", "1", "2"])
        assert length(s, ["1", "2", "1", "2"]) == 2

    def test_longest_element_of_a3(self):
        """Test that w0 of A3 has length 6."""
        from qpkit.coxeter import is_reduced, length

        s = _system([("1", "2"), ("2", "3")])
        w0 = list("121321")

        assert is_reduced(s, w0)
        assert length(s, w0 + ["2"]) == 5

    def test_commuting_generators(self):
        """Test that 13 = 31 when m_13 = 2."""
        from qpkit.coxeter import equal_elements

        s = _system([("1", "2"), ("2", "3")])

        assert equal_elements(s, ["1", "3"], ["3", "1"])
        assert not equal_elements(s, ["1", "2"], ["2", "1"])

    def test_length_bounded_by_word(self):
        """Test length <= letters and equality exactly for reduced words."""
        from qpkit.coxeter import is_reduced, length

        rng = random.Random(7)
        s = _system([("1", "2"), ("2", "3"), ("3", "1"), ("3", "1")])
        for _ in range(25):
            w = [rng.choice("123") for _ in range(rng.randint(0, 7))]
            n = length(s, w)
            assert n <= len(w)
            assert n % 2 == len(w) % 2
            assert (n == len(w)) == is_reduced(s, w)


    def test_braid_moves_preserve_the_element(self):
        """Test that commutations, braid moves and inserting ss change neither the element nor its length."""
        from qpkit.coxeter import equal_elements, length

        rng = random.Random(7)
        s = _system([("1", "2"), ("3", "2"), ("3", "2")])
        moves = {
            ("1", "3"): ("3", "1"),
            ("3", "1"): ("1", "3"),
            ("1", "2", "1"): ("2", "1", "2"),
            ("2", "1", "2"): ("1", "2", "1"),
        }
        for _ in range(25):
            w = [rng.choice("123") for _ in range(rng.randint(0, 7))]
            n = length(s, w)
            v = list(w)
            for _ in range(6):
                spots = [(k, m) for k in range(len(v)) for m in moves if tuple(v[k:k + len(m)]) == m]
                if spots and rng.random() < 0.7:
                    k, m = rng.choice(spots)
                    v[k:k + len(m)] = moves[m]
                else:
                    k = rng.randint(0, len(v))
                    g = rng.choice("123")
                    v[k:k] = [g, g]
            assert length(s, v) == n
            assert equal_elements(s, w, v)


class TestParsing:
    """Tests for word parsing and formatting."""

    def test_unknown_letter(self):
        """Test that a letter outside the generators is a format error."""
        from qpkit.coxeter import parse_word
        from qpkit.errors import QuiverFormatError

        with pytest.raises(QuiverFormatError) as exc:
            parse_word(_system([("1", "2")]), "124")

        assert exc.value.location == "word[2]"

    def test_comma_separated(self):
        """Test multi-character generator ids."""
        from qpkit.coxeter import format_word, parse_word

        s = _system([("u1", "u2")], vertices=("u1", "u2"))
        w = parse_word(s, "u1, u2,u1")

        assert w == ["u1", "u2", "u1"]
        assert format_word(s, w) == "u1,u2,u1"
