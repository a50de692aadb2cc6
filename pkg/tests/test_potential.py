"""
Unit tests for quivers with potential: cyclic derivatives, Jacobian
algebras and the Ginzburg differential.
"""

import json
import pytest
import random
import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

SAMPLES = Path(__file__).parent.parent / "data" / "samples"


def _load(name):
    return json.loads((SAMPLES / name).read_text())


def _random_acyclic(rng, prefix="", max_vertices=5):
    """Vertices 1..n with every arrow going from a smaller to a larger label."""
    n = rng.randint(1, max_vertices)
    vertices = [f"{prefix}{k}" for k in range(1, n + 1)]
    arrows = []
    for k in range(rng.randint(0, 2 * n) if n > 1 else 0):
        s, t = sorted(rng.sample(range(1, n + 1), 2))
        arrows.append({"id": f"{prefix}a{k}", "source": f"{prefix}{s}", "target": f"{prefix}{t}"})
    return {"quiver": {"vertices": vertices, "arrows": arrows}, "potential": []}


def _random_piece(rng, prefix):
    """An acyclic quiver, the 3-cycle with W = abc or the loop with W = x^3."""
    kind = rng.choice(["acyclic", "triangle", "loop"])
    if kind == "acyclic":
        return _random_acyclic(rng, prefix, max_vertices=4)
    if kind == "triangle":
        v = [f"{prefix}{k}" for k in (1, 2, 3)]
        ids = [f"{prefix}{x}" for x in "abc"]
        return {
            "quiver": {
                "vertices": v,
                "arrows": [{"id": ids[k], "source": v[k], "target": v[(k + 1) % 3]} for k in range(3)],
            },
            "potential": [{"coeff": "1", "cycle": ids}],
        }
    return {
        "quiver": {"vertices": [f"{prefix}1"], "arrows": [{"id": f"{prefix}x", "source": f"{prefix}1", "target": f"{prefix}1"}]},
        "potential": [{"coeff": "1", "cycle": [f"{prefix}x"] * 3}],
    }


class TestCyclicDerivative:
    """Tests for cycles and cyclic derivatives."""

    def test_rotations_are_identified(self):
        """Test that rotations of a cycle give the same potential term."""
        from qpkit.potential import Potential, qp_from_dict

        q = qp_from_dict(_load("triangle_qp.json")).quiver
        w1 = Potential.from_terms(q, [(1, ["a", "b", "c"])])
        w2 = Potential.from_terms(q, [(1, ["b", "c", "a"])])

        assert w1 == w2
        assert not (w1 + w2.scale(-1))

    def test_derivative_of_triangle(self):
        """Test that d_a(abc) = bc."""
        from qpkit.paths import PathVector
        from qpkit.potential import cyclic_derivative, qp_from_dict

        qp = qp_from_dict(_load("triangle_qp.json"))

        assert cyclic_derivative(qp.potential, "a") == PathVector.of(qp.quiver, ["b", "c"])
        assert cyclic_derivative(qp.potential, "c") == PathVector.of(qp.quiver, ["a", "b"])

    def test_not_a_cycle(self):
        """Test that an open path is rejected as a potential term."""
        from qpkit.errors import QuiverFormatError
        from qpkit.potential import qp_from_dict

        data = _load("triangle_qp.json")
        data["potential"] = [{"coeff": "1", "cycle": ["a", "b"]}]
        with pytest.raises(QuiverFormatError) as exc:
            qp_from_dict(data)

        assert exc.value.location == "qp.potential[0].cycle"


class TestJacobian:
    """Tests for Jacobi-finiteness."""

    def test_triangle_is_finite(self):
        """Test that the 3-cycle with W = abc has a 6-dimensional Jacobian algebra."""
        from qpkit.potential import is_jacobi_finite, qp_from_dict

        verdict = is_jacobi_finite(qp_from_dict(_load("triangle_qp.json")), 12)

        assert verdict.kind == "Finite"
        assert verdict.dim == 6

    def test_free_loop_is_infinite(self):
        """Test that a loop without potential gives k[x]."""
        from qpkit.potential import is_jacobi_finite, qp_from_dict

        verdict = is_jacobi_finite(qp_from_dict(_load("free_loop_qp.json")), 12)

        assert verdict.kind == "Infinite"

    def test_loop_with_cubic_potential(self):
        """Test that W = x^3 gives k[x]/(x^2)."""
        from qpkit.potential import is_jacobi_finite, qp_from_dict

        data = _load("free_loop_qp.json")
        data["potential"] = [{"coeff": "1", "cycle": ["x", "x", "x"]}]
        verdict = is_jacobi_finite(qp_from_dict(data), 12)

        assert verdict.kind == "Finite"
        assert verdict.dim == 2


    def test_zero_potential_on_acyclic_quivers(self):
        """Test that J(Q, 0) = kQ has one basis path per path of Q."""
        from qpkit.paths import quotient_dims
        from qpkit.potential import jacobian, qp_from_dict
        from qpkit.quiver import path_counts

        rng = random.Random(7)
        for _ in range(20):
            qp = qp_from_dict(_random_acyclic(rng))
            verdict, dims = quotient_dims(jacobian(qp, 12))

            assert verdict.kind == "Finite"
            assert dims == path_counts(qp.quiver)
            assert verdict.dim == sum(dims.values())


class TestTriangularExtension:
    """Tests for gluing two QPs along connecting arrows."""

    def _pieces(self):
        from qpkit.potential import qp_from_dict

        qp = qp_from_dict(_load("triangle_qp.json"))
        loop = qp_from_dict(
            {
                "quiver": {"vertices": ["4"], "arrows": [{"id": "x", "source": "4", "target": "4"}]},
                "potential": [{"coeff": "1", "cycle": ["x", "x", "x"]}],
            }
        )
        return qp, loop

    def test_dimension_factorizes(self):
        """Test that dim J-bar splits as J' (x) kF (x) J pair by pair."""
        from qpkit.potential import is_jacobi_finite, triangular_extension, verify_triangular_dim

        qp, loop = self._pieces()
        connecting = [("f", "1", "4")]
        bar = triangular_extension(qp, loop, connecting)

        assert len(bar.quiver.arrows) == 5
        assert verify_triangular_dim(bar, qp, loop, connecting, 12)
        # 6 + 2 + (e_1 and c end at 1) * (e_4 and x)
        assert is_jacobi_finite(bar, 12).dim == 12

    def test_dimension_factorizes_on_random_pieces(self):
        """Test the pair-by-pair dimension count over random Jacobi-finite pieces and connectors."""
        from qpkit.potential import qp_from_dict, triangular_extension, verify_triangular_dim

        rng = random.Random(7)
        for _ in range(20):
            qp = qp_from_dict(_random_piece(rng, "L"))
            qp2 = qp_from_dict(_random_piece(rng, "R"))
            connecting = [
                (f"f{m}", rng.choice(qp.quiver.vertices), rng.choice(qp2.quiver.vertices))
                for m in range(rng.randint(1, 3))
            ]
            bar = triangular_extension(qp, qp2, connecting)

            assert len(bar.quiver.arrows) == len(qp.quiver.arrows) + len(qp2.quiver.arrows) + len(connecting)
            assert verify_triangular_dim(bar, qp, qp2, connecting, 12)

    def test_connector_direction(self):
        """Test that a connector must go from the first QP to the second."""
        from qpkit.errors import QuiverFormatError
        from qpkit.potential import triangular_extension

        qp, loop = self._pieces()
        with pytest.raises(QuiverFormatError):
            triangular_extension(qp, loop, [("f", "4", "1")])


class TestGinzburg:
    """Tests for the Ginzburg graded quiver."""

    def test_generators_and_degrees(self):
        """Test that a* has degree -1 and t_v has degree -2."""
        from qpkit.potential import ginzburg, qp_from_dict

        g = ginzburg(qp_from_dict(_load("triangle_qp.json")))

        assert len(g.quiver.arrows) == 9
        assert g.quiver.arrow("a*").degree == -1
        assert g.quiver.arrow("t_1").degree == -2
        assert g.quiver.arrow("t_1").source == "1"

    def test_differential_squares_to_zero(self):
        """Test that d^2 = 0 for the built-in differential."""
        from qpkit.paths import PathVector
        from qpkit.potential import ginzburg, qp_from_dict, verify_differential

        g = ginzburg(qp_from_dict(_load("triangle_qp.json")))

        assert verify_differential(g)
        assert g.differential["a"].is_zero()
        assert g.differential["a*"] == PathVector.of(g.quiver, ["b", "c"])

    def test_differential_squares_to_zero_on_random_potentials(self):
        """Test d^2 = 0 for random potentials built from closed walks of length 2 to 4."""
        from qpkit.paths import paths_of_length
        from qpkit.potential import ginzburg, qp_from_dict, verify_differential
        from qpkit.quiver import quiver_from_dict

        rng = random.Random(7)
        vertices = ["1", "2", "3"]
        for _ in range(50):
            arrows = [
                {"id": f"a{k}", "source": rng.choice(vertices), "target": rng.choice(vertices)}
                for k in range(rng.randint(1, 5))
            ]
            q = quiver_from_dict({"vertices": vertices, "arrows": arrows})
            cycles = [p for n in (2, 3, 4) for p in paths_of_length(q, n) if p.source == p.target]
            picked = rng.sample(cycles, min(len(cycles), rng.randint(1, 3)))
            potential = [{"coeff": str(rng.randint(-2, 2) or 1), "cycle": list(p.arrows)} for p in picked]
            g = ginzburg(qp_from_dict({"quiver": {"vertices": vertices, "arrows": arrows}, "potential": potential}))

            assert verify_differential(g)

    def test_leibniz_sign(self):
        """Test d(b* a*) = (ca)a* - b*(bc): the second term picks up (-1)^|b*|."""
        from qpkit.paths import PathVector
        from qpkit.potential import ginzburg, ginzburg_leibniz, qp_from_dict

        g = ginzburg(qp_from_dict(_load("triangle_qp.json")))
        hat = g.quiver
        result = ginzburg_leibniz(g, PathVector.of(hat, ["b*", "a*"]))

        assert result == PathVector.of(hat, ["c", "a", "a*"]) + PathVector.of(hat, ["b*", "b", "c"], -1)

    def test_override_breaks_d_squared(self):
        """Test that doubling d(a*) is detected."""
        from qpkit.potential import ginzburg, overrides_from_dict, qp_from_dict, verify_differential, with_override

        g = ginzburg(qp_from_dict(_load("triangle_qp.json")))
        bad = with_override(g, overrides_from_dict(g, _load("triangle_bad_override.json")))

        assert not verify_differential(bad)

    def test_override_unknown_generator(self):
        """Test that overriding a missing generator is a format error."""
        from qpkit.errors import QuiverFormatError
        from qpkit.potential import ginzburg, overrides_from_dict, qp_from_dict, with_override

        g = ginzburg(qp_from_dict(_load("triangle_qp.json")))
        with pytest.raises(QuiverFormatError):
            with_override(g, overrides_from_dict(g, {"z": []}))

    def test_reserved_names(self):
        """Test that t_-prefixed arrow ids are refused."""
        from qpkit.errors import QuiverFormatError
        from qpkit.potential import ginzburg, qp_from_dict

        data = {
            "quiver": {"vertices": ["1"], "arrows": [{"id": "t_x", "source": "1", "target": "1"}]},
            "potential": [],
        }
        with pytest.raises(QuiverFormatError):
            ginzburg(qp_from_dict(data))
