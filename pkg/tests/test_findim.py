"""
Unit tests for bound quiver algebras: modules, resolutions, Ext^2(DA, A),
Tor_2 nilpotency and the completion quiver.
"""

import json
import pytest
import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

SAMPLES = Path(__file__).parent.parent / "data" / "samples"


def _zero_relation():
    """1 -> 2 -> 3 with ab = 0."""
    from qpkit.findim import algebra_from_dict

    return algebra_from_dict(json.loads((SAMPLES / "a3_zero_relation.json").read_text()), 12)


def _hereditary():
    from qpkit.findim import algebra_from_dict

    data = json.loads((SAMPLES / "a3_zero_relation.json").read_text())
    data["relations"] = []
    return algebra_from_dict(data, 12)


class TestBoundAlgebra:
    """Tests for the normal-word basis."""

    def test_dimensions(self):
        """Test that killing ab leaves three vertices and two arrows."""
        A = _zero_relation()

        assert A.dim == 5
        assert A.pair_dim("1", "2") == 1
        assert A.pair_dim("1", "3") == 0
        assert _hereditary().dim == 6

    def test_relation_must_be_admissible(self):
        """Test that a relation containing an arrow is refused."""
        from qpkit.errors import AlgebraError
        from qpkit.findim import algebra_from_dict

        data = json.loads((SAMPLES / "a3_zero_relation.json").read_text())
        data["relations"] = [[{"coeff": "1", "path": ["a"]}]]
        with pytest.raises(AlgebraError):
            algebra_from_dict(data, 12)

    def test_relation_location(self):
        """Test that a bad relation path is reported with its location."""
        from qpkit.errors import QuiverFormatError
        from qpkit.findim import algebra_from_dict

        data = json.loads((SAMPLES / "a3_zero_relation.json").read_text())
        data["relations"] = [[{"coeff": "1", "path": ["b", "a"]}]]
        with pytest.raises(QuiverFormatError) as exc:
            algebra_from_dict(data, 12)

        assert exc.value.location == "algebra.relations[0][0].path"


class TestModules:
    """Tests for projectives, injectives, simples and representations."""

    def test_indecomposable_dimension_vectors(self):
        """Test P_i = e_i A and I_i = D(A e_i) as right modules."""
        from qpkit.findim import injective, projective, simple

        A = _zero_relation()

        assert projective(A, "1").dim_vector == (1, 1, 0)
        assert projective(A, "3").dim_vector == (0, 0, 1)
        assert injective(A, "3").dim_vector == (0, 1, 1)
        assert injective(A, "1").dim_vector == (1, 0, 0)
        assert simple(A, "2").dim_vector == (0, 1, 0)

    def test_projectives_sum_to_algebra(self):
        """Test that the projectives add up to dim A."""
        from qpkit.findim import projective

        A = _zero_relation()

        assert sum(projective(A, v).total for v in A.vertices) == A.dim

    def test_representation_must_satisfy_relations(self):
        """Test that a representation on which ab acts nonzero is rejected."""
        from qpkit.errors import AlgebraError
        from qpkit.findim import representation_from_dict

        data = {"dims": {"1": 1, "2": 1, "3": 1}, "maps": {"a": [["1"]], "b": [["1"]]}}
        with pytest.raises(AlgebraError):
            representation_from_dict(_zero_relation(), data)

    def test_representation_shape(self):
        """Test that a map of the wrong shape is a format error."""
        from qpkit.errors import QuiverFormatError
        from qpkit.findim import representation_from_dict

        data = {"dims": {"1": 1, "2": 2}, "maps": {"a": [["1"]]}}
        with pytest.raises(QuiverFormatError):
            representation_from_dict(_zero_relation(), data)

    def test_hom_between_projectives(self):
        """Test dim Hom(P_j, P_i) = dim e_i A e_j."""
        from qpkit.findim import hom_space, projective

        A = _hereditary()

        assert len(hom_space(projective(A, "2"), projective(A, "1"))) == 1
        assert len(hom_space(projective(A, "1"), projective(A, "2"))) == 0


class TestHomological:
    """Tests for resolutions and global dimension."""

    def test_projective_dimensions(self):
        """Test 0 -> P3 -> P2 -> P1 -> S1 -> 0."""
        from qpkit.findim import projective_dimension, simple

        A = _zero_relation()

        assert projective_dimension(A, simple(A, "1"), 64) == 2
        assert projective_dimension(A, simple(A, "2"), 64) == 1
        assert projective_dimension(A, simple(A, "3"), 64) == 0

    def test_global_dimension(self):
        """Test gldim 2 with the relation and 1 without."""
        from qpkit.findim import global_dimension

        assert global_dimension(_zero_relation(), 64) == 2
        assert global_dimension(_hereditary(), 64) == 1

    def test_ext2_between_simples(self):
        """Test that the relation from 1 to 3 gives Ext^2(S1, S3)."""
        from qpkit.findim import ext_dim, simple

        A = _zero_relation()

        assert ext_dim(A, simple(A, "1"), simple(A, "3"), 2) == 1
        assert ext_dim(A, simple(A, "1"), simple(A, "2"), 2) == 0
        assert ext_dim(A, simple(A, "1"), simple(A, "2"), 1) == 1

    def test_euler_form_of_modules(self):
        """Test dim Hom(M, N) - dim Ext^1(M, N) = <dim M, dim N> over hereditary A2 and A3."""
        from qpkit.findim import algebra_from_dict, ext_dim, hom_space, injective, projective, simple
        from qpkit.mesh import euler_form

        quivers = [
            [("1", "2")],
            [("1", "2"), ("2", "3")],
            [("1", "2"), ("3", "2")],
        ]
        for arrows in quivers:
            vertices = sorted({v for arrow in arrows for v in arrow})
            data = {
                "quiver": {
                    "vertices": vertices,
                    "arrows": [{"id": f"a{k}", "source": s, "target": t} for k, (s, t) in enumerate(arrows)],
                },
                "relations": [],
            }
            A = algebra_from_dict(data, 12)
            modules = [make(A, v) for make in (projective, injective, simple) for v in A.vertices]
            for M in modules:
                for N in modules:
                    chi = len(hom_space(M, N)) - ext_dim(A, M, N, 1)
                    assert chi == euler_form(A.quiver, M.dim_vector, N.dim_vector)
                    assert ext_dim(A, M, N, 2) == 0

    def test_ar_translate_of_projective_is_zero(self):
        """Test tau P = 0."""
        from qpkit.findim import ar_translate, projective

        A = _hereditary()

        assert ar_translate(A, projective(A, "2")).is_zero()


class TestCompletion:
    """Tests for Ext^2(DA, A), Tor_2 nilpotency and the completion quiver."""

    def test_ext2_bimodule(self):
        """Test that only I_1 = S_1 contributes, against P_3."""
        from qpkit.findim import ext2_bimodule

        X = ext2_bimodule(_zero_relation())

        assert X.total == 1
        assert X.dims[("3", "1")] == 1

    def test_ext2_vanishes_for_hereditary(self):
        """Test X = 0 when gldim A = 1."""
        from qpkit.findim import ext2_bimodule

        assert ext2_bimodule(_hereditary()).is_zero()

    def test_bimodule_actions_are_valid(self):
        """Test that Ext^2(DA, A) and its tensor square are bimodules."""
        from qpkit.findim import ext2_bimodule

        X = ext2_bimodule(_zero_relation())
        X.validate()
        square = X.tensor(X)
        square.validate()

        assert square.is_zero()

    def test_bimodule_must_kill_relations(self):
        """Test that validate rejects a left action on which ab is nonzero."""
        from qpkit import linalg
        from qpkit.errors import AlgebraError
        from qpkit.findim import Bimodule

        A = _zero_relation()
        V = A.vertices
        dims = {(i, j): int(j == "1") for i in V for j in V}
        left = {}
        for a in A.quiver.arrows:
            for j in V:
                left[(a.id, j)] = linalg.matrix([[1]]) if j == "1" else linalg.zeros(0, 0)
        right = {}
        for a in A.quiver.arrows:
            for i in V:
                right[(i, a.id)] = linalg.zeros(dims[(i, a.target)], dims[(i, a.source)])
        with pytest.raises(AlgebraError) as exc:
            Bimodule(A, dims, left, right).validate()

        assert "left" in str(exc.value)

    def test_tor2_nilpotent(self):
        """Test that both nilpotency criteria agree."""
        from qpkit.findim import tor2_nilpotent

        report = tor2_nilpotent(_zero_relation(), 64)

        assert report.nilpotent is True
        assert report.agree
        assert report.index == 2

    def test_criteria_must_give_the_same_index(self):
        """Test that agree compares the two indices, not only their existence."""
        from qpkit.findim import NilpotencyReport

        assert NilpotencyReport(nilpotent=True, index=2, functor_index=2).agree
        assert not NilpotencyReport(nilpotent=True, index=2, functor_index=3).agree
        assert not NilpotencyReport(nilpotent=True, index=2, functor_index=None).agree

    def test_tilde_quiver_adds_reverse_arrow(self):
        """Test that the relation 1 -> 3 adds one arrow 3 -> 1."""
        from qpkit.findim import tilde_quiver

        tq = tilde_quiver(_zero_relation())

        assert tq.added == {("1", "3"): 1}
        assert len(tq.new_arrows) == 1
        assert tq.new_arrows[0].source == "3"
        assert tq.new_arrows[0].target == "1"
        assert len(tq.quiver.arrows) == 3

    def test_tilde_quiver_of_hereditary(self):
        """Test that a hereditary algebra gains no arrows."""
        from qpkit.findim import tilde_quiver

        tq = tilde_quiver(_hereditary())

        assert tq.new_arrows == []

    def test_round_trip_to_dict(self):
        """Test that serialized algebras rebuild with the same dimension."""
        from qpkit.findim import algebra_from_dict, algebra_to_dict

        A = _zero_relation()

        assert algebra_from_dict(algebra_to_dict(A), 12).dim == A.dim
