"""
Unit tests for Euler forms, knitting and mesh categories.
"""

import json
import pytest
import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

SAMPLES = Path(__file__).parent.parent / "data" / "samples"


def _quiver(name):
    from qpkit.quiver import quiver_from_dict

    data = json.loads((SAMPLES / name).read_text())
    return quiver_from_dict(data.get("quiver", data))


class TestEulerForm:
    """Tests for the Euler form and the Coxeter transformation."""

    def test_euler_form_of_simples(self):
        """Test <S_i, S_j> = delta_ij - #arrows i -> j."""
        from qpkit.mesh import euler_form

        q = _quiver("slice_example.json")

        assert euler_form(q, (1, 0, 0), (1, 0, 0)) == 1
        assert euler_form(q, (0, 0, 1), (0, 1, 0)) == -2
        assert euler_form(q, (0, 1, 0), (0, 0, 1)) == 0

    def test_wrong_length(self):
        """Test that a dimension vector of the wrong length is refused."""
        from qpkit.mesh import euler_form

        with pytest.raises(ValueError):
            euler_form(_quiver("slice_example.json"), (1, 0), (1, 0, 0))

    def test_coxeter_inverse(self):
        """Test that tau^-1 undoes tau on a non-projective vector."""
        from qpkit.mesh import coxeter_translate_dim, coxeter_translate_inverse_dim

        q = _quiver("slice_example.json")
        x = (3, 8, 4)

        assert coxeter_translate_inverse_dim(q, coxeter_translate_dim(q, x)) == x

    def test_hom_equals_euler_form_on_window(self):
        """Test dim Hom(X, Y) = <X, Y> over the opposite quiver when Y is no further out."""
        from qpkit.mesh import MeshCategory, euler_form, knit_preinjective, mesh_hom
        from qpkit.quiver import opposite_quiver

        q = _quiver("slice_example.json")
        tq = knit_preinjective(q, 2)
        cat = MeshCategory(tq)
        op = opposite_quiver(q)
        for x in tq.vertices:
            for y in tq.vertices:
                if y[1] <= x[1]:
                    assert mesh_hom(cat, x, y).dim == euler_form(op, tq.dims[x], tq.dims[y])
                else:
                    assert mesh_hom(cat, x, y).dim == 0


class TestKnitting:
    """Tests for knitted components."""

    def test_preinjective_window(self):
        """Test the first three tau-powers of the injectives."""
        from qpkit.mesh import knit_preinjective

        tq = knit_preinjective(_quiver("slice_example.json"), 2)

        assert tq.dims[("1", 0)] == (1, 1, 0)
        assert tq.dims[("3", 0)] == (0, 2, 1)
        assert tq.dims[("1", 1)] == (0, 3, 2)
        assert tq.dims[("2", 1)] == (1, 4, 2)
        assert tq.dims[("3", 1)] == (2, 6, 3)
        assert tq.dims[("1", 2)] == (3, 8, 4)
        assert tq.dims[("2", 2)] == (3, 11, 6)
        assert tq.dims[("3", 2)] == (4, 16, 9)
        assert len(tq.vertices) == 9
        assert not tq.finite

    def test_mesh_additivity(self):
        """Test dim z + dim tau z = sum over the mesh."""
        from qpkit.mesh import knit_preinjective

        assert knit_preinjective(_quiver("slice_example.json"), 4).check_additivity() == []

    def test_tau_coordinates(self):
        """Test that tau raises p on a preinjective component."""
        from qpkit.mesh import knit_preinjective

        tq = knit_preinjective(_quiver("slice_example.json"), 2)

        assert tq.tau(("2", 1)) == ("2", 2)
        assert tq.tau(("2", 2)) is None
        assert tq.tau_inverse(("2", 0)) is None

    def test_dynkin_component_is_finite(self):
        """Test that A4 has ten indecomposables."""
        from qpkit.mesh import knit_preinjective

        tq = knit_preinjective(_quiver("a4_linear.json"), 64)

        assert tq.finite
        assert len(tq.vertices) == 10
        assert tq.check_additivity() == []

    def test_postprojective(self):
        """Test the postprojective knit of 1 -> 2 <- 3."""
        from qpkit.mesh import knit_postprojective

        tq = knit_postprojective(_quiver("a3_initial.json"), 4)

        assert tq.finite
        assert len(tq.vertices) == 6
        assert tq.dims[("2", 0)] == (1, 1, 1)
        assert tq.dims[("1", 0)] == (1, 0, 0)
        assert tq.tau(("1", 1)) == ("1", 0)

    def test_negative_depth(self):
        """Test that a negative depth is refused."""
        from qpkit.mesh import knit_preinjective

        with pytest.raises(ValueError):
            knit_preinjective(_quiver("a4_linear.json"), -1)

    def test_cyclic_quiver_refused(self):
        """Test that knitting needs an acyclic quiver."""
        from qpkit.errors import AlgebraError
        from qpkit.mesh import knit_preinjective

        with pytest.raises(AlgebraError):
            knit_preinjective(_quiver("triangle_qp.json"), 2)


class TestMeshCategory:
    """Tests for Hom spaces modulo the mesh ideal."""

    def test_parallel_arrows(self):
        """Test that the two arrows 3 -> 2 give a 2-dimensional Hom."""
        from qpkit.mesh import MeshCategory, knit_preinjective

        cat = MeshCategory(knit_preinjective(_quiver("slice_example.json"), 2))

        assert cat.hom_dim(("2", 1), ("3", 0)) == 2
        assert cat.hom_dim(("1", 2), ("1", 0)) == 3
        assert cat.hom_dim(("1", 0), ("1", 2)) == 0

    def test_killed_vertices(self):
        """Test that maps through a killed vertex vanish."""
        from qpkit.mesh import MeshCategory, knit_preinjective

        tq = knit_preinjective(_quiver("slice_example.json"), 2)
        full = MeshCategory(tq)
        cut = MeshCategory(tq, killed=[("1", 1)])

        assert full.hom_dim(("2", 2), ("2", 1)) == 4
        assert cut.hom_dim(("2", 2), ("2", 1)) == 3
        assert ("1", 1) not in cut.objects

    def test_outside_window(self):
        """Test that a vertex outside the window raises WindowError."""
        from qpkit.errors import WindowError
        from qpkit.mesh import MeshCategory, knit_preinjective

        cat = MeshCategory(knit_preinjective(_quiver("slice_example.json"), 2))
        with pytest.raises(WindowError):
            cat.hom_dim(("1", 5), ("1", 0))

    def test_mesh_hom_basis(self):
        """Test that mesh_hom returns the cached space with one basis path per dimension."""
        from qpkit.mesh import MeshCategory, knit_preinjective, mesh_hom

        cat = MeshCategory(knit_preinjective(_quiver("slice_example.json"), 2))
        x, y = ("2", 1), ("3", 0)
        space = mesh_hom(cat, x, y)

        assert (space.source, space.target) == (x, y)
        assert space.dim == 2
        assert len(set(space.basis)) == 2
        assert mesh_hom(cat, x, y) is space
        assert cat.compose(x, y, y, [0, 1], cat.identity(y)) == [0, 1]

    def test_identity_and_composition(self):
        """Test that composing with the identity changes nothing."""
        from qpkit.mesh import MeshCategory, knit_preinjective

        cat = MeshCategory(knit_preinjective(_quiver("slice_example.json"), 2))
        x, y = ("2", 1), ("3", 0)
        f = [1, 2]

        assert cat.compose(x, x, y, cat.identity(x), f) == [1, 2]
        assert cat.compose(x, y, y, f, cat.identity(y)) == [1, 2]


class TestAuslander:
    """Tests for the Auslander algebra of a Dynkin quiver."""

    def test_a4(self):
        """Test ten vertices and one mesh relation per non-projective."""
        from qpkit.findim import global_dimension
        from qpkit.mesh import auslander_algebra

        A, tq = auslander_algebra(_quiver("a4_linear.json"), 12)

        assert len(A.vertices) == 10
        assert len(A.relations) == 6
        assert global_dimension(A, 64) == 2

    def test_ext2_of_a4(self):
        """Test Ext^2(DA, A): fifteen nonzero pairs, six minimal generators."""
        from qpkit.findim import ext2_bimodule, ext2_simple_counts
        from qpkit.mesh import auslander_algebra

        A, _ = auslander_algebra(_quiver("a4_linear.json"), 12)
        X = ext2_bimodule(A, 64)
        X.validate()

        assert sum(1 for d in X.dims.values() if d) == 15
        assert max(X.dims.values()) == 1
        assert sum(ext2_simple_counts(A).values()) == 6

    def test_wild_quiver_refused(self):
        """Test that an infinite component is refused."""
        from qpkit.errors import AlgebraError
        from qpkit.mesh import auslander_algebra

        with pytest.raises(AlgebraError):
            auslander_algebra(_quiver("slice_example.json"), 12, depth=4)
