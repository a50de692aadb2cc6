"""
Unit tests for quivers: validation, constructions and path counts.
"""

import pytest
import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))


def _slice_quiver():
    from qpkit.quiver import quiver_from_dict

    return quiver_from_dict(
        {
            "vertices": ["1", "2", "3"],
            "arrows": [
                {"id": "a", "source": "1", "target": "2"},
                {"id": "b", "source": "3", "target": "2"},
                {"id": "c", "source": "3", "target": "2"},
            ],
        }
    )


class TestQuiverFromDict:
    """Tests for quiver validation."""

    def test_valid_quiver(self):
        """Test that a well-formed quiver keeps its vertex order and arrows."""
        q = _slice_quiver()

        assert q.vertices == ("1", "2", "3")
        assert len(q.arrows) == 3
        assert q.arrow("b").source == "3"
        assert not q.is_graded

    def test_duplicate_vertex(self):
        """Test that duplicate vertex ids are reported with their location."""
        from qpkit.errors import QuiverFormatError
        from qpkit.quiver import quiver_from_dict

        with pytest.raises(QuiverFormatError) as exc:
            quiver_from_dict({"vertices": ["1", "1"], "arrows": []})

        assert exc.value.location == "quiver.vertices[1]"
        assert "duplicate vertex" in str(exc.value)

    def test_dangling_endpoint(self):
        """Test that an arrow into an unknown vertex is rejected."""
        from qpkit.errors import QuiverFormatError
        from qpkit.quiver import quiver_from_dict

        with pytest.raises(QuiverFormatError) as exc:
            quiver_from_dict({"vertices": ["1"], "arrows": [{"id": "a", "source": "1", "target": "9"}]})

        assert exc.value.location == "quiver.arrows[0].target"

    def test_duplicate_arrow(self):
        """Test that arrow ids must be unique."""
        from qpkit.errors import QuiverFormatError
        from qpkit.quiver import quiver_from_dict

        arrow = {"id": "a", "source": "1", "target": "1"}
        with pytest.raises(QuiverFormatError):
            quiver_from_dict({"vertices": ["1"], "arrows": [arrow, arrow]})

    def test_malformed_json(self):
        """Test that JSON syntax errors carry a line and column."""
        from qpkit.errors import QuiverFormatError
        from qpkit.quiver import load_quiver

        with pytest.raises(QuiverFormatError) as exc:
            load_quiver('{"vertices": ["1",]}')

        assert "line 1" in str(exc.value)

    def test_vertices_must_be_strings(self):
        """Test that numeric vertex ids are rejected."""
        from qpkit.errors import QuiverFormatError
        from qpkit.quiver import quiver_from_dict

        with pytest.raises(QuiverFormatError):
            quiver_from_dict({"vertices": [1, 2]})


class TestConstructions:
    """Tests for opposite and double quivers."""

    def test_opposite_reverses_arrows(self):
        """Test that every arrow is reversed and ids are kept."""
        from qpkit.quiver import opposite_quiver

        op = opposite_quiver(_slice_quiver())

        assert op.arrow("a").source == "2"
        assert op.arrow("a").target == "1"
        assert opposite_quiver(op) == _slice_quiver()

    def test_double_adds_starred_arrows(self):
        """Test that a* runs opposite to a."""
        from qpkit.quiver import double_quiver

        dq = double_quiver(_slice_quiver())

        assert len(dq.arrows) == 6
        assert dq.arrow("b*").source == "2"
        assert dq.arrow("b*").target == "3"

    def test_double_rejects_reserved_suffix(self):
        """Test that an arrow already ending in * cannot be doubled."""
        from qpkit.errors import QuiverFormatError
        from qpkit.quiver import double_quiver, quiver_from_dict

        q = quiver_from_dict({"vertices": ["1", "2"], "arrows": [{"id": "a*", "source": "1", "target": "2"}]})
        with pytest.raises(QuiverFormatError):
            double_quiver(q)

    def test_canonical_form_sorts(self):
        """Test that the canonical JSON sorts vertices and arrows."""
        from qpkit.quiver import quiver_from_dict, quiver_to_dict

        q = quiver_from_dict(
            {
                "vertices": ["2", "1"],
                "arrows": [
                    {"id": "b", "source": "2", "target": "1"},
                    {"id": "a", "source": "1", "target": "2"},
                ],
            }
        )
        data = quiver_to_dict(q)

        assert data["vertices"] == ["1", "2"]
        assert [a["id"] for a in data["arrows"]] == ["a", "b"]
        assert "degree" not in data["arrows"][0]


class TestPathCounts:
    """Tests for acyclicity and path counting."""

    def test_path_counts(self):
        """Test that parallel arrows give parallel paths."""
        from qpkit.quiver import path_count

        q = _slice_quiver()

        assert path_count(q, "3", "2") == 2
        assert path_count(q, "1", "2") == 1
        assert path_count(q, "2", "1") == 0
        assert path_count(q, "2", "2") == 1

    def test_cycle_detection(self):
        """Test that an oriented cycle is found."""
        from qpkit.errors import QuiverFormatError
        from qpkit.quiver import is_acyclic, path_counts, quiver_from_dict

        q = quiver_from_dict(
            {
                "vertices": ["1", "2"],
                "arrows": [
                    {"id": "a", "source": "1", "target": "2"},
                    {"id": "b", "source": "2", "target": "1"},
                ],
            }
        )

        assert not is_acyclic(q)
        assert is_acyclic(_slice_quiver())
        with pytest.raises(QuiverFormatError):
            path_counts(q)

    def test_longest_path(self):
        """Test the longest path of a linear quiver."""
        from qpkit.quiver import longest_path_length, quiver_from_dict

        q = quiver_from_dict(
            {
                "vertices": ["1", "2", "3", "4"],
                "arrows": [
                    {"id": "a", "source": "1", "target": "2"},
                    {"id": "b", "source": "2", "target": "3"},
                    {"id": "c", "source": "3", "target": "4"},
                ],
            }
        )

        assert longest_path_length(q) == 3
        assert longest_path_length(_slice_quiver()) == 1
