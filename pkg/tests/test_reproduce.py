"""
Tests for the reproduction runner and the bundled golden values.
"""

import json
import pytest
import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

DATA = Path(__file__).parent.parent / "data"


class TestGoldenFiles:
    """Tests for loading golden files."""

    def test_bundled_goldens(self):
        """Test that both worked examples are bundled and valid."""
        from qpkit.reproduce import bundled_goldens, load_golden

        names = sorted(load_golden(p).name for p in bundled_goldens())

        assert names == ["auslander_a4", "slice_example"]

    def test_malformed_golden(self, tmp_path):
        """Test that a JSON syntax error is a format error."""
        from qpkit.errors import QuiverFormatError
        from qpkit.reproduce import load_golden

        path = tmp_path / "golden.json"
        path.write_text("{")
        with pytest.raises(QuiverFormatError):
            load_golden(path)

    def test_unknown_kind(self, tmp_path):
        """Test that the kind must be slice or auslander."""
        from qpkit.errors import QuiverFormatError
        from qpkit.reproduce import load_golden

        golden = json.loads((DATA / "golden_auslander_a4.json").read_text())
        golden["kind"] = "other"
        path = tmp_path / "golden.json"
        path.write_text(json.dumps(golden))
        with pytest.raises(QuiverFormatError) as exc:
            load_golden(path)

        assert "kind" in str(exc.value)


class TestReproductionRunner:
    """Tests for ReproductionRunner."""

    def test_auslander_values(self):
        """Test the Auslander example end to end and the tool-call log."""
        from qpkit.reproduce import ReproductionRunner

        runner = ReproductionRunner()
        report = runner.run([DATA / "golden_auslander_a4.json"])

        assert report.ok
        assert report.compared == 7
        assert report.examples == ["auslander_a4"]
        assert len(runner.tool_calls_log) == 1
        entry = runner.tool_calls_log[0]
        assert entry["tool_name"] == "auslander_example"
        assert entry["success"] is True
        assert entry["result_summary"] == "10 vertices, 6 new arrows"

    def test_slice_example(self):
        """Test every golden value of the preinjective worked example."""
        from qpkit.reproduce import ReproductionRunner, load_golden

        runner = ReproductionRunner()
        golden = load_golden(DATA / "golden_slice_example.json")
        compared, mismatches = runner.compare(golden)

        assert compared == len(golden.values)
        assert [m.key for m in mismatches] == []
        assert [e["tool_name"] for e in runner.tool_calls_log] == ["slice_pipeline", "knit"]

    def test_missing_value_is_a_mismatch(self, tmp_path):
        """Test that a golden key the runner cannot produce is reported."""
        from qpkit.reproduce import MISSING, ReproductionRunner, load_golden

        golden = load_golden(DATA / "golden_auslander_a4.json")
        golden.values["no_such_value"] = 1
        compared, mismatches = ReproductionRunner().compare(golden)

        assert compared == 8
        assert len(mismatches) == 1
        assert mismatches[0].actual == json.dumps(MISSING)

    def test_failed_tool_is_reported(self):
        """Test that a tool error becomes a single mismatch."""
        from qpkit.reproduce import ReproductionRunner
        from qpkit.schemas import GoldenValues

        golden = GoldenValues(
            name="broken",
            kind="auslander",
            input={"vertices": ["1", "2"], "arrows": [{"id": "a", "source": "1", "target": "2"}, {"id": "b", "source": "1", "target": "2"}]},
            values={"vertices": 0},
        )
        runner = ReproductionRunner(bound=8)
        compared, mismatches = runner.compare(golden)

        assert compared == 1
        assert mismatches[0].key == "broken.error"
        assert runner.tool_calls_log[0]["success"] is False

    def test_vector_order_relabels_a_value(self):
        """Test that a dimension vector is compared in the vertex order its golden entry names."""
        from qpkit.reproduce import ReproductionRunner, load_golden

        golden = load_golden(DATA / "golden_slice_example.json")
        golden.vector_orders["M.dims"] = ["3", "2", "1"]
        golden.values["M.dims"] = [list(reversed(v)) for v in golden.values["M.dims"]]
        compared, mismatches = ReproductionRunner().compare(golden)

        assert compared == len(golden.values)
        assert mismatches == []


class TestVectorOrders:
    """Tests for per-entry vertex orders in golden files."""

    def test_order_must_be_a_permutation(self, tmp_path):
        """Test that an order missing a vertex is refused when the golden is loaded."""
        from qpkit.errors import QuiverFormatError
        from qpkit.reproduce import load_golden

        golden = json.loads((DATA / "golden_slice_example.json").read_text())
        golden["vector_orders"]["F.hat"] = ["3", "2", "2"]
        path = tmp_path / "golden.json"
        path.write_text(json.dumps(golden))
        with pytest.raises(QuiverFormatError) as exc:
            load_golden(path)

        assert "F.hat" in str(exc.value)
        assert "permutation" in str(exc.value)
