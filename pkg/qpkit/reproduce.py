"""
Reproduction of the worked examples against embedded golden values.

The runner calls the same tools as the CLI, keeps a log of every call and
diffs each golden value against the freshly computed one.
"""

import json
import logging
from pathlib import Path
from typing import Any, Optional, Sequence

from pydantic import ValidationError

from .config import DEFAULT_BOUND, DEFAULT_DMAX
from .errors import QuiverFormatError
from .schemas import DiffEntry, GoldenValues, ReproductionReport
from .tools import DATA_DIR, execute_tool

LOGGER = logging.getLogger(__name__)

MISSING = "<missing>"


def load_golden(path: Path) -> GoldenValues:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise QuiverFormatError(f"malformed JSON: {e.msg}", f"{path}: line {e.lineno}") from None
    try:
        return GoldenValues.model_validate(data)
    except ValidationError as e:
        err = e.errors()[0]
        raise QuiverFormatError(err["msg"], f"{path}: " + ".".join(str(x) for x in err["loc"])) from None


def bundled_goldens() -> list[Path]:
    return sorted(DATA_DIR.glob("golden_*.json"))


def _canonical(value: Any) -> str:
    return json.dumps(value, sort_keys=True)


def _arrow_counts(arrows: Sequence[dict], key: str = "count") -> dict[str, int]:
    counts: dict[str, int] = {}
    for a in arrows:
        name = f"{a['source']}->{a['target']}"
        counts[name] = counts.get(name, 0) + a.get(key, 1)
    return counts


class ReproductionRunner:
    """Runs the worked examples through the tool layer."""

    def __init__(self, d_max: int = DEFAULT_DMAX, bound: int = DEFAULT_BOUND):
        self.d_max = d_max
        self.bound = bound

        # Tool call log, one entry per execute_tool call
        self.tool_calls_log: list[dict[str, Any]] = []

    def _log_tool_call(self, tool_name: str, arguments: dict, result: dict, success: bool = True) -> None:
        """Log a tool call with a one-line summary."""
        if "error" in result:
            summary = f"Error: {result['error']}"
        elif "word" in result and "M" in result:
            summary = f"{len(result['M'])} objects, word {result['word']}"
        elif "added_count" in result:
            summary = f"{result['vertices']} vertices, {result['added_count']} new arrows"
        elif "vertices" in result and "arrows" in result:
            summary = f"{len(result['vertices'])} knitted vertices"
        else:
            summary = "Completed"

        self.tool_calls_log.append(
            {
                "tool_name": tool_name,
                "arguments": sorted(arguments),
                "result_summary": summary,
                "success": success,
            }
        )
        LOGGER.info("%s: %s", tool_name, summary)

    def _call(self, tool_name: str, **arguments) -> dict:
        result = execute_tool(tool_name, arguments)
        self._log_tool_call(tool_name, arguments, result, success="error" not in result)
        return result

    # =========================================================================
    # VALUE EXTRACTION
    # =========================================================================

    def slice_values(self, golden: GoldenValues) -> dict[str, Any]:
        report = self._call("slice_pipeline", data=golden.input, d_max=self.d_max, bound=self.bound)
        if "error" in report:
            return {"error": report["error"]}
        vertices = list(golden.input["quiver"]["vertices"])

        def display(key: str, vec: list[int]) -> list[int]:
            order = golden.vector_orders.get(key, vertices)
            return [vec[vertices.index(v)] for v in order]

        values: dict[str, Any] = {
            "M.dims": [display("M.dims", x["dim"]) for x in report["M"]],
            "M.b_dims": [x["b_dim"] for x in report["M"]],
            "phi": report["phi"],
            "word": report["word"],
            "word_reduced": report["word_reduced"],
            "word_length": report["word_length"],
            "tau_B": {k: v for k, v in report["tau_B"].items() if v is not None},
            "orbit_lengths": report["orbit_lengths"],
            "B.arrows": _arrow_counts(report["B"]["arrows"]),
            "B.relations": len(report["B"]["relations"]),
            "B.labels": report["B"]["labels"],
            "F.hat": [display("F.hat", report["F"][x["name"]]["hat"]) for x in report["M"]],
            "projective_injective": report["projective_injective"],
            "checks_pass": all(report["checks"].values()),
        }
        for s in report["sequence_checks"]:
            values[f"sequence.{s['object']}.totals"] = s["totals"]
            key = f"sequence.{s['object']}.check"
            values[key] = display(key, s["dims"][3])
            values[f"sequence.{s['object']}.exact"] = s["exact"]
        if report["A"] is not None:
            a_arrows = _arrow_counts(report["A"]["arrows"])
            tilde = _arrow_counts(report["tilde_arrows"])
            values["A.arrows"] = a_arrows
            values["A.labels"] = report["A"]["labels"]
            values["tilde.added"] = {k: n - a_arrows.get(k, 0) for k, n in tilde.items() if n > a_arrows.get(k, 0)}
            values["ext2.pairs"] = {f"{p['source']}->{p['target']}": p["dim"] for p in report["ext2_dims"]}

        knitted = self._call("knit", quiver=golden.input["quiver"], depth=2)
        if "error" not in knitted:
            values["knit.window"] = [display("knit.window", v["dim"]) for v in knitted["vertices"]]
        return values

    def auslander_values(self, golden: GoldenValues) -> dict[str, Any]:
        report = self._call("auslander_example", quiver=golden.input, d_max=self.d_max, bound=self.bound)
        if "error" in report:
            return {"error": report["error"]}
        return {
            "vertices": report["vertices"],
            "global_dimension": report["global_dimension"],
            "nilpotent": report["nilpotent"],
            "ext2.nonzero_pairs": len(report["ext2_dims"]),
            "ext2.max_dim": max((p["dim"] for p in report["ext2_dims"]), default=0),
            "added_count": report["added_count"],
            "tilde_vertices": report["tilde_vertices"],
        }

    # =========================================================================
    # COMPARISON
    # =========================================================================

    def compare(self, golden: GoldenValues) -> tuple[int, list[DiffEntry]]:
        actual = self.slice_values(golden) if golden.kind == "slice" else self.auslander_values(golden)
        if "error" in actual:
            return 1, [DiffEntry(key=f"{golden.name}.error", expected="no error", actual=actual["error"])]
        mismatches = []
        for key, expected in golden.values.items():
            got = actual.get(key, MISSING)
            if _canonical(got) != _canonical(expected):
                mismatches.append(
                    DiffEntry(
                        key=f"{golden.name}.{key}",
                        expected=_canonical(expected),
                        actual=_canonical(got),
                        source=golden.provenance.get(key, ""),
                    )
                )
        return len(golden.values), mismatches

    def run(self, paths: Optional[Sequence[Path]] = None) -> ReproductionReport:
        """Compare every golden file (the bundled ones by default)."""
        goldens = [load_golden(p) for p in (paths or bundled_goldens())]
        compared = 0
        mismatches: list[DiffEntry] = []
        for golden in goldens:
            n, bad = self.compare(golden)
            compared += n
            mismatches.extend(bad)
            LOGGER.info("%s: %d values, %d mismatches", golden.name, n, len(bad))
        return ReproductionReport(
            examples=[g.name for g in goldens],
            compared=compared,
            mismatches=mismatches,
            ok=not mismatches,
        )
