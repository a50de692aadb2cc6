"""
Tool functions over the qpkit library.

Every tool takes decoded JSON and returns a JSON-serializable dict; the CLI
and the reproduction runner both go through execute_tool.
"""

import logging
from pathlib import Path
from typing import Any, Optional

from pydantic import ValidationError

from .config import DEFAULT_BOUND, DEFAULT_DMAX
from .coxeter import format_word, is_reduced, length, parse_word, system_from_quiver
from .errors import QPKitError, QuiverFormatError
from .findim import (
    ABOVE_BOUND,
    algebra_from_dict,
    ext2_bimodule,
    global_dimension,
    projective_dimension,
    simple,
    tilde_quiver,
    tor2_nilpotent,
)
from .mesh import auslander_algebra, knit_postprojective, knit_preinjective
from .paths import quotient_dims
from .pipeline import run_pipeline
from .potential import ginzburg, jacobian, overrides_from_dict, qp_from_dict, verify_differential, with_override
from .quiver import double_quiver, is_acyclic, opposite_quiver, quiver_from_dict, quiver_to_dict
from .schemas import (
    AuslanderReport,
    CoxeterReport,
    Ext2Report,
    GinzburgReport,
    GldimReport,
    JacobianReport,
    PairDim,
    TildeQuiverReport,
    TiltingData,
    Tor2Report,
)

LOGGER = logging.getLogger(__name__)

# Bundled worked-example inputs and golden values
DATA_DIR = Path(__file__).parent.parent / "data"


def _pair_dims(dims: dict[tuple[str, str], int], vertices) -> list[PairDim]:
    order = {v: k for k, v in enumerate(vertices)}
    return [
        PairDim(source=i, target=j, dim=d)
        for (i, j), d in sorted(dims.items(), key=lambda kv: (order[kv[0][0]], order[kv[0][1]]))
        if d
    ]


# =============================================================================
# QUIVER TOOLS
# =============================================================================


def validate_quiver(quiver: dict) -> dict[str, Any]:
    """
    Validate a quiver file.

    Args:
        quiver: Decoded quiver JSON

    Returns:
        Dict with 'valid', vertex and arrow counts, and 'acyclic'
    """
    q = quiver_from_dict(quiver)
    return {
        "valid": True,
        "vertices": len(q.vertices),
        "arrows": len(q.arrows),
        "acyclic": is_acyclic(q),
    }


def opposite(quiver: dict) -> dict[str, Any]:
    """Canonical JSON of the opposite quiver."""
    return quiver_to_dict(opposite_quiver(quiver_from_dict(quiver)))


def double(quiver: dict) -> dict[str, Any]:
    """Canonical JSON of the double quiver (a* added for every arrow a)."""
    return quiver_to_dict(double_quiver(quiver_from_dict(quiver)))


def knit(quiver: dict, depth: int = 2, kind: str = "preinjective") -> dict[str, Any]:
    """
    Knit a preinjective or postprojective component.

    Args:
        quiver: Decoded acyclic quiver JSON
        depth: Largest tau-power to knit
        kind: "preinjective" or "postprojective"

    Returns:
        Dict with 'kind', 'finite', 'vertices' (j, p, dim) and 'arrows'
    """
    q = quiver_from_dict(quiver)
    if kind == "preinjective":
        tq = knit_preinjective(q, depth)
    elif kind == "postprojective":
        tq = knit_postprojective(q, depth)
    else:
        raise QuiverFormatError(f"unknown component kind '{kind}'", "kind")
    result = tq.to_dict()
    result["finite"] = tq.finite
    return result


# =============================================================================
# QUIVER WITH POTENTIAL TOOLS
# =============================================================================


def jacobian_report(qp: dict, d_max: int = DEFAULT_DMAX) -> dict[str, Any]:
    """
    Decide Jacobi-finiteness of a QP.

    Args:
        qp: Decoded QP JSON ({"quiver", "potential"})
        d_max: Groebner degree cutoff

    Returns:
        JacobianReport as a dict
    """
    parsed = qp_from_dict(qp)
    pres = jacobian(parsed, d_max)
    verdict, dims = quotient_dims(pres)
    return JacobianReport(
        verdict=str(verdict),
        dim=verdict.dim,
        d_max=d_max,
        closed=pres.closed,
        pair_dims=_pair_dims(dims, parsed.quiver.vertices),
        leading_words=[".".join(w) for w in pres.leading_words],
    ).model_dump(mode="json")


def ginzburg_check(qp: dict, overrides: Optional[dict] = None) -> dict[str, Any]:
    """
    Build the Ginzburg graded quiver and check d^2 = 0.

    Args:
        qp: Decoded QP JSON
        overrides: Optional map generator id -> path-vector replacing d there

    Returns:
        GinzburgReport as a dict
    """
    g = ginzburg(qp_from_dict(qp))
    if overrides:
        g = with_override(g, overrides_from_dict(g, overrides))
    ok = verify_differential(g)
    problems = [] if ok else ["d^2 != 0 or d does not have degree +1"]
    order = {a.id: k for k, a in enumerate(g.quiver.arrows)}
    return GinzburgReport(
        differential={x: str(g.differential[x]) for x in sorted(g.differential, key=order.__getitem__)},
        d_squared_zero=ok,
        problems=problems,
    ).model_dump(mode="json")


# =============================================================================
# FINITE-DIMENSIONAL ALGEBRA TOOLS
# =============================================================================


def algebra_gldim(algebra: dict, d_max: int = DEFAULT_DMAX, bound: int = DEFAULT_BOUND) -> dict[str, Any]:
    """
    Global dimension of a bound quiver algebra.

    Args:
        algebra: Decoded algebra JSON ({"quiver", "relations"})
        d_max: Groebner degree cutoff
        bound: Longest resolution computed

    Returns:
        GldimReport as a dict
    """
    A = algebra_from_dict(algebra, d_max)
    return GldimReport(
        global_dimension=str(global_dimension(A, bound)),
        projective_dimensions={v: projective_dimension(A, simple(A, v), bound) for v in A.vertices},
    ).model_dump(mode="json")


def algebra_ext2(algebra: dict, d_max: int = DEFAULT_DMAX, bound: int = DEFAULT_BOUND) -> dict[str, Any]:
    """Dimensions e_i Ext^2(DA, A) e_j."""
    A = algebra_from_dict(algebra, d_max)
    X = ext2_bimodule(A, bound)
    return Ext2Report(pair_dims=_pair_dims(X.dims, A.vertices), total=X.total).model_dump(mode="json")


def algebra_tor2(algebra: dict, d_max: int = DEFAULT_DMAX, bound: int = DEFAULT_BOUND) -> dict[str, Any]:
    """Nilpotency of Tor_2(-, DA) by both criteria."""
    A = algebra_from_dict(algebra, d_max)
    report = tor2_nilpotent(A, bound)
    return Tor2Report(
        nilpotent="true" if report.nilpotent is True else ABOVE_BOUND,
        index=report.index,
        functor_index=report.functor_index,
        agree=report.agree,
    ).model_dump(mode="json")


def algebra_tilde_quiver(algebra: dict, d_max: int = DEFAULT_DMAX, bound: int = DEFAULT_BOUND) -> dict[str, Any]:
    """Quiver of the 3-preCalabi-Yau completion."""
    A = algebra_from_dict(algebra, d_max)
    tq = tilde_quiver(A, bound)
    return TildeQuiverReport(
        quiver=quiver_to_dict(tq.quiver),
        added=_pair_dims(tq.added, A.vertices),
    ).model_dump(mode="json")


def auslander_example(quiver: dict, d_max: int = DEFAULT_DMAX, bound: int = DEFAULT_BOUND) -> dict[str, Any]:
    """
    The Auslander algebra of a Dynkin quiver and the arrows its completion adds.

    Args:
        quiver: Decoded Dynkin quiver JSON
        d_max: Groebner degree cutoff
        bound: Resolution and tensor-power bound

    Returns:
        AuslanderReport as a dict
    """
    A, _ = auslander_algebra(quiver_from_dict(quiver), d_max, depth=bound)
    gd = global_dimension(A, bound)
    X = ext2_bimodule(A, bound)
    nil = tor2_nilpotent(A, bound)
    tq = tilde_quiver(A, bound)
    return AuslanderReport(
        vertices=len(A.vertices),
        dim=A.dim,
        global_dimension=str(gd),
        ext2_dims=_pair_dims(X.dims, A.vertices),
        nilpotent="true" if nil.nilpotent is True else ABOVE_BOUND,
        added=_pair_dims(tq.added, A.vertices),
        added_count=len(tq.new_arrows),
        tilde_vertices=len(tq.quiver.vertices),
    ).model_dump(mode="json")


# =============================================================================
# COXETER TOOLS
# =============================================================================


def coxeter_word(quiver: dict, word: str) -> dict[str, Any]:
    """
    Reducedness and length of a word in the Coxeter group of a quiver.

    Args:
        quiver: Decoded quiver JSON
        word: Letters, concatenated or comma-separated

    Returns:
        CoxeterReport as a dict
    """
    s = system_from_quiver(quiver_from_dict(quiver))
    letters = parse_word(s, word)
    return CoxeterReport(
        word=format_word(s, letters),
        reduced=is_reduced(s, letters),
        length=length(s, letters),
    ).model_dump(mode="json")


# =============================================================================
# SLICE PIPELINE TOOLS
# =============================================================================


def tilting_from_dict(data: Any) -> TiltingData:
    """Validate pipeline input, reporting quiver problems with their location."""
    if not isinstance(data, dict):
        raise QuiverFormatError("expected an object with 'quiver' and 'summands'", "input")
    q = quiver_from_dict(data.get("quiver"), "input.quiver")
    try:
        return TiltingData(
            setting=data.get("setting", "preinjective"),
            quiver=q,
            summands=data.get("summands", []),
        )
    except ValidationError as e:
        err = e.errors()[0]
        raise QuiverFormatError(err["msg"], "input." + ".".join(str(x) for x in err["loc"])) from None


def slice_pipeline(data: dict, d_max: int = DEFAULT_DMAX, bound: int = DEFAULT_BOUND) -> dict[str, Any]:
    """
    Run the slice pipeline end to end.

    Args:
        data: Decoded pipeline input ({"setting", "quiver", "summands"})
        d_max: Groebner degree cutoff for B and A
        bound: Resolution and tensor-power bound

    Returns:
        PipelineReport as a dict
    """
    result = run_pipeline(tilting_from_dict(data), d_max, bound)
    return result.report.model_dump(mode="json")


TOOL_FUNCTIONS = {
    "validate_quiver": validate_quiver,
    "opposite": opposite,
    "double": double,
    "knit": knit,
    "jacobian": jacobian_report,
    "ginzburg_check": ginzburg_check,
    "algebra_gldim": algebra_gldim,
    "algebra_ext2": algebra_ext2,
    "algebra_tor2": algebra_tor2,
    "algebra_tilde_quiver": algebra_tilde_quiver,
    "auslander_example": auslander_example,
    "coxeter_word": coxeter_word,
    "slice_pipeline": slice_pipeline,
}


def execute_tool(tool_name: str, arguments: dict) -> dict[str, Any]:
    """
    Execute a tool by name with given arguments.

    Args:
        tool_name: Name of the tool to execute
        arguments: Dict of arguments to pass

    Returns:
        Tool result as a dict; failures carry 'error' and 'error_type'
    """
    if tool_name not in TOOL_FUNCTIONS:
        return {"error": f"Unknown tool: {tool_name}", "error_type": "UnknownTool"}

    try:
        return TOOL_FUNCTIONS[tool_name](**arguments)
    except QPKitError as e:
        LOGGER.debug("tool %s failed", tool_name, exc_info=True)
        return {"error": f"Tool execution failed: {str(e)}", "error_type": type(e).__name__}
    except Exception as e:
        LOGGER.exception("tool %s crashed", tool_name)
        return {"error": f"Tool execution failed: {str(e)}", "error_type": type(e).__name__}
