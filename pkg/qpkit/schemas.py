"""
Pydantic schemas for input files and JSON reports.

Reports are dumped with model_dump(mode="json"); field order follows the
declaration order below, so serialized output is stable across runs.
Rationals travel as "p/q" strings.
"""

from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from .quiver import Quiver


# --- Input Schemas ---

class VertexCoord(BaseModel):
    """A vertex (j, p) of a knitted component."""
    j: str = Field(description="Vertex of the base quiver (the tau-orbit)")
    p: int = Field(ge=0, description="Power of tau (preinjective) or tau^-1 (postprojective)")


class TiltingData(BaseModel):
    """Pipeline input: an acyclic quiver and the summands of T (or of the initial module)."""
    setting: Literal["preinjective", "postprojective"] = Field(
        default="preinjective",
        description="preinjective: T is a preinjective tilting module; postprojective: an initial module",
    )
    quiver: Quiver = Field(description="The acyclic quiver Q0")
    summands: list[VertexCoord] = Field(description="Indecomposable summands, as knitted coordinates")

    @field_validator("summands")
    @classmethod
    def _no_duplicates(cls, v: list[VertexCoord]) -> list[VertexCoord]:
        seen = set()
        for c in v:
            if (c.j, c.p) in seen:
                raise ValueError(f"duplicate summand ({c.j}, {c.p})")
            seen.add((c.j, c.p))
        return v


class GoldenValues(BaseModel):
    """Embedded reference values for a worked example."""
    name: str
    kind: Literal["slice", "auslander"] = Field(description="Which computation produces the values")
    input: dict = Field(description="Pipeline input (slice) or quiver (auslander)")
    provenance: dict[str, str] = Field(default_factory=dict, description="Where each value is displayed")
    values: dict = Field(description="Expected values keyed by report path")
    vector_orders: dict[str, list[str]] = Field(
        default_factory=dict,
        description="Vertex order of each value indexed by the vertices of Q0 (default: the input order)",
    )

    @model_validator(mode="after")
    def _orders_are_permutations(self) -> "GoldenValues":
        if not self.vector_orders:
            return self
        quiver = self.input.get("quiver", {}) if self.kind == "slice" else self.input
        if not isinstance(quiver, dict):
            quiver = {}
        vertices = sorted(quiver.get("vertices", []))
        for key, order in self.vector_orders.items():
            if sorted(order) != vertices:
                raise ValueError(f"vector order for '{key}' is not a permutation of the vertices")
        return self


# --- Quotient Schemas ---

class PairDim(BaseModel):
    """dim e_i A e_j."""
    source: str
    target: str
    dim: int


class JacobianReport(BaseModel):
    """Verdict on the Jacobian algebra of a QP."""
    verdict: str = Field(description="Finite(n), Infinite or Inconclusive")
    dim: Optional[int] = None
    d_max: int
    closed: bool = Field(description="Whether every overlap was resolved below d_max")
    pair_dims: list[PairDim] = Field(default_factory=list)
    leading_words: list[str] = Field(default_factory=list)


class GinzburgReport(BaseModel):
    """The differential on generators and the d^2 = 0 check."""
    differential: dict[str, str] = Field(description="d(x) for every generator x")
    d_squared_zero: bool
    problems: list[str] = Field(default_factory=list)


# --- Algebra Schemas ---

class ArrowSummary(BaseModel):
    id: str
    source: str
    target: str


class AlgebraSummary(BaseModel):
    """A bound quiver algebra: quiver, relations and dimension."""
    vertices: list[str]
    arrows: list[ArrowSummary]
    relations: list[str]
    dim: int
    labels: dict[str, str] = Field(default_factory=dict, description="Vertex label -> object name")


class GldimReport(BaseModel):
    global_dimension: str = Field(description="An integer, or AboveBound")
    projective_dimensions: dict[str, Optional[int]]


class Ext2Report(BaseModel):
    """dim e_U Ext^2(DA, A) e_V per pair, plus the tensor algebra dims when nilpotent."""
    pair_dims: list[PairDim]
    total: int


class Tor2Report(BaseModel):
    nilpotent: str = Field(description="true, or AboveBound")
    index: Optional[int] = Field(description="Least n with X^(x)n = 0")
    functor_index: Optional[int] = Field(description="Least n with Tor_2^n(S) = 0 for all simples")
    agree: bool


class TildeQuiverReport(BaseModel):
    quiver: dict
    added: list[PairDim] = Field(description="Minimal relations i -> j, one new arrow j -> i each")


class AuslanderReport(BaseModel):
    """Mesh algebra of a finite AR quiver and the quiver of its completion."""
    vertices: int
    dim: int
    global_dimension: str
    ext2_dims: list[PairDim]
    nilpotent: str
    added: list[PairDim]
    added_count: int
    tilde_vertices: int


# --- Coxeter Schemas ---

class CoxeterReport(BaseModel):
    word: str
    reduced: bool
    length: int


# --- Pipeline Schemas ---

class MObjectReport(BaseModel):
    """An indecomposable object of M."""
    name: str
    coord: VertexCoord = Field(description="Coordinate in the hereditary component")
    dim: list[int] = Field(description="Dimension vector over the base quiver")
    b_dim: list[int] = Field(description="Dimension vector of Hom(T, X) over B")
    phi: str
    q: int = Field(description="tau_B-power from the slice H")


class FVectors(BaseModel):
    hat: list[int]
    check: list[int]
    simple: list[int]


class SequenceCheck(BaseModel):
    """0 -> F(X^) -> F(H0^) -> F(H1^) -> F(X^v) -> 0 for one X outside add H."""
    object: str
    h0: dict[str, int]
    h1: dict[str, int]
    dims: list[list[int]]
    totals: list[int]
    exact: bool


class TildeDims(BaseModel):
    U: str
    V: str
    by_power: list[int]
    total: int


class ArrowCount(BaseModel):
    source: str
    target: str
    count: int


class GLSReport(BaseModel):
    """Checks available when M is an initial module of a hereditary algebra."""
    f_hat_matches: bool
    birs_matches: bool
    mismatches: list[str] = Field(default_factory=list)


class PipelineReport(BaseModel):
    """Canonical report of the slice pipeline."""
    setting: str
    M: list[MObjectReport]
    B: AlgebraSummary
    tau_B: dict[str, Optional[str]]
    orbit_lengths: dict[str, int]
    phi: list[str]
    word: str
    word_reduced: bool
    word_length: int
    F: dict[str, FVectors]
    projective_injective: list[str]
    sequence_checks: list[SequenceCheck]
    A: Optional[AlgebraSummary] = None
    tilde_dims: list[TildeDims] = Field(default_factory=list)
    tilde_arrows: list[ArrowCount] = Field(default_factory=list)
    ext2_dims: list[PairDim] = Field(default_factory=list)
    birs: list[list[int]] = Field(default_factory=list)
    gls: Optional[GLSReport] = None
    checks: dict[str, bool] = Field(default_factory=dict)


# --- Reproduction Schemas ---

class DiffEntry(BaseModel):
    key: str
    expected: str
    actual: str
    source: str = Field(default="", description="Where the expected value is displayed")


class ReproductionReport(BaseModel):
    examples: list[str]
    compared: int
    mismatches: list[DiffEntry]
    ok: bool
