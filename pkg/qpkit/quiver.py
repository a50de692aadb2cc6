"""
Quivers and graded quivers.

A quiver is a frozen pydantic model: an ordered tuple of vertex ids and a tuple
of arrows. Constructions (opposite, double) and the canonical JSON form live
here too.
"""

import json
from functools import cached_property
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import QuiverFormatError

STAR = "*"
LOOP_PREFIX = "t_"


class Arrow(BaseModel):
    """An arrow id: source -> target, with a cohomological degree."""

    model_config = ConfigDict(frozen=True)

    id: str = Field(description="Arrow identifier")
    source: str = Field(description="Source vertex id")
    target: str = Field(description="Target vertex id")
    degree: int = Field(default=0, description="Degree (0 for ordinary quivers)")


class Quiver(BaseModel):
    """A finite quiver, possibly graded."""

    model_config = ConfigDict(frozen=True)

    vertices: tuple[str, ...] = Field(description="Vertex ids in a fixed order")
    arrows: tuple[Arrow, ...] = Field(default=(), description="Arrows")

    @model_validator(mode="after")
    def _check_ids(self) -> "Quiver":
        problem = _first_problem(self.vertices, self.arrows)
        if problem:
            raise ValueError(problem[1])
        return self

    @cached_property
    def arrow_map(self) -> dict[str, Arrow]:
        return {a.id: a for a in self.arrows}

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v: k for k, v in enumerate(self.vertices)}

    @cached_property
    def _out(self) -> dict[str, tuple[Arrow, ...]]:
        out: dict[str, list[Arrow]] = {v: [] for v in self.vertices}
        for a in sorted(self.arrows, key=lambda a: a.id):
            out[a.source].append(a)
        return {v: tuple(arrs) for v, arrs in out.items()}

    @cached_property
    def _in(self) -> dict[str, tuple[Arrow, ...]]:
        into: dict[str, list[Arrow]] = {v: [] for v in self.vertices}
        for a in sorted(self.arrows, key=lambda a: a.id):
            into[a.target].append(a)
        return {v: tuple(arrs) for v, arrs in into.items()}

    def arrows_from(self, v: str) -> tuple[Arrow, ...]:
        return self._out[v]

    def arrows_to(self, v: str) -> tuple[Arrow, ...]:
        return self._in[v]

    def arrow(self, arrow_id: str) -> Arrow:
        try:
            return self.arrow_map[arrow_id]
        except KeyError:
            raise QuiverFormatError(f"unknown arrow '{arrow_id}'") from None

    @property
    def is_graded(self) -> bool:
        return any(a.degree != 0 for a in self.arrows)

    def edge_count(self, i: str, j: str) -> int:
        """Number of arrows between i and j in either direction."""
        return sum(1 for a in self.arrows if {a.source, a.target} == {i, j} and i != j)


def _first_problem(vertices, arrows) -> tuple[str, str] | None:
    seen: set[str] = set()
    for k, v in enumerate(vertices):
        if v in seen:
            return f"vertices[{k}]", f"duplicate vertex id '{v}'"
        seen.add(v)
    arrow_ids: set[str] = set()
    for k, a in enumerate(arrows):
        if a.id in arrow_ids:
            return f"arrows[{k}]", f"duplicate arrow id '{a.id}'"
        arrow_ids.add(a.id)
        for end in ("source", "target"):
            if getattr(a, end) not in seen:
                return f"arrows[{k}].{end}", f"dangling endpoint '{getattr(a, end)}' of arrow '{a.id}'"
    return None


# =============================================================================
# SERIALIZATION
# =============================================================================


def quiver_from_dict(data: Any, where: str = "quiver") -> Quiver:
    """Validate a decoded JSON quiver object, reporting the offending location."""
    if not isinstance(data, dict):
        raise QuiverFormatError("expected an object with 'vertices' and 'arrows'", where)
    vertices = data.get("vertices")
    if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
        raise QuiverFormatError("'vertices' must be an array of strings", f"{where}.vertices")
    raw_arrows = data.get("arrows", [])
    if not isinstance(raw_arrows, list):
        raise QuiverFormatError("'arrows' must be an array", f"{where}.arrows")
    arrows = []
    for k, raw in enumerate(raw_arrows):
        try:
            arrows.append(Arrow.model_validate(raw))
        except ValidationError as e:
            raise QuiverFormatError(e.errors()[0]["msg"], f"{where}.arrows[{k}]") from None
    problem = _first_problem(vertices, arrows)
    if problem:
        raise QuiverFormatError(problem[1], f"{where}.{problem[0]}")
    return Quiver(vertices=tuple(vertices), arrows=tuple(arrows))


def load_quiver(text: str) -> Quiver:
    """Parse a quiver from its JSON text."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise QuiverFormatError(f"malformed JSON: {e.msg}", f"line {e.lineno} column {e.colno}") from None
    return quiver_from_dict(data)


def quiver_to_dict(q: Quiver) -> dict:
    """Canonical form: vertices and arrows sorted by id, degree omitted when 0."""
    arrows = []
    for a in sorted(q.arrows, key=lambda a: a.id):
        item = {"id": a.id, "source": a.source, "target": a.target}
        if a.degree:
            item["degree"] = a.degree
        arrows.append(item)
    return {"vertices": sorted(q.vertices), "arrows": arrows}


def serialize_quiver(q: Quiver) -> str:
    return json.dumps(quiver_to_dict(q), indent=2) + "\n"


# =============================================================================
# CONSTRUCTIONS
# =============================================================================


def opposite_quiver(q: Quiver) -> Quiver:
    """Reverse every arrow; ids and degrees are kept."""
    return Quiver(
        vertices=q.vertices,
        arrows=tuple(Arrow(id=a.id, source=a.target, target=a.source, degree=a.degree) for a in q.arrows),
    )


def double_quiver(q: Quiver) -> Quiver:
    """Add a*: j -> i for every arrow a: i -> j."""
    if q.is_graded:
        raise QuiverFormatError("double_quiver needs an ungraded quiver")
    for a in q.arrows:
        if a.id.endswith(STAR):
            raise QuiverFormatError(f"arrow id '{a.id}' uses the reserved suffix '{STAR}'")
    starred = tuple(Arrow(id=a.id + STAR, source=a.target, target=a.source) for a in q.arrows)
    return Quiver(vertices=q.vertices, arrows=q.arrows + starred)


def topological_order(q: Quiver) -> list[str] | None:
    """Vertices with every arrow pointing forward, or None if q has an oriented cycle."""
    indegree = {v: 0 for v in q.vertices}
    for a in q.arrows:
        indegree[a.target] += 1
    ready = [v for v in q.vertices if indegree[v] == 0]
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for a in q.arrows_from(v):
            indegree[a.target] -= 1
            if indegree[a.target] == 0:
                ready.append(a.target)
    return order if len(order) == len(q.vertices) else None


def is_acyclic(q: Quiver) -> bool:
    return topological_order(q) is not None


def path_counts(q: Quiver) -> dict[tuple[str, str], int]:
    """Number of paths i -> j (length 0 included) for an acyclic quiver."""
    order = topological_order(q)
    if order is None:
        raise QuiverFormatError("path counts need an acyclic quiver")
    counts = {(i, j): int(i == j) for i in q.vertices for j in q.vertices}
    for i in q.vertices:
        for v in order:
            n = counts[(i, v)]
            if n:
                for a in q.arrows_from(v):
                    counts[(i, a.target)] += n
    return counts


def path_count(q: Quiver, i: str, j: str) -> int:
    return path_counts(q)[(i, j)]


def longest_path_length(q: Quiver) -> int:
    order = topological_order(q)
    if order is None:
        raise QuiverFormatError("longest path needs an acyclic quiver")
    depth = {v: 0 for v in q.vertices}
    for v in order:
        for a in q.arrows_from(v):
            depth[a.target] = max(depth[a.target], depth[v] + 1)
    return max(depth.values(), default=0)
