"""
Hereditary AR combinatorics: Euler form, Coxeter transformation, knitting of
preinjective and postprojective components, and mesh categories.

Knitting takes place in the hereditary category whose injectives have
dimension vectors dim D(e_j kQ)_u = #paths j -> u. Its Euler form is
euler_form(opposite_quiver(q), ., .).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

from . import linalg
from .errors import AlgebraError, WindowError
from .findim import BoundAlgebra, build_bound_algebra
from .linalg import QuotientSpace, Vector
from .paths import PathVector
from .quiver import Arrow, Quiver, is_acyclic, opposite_quiver, path_counts

LOGGER = logging.getLogger(__name__)

Coord = tuple[str, int]
DimVector = tuple[int, ...]


# =============================================================================
# EULER FORM AND COXETER TRANSFORMATION
# =============================================================================


def _check_hereditary(q: Quiver) -> None:
    if q.is_graded:
        raise AlgebraError("expected an ungraded quiver")
    if not is_acyclic(q):
        raise AlgebraError("expected an acyclic quiver")


def euler_matrix(q: Quiver) -> list[list[int]]:
    """E with E[i][j] = delta_ij - #arrows i -> j, so <x, y> = x^T E y."""
    idx = q.vertex_index
    n = len(q.vertices)
    E = [[int(i == j) for j in range(n)] for i in range(n)]
    for a in q.arrows:
        E[idx[a.source]][idx[a.target]] -= 1
    return E


def euler_form(q: Quiver, x: Sequence[int], y: Sequence[int]) -> int:
    """sum_i x_i y_i - sum over arrows i -> j of x_i y_j."""
    _check_hereditary(q)
    n = len(q.vertices)
    if len(x) != n or len(y) != n:
        raise ValueError(f"dimension vectors must have length {n}")
    E = euler_matrix(q)
    return sum(x[i] * E[i][j] * y[j] for i in range(n) for j in range(n))


def coxeter_matrix(q: Quiver, inverse: bool = False) -> list[list[Fraction]]:
    """Phi = -(E^T)^-1 E, or its inverse -E^-1 E^T."""
    _check_hereditary(q)
    E = linalg.matrix(euler_matrix(q))
    Et = E.transpose()
    if inverse:
        Phi = -(E.inv() * Et)
    else:
        Phi = -(Et.inv() * E)
    return linalg.entries(Phi)


def _apply_int(mat: list[list[Fraction]], x: Sequence[int]) -> DimVector:
    out = []
    for row in mat:
        v = sum(c * xi for c, xi in zip(row, x))
        if Fraction(v).denominator != 1:
            raise AlgebraError("Coxeter transformation produced a non-integral vector")
        out.append(int(v))
    return tuple(out)


def coxeter_translate_dim(q: Quiver, x: Sequence[int]) -> DimVector:
    """dim tau X for non-projective X (projective inputs give meaningless vectors)."""
    if len(x) != len(q.vertices):
        raise ValueError(f"dimension vector must have length {len(q.vertices)}")
    return _apply_int(coxeter_matrix(q), x)


def coxeter_translate_inverse_dim(q: Quiver, x: Sequence[int]) -> DimVector:
    """dim tau^-1 X for non-injective X."""
    if len(x) != len(q.vertices):
        raise ValueError(f"dimension vector must have length {len(q.vertices)}")
    return _apply_int(coxeter_matrix(q, inverse=True), x)


def injective_dims(q: Quiver) -> dict[str, DimVector]:
    counts = path_counts(q)
    return {j: tuple(counts[(j, u)] for u in q.vertices) for j in q.vertices}


def projective_dims(q: Quiver) -> dict[str, DimVector]:
    counts = path_counts(q)
    return {j: tuple(counts[(u, j)] for u in q.vertices) for j in q.vertices}


# =============================================================================
# TRANSLATION QUIVERS
# =============================================================================


@dataclass(frozen=True)
class TQArrow:
    """An arrow of a knitted component, labelled by the arrow of q it comes from."""

    id: str
    source: Coord
    target: Coord
    label: str
    kind: Literal["+", "*"]


class TranslationQuiver:
    """
    A knitted component. Vertices are (j, p); for a preinjective component
    (j, p) is tau^p I_j and tau(j, p) = (j, p + 1). For a postprojective
    component (j, p) is tau^-p P_j and tau(j, p) = (j, p - 1).
    """

    def __init__(self, quiver: Quiver, kind: str, dims: dict[Coord, DimVector], arrows: list[TQArrow], cut: frozenset = frozenset(), finite: bool | None = None):
        self.quiver = quiver
        self.kind = kind
        self.dims = dims
        self.arrows = arrows
        self.cut = frozenset(cut)
        self.finite = not self.cut if finite is None else finite
        order = quiver.vertex_index
        self.vertices: list[Coord] = sorted(dims, key=lambda c: (c[1], order[c[0]]))
        self._into: dict[Coord, list[int]] = {v: [] for v in self.vertices}
        self._out: dict[Coord, list[int]] = {v: [] for v in self.vertices}
        for k, a in enumerate(arrows):
            self._out[a.source].append(k)
            self._into[a.target].append(k)
        self._by_key = {(a.source, a.target, a.label, a.kind): k for k, a in enumerate(arrows)}

    def __contains__(self, x: Coord) -> bool:
        return x in self.dims

    def tau(self, x: Coord) -> Coord | None:
        j, p = x
        y = (j, p + 1) if self.kind == "preinjective" else (j, p - 1)
        return y if y in self.dims else None

    def tau_inverse(self, x: Coord) -> Coord | None:
        j, p = x
        y = (j, p - 1) if self.kind == "preinjective" else (j, p + 1)
        return y if y in self.dims else None

    def arrows_into(self, x: Coord) -> list[int]:
        return self._into[x]

    def arrows_out(self, x: Coord) -> list[int]:
        return self._out[x]

    def find_arrow(self, source: Coord, target: Coord, label: str, kind: str) -> int | None:
        return self._by_key.get((source, target, label, kind))

    def mesh(self, z: Coord) -> list[tuple[int, int, int]] | None:
        """Terms (sign, sigma(beta), beta) of the mesh ending at z, or None if z is not translated."""
        tz = self.tau(z)
        if tz is None:
            return None
        terms = []
        for k in self._into[z]:
            beta = self.arrows[k]
            other = "*" if beta.kind == "+" else "+"
            s = self.find_arrow(tz, beta.source, beta.label, other)
            if s is None:
                raise WindowError(f"mesh at {z} has no arrow from {tz} to {beta.source}")
            terms.append((1 if beta.kind == "+" else -1, s, k))
        return terms

    def check_additivity(self) -> list[Coord]:
        """Translated vertices where dim z + dim tau z differs from the sum over the mesh."""
        bad = []
        for z in self.vertices:
            terms = self.mesh(z)
            if terms is None:
                continue
            tz = self.tau(z)
            lhs = [a + b for a, b in zip(self.dims[z], self.dims[tz])]
            rhs = [0] * len(lhs)
            for _, _, k in terms:
                m = self.arrows[k].source
                rhs = [a + b for a, b in zip(rhs, self.dims[m])]
            if lhs != rhs:
                bad.append(z)
        return bad

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "vertices": [{"j": j, "p": p, "dim": list(self.dims[(j, p)])} for j, p in self.vertices],
            "arrows": [
                {
                    "source": {"j": a.source[0], "p": a.source[1]},
                    "target": {"j": a.target[0], "p": a.target[1]},
                    "label": a.label,
                    "kind": a.kind,
                }
                for a in sorted(self.arrows, key=lambda a: (a.source[1], a.target[1], a.id))
            ],
        }


def knit_preinjective(q: Quiver, depth: int) -> TranslationQuiver:
    """
    Knit tau^p I_j for p <= depth by iterating the Coxeter transformation.
    An orbit stops when the next vector leaves the positive cone; for Dynkin q
    this returns the whole AR quiver once depth is large enough.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    _check_hereditary(q)
    Phi = coxeter_matrix(q)
    dims: dict[Coord, DimVector] = {}
    cut = set()
    for j, d in injective_dims(q).items():
        p = 0
        dims[(j, 0)] = d
        while True:
            nxt = _apply_int(Phi, d)
            if any(x < 0 for x in nxt) or not any(nxt):
                break
            if p == depth:
                cut.add((j, p))
                break
            p += 1
            d = nxt
            dims[(j, p)] = d
    arrows = []
    for a in sorted(q.arrows, key=lambda a: a.id):
        p = 0
        while (a.source, p) in dims or (a.target, p) in dims:
            if (a.source, p) in dims and (a.target, p) in dims:
                arrows.append(TQArrow(f"{a.id}@{p}", (a.source, p), (a.target, p), a.id, "+"))
            if (a.target, p + 1) in dims and (a.source, p) in dims:
                arrows.append(TQArrow(f"{a.id}*@{p}", (a.target, p + 1), (a.source, p), a.id, "*"))
            p += 1
    tq = TranslationQuiver(q, "preinjective", dims, arrows, cut=frozenset(cut))
    LOGGER.debug("knitted %d preinjective vertices (finite=%s)", len(dims), tq.finite)
    return tq


def knit_postprojective(q: Quiver, depth: int) -> TranslationQuiver:
    """tau^-l P_j for l <= depth: the preinjective knit of the opposite quiver, arrows reversed."""
    dual = knit_preinjective(opposite_quiver(q), depth)
    arrows = [TQArrow(a.id, a.target, a.source, a.label, a.kind) for a in dual.arrows]
    return TranslationQuiver(q, "postprojective", dict(dual.dims), arrows, finite=dual.finite)


# =============================================================================
# MESH CATEGORIES
# =============================================================================

TQPath = tuple[int, ...]


@dataclass
class HomSpace:
    """Paths x -> y modulo the mesh ideal; the basis is a subset of the paths."""

    source: Coord
    target: Coord
    paths: list[TQPath]
    index: dict[TQPath, int]
    quotient: QuotientSpace

    @property
    def dim(self) -> int:
        return self.quotient.dim

    @property
    def basis(self) -> list[TQPath]:
        return [self.paths[c] for c in self.quotient.free]


class MeshCategory:
    """
    The mesh category of a knitted component, optionally modulo the ideal of
    maps through a set of killed vertices.
    """

    def __init__(self, tq: TranslationQuiver, killed: Sequence[Coord] = ()):
        self.tq = tq
        self.killed = frozenset(killed)
        self._from: dict[Coord, dict[Coord, list[TQPath]]] = {}
        self._homs: dict[tuple[Coord, Coord], HomSpace] = {}
        self._shifted: dict[int, int | None] = {}

    @property
    def objects(self) -> list[Coord]:
        return [v for v in self.tq.vertices if v not in self.killed]

    def _check(self, x: Coord) -> None:
        if x not in self.tq:
            raise WindowError(f"vertex {x} is outside the knitted window")

    def _paths_from(self, x: Coord) -> dict[Coord, list[TQPath]]:
        table = self._from.get(x)
        if table is None:
            table = {}
            stack: list[tuple[Coord, TQPath]] = [(x, ())]
            while stack:
                v, path = stack.pop()
                table.setdefault(v, []).append(path)
                for k in self.tq.arrows_out(v):
                    t = self.tq.arrows[k].target
                    if t not in self.killed:
                        stack.append((t, path + (k,)))
            for paths in table.values():
                paths.sort(key=lambda p: (len(p), p))
            self._from[x] = table
        return table

    def paths(self, x: Coord, y: Coord) -> list[TQPath]:
        if x in self.killed or y in self.killed:
            return []
        return self._paths_from(x).get(y, [])

    def hom(self, x: Coord, y: Coord) -> HomSpace:
        self._check(x)
        self._check(y)
        key = (x, y)
        space = self._homs.get(key)
        if space is None:
            paths = self.paths(x, y)
            index = {p: k for k, p in enumerate(paths)}
            relations = []
            if paths:
                for z in self.tq.vertices:
                    tz = self.tq.tau(z)
                    if tz is None or z in self.killed or tz in self.killed:
                        continue
                    left = self.paths(x, tz)
                    right = self.paths(z, y)
                    if not left or not right:
                        continue
                    terms = [
                        (sign, s, b)
                        for sign, s, b in self.tq.mesh(z)
                        if self.tq.arrows[b].source not in self.killed
                    ]
                    for u in left:
                        for v in right:
                            vec = [Fraction(0)] * len(paths)
                            for sign, s, b in terms:
                                vec[index[u + (s, b) + v]] += sign
                            if any(vec):
                                relations.append(vec)
            space = HomSpace(x, y, paths, index, QuotientSpace(len(paths), relations))
            self._homs[key] = space
        return space

    def hom_dim(self, x: Coord, y: Coord) -> int:
        return self.hom(x, y).dim

    def path_coords(self, x: Coord, y: Coord, path: TQPath) -> Vector:
        space = self.hom(x, y)
        vec = [Fraction(0)] * len(space.paths)
        vec[space.index[path]] = Fraction(1)
        return space.quotient.reduce(vec)

    def identity(self, x: Coord) -> Vector:
        return self.path_coords(x, x, ())

    def compose(self, x: Coord, y: Coord, z: Coord, f: Sequence, g: Sequence) -> Vector:
        """f: x -> y followed by g: y -> z."""
        sf, sg, sh = self.hom(x, y), self.hom(y, z), self.hom(x, z)
        vec = [Fraction(0)] * len(sh.paths)
        for c, p in zip(f, sf.basis):
            if not c:
                continue
            for d, r in zip(g, sg.basis):
                if d:
                    vec[sh.index[p + r]] += c * d
        return sh.quotient.reduce(vec)

    def composition_matrix(self, x: Coord, y: Coord, z: Coord, f: Sequence) -> list[Vector]:
        """Columns g -> f g for g running over the basis of Hom(y, z)."""
        n = self.hom(y, z).dim
        return [self.compose(x, y, z, f, [int(k == m) for k in range(n)]) for m in range(n)]

    def _shift_arrow(self, k: int) -> int | None:
        if k not in self._shifted:
            a = self.tq.arrows[k]
            s, t = self.tq.tau(a.source), self.tq.tau(a.target)
            for end, image in ((a.source, s), (a.target, t)):
                if image is None and end in self.tq.cut:
                    raise WindowError(f"cannot translate arrow {a.id}: tau leaves the knitted window")
            # no translate at a projective vertex: the path maps to zero
            self._shifted[k] = None if s is None or t is None else self.tq.find_arrow(s, t, a.label, a.kind)
        return self._shifted[k]

    def shift(self, x: Coord, y: Coord, f: Sequence) -> Vector:
        """tau applied to f: x -> y, as an element of Hom(tau x, tau y)."""
        tx, ty = self.tq.tau(x), self.tq.tau(y)
        if tx is None or ty is None:
            raise WindowError(f"tau of {x} or {y} is outside the knitted window")
        target = self.hom(tx, ty)
        vec = [Fraction(0)] * len(target.paths)
        for c, p in zip(f, self.hom(x, y).basis):
            if not c:
                continue
            shifted = tuple(self._shift_arrow(k) for k in p)
            if any(k is None for k in shifted):
                continue
            if any(self.tq.arrows[k].target in self.killed for k in shifted) or tx in self.killed:
                continue
            vec[target.index[shifted]] += c
        return target.quotient.reduce(vec)


def mesh_hom(c: MeshCategory, x: Coord, y: Coord) -> HomSpace:
    """Hom(x, y) in c: its dimension, a basis of paths, and composition through c.compose."""
    return c.hom(x, y)


# =============================================================================
# AUSLANDER ALGEBRAS
# =============================================================================


def vertex_name(x: Coord) -> str:
    return f"{x[0]}:{x[1]}"


def auslander_algebra(q: Quiver, d_max: int, depth: int = 64) -> tuple[BoundAlgebra, TranslationQuiver]:
    """
    The mesh algebra of the AR quiver of a representation-finite hereditary
    algebra: arrows along irreducible maps, one mesh relation per
    non-projective vertex.
    """
    tq = knit_preinjective(q, depth)
    if not tq.finite:
        raise AlgebraError(f"AR quiver not finite within depth {depth}; is the quiver Dynkin?")
    bar = Quiver(
        vertices=tuple(vertex_name(v) for v in tq.vertices),
        arrows=tuple(
            Arrow(id=a.id, source=vertex_name(a.source), target=vertex_name(a.target)) for a in tq.arrows
        ),
    )
    relations = []
    for z in tq.vertices:
        terms = tq.mesh(z)
        if terms is None:
            continue
        rel = PathVector.zero(bar)
        for sign, s, b in terms:
            rel = rel + PathVector.of(bar, [tq.arrows[s].id, tq.arrows[b].id], sign)
        relations.append(rel)
    A = build_bound_algebra(bar, relations, d_max)
    LOGGER.debug("Auslander algebra with %d vertices and dim %d", len(bar.vertices), A.dim)
    return A, tq
