"""
Finite-dimensional bound quiver algebras and their homological linear algebra.

Modules are right modules, realized as representations: a path p = a1...an
acts on V_source(p) by M_an ... M_a1. The indecomposable projective at i is
P_i = e_i A, the injective is I_i = D(A e_i).
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from sympy.polys.matrices import DomainMatrix

from . import linalg
from .errors import AlgebraError, BoundExceeded, QuiverFormatError
from .linalg import QuotientSpace, Vector
from .paths import (
    Path,
    PathVector,
    QuotientPresentation,
    groebner,
    normal_form,
    parse_rational,
    path_vector_from_json,
    path_vector_to_json,
    paths_of_length,
    quotient_dims,
)
from .quiver import Arrow, Quiver, is_acyclic, longest_path_length, quiver_from_dict, quiver_to_dict

LOGGER = logging.getLogger(__name__)

ABOVE_BOUND = "AboveBound"


# =============================================================================
# BOUND ALGEBRAS
# =============================================================================


class BoundAlgebra:
    """kQ/I with a certified finite basis of normal words."""

    def __init__(self, presentation: QuotientPresentation, relations: Sequence[PathVector]):
        if presentation.verdict.kind != "Finite":
            raise AlgebraError(f"quotient is not certified finite: {presentation.verdict}")
        self.presentation = presentation
        self.quiver: Quiver = presentation.quiver
        self.relations = tuple(relations)
        self.basis: tuple[Path, ...] = presentation.normal_words or ()
        self._paths: dict[tuple[str, str], list[Path]] = {
            (i, j): [] for i in self.quiver.vertices for j in self.quiver.vertices
        }
        for p in self.basis:
            self._paths[(p.source, p.target)].append(p)
        self._index = {key: {p: k for k, p in enumerate(ps)} for key, ps in self._paths.items()}
        self._products: dict[tuple[Path, Path], Vector] = {}

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.quiver.vertices

    @property
    def dim(self) -> int:
        return len(self.basis)

    def paths(self, i: str, j: str) -> list[Path]:
        """Normal-word basis of e_i A e_j."""
        return self._paths[(i, j)]

    def pair_dim(self, i: str, j: str) -> int:
        return len(self._paths[(i, j)])

    def dim_matrix(self) -> dict[tuple[str, str], int]:
        return {key: len(ps) for key, ps in self._paths.items()}

    def vector(self, f: PathVector, i: str, j: str) -> Vector:
        """Coordinates of the normal form of f (an element of e_i kQ e_j)."""
        nf = normal_form(self.presentation, f)
        out = [Fraction(0)] * self.pair_dim(i, j)
        index = self._index[(i, j)]
        for p, c in nf.terms.items():
            if (p.source, p.target) != (i, j):
                raise AlgebraError(f"{f} is not in e_{i} A e_{j}")
            out[index[p]] = c
        return out

    def element(self, coords: Sequence, i: str, j: str) -> PathVector:
        return PathVector(self.quiver, {p: c for p, c in zip(self.paths(i, j), coords) if c})

    def arrow_vector(self, a: Arrow) -> Vector:
        return self.vector(PathVector.of(self.quiver, [a.id]), a.source, a.target)

    def product(self, p: Path, r: Path) -> Vector:
        """p*r as coordinates in e_source(p) A e_target(r)."""
        key = (p, r)
        cached = self._products.get(key)
        if cached is None:
            joined = PathVector(self.quiver, {Path(p.source, r.target, p.arrows + r.arrows): Fraction(1)})
            cached = self.vector(joined, p.source, r.target)
            self._products[key] = cached
        return cached

    def right_mult(self, x: Sequence, j: str, k: str, i: str) -> DomainMatrix:
        """Matrix of y -> y*x from e_i A e_j to e_i A e_k, for x in e_j A e_k."""
        rows = self.pair_dim(i, k)
        cols = []
        for p in self.paths(i, j):
            col = [Fraction(0)] * rows
            for r, c in zip(self.paths(j, k), x):
                if c:
                    for t, d in enumerate(self.product(p, r)):
                        if d:
                            col[t] += c * d
            cols.append(col)
        return linalg.from_columns(cols, rows)

    def left_mult(self, x: Sequence, i: str, j: str, k: str) -> DomainMatrix:
        """Matrix of y -> x*y from e_j A e_k to e_i A e_k, for x in e_i A e_j."""
        rows = self.pair_dim(i, k)
        cols = []
        for r in self.paths(j, k):
            col = [Fraction(0)] * rows
            for p, c in zip(self.paths(i, j), x):
                if c:
                    for t, d in enumerate(self.product(p, r)):
                        if d:
                            col[t] += c * d
            cols.append(col)
        return linalg.from_columns(cols, rows)


def build_bound_algebra(q: Quiver, rels: Sequence[PathVector], d_max: int) -> BoundAlgebra:
    """Present kQ/(rels); relations must lie in the square of the arrow ideal."""
    for n, r in enumerate(rels):
        for p in r.terms:
            if len(p.arrows) < 2:
                raise AlgebraError(f"relation {n} is not admissible: term {p} has length {len(p.arrows)}")
    d = max(d_max, max((len(p.arrows) for r in rels for p in r.terms), default=0))
    pres = groebner([PathVector(q, r.terms) for r in rels], d, quiver=q)
    verdict, _ = quotient_dims(pres)
    if verdict.kind != "Finite":
        raise AlgebraError(f"bound algebra is not finite-dimensional at d_max={d}: {verdict}")
    LOGGER.debug("bound algebra on %d vertices, dim %d", len(q.vertices), verdict.dim)
    return BoundAlgebra(pres, rels)


# =============================================================================
# REPRESENTATIONS
# =============================================================================


class Representation:
    """A right A-module: a space per vertex and a matrix per arrow."""

    def __init__(self, algebra: BoundAlgebra, dims: dict[str, int], maps: dict[str, DomainMatrix] | None = None):
        self.algebra = algebra
        self.dims = {v: int(dims.get(v, 0)) for v in algebra.vertices}
        self.maps: dict[str, DomainMatrix] = {}
        maps = maps or {}
        for a in algebra.quiver.arrows:
            shape = (self.dims[a.target], self.dims[a.source])
            m = maps.get(a.id)
            if m is None:
                m = linalg.zeros(*shape)
            if m.shape != shape:
                raise AlgebraError(f"map of arrow '{a.id}' has shape {m.shape}, expected {shape}")
            self.maps[a.id] = m
        self._path_cache: dict[Path, DomainMatrix] = {}

    @property
    def dim_vector(self) -> tuple[int, ...]:
        return tuple(self.dims[v] for v in self.algebra.vertices)

    @property
    def total(self) -> int:
        return sum(self.dims.values())

    def is_zero(self) -> bool:
        return self.total == 0

    def path_matrix(self, p: Path) -> DomainMatrix:
        m = self._path_cache.get(p)
        if m is None:
            m = linalg.identity(self.dims[p.source])
            for a in p.arrows:
                m = linalg.matmul(self.maps[a], m)
            self._path_cache[p] = m
        return m

    def act(self, coords: Sequence, i: str, j: str) -> DomainMatrix:
        """Matrix of the action of an element of e_i A e_j, from M_i to M_j."""
        out = linalg.zeros(self.dims[j], self.dims[i])
        for p, c in zip(self.algebra.paths(i, j), coords):
            if c:
                out = linalg.add_scaled(out, self.path_matrix(p), c)
        return out

    def act_free(self, f: PathVector) -> DomainMatrix:
        """Action of an element of kQ given as a combination of arbitrary paths."""
        parts = f.components()
        if len(parts) > 1:
            raise AlgebraError("element is not homogeneous in the vertex pair")
        if not parts:
            raise AlgebraError("zero element has no vertex pair")
        (i, j), part = next(iter(parts.items()))
        out = linalg.zeros(self.dims[j], self.dims[i])
        for p, c in part.terms.items():
            out = linalg.add_scaled(out, self.path_matrix(p), c)
        return out

    def validate(self) -> None:
        for n, r in enumerate(self.algebra.relations):
            for part in r.components().values():
                if not self.act_free(part).is_zero_matrix:
                    raise AlgebraError(f"relation {n} does not vanish on the representation")


def _direct_sum(algebra: BoundAlgebra, blocks: list[tuple[dict[str, int], dict[str, DomainMatrix]]]) -> Representation:
    dims = {v: sum(b[0][v] for b in blocks) for v in algebra.vertices}
    maps = {}
    for a in algebra.quiver.arrows:
        rows = []
        col_offset = 0
        total_cols = dims[a.source]
        for bdims, bmaps in blocks:
            sub = linalg.entries(bmaps[a.id])
            for row in sub:
                full = [Fraction(0)] * total_cols
                full[col_offset:col_offset + len(row)] = row
                rows.append(full)
            col_offset += bdims[a.source]
        maps[a.id] = linalg.matrix(rows, dims[a.target], total_cols)
    return Representation(algebra, dims, maps)


def _projective_block(A: BoundAlgebra, i: str):
    dims = {w: A.pair_dim(i, w) for w in A.vertices}
    maps = {a.id: A.right_mult(A.arrow_vector(a), a.source, a.target, i) for a in A.quiver.arrows}
    return dims, maps


def _injective_block(A: BoundAlgebra, i: str):
    dims = {w: A.pair_dim(w, i) for w in A.vertices}
    maps = {a.id: A.left_mult(A.arrow_vector(a), a.source, a.target, i).transpose() for a in A.quiver.arrows}
    return dims, maps


def projective(A: BoundAlgebra, i: str) -> Representation:
    """P_i = e_i A; arrows act by right multiplication."""
    return free_module(A, [i])


def injective(A: BoundAlgebra, i: str) -> Representation:
    """I_i = D(A e_i); (f.a)(y) = f(a y)."""
    return cofree_module(A, [i])


def simple(A: BoundAlgebra, i: str) -> Representation:
    return Representation(A, {v: int(v == i) for v in A.vertices})


def free_module(A: BoundAlgebra, tops: Sequence[str]) -> Representation:
    """The direct sum of the P_t for t in tops."""
    return _direct_sum(A, [_projective_block(A, t) for t in tops])


def cofree_module(A: BoundAlgebra, tops: Sequence[str]) -> Representation:
    """The direct sum of the I_t for t in tops."""
    return _direct_sum(A, [_injective_block(A, t) for t in tops])


def _free_blocks(A: BoundAlgebra, tops: Sequence[str], w: str, dual: bool = False) -> list[tuple[int, int]]:
    """(offset, size) of each summand of (sum P_t)_w, or of (sum I_t)_w when dual."""
    out = []
    offset = 0
    for t in tops:
        size = A.pair_dim(w, t) if dual else A.pair_dim(t, w)
        out.append((offset, size))
        offset += size
    return out


def map_from_free(A: BoundAlgebra, tops: Sequence[str], M: Representation, images: Sequence[Vector]) -> dict[str, DomainMatrix]:
    """The module map sum P_t -> M sending the r-th generator to images[r]."""
    out = {}
    for w in A.vertices:
        cols = []
        for t, m in zip(tops, images):
            for p in A.paths(t, w):
                cols.append(linalg.apply(M.path_matrix(p), m))
        out[w] = linalg.from_columns(cols, M.dims[w])
    return out


def kernel(source: Representation, f: dict[str, DomainMatrix]) -> tuple[Representation, dict[str, DomainMatrix]]:
    """Kernel submodule of f: source -> target, with its inclusion."""
    A = source.algebra
    basis = {w: linalg.nullspace(f[w]) for w in A.vertices}
    inclusion = {w: linalg.from_columns(basis[w], source.dims[w]) for w in A.vertices}
    maps = {}
    for a in A.quiver.arrows:
        images = [linalg.apply(source.maps[a.id], k) for k in basis[a.source]]
        coords = linalg.solve_columns(inclusion[a.target], images)
        maps[a.id] = linalg.from_columns(coords, len(basis[a.target]))
    dims = {w: len(basis[w]) for w in A.vertices}
    return Representation(A, dims, maps), inclusion


def radical_top(M: Representation) -> dict[str, list[int]]:
    """Per vertex, the basis indices spanning a complement of rad M."""
    tops = {}
    for v in M.algebra.vertices:
        rad = []
        for a in M.algebra.quiver.arrows_to(v):
            rad.extend(linalg.columns(M.maps[a.id]))
        tops[v] = QuotientSpace(M.dims[v], rad).free
    return tops


def projective_cover(M: Representation) -> tuple[list[str], list[Vector]]:
    """Tops of the projective cover and the images of its generators in M."""
    tops, images = [], []
    for v, free in radical_top(M).items():
        for c in free:
            tops.append(v)
            images.append([Fraction(int(k == c)) for k in range(M.dims[v])])
    return tops, images


# =============================================================================
# RESOLUTIONS
# =============================================================================


@dataclass
class Resolution:
    """
    Minimal projective resolution ... -> F_1 -> F_0 -> M.

    tops[n] lists the tops of F_n. differentials[n-1][s] is the image of the
    s-th generator of F_n, as an element of F_{n-1} at vertex tops[n][s].
    """

    module: Representation
    tops: list[list[str]] = field(default_factory=list)
    augmentation: list[Vector] = field(default_factory=list)
    differentials: list[list[Vector]] = field(default_factory=list)
    complete: bool = True

    @property
    def length(self) -> int:
        return len(self.tops) - 1

    def free(self, n: int) -> Representation:
        return free_module(self.module.algebra, self.tops[n] if n < len(self.tops) else [])

    def component(self, n: int, s: int, r: int) -> Vector:
        """x_rs in e_{k_r} A e_{v_s}: the r-th summand of d_n(generator s)."""
        A = self.module.algebra
        v = self.tops[n][s]
        offset, size = _free_blocks(A, self.tops[n - 1], v)[r]
        return self.differentials[n - 1][s][offset:offset + size]


def minimal_projective_resolution(A: BoundAlgebra, M: Representation, length: int) -> Resolution:
    """Minimal resolution of M, computed up to F_length."""
    res = Resolution(M)
    tops, images = projective_cover(M)
    res.tops.append(tops)
    res.augmentation = images
    F = free_module(A, tops)
    K, inc = kernel(F, map_from_free(A, tops, M, images))
    n = 0
    while not K.is_zero():
        if n >= length:
            res.complete = False
            break
        t, imgs = projective_cover(K)
        z = [linalg.apply(inc[v], img) for v, img in zip(t, imgs)]
        res.tops.append(t)
        res.differentials.append(z)
        Fn = free_module(A, t)
        K, inc = kernel(Fn, map_from_free(A, t, F, z))
        F = Fn
        n += 1
    return res


def projective_dimension(A: BoundAlgebra, M: Representation, bound: int) -> int | None:
    res = minimal_projective_resolution(A, M, bound)
    return res.length if res.complete else None


def global_dimension(A: BoundAlgebra, bound: int) -> int | str:
    """Max projective dimension of the simples, or AboveBound."""
    worst = 0
    for v in A.vertices:
        pd = projective_dimension(A, simple(A, v), bound)
        if pd is None:
            return ABOVE_BOUND
        worst = max(worst, pd)
    return worst


def _hom_from_free_map(A: BoundAlgebra, res: Resolution, n: int, N: Representation) -> DomainMatrix:
    """delta_n: Hom(F_{n-1}, N) -> Hom(F_n, N), both as sums of N at the tops."""
    src = res.tops[n - 1] if n - 1 < len(res.tops) and n >= 1 else []
    tgt = res.tops[n] if n < len(res.tops) else []
    rows = sum(N.dims[v] for v in tgt)
    cols = sum(N.dims[v] for v in src)
    if not rows or not cols:
        return linalg.zeros(rows, cols)
    grid = [[Fraction(0)] * cols for _ in range(rows)]
    row_offset = 0
    for s, v in enumerate(tgt):
        col_offset = 0
        for r, k in enumerate(src):
            block = linalg.entries(N.act(res.component(n, s, r), k, v))
            for a, row in enumerate(block):
                for b, x in enumerate(row):
                    grid[row_offset + a][col_offset + b] = x
            col_offset += N.dims[k]
        row_offset += N.dims[v]
    return linalg.matrix(grid, rows, cols)


def ext_dim(A: BoundAlgebra, M: Representation, N: Representation, n: int) -> int:
    """dim Ext^n_A(M, N) from the minimal resolution of M."""
    res = minimal_projective_resolution(A, M, n + 1)
    hom_n = sum(N.dims[v] for v in res.tops[n]) if n < len(res.tops) else 0
    if not hom_n:
        return 0
    upper = _hom_from_free_map(A, res, n + 1, N)
    kernel_dim = hom_n - linalg.rank(upper)
    lower = linalg.rank(_hom_from_free_map(A, res, n, N)) if n >= 1 else 0
    return kernel_dim - lower


def hom_space(M: Representation, N: Representation) -> list[dict[str, DomainMatrix]]:
    """Basis of Hom_A(M, N) as per-vertex matrices N_v x M_v."""
    A = M.algebra
    offsets = {}
    total = 0
    for v in A.vertices:
        offsets[v] = total
        total += N.dims[v] * M.dims[v]

    def var(v, r, c):
        return offsets[v] + r * M.dims[v] + c

    equations = []
    for a in A.quiver.arrows:
        s, t = a.source, a.target
        Na = linalg.entries(N.maps[a.id])
        Ma = linalg.entries(M.maps[a.id])
        for r in range(N.dims[t]):
            for c in range(M.dims[s]):
                row = [Fraction(0)] * total
                for k in range(N.dims[s]):
                    if Na[r][k]:
                        row[var(s, k, c)] += Na[r][k]
                for k in range(M.dims[t]):
                    if Ma[k][c]:
                        row[var(t, r, k)] -= Ma[k][c]
                equations.append(row)
    basis = linalg.nullspace(linalg.matrix(equations, len(equations), total))
    out = []
    for vec in basis:
        morphism = {}
        for v in A.vertices:
            rows = [
                [vec[var(v, r, c)] for c in range(M.dims[v])]
                for r in range(N.dims[v])
            ]
            morphism[v] = linalg.matrix(rows, N.dims[v], M.dims[v])
        out.append(morphism)
    return out


# =============================================================================
# NAKAYAMA FUNCTOR, AR TRANSLATE, TOR_2(-, DA)
# =============================================================================


def nakayama_map(res: Resolution, n: int) -> dict[str, DomainMatrix]:
    """nu(d_n): sum I_{tops[n]} -> sum I_{tops[n-1]}, per vertex."""
    A = res.module.algebra
    src, tgt = res.tops[n], res.tops[n - 1]
    out = {}
    for w in A.vertices:
        rows = sum(A.pair_dim(w, k) for k in tgt)
        cols = sum(A.pair_dim(w, v) for v in src)
        grid = [[Fraction(0)] * cols for _ in range(rows)]
        tgt_blocks = _free_blocks(A, tgt, w, dual=True)
        src_blocks = _free_blocks(A, src, w, dual=True)
        for s, v in enumerate(src):
            for r, k in enumerate(tgt):
                x = res.component(n, s, r)
                if not any(x):
                    continue
                block = linalg.entries(A.right_mult(x, k, v, w).transpose())
                ro, co = tgt_blocks[r][0], src_blocks[s][0]
                for a, row in enumerate(block):
                    for b, val in enumerate(row):
                        grid[ro + a][co + b] = val
        out[w] = linalg.matrix(grid, rows, cols)
    return out


def ar_translate(A: BoundAlgebra, M: Representation) -> Representation:
    """tau M = ker(nu P_1 -> nu P_0) for a minimal presentation of M."""
    res = minimal_projective_resolution(A, M, 1)
    if len(res.tops) < 2 or not res.tops[1]:
        return Representation(A, {})
    source = cofree_module(A, res.tops[1])
    tau, _ = kernel(source, nakayama_map(res, 1))
    return tau


def tor2_functor(A: BoundAlgebra, M: Representation) -> Representation:
    """Tor_2^A(M, DA) = ker(nu P_2 -> nu P_1); needs pd M <= 2."""
    res = minimal_projective_resolution(A, M, 2)
    if not res.complete:
        raise AlgebraError("Tor_2(-, DA) is computed here only for modules of projective dimension <= 2")
    if len(res.tops) < 3 or not res.tops[2]:
        return Representation(A, {})
    source = cofree_module(A, res.tops[2])
    tor, _ = kernel(source, nakayama_map(res, 2))
    return tor


# =============================================================================
# BIMODULES
# =============================================================================


class Bimodule:
    """
    An A-A-bimodule X given by the spaces e_i X e_j.

    left[(a, j)] is x -> a x from e_{t(a)} X e_j to e_{s(a)} X e_j;
    right[(i, a)] is x -> x a from e_i X e_{s(a)} to e_i X e_{t(a)}.
    """

    def __init__(self, algebra: BoundAlgebra, dims, left, right):
        self.algebra = algebra
        self.dims: dict[tuple[str, str], int] = dict(dims)
        self.left: dict[tuple[str, str], DomainMatrix] = dict(left)
        self.right: dict[tuple[str, str], DomainMatrix] = dict(right)

    @property
    def total(self) -> int:
        return sum(self.dims.values())

    def is_zero(self) -> bool:
        return self.total == 0

    def left_path(self, p: Path, j: str) -> DomainMatrix:
        m = linalg.identity(self.dims[(p.target, j)])
        for a in p.arrows:
            m = linalg.matmul(m, self.left[(a, j)])
        return m

    def right_path(self, i: str, p: Path) -> DomainMatrix:
        m = linalg.identity(self.dims[(i, p.source)])
        for a in p.arrows:
            m = linalg.matmul(self.right[(i, a)], m)
        return m

    def validate(self) -> None:
        """Relations act as zero on both sides and the two actions commute."""
        A = self.algebra
        V = A.vertices
        for n, r in enumerate(A.relations):
            for (s, t), part in r.components().items():
                for j in V:
                    acc = linalg.zeros(self.dims[(s, j)], self.dims[(t, j)])
                    for p, c in part.terms.items():
                        acc = linalg.add_scaled(acc, self.left_path(p, j), c)
                    if not acc.is_zero_matrix:
                        raise AlgebraError(f"relation {n} acts nontrivially on the left")
                for i in V:
                    acc = linalg.zeros(self.dims[(i, t)], self.dims[(i, s)])
                    for p, c in part.terms.items():
                        acc = linalg.add_scaled(acc, self.right_path(i, p), c)
                    if not acc.is_zero_matrix:
                        raise AlgebraError(f"relation {n} acts nontrivially on the right")
        for a in A.quiver.arrows:
            for b in A.quiver.arrows:
                lhs = linalg.matmul(self.right[(a.source, b.id)], self.left[(a.id, b.source)])
                rhs = linalg.matmul(self.left[(a.id, b.target)], self.right[(a.target, b.id)])
                if linalg.entries(lhs) != linalg.entries(rhs):
                    raise AlgebraError(f"left action of {a.id} and right action of {b.id} do not commute")

    def tensor(self, other: "Bimodule") -> "Bimodule":
        """X (x)_A Y."""
        A = self.algebra
        V = A.vertices
        spaces: dict[tuple[str, str], QuotientSpace] = {}
        layout: dict[tuple[str, str], dict[str, int]] = {}
        for i in V:
            for j in V:
                offsets, total = {}, 0
                for k in V:
                    offsets[k] = total
                    total += self.dims[(i, k)] * other.dims[(k, j)]
                layout[(i, j)] = offsets
                relations = []
                for a in A.quiver.arrows:
                    k, l = a.source, a.target
                    dx, dy = self.dims[(i, k)], other.dims[(l, j)]
                    if not dx or not dy:
                        continue
                    xa = linalg.columns(self.right[(i, a.id)])
                    ay = linalg.columns(other.left[(a.id, j)])
                    for x in range(dx):
                        for y in range(dy):
                            vec = [Fraction(0)] * total
                            for x2, c in enumerate(xa[x]):
                                if c:
                                    vec[offsets[l] + x2 * dy + y] += c
                            dy_k = other.dims[(k, j)]
                            for y2, c in enumerate(ay[y]):
                                if c:
                                    vec[offsets[k] + x * dy_k + y2] -= c
                            relations.append(vec)
                spaces[(i, j)] = QuotientSpace(total, relations)

        def induced(src, dst, transform):
            qs, qd = spaces[src], spaces[dst]
            cols = [qd.reduce(transform(qs.lift([int(n == m) for n in range(qs.dim)]))) for m in range(qs.dim)]
            return linalg.from_columns(cols, qd.dim)

        left, right = {}, {}
        for a in A.quiver.arrows:
            for j in V:
                src, dst = (a.target, j), (a.source, j)

                def act_left(vec, a=a, j=j):
                    out = [Fraction(0)] * spaces[(a.source, j)].ambient
                    for k in V:
                        dy = other.dims[(k, j)]
                        if not dy:
                            continue
                        L = linalg.columns(self.left[(a.id, k)])
                        o_src = layout[(a.target, j)][k]
                        o_dst = layout[(a.source, j)][k]
                        for x in range(self.dims[(a.target, k)]):
                            for y in range(dy):
                                c = vec[o_src + x * dy + y]
                                if c:
                                    for x2, d in enumerate(L[x]):
                                        if d:
                                            out[o_dst + x2 * dy + y] += c * d
                    return out

                left[(a.id, j)] = induced(src, dst, act_left)
            for i in V:
                src, dst = (i, a.source), (i, a.target)

                def act_right(vec, a=a, i=i):
                    out = [Fraction(0)] * spaces[(i, a.target)].ambient
                    for k in V:
                        dx = self.dims[(i, k)]
                        if not dx:
                            continue
                        R = linalg.columns(other.right[(k, a.id)])
                        dy_s, dy_t = other.dims[(k, a.source)], other.dims[(k, a.target)]
                        o_src = layout[(i, a.source)][k]
                        o_dst = layout[(i, a.target)][k]
                        for x in range(dx):
                            for y in range(dy_s):
                                c = vec[o_src + x * dy_s + y]
                                if c:
                                    for y2, d in enumerate(R[y]):
                                        if d:
                                            out[o_dst + x * dy_t + y2] += c * d
                    return out

                right[(i, a.id)] = induced(src, dst, act_right)
        dims = {key: s.dim for key, s in spaces.items()}
        return Bimodule(A, dims, left, right)


def zero_bimodule(A: BoundAlgebra) -> Bimodule:
    V = A.vertices
    dims = {(i, j): 0 for i in V for j in V}
    left = {(a.id, j): linalg.zeros(0, 0) for a in A.quiver.arrows for j in V}
    right = {(i, a.id): linalg.zeros(0, 0) for a in A.quiver.arrows for i in V}
    return Bimodule(A, dims, left, right)


def _lift_chain_map(A: BoundAlgebra, src: Resolution, dst: Resolution, f0_target: dict[str, DomainMatrix]) -> list[list[Vector]]:
    """
    Lift a module map src.module -> dst.module (per-vertex matrices) to the
    resolutions; returns generator images for f_0, f_1, f_2.
    """
    images: list[list[Vector]] = []
    eps_dst = map_from_free(A, dst.tops[0], dst.module, dst.augmentation)
    eps_src = map_from_free(A, src.tops[0], src.module, src.augmentation)
    level = []
    for s, v in enumerate(src.tops[0]):
        gen = _generator_vector(A, src.tops[0], s)
        target = linalg.apply(f0_target[v], linalg.apply(eps_src[v], gen))
        x = linalg.solve(eps_dst[v], target)
        if x is None:
            raise AlgebraError("cannot lift the module map to the projective cover")
        level.append(x)
    images.append(level)
    for n in (1, 2):
        if n >= len(src.tops) or not src.tops[n]:
            images.append([])
            continue
        prev_map = map_from_free(A, src.tops[n - 1], dst.free(n - 1), images[n - 1])
        if n >= len(dst.tops) or not dst.tops[n]:
            images.append([[] for _ in src.tops[n]])
            continue
        d_dst = map_from_free(A, dst.tops[n], dst.free(n - 1), dst.differentials[n - 1])
        level = []
        for s, v in enumerate(src.tops[n]):
            target = linalg.apply(prev_map[v], src.differentials[n - 1][s])
            x = linalg.solve(d_dst[v], target)
            if x is None:
                raise AlgebraError(f"cannot lift the chain map at degree {n}")
            level.append(x)
        images.append(level)
    return images


def _generator_vector(A: BoundAlgebra, tops: Sequence[str], s: int) -> Vector:
    """The s-th generator of sum P_t as a vector of (sum P_t) at tops[s]."""
    v = tops[s]
    blocks = _free_blocks(A, tops, v)
    size = sum(b[1] for b in blocks)
    vec = [Fraction(0)] * size
    offset, _ = blocks[s]
    idem = A.paths(v, v).index(Path(v, v, ()))
    vec[offset + idem] = Fraction(1)
    return vec


def ext2_bimodule(A: BoundAlgebra, bound: int = 64) -> Bimodule:
    """X = Ext^2_A(DA, A) with e_U X e_V = Ext^2(I_V, P_U)."""
    V = A.vertices
    res = {}
    for v in V:
        r = minimal_projective_resolution(A, injective(A, v), 2)
        if not r.complete:
            raise AlgebraError(f"injective I_{v} has projective dimension > 2")
        res[v] = r
    gd = global_dimension(A, bound)
    if gd == ABOVE_BOUND or gd > 2:
        raise AlgebraError(f"Ext^2(DA, A) needs global dimension <= 2, got {gd}")

    def f2_tops(v):
        return res[v].tops[2] if len(res[v].tops) > 2 else []

    def f1_tops(v):
        return res[v].tops[1] if len(res[v].tops) > 1 else []

    spaces: dict[tuple[str, str], QuotientSpace] = {}
    for U in V:
        for v in V:
            t2, t1 = f2_tops(v), f1_tops(v)
            ambient = sum(A.pair_dim(U, x) for x in t2)
            spanning = []
            if t2:
                blocks2 = [(sum(A.pair_dim(U, x) for x in t2[:s]), A.pair_dim(U, x)) for s, x in enumerate(t2)]
                for r, k in enumerate(t1):
                    for m in range(A.pair_dim(U, k)):
                        y = [Fraction(int(m == n)) for n in range(A.pair_dim(U, k))]
                        vec = [Fraction(0)] * ambient
                        for s, x in enumerate(t2):
                            xs = res[v].component(2, s, r)
                            img = linalg.apply(A.right_mult(xs, k, x, U), y)
                            off = blocks2[s][0]
                            vec[off:off + len(img)] = [a + b for a, b in zip(vec[off:off + len(img)], img)]
                        spanning.append(vec)
            spaces[(U, v)] = QuotientSpace(ambient, spanning)

    def induced(src, dst, transform):
        qs, qd = spaces[src], spaces[dst]
        cols = [qd.reduce(transform(qs.lift([int(n == m) for n in range(qs.dim)]))) for m in range(qs.dim)]
        return linalg.from_columns(cols, qd.dim)

    left, right = {}, {}
    for a in A.quiver.arrows:
        av = A.arrow_vector(a)
        for v in V:
            t2 = f2_tops(v)

            def act_left(vec, a=a, av=av, t2=t2):
                out = []
                offset = 0
                for x in t2:
                    size = A.pair_dim(a.target, x)
                    out.extend(linalg.apply(A.left_mult(av, a.source, a.target, x), vec[offset:offset + size]))
                    offset += size
                return out

            left[(a.id, v)] = induced((a.target, v), (a.source, v), act_left)

        src_res, dst_res = res[a.target], res[a.source]
        lam = {w: A.right_mult(av, a.source, a.target, w).transpose() for w in V}
        chain = _lift_chain_map(A, src_res, dst_res, lam)
        f2 = chain[2] if len(chain) > 2 else []
        t2_src, t2_dst = f2_tops(a.target), f2_tops(a.source)
        for U in V:

            def act_right(vec, U=U, f2=f2, t2_src=t2_src, t2_dst=t2_dst):
                out = []
                for t, x_t in enumerate(t2_src):
                    acc = [Fraction(0)] * A.pair_dim(U, x_t)
                    if f2 and f2[t]:
                        src_off = 0
                        blocks = _free_blocks(A, t2_dst, x_t)
                        for s, x_s in enumerate(t2_dst):
                            size = A.pair_dim(U, x_s)
                            y_s = vec[src_off:src_off + size]
                            b_off, b_size = blocks[s]
                            w_ts = f2[t][b_off:b_off + b_size]
                            if any(w_ts) and any(y_s):
                                img = linalg.apply(A.right_mult(w_ts, x_s, x_t, U), y_s)
                                acc = [p + q for p, q in zip(acc, img)]
                            src_off += size
                    out.extend(acc)
                return out

            right[(U, a.id)] = induced((U, a.source), (U, a.target), act_right)
    dims = {key: s.dim for key, s in spaces.items()}
    X = Bimodule(A, dims, left, right)
    LOGGER.debug("Ext^2(DA, A) has total dimension %d", X.total)
    return X


# =============================================================================
# TENSOR ALGEBRA OF Ext^2(DA, A)
# =============================================================================


@dataclass
class NilpotencyReport:
    """Outcome of the two nilpotency criteria for Tor_2(-, DA)."""

    nilpotent: bool | str
    index: int | None
    functor_index: int | None

    @property
    def agree(self) -> bool:
        return self.index == self.functor_index


def tor2_nilpotent(A: BoundAlgebra, bound: int) -> NilpotencyReport:
    """
    Decide nilpotency of Tor_2(-, DA) for gldim A <= 2 by two criteria:
    the least n with X^(x)n = 0 for X = Ext^2(DA, A), and the least n with
    Tor_2^n(S) = 0 for every simple S. Both are searched up to bound.
    """
    X = ext2_bimodule(A, bound)
    index = None
    power = X
    for n in range(1, bound + 1):
        if power.is_zero():
            index = n
            break
        power = power.tensor(X)

    functor_index = None
    modules = [simple(A, v) for v in A.vertices]
    for n in range(1, bound + 1):
        modules = [tor2_functor(A, M) for M in modules]
        modules = [M for M in modules if not M.is_zero()]
        if not modules:
            functor_index = n
            break

    report = NilpotencyReport(
        nilpotent=ABOVE_BOUND if index is None else True,
        index=index,
        functor_index=functor_index,
    )
    if not report.agree:
        LOGGER.warning("nilpotency criteria disagree: tensor index %s, functor index %s", index, functor_index)
    return report


def tensor_algebra_dims(A: BoundAlgebra, X: Bimodule, bound: int) -> dict[tuple[str, str], int]:
    """dim e_i T_A(X) e_j = sum over n of dim e_i X^(x)n e_j, with X^(x)0 = A."""
    dims = dict(A.dim_matrix())
    power = X
    for _ in range(bound):
        if power.is_zero():
            return dims
        for key, d in power.dims.items():
            dims[key] += d
        power = power.tensor(X)
    raise BoundExceeded(f"X^(x)n does not vanish for n <= {bound}")


# =============================================================================
# QUIVER OF THE 3-PRECALABI-YAU COMPLETION
# =============================================================================


@dataclass
class TildeQuiver:
    """Q plus one new arrow j -> i per minimal relation from i to j."""

    quiver: Quiver
    added: dict[tuple[str, str], int]
    new_arrows: list[Arrow]


def minimal_relation_counts(A: BoundAlgebra) -> dict[tuple[str, str], int]:
    """dim e_i (I / (IJ + JI)) e_j, computed modulo paths longer than dim A."""
    q = A.quiver
    limit = A.dim
    if is_acyclic(q):
        limit = min(limit, longest_path_length(q))
    paths_by_pair: dict[tuple[str, str], dict[Path, int]] = {}
    ending: dict[str, list[Path]] = {v: [] for v in q.vertices}
    starting: dict[str, list[Path]] = {v: [] for v in q.vertices}
    for n in range(limit + 1):
        for p in paths_of_length(q, n):
            index = paths_by_pair.setdefault((p.source, p.target), {})
            index[p] = len(index)
            ending[p.target].append(p)
            starting[p.source].append(p)

    generators = [part for r in A.relations for part in r.components().values()]
    ideal: dict[tuple[str, str], list[Vector]] = {}
    product: dict[tuple[str, str], list[Vector]] = {}
    for g in generators:
        x, y = next(iter(g.terms)).source, next(iter(g.terms)).target
        shortest = min(len(p.arrows) for p in g.terms)
        for u in ending[x]:
            for v in starting[y]:
                if len(u.arrows) + len(v.arrows) + shortest > limit:
                    continue
                key = (u.source, v.target)
                index = paths_by_pair[key]
                vec = [Fraction(0)] * len(index)
                for p, c in g.terms.items():
                    word = Path(u.source, v.target, u.arrows + p.arrows + v.arrows)
                    if len(word.arrows) <= limit:
                        vec[index[word]] += c
                if not any(vec):
                    continue
                ideal.setdefault(key, []).append(vec)
                if u.arrows or v.arrows:
                    product.setdefault(key, []).append(vec)

    counts = {}
    for key, vectors in ideal.items():
        size = len(paths_by_pair[key])
        n = linalg.rank_of_vectors(vectors, size) - linalg.rank_of_vectors(product.get(key, []), size)
        if n:
            counts[key] = n
    return counts


def ext2_simple_counts(A: BoundAlgebra) -> dict[tuple[str, str], int]:
    """dim Ext^2(S_i, S_j), read off the second term of the minimal resolution of S_i."""
    counts: dict[tuple[str, str], int] = {}
    for i in A.vertices:
        res = minimal_projective_resolution(A, simple(A, i), 2)
        if len(res.tops) > 2:
            for j in res.tops[2]:
                counts[(i, j)] = counts.get((i, j), 0) + 1
    return counts


def tilde_quiver(A: BoundAlgebra, bound: int = 64) -> TildeQuiver:
    """Add the arrows of the 3-preCalabi-Yau completion; needs gldim <= 2 and nilpotent Tor_2."""
    gd = global_dimension(A, bound)
    if gd == ABOVE_BOUND or gd > 2:
        raise AlgebraError(f"tilde quiver needs global dimension <= 2, got {gd}")
    report = tor2_nilpotent(A, bound)
    if report.nilpotent is not True:
        raise AlgebraError("tilde quiver needs Tor_2(-, DA) nilpotent")

    counts = minimal_relation_counts(A)
    if counts != ext2_simple_counts(A):
        raise AlgebraError(
            f"minimal relation counts {sorted(counts.items())} differ from Ext^2 between simples"
        )
    taken = set(A.quiver.arrow_map)
    new_arrows = []
    for (i, j), n in sorted(counts.items(), key=lambda kv: (A.quiver.vertex_index[kv[0][0]], A.quiver.vertex_index[kv[0][1]])):
        for k in range(n):
            name = f"rho_{j}_{i}" if n == 1 else f"rho_{j}_{i}_{k + 1}"
            while name in taken:
                name += "'"
            taken.add(name)
            new_arrows.append(Arrow(id=name, source=j, target=i))
    tilde = Quiver(vertices=A.vertices, arrows=A.quiver.arrows + tuple(new_arrows))
    LOGGER.info("tilde quiver adds %d arrows", len(new_arrows))
    return TildeQuiver(quiver=tilde, added=counts, new_arrows=new_arrows)


# =============================================================================
# SERIALIZATION
# =============================================================================


def algebra_from_dict(data: Any, d_max: int, where: str = "algebra") -> BoundAlgebra:
    """{"quiver": {...}, "relations": [[{"coeff", "path"}, ...], ...]}"""
    if not isinstance(data, dict):
        raise QuiverFormatError("expected an object with 'quiver' and 'relations'", where)
    q = quiver_from_dict(data.get("quiver"), f"{where}.quiver")
    raw = data.get("relations", [])
    if not isinstance(raw, list):
        raise QuiverFormatError("'relations' must be an array", f"{where}.relations")
    rels = [path_vector_from_json(q, r, f"{where}.relations[{k}]") for k, r in enumerate(raw)]
    return build_bound_algebra(q, rels, d_max)


def algebra_to_dict(A: BoundAlgebra) -> dict:
    return {
        "quiver": quiver_to_dict(A.quiver),
        "relations": [path_vector_to_json(r) for r in A.relations],
    }


def representation_from_dict(A: BoundAlgebra, data: Any, where: str = "module") -> Representation:
    """{"dims": {vertex: n}, "maps": {arrow: rows}} with rational entries."""
    if not isinstance(data, dict) or not isinstance(data.get("dims"), dict):
        raise QuiverFormatError("expected an object with 'dims' and 'maps'", where)
    dims = {}
    for v, n in data["dims"].items():
        if v not in A.quiver.vertex_index:
            raise QuiverFormatError(f"unknown vertex '{v}'", f"{where}.dims")
        if not isinstance(n, int) or n < 0:
            raise QuiverFormatError("dimension must be a nonnegative integer", f"{where}.dims.{v}")
        dims[v] = n
    maps = {}
    for arrow_id, rows in (data.get("maps") or {}).items():
        a = A.quiver.arrow_map.get(arrow_id)
        if a is None:
            raise QuiverFormatError(f"unknown arrow '{arrow_id}'", f"{where}.maps")
        m, n = dims.get(a.target, 0), dims.get(a.source, 0)
        if not isinstance(rows, list) or len(rows) != m or any(not isinstance(r, list) or len(r) != n for r in rows):
            raise QuiverFormatError(f"expected a {m} x {n} matrix", f"{where}.maps.{arrow_id}")
        maps[arrow_id] = linalg.matrix(
            [[parse_rational(x, f"{where}.maps.{arrow_id}") for x in r] for r in rows], m, n
        )
    try:
        M = Representation(A, dims, maps)
    except AlgebraError as e:
        raise QuiverFormatError(str(e), where) from None
    M.validate()
    return M


def representation_to_dict(M: Representation) -> dict:
    return {
        "dims": dict(M.dims),
        "maps": {
            a: [[str(x) for x in row] for row in linalg.entries(m)]
            for a, m in sorted(M.maps.items())
            if 0 not in m.shape
        },
    }
