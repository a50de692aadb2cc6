"""
Quivers with potential: cyclic derivatives, Jacobian algebras, triangular
extensions and the Ginzburg graded quiver with its differential.
"""

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .errors import AlgebraError, QuiverFormatError
from .paths import (
    Path,
    PathVector,
    QuotientPresentation,
    Verdict,
    format_rational,
    groebner,
    make_path,
    parse_rational,
    path_vector_from_json,
    quotient_dims,
)
from .quiver import LOOP_PREFIX, STAR, Arrow, Quiver, quiver_from_dict, quiver_to_dict

LOGGER = logging.getLogger(__name__)


def canonical_cycle(q: Quiver, arrows: Sequence[str]) -> Path:
    """Rotation-minimal representative of a cycle given by arrow ids."""
    p = make_path(q, arrows)
    if p.source != p.target:
        raise QuiverFormatError(f"{' '.join(arrows)} is not a cycle")
    word = p.arrows
    best = min(word[k:] + word[:k] for k in range(len(word)))
    start = q.arrow_map[best[0]].source
    return Path(start, start, best)


class Potential:
    """A finite linear combination of cycles up to rotation."""

    __slots__ = ("quiver", "cycles")

    def __init__(self, quiver: Quiver, cycles: dict[Path, Fraction] | None = None):
        self.quiver = quiver
        self.cycles = {p: Fraction(c) for p, c in (cycles or {}).items() if c}

    @classmethod
    def from_terms(cls, quiver: Quiver, terms: Iterable[tuple[Any, Sequence[str]]]) -> "Potential":
        cycles: dict[Path, Fraction] = {}
        for coeff, arrows in terms:
            p = canonical_cycle(quiver, arrows)
            cycles[p] = cycles.get(p, 0) + Fraction(coeff)
        return cls(quiver, cycles)

    def __add__(self, other: "Potential") -> "Potential":
        cycles = dict(self.cycles)
        for p, c in other.cycles.items():
            cycles[p] = cycles.get(p, 0) + c
        return Potential(self.quiver, cycles)

    def scale(self, c) -> "Potential":
        return Potential(self.quiver, {p: c * x for p, x in self.cycles.items()})

    def on(self, quiver: Quiver) -> "Potential":
        """The same cycles viewed in a larger quiver."""
        return Potential(quiver, self.cycles)

    def __eq__(self, other) -> bool:
        return isinstance(other, Potential) and self.cycles == other.cycles

    def __bool__(self) -> bool:
        return bool(self.cycles)

    def __str__(self) -> str:
        return str(PathVector(self.quiver, self.cycles))


@dataclass(frozen=True)
class QP:
    """A quiver with potential."""

    quiver: Quiver
    potential: Potential


def cyclic_derivative(w: Potential, a: str) -> PathVector:
    """d_a W = sum over decompositions p = u a v of v u."""
    q = w.quiver
    arrow = q.arrow(a)
    terms: dict[Path, Fraction] = {}
    for cycle, c in w.cycles.items():
        word = cycle.arrows
        for k, x in enumerate(word):
            if x != a:
                continue
            rest = word[k + 1:] + word[:k]
            p = Path(arrow.target, arrow.source, rest)
            terms[p] = terms.get(p, 0) + c
    return PathVector(q, terms)


def jacobian(qp: QP, d_max: int) -> QuotientPresentation:
    """Groebner presentation of kQ / <d_a W : a in Q_1>."""
    gens = [cyclic_derivative(qp.potential, a.id) for a in sorted(qp.quiver.arrows, key=lambda a: a.id)]
    gens = [g for g in gens if g]
    LOGGER.debug("jacobian: %d nonzero cyclic derivatives", len(gens))
    return groebner(gens, d_max, quiver=qp.quiver)


def is_jacobi_finite(qp: QP, d_max: int) -> Verdict:
    return quotient_dims(jacobian(qp, d_max))[0]


# =============================================================================
# TRIANGULAR EXTENSIONS
# =============================================================================


def triangular_extension(qp: QP, qp2: QP, connecting: Sequence[tuple[str, str, str]]) -> QP:
    """Union of two QPs plus arrows from Q_0 to Q_0'; the potential is W + W'."""
    q, q2 = qp.quiver, qp2.quiver
    overlap = set(q.vertices) & set(q2.vertices)
    if overlap:
        raise QuiverFormatError(f"vertex sets overlap: {sorted(overlap)}")
    arrows = list(q.arrows) + list(q2.arrows)
    ids = {a.id for a in arrows}
    if len(ids) != len(arrows):
        raise QuiverFormatError("arrow ids of the two quivers collide")
    for arrow_id, source, target in connecting:
        if source not in q.vertex_index or target not in q2.vertex_index:
            raise QuiverFormatError(f"connector '{arrow_id}' must go from Q_0 to Q_0' (got {source} -> {target})")
        if arrow_id in ids:
            raise QuiverFormatError(f"connector id '{arrow_id}' is already used")
        ids.add(arrow_id)
        arrows.append(Arrow(id=arrow_id, source=source, target=target))
    bar = Quiver(vertices=q.vertices + q2.vertices, arrows=tuple(arrows))
    return QP(bar, qp.potential.on(bar) + qp2.potential.on(bar))


def verify_triangular_dim(
    qpbar: QP, qp: QP, qp2: QP, connecting: Sequence[tuple[str, str, str]], d_max: int
) -> bool:
    """
    Compare dim J(Q-bar, W-bar) with J' (x) (R' + kF + R) (x) J, pair by pair.

    A vertex pair (x, y) with x in Q_0 and y in Q_0' gets
    sum over connectors f: u -> v of dim e_x J e_u * dim e_v J' e_y.
    """
    verdicts = []
    dims = []
    for piece in (qpbar, qp, qp2):
        verdict, dm = quotient_dims(jacobian(piece, d_max))
        verdicts.append(verdict)
        dims.append(dm)
    for v in verdicts:
        if v.kind != "Finite":
            raise AlgebraError(f"triangular check needs Jacobi-finite pieces, got {v}")
    direct, j, j2 = dims
    expected: dict[tuple[str, str], int] = {key: 0 for key in direct}
    for key, n in j.items():
        expected[key] += n
    for key, n in j2.items():
        expected[key] += n
    for _, u, v in connecting:
        for x in qp.quiver.vertices:
            for y in qp2.quiver.vertices:
                expected[(x, y)] += j[(x, u)] * j2[(v, y)]
    return expected == direct


# =============================================================================
# GINZBURG GRADED QUIVER
# =============================================================================


@dataclass(frozen=True)
class GinzburgPresentation:
    """Graded quiver Q-hat with the differential on its generators."""

    quiver: Quiver
    differential: dict[str, PathVector]


def ginzburg(qp: QP) -> GinzburgPresentation:
    q = qp.quiver
    if q.is_graded:
        raise QuiverFormatError("the Ginzburg construction needs an ungraded quiver")
    taken = {a.id for a in q.arrows}
    for a in q.arrows:
        if a.id.endswith(STAR) or a.id.startswith(LOOP_PREFIX):
            raise QuiverFormatError(f"arrow id '{a.id}' uses a reserved name")
    arrows = list(q.arrows)
    arrows += [Arrow(id=a.id + STAR, source=a.target, target=a.source, degree=-1) for a in q.arrows]
    arrows += [Arrow(id=LOOP_PREFIX + v, source=v, target=v, degree=-2) for v in q.vertices]
    if len({a.id for a in arrows}) != len(arrows) or taken & {LOOP_PREFIX + v for v in q.vertices}:
        raise QuiverFormatError("generated Ginzburg arrow ids collide")
    hat = Quiver(vertices=q.vertices, arrows=tuple(arrows))

    d: dict[str, PathVector] = {}
    for a in q.arrows:
        d[a.id] = PathVector.zero(hat)
        d[a.id + STAR] = PathVector(hat, cyclic_derivative(qp.potential, a.id).terms)
    for v in q.vertices:
        terms: dict[Path, Fraction] = {}
        for a in q.arrows:
            if a.source == v:
                p = Path(v, v, (a.id, a.id + STAR))
                terms[p] = terms.get(p, 0) + 1
            if a.target == v:
                p = Path(v, v, (a.id + STAR, a.id))
                terms[p] = terms.get(p, 0) - 1
        d[LOOP_PREFIX + v] = PathVector(hat, terms)
    return GinzburgPresentation(hat, d)


def path_degree(q: Quiver, p: Path) -> int:
    return sum(q.arrow_map[a].degree for a in p.arrows)


def ginzburg_leibniz(g: GinzburgPresentation, f: PathVector) -> PathVector:
    """Extend d to paths by d(uv) = (du)v + (-1)^|u| u dv."""
    q = g.quiver
    out: dict[Path, Fraction] = {}
    for p, c in f.terms.items():
        sign_degree = 0
        for k, x in enumerate(p.arrows):
            dx = g.differential.get(x)
            if dx:
                sign = -1 if sign_degree % 2 else 1
                prefix = p.arrows[:k]
                suffix = p.arrows[k + 1:]
                for r, e in dx.terms.items():
                    new = Path(p.source, p.target, prefix + r.arrows + suffix)
                    out[new] = out.get(new, 0) + sign * c * e
            sign_degree += q.arrow_map[x].degree
    return PathVector(q, out)


def verify_differential(g: GinzburgPresentation) -> bool:
    """d raises degree by one on every generator and d(d(x)) = 0."""
    q = g.quiver
    for a in q.arrows:
        dx = g.differential.get(a.id, PathVector.zero(q))
        for p in dx.terms:
            if path_degree(q, p) != a.degree + 1:
                LOGGER.info("d(%s) has a term %s of the wrong degree", a.id, p)
                return False
            if (p.source, p.target) != (a.source, a.target):
                LOGGER.info("d(%s) has a term %s with the wrong endpoints", a.id, p)
                return False
        if ginzburg_leibniz(g, dx):
            LOGGER.info("d^2(%s) != 0", a.id)
            return False
    return True


def with_override(g: GinzburgPresentation, overrides: dict[str, PathVector]) -> GinzburgPresentation:
    """Replace d on selected generators."""
    d = dict(g.differential)
    for name, value in overrides.items():
        if name not in g.quiver.arrow_map:
            raise QuiverFormatError(f"unknown generator '{name}'")
        d[name] = PathVector(g.quiver, value.terms)
    return GinzburgPresentation(g.quiver, d)


# =============================================================================
# FILE FORMAT
# =============================================================================


def qp_from_dict(data: Any) -> QP:
    if not isinstance(data, dict) or "quiver" not in data:
        raise QuiverFormatError("expected an object with 'quiver' and 'potential'", "qp")
    q = quiver_from_dict(data["quiver"])
    terms = []
    raw = data.get("potential", [])
    if not isinstance(raw, list):
        raise QuiverFormatError("'potential' must be an array", "qp.potential")
    for k, term in enumerate(raw):
        loc = f"qp.potential[{k}]"
        if not isinstance(term, dict) or not isinstance(term.get("cycle"), list) or not term["cycle"]:
            raise QuiverFormatError("term needs a nonempty 'cycle' array", loc)
        coeff = parse_rational(term.get("coeff", "1"), f"{loc}.coeff")
        try:
            canonical_cycle(q, term["cycle"])
        except QuiverFormatError as e:
            raise QuiverFormatError(str(e), f"{loc}.cycle") from None
        terms.append((coeff, term["cycle"]))
    return QP(q, Potential.from_terms(q, terms))


def load_qp(text: str) -> QP:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise QuiverFormatError(f"malformed JSON: {e.msg}", f"line {e.lineno} column {e.colno}") from None
    return qp_from_dict(data)


def qp_to_dict(qp: QP) -> dict:
    terms = [
        {"coeff": format_rational(c), "cycle": list(p.arrows)}
        for p, c in sorted(qp.potential.cycles.items(), key=lambda t: t[0].key)
    ]
    return {"quiver": quiver_to_dict(qp.quiver), "potential": terms}


def overrides_from_dict(g: GinzburgPresentation, data: Any) -> dict[str, PathVector]:
    if not isinstance(data, dict):
        raise QuiverFormatError("override file must map generator ids to path-vectors", "override")
    return {name: path_vector_from_json(g.quiver, value, f"override.{name}") for name, value in data.items()}
