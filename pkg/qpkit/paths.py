"""
Path algebras over QQ: paths, path vectors, degree-truncated noncommutative
Groebner bases and quotient dimensions.

Composition runs left to right: for a: i -> j and b: j -> k the product a*b is
the path ab from i to k. Monomials are ordered by length first, then
lexicographically by arrow id, then by source vertex.
"""

import heapq
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import count
from typing import Iterable, Iterator, Literal, NamedTuple, Sequence

from pydantic import BaseModel

from .errors import AlgebraError, QuiverFormatError
from .quiver import STAR, Quiver, double_quiver

LOGGER = logging.getLogger(__name__)


class Path(NamedTuple):
    """A path of a quiver; arrows == () is the idempotent at source."""

    source: str
    target: str
    arrows: tuple[str, ...] = ()

    @property
    def key(self) -> tuple:
        return (len(self.arrows), self.arrows, self.source)

    def __str__(self) -> str:
        return "·".join(self.arrows) if self.arrows else f"e{self.source}"


def vertex_path(v: str) -> Path:
    return Path(v, v, ())


def make_path(q: Quiver, arrow_ids: Sequence[str]) -> Path:
    """Build a path from arrow ids, checking composability."""
    if not arrow_ids:
        raise QuiverFormatError("empty arrow sequence; use a vertex id for an idempotent")
    arrows = [q.arrow(a) for a in arrow_ids]
    for x, y in zip(arrows, arrows[1:]):
        if x.target != y.source:
            raise QuiverFormatError(f"arrows '{x.id}' and '{y.id}' are not composable")
    return Path(arrows[0].source, arrows[-1].target, tuple(arrow_ids))


def concat(p: Path, r: Path) -> Path | None:
    if p.target != r.source:
        return None
    return Path(p.source, r.target, p.arrows + r.arrows)


def path_vertices(q: Quiver, p: Path) -> list[str]:
    return [p.source] + [q.arrow_map[a].target for a in p.arrows]


def paths_of_length(q: Quiver, length: int, start: str | None = None) -> Iterator[Path]:
    starts = [start] if start is not None else list(q.vertices)
    for v in starts:
        stack = [Path(v, v, ())]
        while stack:
            p = stack.pop()
            if len(p.arrows) == length:
                yield p
                continue
            for a in q.arrows_from(p.target):
                stack.append(Path(p.source, a.target, p.arrows + (a.id,)))


class PathVector:
    """An exact rational combination of paths of one quiver."""

    __slots__ = ("quiver", "terms")

    def __init__(self, quiver: Quiver, terms: dict[Path, Fraction] | None = None):
        self.quiver = quiver
        self.terms: dict[Path, Fraction] = {p: Fraction(c) for p, c in (terms or {}).items() if c}

    @classmethod
    def of(cls, quiver: Quiver, path: Path | str | Sequence[str], coeff=1) -> "PathVector":
        if isinstance(path, Path):
            p = path
        elif isinstance(path, str):
            if path not in quiver.vertex_index:
                raise QuiverFormatError(f"unknown vertex '{path}'")
            p = vertex_path(path)
        else:
            p = make_path(quiver, path)
        return cls(quiver, {p: Fraction(coeff)})

    @classmethod
    def zero(cls, quiver: Quiver) -> "PathVector":
        return cls(quiver, {})

    def _check(self, other: "PathVector") -> None:
        if other.quiver is not self.quiver and other.quiver != self.quiver:
            raise AlgebraError("path vectors over different quivers")

    def __add__(self, other: "PathVector") -> "PathVector":
        self._check(other)
        terms = dict(self.terms)
        for p, c in other.terms.items():
            terms[p] = terms.get(p, 0) + c
        return PathVector(self.quiver, terms)

    def __neg__(self) -> "PathVector":
        return PathVector(self.quiver, {p: -c for p, c in self.terms.items()})

    def __sub__(self, other: "PathVector") -> "PathVector":
        return self + (-other)

    def scale(self, c) -> "PathVector":
        return PathVector(self.quiver, {p: c * x for p, x in self.terms.items()})

    def __rmul__(self, c) -> "PathVector":
        return self.scale(Fraction(c))

    def __mul__(self, other):
        if isinstance(other, PathVector):
            return multiply(self, other)
        return self.scale(Fraction(other))

    def __eq__(self, other) -> bool:
        return isinstance(other, PathVector) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def leading(self) -> tuple[Path, Fraction]:
        p = max(self.terms, key=lambda t: t.key)
        return p, self.terms[p]

    def components(self) -> dict[tuple[str, str], "PathVector"]:
        """The pieces e_i f e_j, keyed by (i, j)."""
        parts: dict[tuple[str, str], dict[Path, Fraction]] = {}
        for p, c in self.terms.items():
            parts.setdefault((p.source, p.target), {})[p] = c
        return {k: PathVector(self.quiver, t) for k, t in parts.items()}

    def sorted_terms(self) -> list[tuple[Path, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: t[0].key, reverse=True)

    def __repr__(self) -> str:
        return f"PathVector({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for p, c in self.sorted_terms():
            coeff = "" if c == 1 else "-" if c == -1 else f"{c}*"
            out.append(f"{coeff}{p}")
        return " + ".join(out).replace("+ -", "- ")


def multiply(u: PathVector, v: PathVector) -> PathVector:
    """Bilinear extension of concatenation; incomposable pairs give 0."""
    u._check(v)
    terms: dict[Path, Fraction] = {}
    for p, c in u.terms.items():
        for r, d in v.terms.items():
            pr = concat(p, r)
            if pr is not None:
                terms[pr] = terms.get(pr, 0) + c * d
    return PathVector(u.quiver, terms)


# =============================================================================
# FILE FORMAT
# =============================================================================


def parse_rational(text, where: str = "coeff") -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise QuiverFormatError(f"not a rational number: {text!r}", where) from None


def format_rational(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def path_vector_from_json(q: Quiver, data, where: str = "relation") -> PathVector:
    """Decode [{"coeff": "p/q", "path": [arrow ids] | "vertex"}, ...]."""
    if not isinstance(data, list):
        raise QuiverFormatError("a path-vector must be an array of terms", where)
    total = PathVector.zero(q)
    for k, term in enumerate(data):
        loc = f"{where}[{k}]"
        if not isinstance(term, dict) or "path" not in term:
            raise QuiverFormatError("term needs 'coeff' and 'path'", loc)
        coeff = parse_rational(term.get("coeff", "1"), f"{loc}.coeff")
        try:
            total = total + PathVector.of(q, term["path"], coeff)
        except QuiverFormatError as e:
            raise QuiverFormatError(str(e), f"{loc}.path") from None
    return total


def path_vector_to_json(f: PathVector) -> list[dict]:
    out = []
    for p, c in sorted(f.terms.items(), key=lambda t: t[0].key):
        out.append({"coeff": format_rational(c), "path": list(p.arrows) if p.arrows else p.source})
    return out


# =============================================================================
# GROEBNER BASES
# =============================================================================


class Verdict(BaseModel):
    """Finiteness verdict of a quotient algebra."""

    kind: Literal["Finite", "Infinite", "Inconclusive"]
    dim: int | None = None
    d_max: int | None = None

    def __str__(self) -> str:
        if self.kind == "Finite":
            return f"Finite({self.dim})"
        if self.kind == "Inconclusive":
            return f"Inconclusive({self.d_max})"
        return "Infinite"


@dataclass(frozen=True)
class QuotientPresentation:
    """kQ modulo the ideal generated by `generators`, with its Groebner data."""

    quiver: Quiver
    generators: tuple[PathVector, ...]
    groebner: tuple[PathVector, ...]
    d_max: int
    killed: frozenset[str] = frozenset()
    closed: bool = True
    complete: bool = False
    verdict: Verdict = field(default_factory=lambda: Verdict(kind="Inconclusive"))
    normal_words: tuple[Path, ...] | None = None

    @property
    def leading_words(self) -> tuple[tuple[str, ...], ...]:
        return tuple(g.leading()[0].arrows for g in self.groebner)

    @cached_property
    def rewriter(self) -> "_Rewriter":
        """Rewriting rules of the Groebner basis, built on first use."""
        return _rewriter_for(self)


class _Rewriter:
    """Rewriting system lead -> tail for the current basis."""

    def __init__(self, q: Quiver):
        self.q = q
        self.rules: dict[tuple[str, ...], dict[Path, Fraction]] = {}
        self.killed: set[str] = set()
        self._lengths: set[int] = set()

    def add(self, lead: tuple[str, ...], tail: dict[Path, Fraction]) -> None:
        self.rules[lead] = tail
        self._lengths = {len(w) for w in self.rules}

    def remove(self, lead: tuple[str, ...]) -> dict[Path, Fraction]:
        tail = self.rules.pop(lead)
        self._lengths = {len(w) for w in self.rules}
        return tail

    def dead(self, p: Path) -> bool:
        if not self.killed:
            return False
        return any(v in self.killed for v in path_vertices(self.q, p))

    def find(self, p: Path) -> tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]] | None:
        w = p.arrows
        for start in range(len(w)):
            for k in self._lengths:
                if start + k <= len(w) and w[start:start + k] in self.rules:
                    return w[:start], w[start:start + k], w[start + k:]
        return None

    def reduce(self, terms: dict[Path, Fraction]) -> dict[Path, Fraction]:
        work = {p: c for p, c in terms.items() if c and not self.dead(p)}
        done: dict[Path, Fraction] = {}
        while work:
            p = max(work, key=lambda t: t.key)
            c = work.pop(p)
            hit = self.find(p)
            if hit is None:
                done[p] = c
                continue
            u, lead, v = hit
            for r, d in self.rules[lead].items():
                arrows = u + r.arrows + v
                new = Path(p.source, p.target, arrows)
                if self.dead(new):
                    continue
                x = work.get(new, 0) + c * d
                if x:
                    work[new] = x
                else:
                    work.pop(new, None)
        return done


def _overlaps(a: tuple[str, ...], b: tuple[str, ...]) -> Iterator[int]:
    """Lengths s of proper overlaps: a = u s, b = s v with u, v nonempty."""
    for s in range(1, min(len(a), len(b))):
        if a[len(a) - s:] == b[:s]:
            yield s


def groebner(gens: Sequence[PathVector], d_max: int, quiver: Quiver | None = None) -> QuotientPresentation:
    """Reduced Groebner basis of the ideal generated by gens, overlaps up to d_max."""
    if quiver is None:
        if not gens:
            raise AlgebraError("groebner needs a quiver when there are no generators")
        quiver = gens[0].quiver
    q = quiver
    max_degree = max((len(p.arrows) for g in gens for p in g.terms), default=0)
    if d_max < max_degree:
        raise AlgebraError(f"d_max={d_max} is below the generator degree {max_degree}")

    rw = _Rewriter(q)
    closed = True
    tick = count()
    queue: list[tuple[tuple, int, dict[Path, Fraction]]] = []

    def push(terms: dict[Path, Fraction]) -> None:
        if terms:
            lead = max(terms, key=lambda t: t.key)
            heapq.heappush(queue, (lead.key, next(tick), terms))

    for g in gens:
        for part in g.components().values():
            push(part.terms)

    while queue:
        _, _, terms = heapq.heappop(queue)
        f = rw.reduce(terms)
        if not f:
            continue
        lead = max(f, key=lambda t: t.key)
        c = f[lead]
        if not lead.arrows:
            # an idempotent in the ideal kills its vertex
            LOGGER.debug("vertex %s is killed", lead.source)
            rw.killed.add(lead.source)
            for w in list(rw.rules):
                tail = rw.remove(w)
                old = dict(tail)
                old_lead = Path(*_endpoints(q, w), w)
                old[old_lead] = old.get(old_lead, 0) - 1
                push({p: -x for p, x in old.items() if x})
            continue
        if len(lead.arrows) > d_max:
            closed = False
            continue
        tail = {p: -x / c for p, x in f.items() if p != lead}
        for w in list(rw.rules):
            if _contains(w, lead.arrows):
                old = rw.remove(w)
                terms_old = {p: -x for p, x in old.items()}
                terms_old[Path(*_endpoints(q, w), w)] = Fraction(1)
                push(terms_old)
        rw.add(lead.arrows, tail)
        for w in list(rw.rules):
            pairs = [(lead.arrows, w)] if w == lead.arrows else [(lead.arrows, w), (w, lead.arrows)]
            for a_word, b_word in pairs:
                for s in _overlaps(a_word, b_word):
                    total = len(a_word) + len(b_word) - s
                    if total > d_max:
                        closed = False
                        continue
                    push(_s_polynomial(q, rw, a_word, b_word, s))

    _interreduce(rw)
    basis = []
    for w, tail in sorted(rw.rules.items(), key=lambda t: (len(t[0]), t[0])):
        terms = {p: -x for p, x in tail.items()}
        terms[Path(*_endpoints(q, w), w)] = Fraction(1)
        basis.append(PathVector(q, terms))
    for v in sorted(rw.killed):
        basis.append(PathVector.of(q, v))
    if not closed:
        LOGGER.warning("Groebner run truncated at d_max=%d", d_max)
    return _certify(q, tuple(gens), tuple(basis), frozenset(rw.killed), closed, d_max)


def _contains(word: tuple[str, ...], sub: tuple[str, ...]) -> bool:
    k = len(sub)
    return any(word[i:i + k] == sub for i in range(len(word) - k + 1))


def _endpoints(q: Quiver, word: tuple[str, ...]) -> tuple[str, str]:
    return q.arrow_map[word[0]].source, q.arrow_map[word[-1]].target


def _s_polynomial(q: Quiver, rw: _Rewriter, a: tuple[str, ...], b: tuple[str, ...], s: int) -> dict[Path, Fraction]:
    """a = u s, b = s v; returns tail(a)·v - u·tail(b)."""
    u = a[: len(a) - s]
    v = b[s:]
    source = q.arrow_map[a[0]].source
    target = q.arrow_map[b[-1]].target
    terms: dict[Path, Fraction] = {}
    for r, c in rw.rules[a].items():
        p = Path(source, target, r.arrows + v)
        terms[p] = terms.get(p, 0) + c
    for r, c in rw.rules[b].items():
        p = Path(source, target, u + r.arrows)
        terms[p] = terms.get(p, 0) - c
    return {p: c for p, c in terms.items() if c}


def _interreduce(rw: _Rewriter) -> None:
    changed = True
    while changed:
        changed = False
        for w in list(rw.rules):
            tail = rw.rules[w]
            reduced = rw.reduce(tail)
            if reduced != tail:
                rw.rules[w] = reduced
                changed = True


class _Automaton:
    """Normal-word automaton: state = (vertex, longest suffix that is a proper prefix of a lead)."""

    def __init__(self, q: Quiver, leads: Iterable[tuple[str, ...]], killed: frozenset[str]):
        self.q = q
        self.leads = set(leads)
        self.prefixes = {w[:k] for w in self.leads for k in range(len(w))}
        self.killed = killed

    def start_states(self) -> list[tuple[str, tuple[str, ...]]]:
        return [(v, ()) for v in self.q.vertices if v not in self.killed]

    def step(self, state, arrow) -> tuple[str, tuple[str, ...]] | None:
        v, suffix = state
        if arrow.target in self.killed:
            return None
        s = suffix + (arrow.id,)
        for k in range(len(s), 0, -1):
            if s[len(s) - k:] in self.leads:
                return None
        for k in range(len(s), -1, -1):
            t = s[len(s) - k:]
            if t in self.prefixes:
                return arrow.target, t
        return arrow.target, ()

    def successors(self, state):
        for a in self.q.arrows_from(state[0]):
            nxt = self.step(state, a)
            if nxt is not None:
                yield a, nxt

    def has_cycle(self) -> bool:
        color: dict = {}
        for s0 in self.start_states():
            if s0 in color:
                continue
            stack = [(s0, iter(list(self.successors(s0))))]
            color[s0] = 1
            while stack:
                state, it = stack[-1]
                advanced = False
                for _, nxt in it:
                    mark = color.get(nxt, 0)
                    if mark == 1:
                        return True
                    if mark == 0:
                        color[nxt] = 1
                        stack.append((nxt, iter(list(self.successors(nxt)))))
                        advanced = True
                        break
                if not advanced:
                    color[state] = 2
                    stack.pop()
        return False

    def counts_by_length(self, upto: int) -> list[int]:
        layer: dict = {s: 1 for s in self.start_states()}
        out = []
        for _ in range(upto + 1):
            out.append(sum(layer.values()))
            nxt: dict = {}
            for state, n in layer.items():
                for _, s2 in self.successors(state):
                    nxt[s2] = nxt.get(s2, 0) + n
            layer = nxt
        return out

    def words(self) -> list[Path]:
        out = []
        stack = [(Path(v, v, ()), state) for v, state in ((s[0], s) for s in self.start_states())]
        while stack:
            p, state = stack.pop()
            out.append(p)
            for a, nxt in self.successors(state):
                stack.append((Path(p.source, a.target, p.arrows + (a.id,)), nxt))
        return sorted(out, key=lambda t: t.key)


def _certify(q, gens, basis, killed, closed, d_max) -> QuotientPresentation:
    leads = [g.leading()[0].arrows for g in basis if g.leading()[0].arrows]
    auto = _Automaton(q, leads, killed)
    max_lead = max((len(w) for w in leads), default=0)
    counts = auto.counts_by_length(d_max)
    certified = any(n == 0 and d + max_lead <= d_max for d, n in enumerate(counts))
    if certified or closed:
        if not certified and auto.has_cycle():
            verdict = Verdict(kind="Infinite", d_max=d_max)
            return QuotientPresentation(q, gens, basis, d_max, killed, closed, True, verdict, None)
        words = tuple(auto.words())
        verdict = Verdict(kind="Finite", dim=len(words), d_max=d_max)
        return QuotientPresentation(q, gens, basis, d_max, killed, closed, True, verdict, words)
    LOGGER.info("quotient is inconclusive at d_max=%d", d_max)
    return QuotientPresentation(q, gens, basis, d_max, killed, closed, False, Verdict(kind="Inconclusive", d_max=d_max), None)


def normal_form(p: QuotientPresentation, f: PathVector) -> PathVector:
    """Reduce f modulo the Groebner basis of p."""
    return PathVector(f.quiver, p.rewriter.reduce(f.terms))


def _rewriter_for(p: QuotientPresentation) -> _Rewriter:
    rw = _Rewriter(p.quiver)
    rw.killed = set(p.killed)
    for g in p.groebner:
        lead, _ = g.leading()
        if lead.arrows:
            rw.add(lead.arrows, {r: -c for r, c in g.terms.items() if r != lead})
    return rw


def quotient_dims(p: QuotientPresentation) -> tuple[Verdict, dict[tuple[str, str], int]]:
    """Verdict plus dim e_i A e_j per vertex pair (empty unless Finite)."""
    dims: dict[tuple[str, str], int] = {}
    if p.verdict.kind == "Finite":
        dims = {(i, j): 0 for i in p.quiver.vertices for j in p.quiver.vertices}
        for w in p.normal_words or ():
            dims[(w.source, w.target)] += 1
    return p.verdict, dims


def preprojective_relations(q: Quiver) -> list[PathVector]:
    """Vertex components e_i c e_i of c = sum_a (a* a + a a*) on the double quiver."""
    if q.is_graded:
        raise QuiverFormatError("preprojective relations need an ungraded quiver")
    dq = double_quiver(q)
    c = PathVector.zero(dq)
    for a in q.arrows:
        c = c + PathVector.of(dq, [a.id + STAR, a.id]) + PathVector.of(dq, [a.id, a.id + STAR])
    parts = c.components()
    return [parts[(v, v)] for v in q.vertices if (v, v) in parts]
