"""
Coxeter groups of quiver graphs in the geometric representation.

m_ij is 2, 3 or infinity for 0, 1, or >= 2 arrows between i and j. The
bilinear form takes the exact values 1, 0, -1/2, -1 so every root has
rational coordinates.
"""

import logging
from fractions import Fraction
from typing import Sequence

from pydantic import BaseModel, ConfigDict, Field

from . import linalg
from .errors import QuiverFormatError
from .quiver import Quiver

LOGGER = logging.getLogger(__name__)

INFINITY = 0  # m_ij = 0 encodes an infinite braid exponent

_FORM = {2: Fraction(0), 3: Fraction(-1, 2), INFINITY: Fraction(-1)}


class CoxeterSystem(BaseModel):
    """Generators and braid exponents m_ij in {2, 3, infinity}."""

    model_config = ConfigDict(frozen=True)

    generators: tuple[str, ...] = Field(description="Generator ids, in order")
    exponents: tuple[tuple[int, ...], ...] = Field(
        description="m_ij; diagonal entries are 1, infinity is stored as 0"
    )

    @property
    def rank(self) -> int:
        return len(self.generators)

    def exponent(self, i: str, j: str) -> int:
        idx = {g: k for k, g in enumerate(self.generators)}
        return self.exponents[idx[i]][idx[j]]

    def form(self) -> list[list[Fraction]]:
        n = self.rank
        return [
            [Fraction(1) if i == j else _FORM[self.exponents[i][j]] for j in range(n)]
            for i in range(n)
        ]


def system_from_quiver(q: Quiver) -> CoxeterSystem:
    n = len(q.vertices)
    rows = []
    for i, u in enumerate(q.vertices):
        row = []
        for j, v in enumerate(q.vertices):
            if i == j:
                row.append(1)
                continue
            edges = q.edge_count(u, v)
            row.append(2 if edges == 0 else 3 if edges == 1 else INFINITY)
        rows.append(tuple(row))
    LOGGER.debug("Coxeter system of rank %d", n)
    return CoxeterSystem(generators=q.vertices, exponents=tuple(rows))


# =============================================================================
# WORDS
# =============================================================================


def parse_word(s: CoxeterSystem, text: str) -> list[str]:
    """Letters are single characters when every generator id is, else comma-separated."""
    text = text.strip()
    if not text:
        return []
    if all(len(g) == 1 for g in s.generators) and "," not in text:
        letters = list(text)
    else:
        letters = [t.strip() for t in text.split(",")]
    for k, letter in enumerate(letters):
        if letter not in s.generators:
            raise QuiverFormatError(f"letter '{letter}' is not a generator", f"word[{k}]")
    return letters


def format_word(s: CoxeterSystem, word: Sequence[str]) -> str:
    if all(len(g) == 1 for g in s.generators):
        return "".join(word)
    return ",".join(word)


def _reflections(s: CoxeterSystem):
    B = s.form()
    n = s.rank
    out = {}
    for i, g in enumerate(s.generators):
        rows = [[Fraction(int(r == c)) for c in range(n)] for r in range(n)]
        for c in range(n):
            rows[i][c] -= 2 * B[i][c]
        out[g] = linalg.matrix(rows, n, n)
    return out


def _check(s: CoxeterSystem, word: Sequence[str]) -> None:
    for k, letter in enumerate(word):
        if letter not in s.generators:
            raise QuiverFormatError(f"letter '{letter}' is not a generator", f"word[{k}]")


def element_matrix(s: CoxeterSystem, word: Sequence[str]):
    """Matrix of s_{i1} ... s_{ik} acting on root coordinates."""
    _check(s, word)
    refl = _reflections(s)
    m = linalg.identity(s.rank)
    for letter in word:
        m = linalg.matmul(m, refl[letter])
    return m


def _is_positive(v: Sequence[Fraction]) -> bool:
    return all(x >= 0 for x in v) and any(v)


def is_reduced(s: CoxeterSystem, word: Sequence[str]) -> bool:
    """Every prefix sends the simple root of the next letter to a positive root."""
    _check(s, word)
    refl = _reflections(s)
    index = {g: k for k, g in enumerate(s.generators)}
    prefix = linalg.identity(s.rank)
    for letter in word:
        alpha = [Fraction(int(k == index[letter])) for k in range(s.rank)]
        if not _is_positive(linalg.apply(prefix, alpha)):
            return False
        prefix = linalg.matmul(prefix, refl[letter])
    return True


def length(s: CoxeterSystem, word: Sequence[str]) -> int:
    """Length of the element: strip right descents until the identity is reached."""
    refl = _reflections(s)
    m = element_matrix(s, word)
    identity = linalg.entries(linalg.identity(s.rank))
    n = 0
    while linalg.entries(m) != identity:
        for k, g in enumerate(s.generators):
            alpha = [Fraction(int(r == k)) for r in range(s.rank)]
            if not _is_positive(linalg.apply(m, alpha)):
                m = linalg.matmul(m, refl[g])
                n += 1
                break
        else:
            raise AssertionError("non-identity element without a descent")
    return n


def equal_elements(s: CoxeterSystem, w1: Sequence[str], w2: Sequence[str]) -> bool:
    return linalg.entries(element_matrix(s, w1)) == linalg.entries(element_matrix(s, w2))
