"""
Exact rational linear algebra.

Thin adapter over sympy's DomainMatrix on QQ. Scalars handed in and out are
fractions.Fraction; matrices stay DomainMatrix. Empty shapes are handled here
so callers never special-case zero-dimensional spaces.
"""

from fractions import Fraction
from typing import Iterable, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

Vector = list[Fraction]


def qq(x) -> object:
    """Convert an int/Fraction to an element of QQ."""
    f = Fraction(x)
    return QQ(f.numerator, f.denominator)


def frac(e) -> Fraction:
    """Convert an element of QQ back to a Fraction."""
    return Fraction(int(e.numerator), int(e.denominator))


def matrix(rows: Sequence[Sequence], nrows: int | None = None, ncols: int | None = None) -> DomainMatrix:
    """Build a dense DomainMatrix from nested rows of ints/Fractions."""
    m = len(rows) if nrows is None else nrows
    n = (len(rows[0]) if rows else 0) if ncols is None else ncols
    data = [[qq(x) for x in row] for row in rows]
    return DomainMatrix(data, (m, n), QQ)


def zeros(m: int, n: int) -> DomainMatrix:
    return DomainMatrix([[QQ.zero] * n for _ in range(m)], (m, n), QQ)


def identity(n: int) -> DomainMatrix:
    return DomainMatrix([[QQ.one if i == j else QQ.zero for j in range(n)] for i in range(n)], (n, n), QQ)


def from_columns(columns: Sequence[Sequence], nrows: int) -> DomainMatrix:
    """Matrix whose j-th column is columns[j]."""
    rows = [[columns[j][i] for j in range(len(columns))] for i in range(nrows)]
    return matrix(rows, nrows, len(columns))


def entries(mat: DomainMatrix) -> list[list[Fraction]]:
    m, n = mat.shape
    if m == 0:
        return []
    if n == 0:
        return [[] for _ in range(m)]
    return [[frac(e) for e in row] for row in mat.to_list()]


def columns(mat: DomainMatrix) -> list[Vector]:
    rows = entries(mat)
    m, n = mat.shape
    return [[rows[i][j] for i in range(m)] for j in range(n)]


def matmul(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    m, k = a.shape
    k2, n = b.shape
    if k != k2:
        raise ValueError(f"shape mismatch {a.shape} x {b.shape}")
    if 0 in (m, k, n):
        return zeros(m, n)
    return a * b


def add_scaled(acc: DomainMatrix, mat: DomainMatrix, c) -> DomainMatrix:
    """acc + c * mat."""
    if acc.shape != mat.shape:
        raise ValueError(f"shape mismatch {acc.shape} + {mat.shape}")
    if 0 in acc.shape or not c:
        return acc
    return acc + mat * qq(c)


def apply(mat: DomainMatrix, vec: Sequence) -> Vector:
    """Matrix times a column vector given as a sequence."""
    m, n = mat.shape
    if len(vec) != n:
        raise ValueError(f"vector of length {len(vec)} for matrix {mat.shape}")
    if m == 0:
        return []
    if n == 0:
        return [Fraction(0)] * m
    return [row[0] for row in entries(mat * matrix([[x] for x in vec], n, 1))]


def rref(mat: DomainMatrix) -> tuple[list[list[Fraction]], tuple[int, ...]]:
    """Reduced row echelon form as Fraction rows (zero rows dropped) and pivots."""
    m, n = mat.shape
    if m == 0 or n == 0:
        return [], ()
    reduced, pivots = mat.rref()
    rows = entries(reduced)[: len(pivots)]
    return rows, tuple(pivots)


def rank(mat: DomainMatrix) -> int:
    return len(rref(mat)[1])


def rank_of_vectors(vectors: Sequence[Sequence], length: int) -> int:
    if not vectors:
        return 0
    return rank(matrix(vectors, len(vectors), length))


def nullspace(mat: DomainMatrix) -> list[Vector]:
    """Basis of {x : mat x = 0}."""
    m, n = mat.shape
    if n == 0:
        return []
    if m == 0:
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    basis = mat.nullspace()
    return entries(basis) if basis.shape[0] else []


def solve(mat: DomainMatrix, rhs: Sequence) -> Vector | None:
    """One solution x of mat x = rhs, or None when the system is inconsistent."""
    m, n = mat.shape
    if len(rhs) != m:
        raise ValueError("right-hand side has the wrong length")
    if m == 0:
        return [Fraction(0)] * n
    augmented = mat.hstack(matrix([[x] for x in rhs], m, 1)) if n else matrix([[x] for x in rhs], m, 1)
    rows, pivots = rref(augmented)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(rows, pivots):
        x[p] = row[n]
    return x


def solve_columns(mat: DomainMatrix, targets: Iterable[Sequence]) -> list[Vector]:
    """Solve mat x = t for each target; raises ValueError if one is not in the image."""
    out = []
    for t in targets:
        x = solve(mat, t)
        if x is None:
            raise ValueError("target vector is not in the image")
        out.append(x)
    return out


class QuotientSpace:
    """
    The quotient k^n / span(spanning).

    The basis of the quotient is the set of standard vectors at the non-pivot
    columns of the rref of the spanning set.
    """

    def __init__(self, ambient: int, spanning: Sequence[Sequence] = ()):
        self.ambient = ambient
        self.rows, self.pivots = rref(matrix(spanning, len(spanning), ambient)) if spanning else ([], ())
        pivot_set = set(self.pivots)
        self.free = [c for c in range(ambient) if c not in pivot_set]
        self._free_index = {c: k for k, c in enumerate(self.free)}

    @property
    def dim(self) -> int:
        return len(self.free)

    @property
    def sub_dim(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: Sequence) -> Vector:
        """Coordinates of the class of vec in the quotient basis."""
        v = [Fraction(x) for x in vec]
        for row, p in zip(self.rows, self.pivots):
            c = v[p]
            if c:
                for j in range(p, self.ambient):
                    if row[j]:
                        v[j] -= c * row[j]
        return [v[c] for c in self.free]

    def contains(self, vec: Sequence) -> bool:
        return not any(self.reduce(vec))

    def lift(self, coords: Sequence) -> Vector:
        v = [Fraction(0)] * self.ambient
        for c, x in zip(self.free, coords):
            v[c] = Fraction(x)
        return v

    def basis_index(self, column: int) -> int | None:
        return self._free_index.get(column)
