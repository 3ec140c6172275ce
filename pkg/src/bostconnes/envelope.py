"""Membership in enveloping semigroups: the symplectic similitude monoid MSp_2g and M_2."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

Matrix = List[List[Fraction]]


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    """Rational matrix from nested sequences of ints, Fractions or strings like ``"3/2"``."""
    m = [[Fraction(x) for x in row] for row in rows]
    if not m or any(len(row) != len(m) for row in m):
        raise ValueError("matrix must be square and nonempty")
    return m


def matmul(a: Matrix, b: Matrix) -> Matrix:
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0))
             for j in range(len(b[0]))] for i in range(len(a))]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class SymplecticSpace:
    """Q^2g with the form ``J = [[0, I], [-I, 0]]``."""

    genus: int

    def __post_init__(self):
        if self.genus < 1:
            raise ValueError(f"genus must be positive, got {self.genus}")

    @property
    def dimension(self) -> int:
        return 2 * self.genus

    @property
    def form(self) -> Matrix:
        g = self.genus
        j = [[Fraction(0)] * (2 * g) for _ in range(2 * g)]
        for i in range(g):
            j[i][g + i] = Fraction(1)
            j[g + i][i] = Fraction(-1)
        return j

    def pairing(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
        """``psi(x, y) = x^T J y``."""
        g = self.genus
        return sum((x[i] * y[g + i] - x[g + i] * y[i] for i in range(g)), Fraction(0))


@dataclass(frozen=True)
class MembershipVerdict:
    member: bool
    multiplier: Optional[Fraction] = None

    def to_json(self) -> dict:
        mu = None if self.multiplier is None else str(self.multiplier)
        return {"member": self.member, "multiplier": mu}


def msp_membership(space: SymplecticSpace, m: Sequence[Sequence]) -> MembershipVerdict:
    """Member iff ``m^T J m = mu J`` for a scalar ``mu`` (``mu = 0`` allowed)."""
    m = as_matrix(m)
    if len(m) != space.dimension:
        raise ValueError(f"matrix has size {len(m)}, the symplectic space has dimension "
                         f"{space.dimension}")
    j = space.form
    lhs = matmul(matmul(transpose(m), j), m)
    mu = lhs[0][space.genus]
    for r in range(space.dimension):
        for c in range(space.dimension):
            if lhs[r][c] != mu * j[r][c]:
                return MembershipVerdict(False)
    return MembershipVerdict(True, mu)


def msp_membership_by_pairs(space: SymplecticSpace, m: Sequence[Sequence]) -> MembershipVerdict:
    """The defining condition ``psi(m x, m y) = mu psi(x, y)`` checked on all basis pairs."""
    m = as_matrix(m)
    n = space.dimension
    cols = [[m[r][c] for r in range(n)] for c in range(n)]
    basis = identity(n)
    # mu is forced by the pair (e_1, e_{g+1}), where psi = 1
    mu = space.pairing(cols[0], cols[space.genus])
    for i in range(n):
        for k in range(n):
            if space.pairing(cols[i], cols[k]) != mu * space.pairing(basis[i], basis[k]):
                return MembershipVerdict(False)
    return MembershipVerdict(True, mu)


def determinant(m: Matrix) -> Fraction:
    """Cofactor expansion along the first row (small sizes only)."""
    n = len(m)
    if n == 1:
        return m[0][0]
    total = Fraction(0)
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * m[0][j] * determinant(minor)
    return total


def wedge2_scalar(m: Matrix) -> Fraction:
    """Scalar by which ``m`` acts on the line ``wedge^2 Q^2``: ``m e1 ^ m e2 = s e1 ^ e2``."""
    (a, b), (c, d) = m
    # m e1 = (a, c), m e2 = (b, d); (a e1 + c e2) ^ (b e1 + d e2) = (ad - cb) e1 ^ e2
    u, v = (a, c), (b, d)
    return u[0] * v[1] - u[1] * v[0]


def gl2_envelope_check(m: Sequence[Sequence]) -> MembershipVerdict:
    """Every 2x2 matrix stabilizes the line wedge^2 V; the multiplier is its determinant."""
    m = as_matrix(m)
    if len(m) != 2:
        raise ValueError(f"expected a 2x2 matrix, got size {len(m)}")
    mu = wedge2_scalar(m)
    if mu != determinant(m):
        raise ArithmeticError("wedge-square action disagrees with the cofactor determinant")
    return MembershipVerdict(True, mu)


def inverse(m: Matrix) -> Matrix:
    """Gauss-Jordan inverse over Q."""
    n = len(m)
    aug = [list(row) + identity(n)[i] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def matrix_to_strings(m: Matrix) -> List[List[str]]:
    return [[str(x) for x in row] for row in m]
