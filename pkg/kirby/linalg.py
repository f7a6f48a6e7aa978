"""
Exact Linear Algebra
Rational solving, rank, signature and Schur complements over Fraction entries.
No floating point is used anywhere in this module.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from kirby.errors import DimensionMismatch, NotSolvable, SingularBlock

Matrix = List[List[Fraction]]
Vector = List[Fraction]


# --- Conversions ---
def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(v) for v in row] for row in rows]


def as_vector(values: Sequence) -> Vector:
    return [Fraction(v) for v in values]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> Matrix:
    return [[Fraction(0)] * cols for _ in range(rows)]


def is_symmetric(m: Sequence[Sequence]) -> bool:
    n = len(m)
    if any(len(row) != n for row in m):
        return False
    return all(m[i][j] == m[j][i] for i in range(n) for j in range(i + 1, n))


# --- Basic products ---
def transpose(m: Sequence[Sequence]) -> Matrix:
    if not m:
        return []
    return [[Fraction(m[i][j]) for i in range(len(m))] for j in range(len(m[0]))]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    if not a:
        return []
    inner = len(b)
    if any(len(row) != inner for row in a):
        raise DimensionMismatch(f"cannot multiply {len(a)}x{len(a[0])} by {inner}x?")
    cols = len(b[0]) if b else 0
    return [[sum((Fraction(a[i][k]) * b[k][j] for k in range(inner)), Fraction(0))
             for j in range(cols)] for i in range(len(a))]


def mat_vec(m: Sequence[Sequence], v: Sequence) -> Vector:
    if any(len(row) != len(v) for row in m):
        raise DimensionMismatch(f"matrix width does not match vector length {len(v)}")
    return [sum((Fraction(row[k]) * v[k] for k in range(len(v))), Fraction(0)) for row in m]


def dot(u: Sequence, v: Sequence) -> Fraction:
    if len(u) != len(v):
        raise DimensionMismatch(f"vector lengths {len(u)} and {len(v)} differ")
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def congruence(q: Sequence[Sequence], p: Sequence[Sequence]) -> Matrix:
    """P^T Q P."""
    return mat_mul(mat_mul(transpose(p), q), p)


def submatrix(m: Sequence[Sequence], rows: Sequence[int], cols: Sequence[int]) -> Matrix:
    return [[Fraction(m[i][j]) for j in cols] for i in rows]


# --- Elimination ---
def _row_reduce(m: Matrix) -> Tuple[Matrix, List[int], Fraction]:
    """
    Reduced row echelon form, pivot columns and the product of the pivots
    divided out (sign-adjusted for row swaps). rank, determinant, inverse and
    solve all go through this one elimination.
    """
    m = [row[:] for row in m]
    pivots: List[int] = []
    scale = Fraction(1)
    if not m:
        return m, pivots, scale
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        if pivot != r:
            m[r], m[pivot] = m[pivot], m[r]
            scale = -scale
        scale *= m[r][c]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                factor = m[i][c]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots, scale


def rank(m: Sequence[Sequence]) -> int:
    if not m or not m[0]:
        return 0
    return len(_row_reduce(as_matrix(m))[1])


def determinant(m: Sequence[Sequence]) -> Fraction:
    a = as_matrix(m)
    n = len(a)
    if any(len(row) != n for row in a):
        raise DimensionMismatch("determinant needs a square matrix")
    _, pivots, scale = _row_reduce(a)
    return scale if len(pivots) == n else Fraction(0)


def inverse(m: Sequence[Sequence]) -> Matrix:
    n = len(m)
    if any(len(row) != n for row in m):
        raise DimensionMismatch("inverse needs a square matrix")
    if n == 0:
        return []
    augmented = [list(row) + ident for row, ident in zip(as_matrix(m), identity(n))]
    reduced, pivots, _ = _row_reduce(augmented)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise SingularBlock("matrix is singular")
    return [row[n:] for row in reduced]


def kernel_basis(m: Sequence[Sequence]) -> List[Vector]:
    """Basis of the right null space."""
    a = as_matrix(m)
    if not a:
        return []
    cols = len(a[0])
    reduced, pivots, _ = _row_reduce(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


# --- Solving ---
@dataclass(frozen=True)
class SolveResult:
    solvable: bool
    x: Optional[Tuple[Fraction, ...]] = field(default=None)


def solve(q: Sequence[Sequence], r: Sequence) -> SolveResult:
    """Solve Q x = r exactly; free variables are set to zero in the witness."""
    n = len(q)
    if len(r) != n or any(len(row) != n for row in q):
        raise DimensionMismatch(f"Q is {n}x{len(q[0]) if q else 0} but r has length {len(r)}")
    if n == 0:
        return SolveResult(True, ())
    augmented = [list(row) + [Fraction(v)] for row, v in zip(as_matrix(q), r)]
    reduced, pivots, _ = _row_reduce(augmented)
    if n in pivots:
        return SolveResult(False)
    x = [Fraction(0)] * n
    for row, p in zip(reduced, pivots):
        x[p] = row[n]
    return SolveResult(True, tuple(x))


def quadratic_value(q: Sequence[Sequence], r: Sequence) -> Fraction:
    """x^T r for any rational solution of Q x = r."""
    result = solve(q, r)
    if not result.solvable:
        raise NotSolvable("Q x = r has no rational solution")
    return dot(result.x, r)


# --- Signature ---
def signature(q: Sequence[Sequence]) -> int:
    """
    Signature by symmetric congruence diagonalization.
    A pivot is taken on a nonzero diagonal entry when one exists; otherwise a
    2x2 hyperbolic block (zero diagonal, nonzero off-diagonal) is split off and
    contributes 0.
    """
    if not is_symmetric(q):
        raise DimensionMismatch("signature needs a symmetric matrix")
    m = as_matrix(q)
    sig = 0
    while m:
        n = len(m)
        p = next((i for i in range(n) if m[i][i] != 0), None)
        if p is not None:
            d = m[p][p]
            sig += 1 if d > 0 else -1
            rest = [i for i in range(n) if i != p]
            m = [[m[i][j] - m[i][p] * m[p][j] / d for j in rest] for i in rest]
            continue
        pair = next(((i, j) for i in range(n) for j in range(i + 1, n) if m[i][j] != 0), None)
        if pair is None:
            break
        i, j = pair
        b = m[i][j]
        rest = [k for k in range(n) if k not in (i, j)]
        m = [[m[k][l] - (m[k][i] * m[j][l] + m[k][j] * m[i][l]) / b for l in rest] for k in rest]
    return sig


def schur_complement(q: Sequence[Sequence], k: int) -> Matrix:
    """C - B A^{-1} B^T for Q = (A B^T; B C) with A the leading k x k block."""
    n = len(q)
    if not 0 <= k <= n:
        raise DimensionMismatch(f"block size {k} outside 0..{n}")
    top, bottom = list(range(k)), list(range(k, n))
    a = submatrix(q, top, top)
    b = submatrix(q, bottom, top)
    c = submatrix(q, bottom, bottom)
    if k == 0:
        return c
    try:
        a_inv = inverse(a)
    except SingularBlock:
        raise SingularBlock(f"leading {k}x{k} block is singular")
    correction = mat_mul(mat_mul(b, a_inv), transpose(b)) if bottom else []
    return [[c[i][j] - correction[i][j] for j in range(len(bottom))] for i in range(len(bottom))]
