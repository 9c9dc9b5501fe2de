"""Exact integer and rational matrix routines.

Matrices are tuples of tuples (rows).  Everything is arbitrary
precision: ints for lattice maps, fractions for pairings.  No floating
point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, isqrt


def mat(rows) -> tuple:
    return tuple(tuple(r) for r in rows)


def shape(m) -> tuple:
    return (len(m), len(m[0]) if m else 0)


def identity(n: int) -> tuple:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(n: int, m: int) -> tuple:
    return tuple(tuple(0 for _ in range(m)) for _ in range(n))


def transpose(m) -> tuple:
    rows, cols = shape(m)
    return tuple(tuple(m[i][j] for i in range(rows)) for j in range(cols))


def matmul(a, b) -> tuple:
    ra, ca = shape(a)
    rb, cb = shape(b)
    if ca != rb:
        raise ValueError(f"matmul shape mismatch: {shape(a)} x {shape(b)}")
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a, v) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def mat_add(a, b) -> tuple:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(c, a) -> tuple:
    return tuple(tuple(c * x for x in row) for row in a)


def mat_equal(a, b) -> bool:
    ra, ca = shape(a)
    if (ra, ca) != shape(b):
        return False
    return all(a[i][j] == b[i][j] for i in range(ra) for j in range(ca))


def to_fractions(m) -> tuple:
    return tuple(tuple(Fraction(x) for x in row) for row in m)


def is_integral(m) -> bool:
    return all(Fraction(x).denominator == 1 for row in m for x in row)


def to_int(m) -> tuple:
    if not is_integral(m):
        raise ValueError("matrix has non-integer entries")
    return tuple(tuple(int(x) for x in row) for row in m)


def det(m):
    """Exact determinant by fraction Gaussian elimination."""
    n, c = shape(m)
    if n != c:
        raise ValueError("determinant of a non-square matrix")
    a = [[Fraction(x) for x in row] for row in m]
    result = Fraction(1)
    for i in range(n):
        pivot = next((r for r in range(i, n) if a[r][i] != 0), None)
        if pivot is None:
            return Fraction(0) * result
        if pivot != i:
            a[i], a[pivot] = a[pivot], a[i]
            result = -result
        result *= a[i][i]
        inv = 1 / a[i][i]
        for r in range(i + 1, n):
            if a[r][i]:
                factor = a[r][i] * inv
                a[r] = [x - factor * y for x, y in zip(a[r], a[i])]
    return result


def inverse(m) -> tuple:
    """Exact inverse over the rationals."""
    n, c = shape(m)
    if n != c:
        raise ValueError("inverse of a non-square matrix")
    a = [[Fraction(x) for x in row] + [Fraction(1 if j == i else 0) for j in range(n)]
         for i, row in enumerate(m)]
    for i in range(n):
        pivot = next((r for r in range(i, n) if a[r][i] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        a[i], a[pivot] = a[pivot], a[i]
        inv = 1 / a[i][i]
        a[i] = [x * inv for x in a[i]]
        for r in range(n):
            if r != i and a[r][i]:
                factor = a[r][i]
                a[r] = [x - factor * y for x, y in zip(a[r], a[i])]
    return tuple(tuple(row[n:]) for row in a)


def rank(m) -> int:
    rows, cols = shape(m)
    if rows == 0 or cols == 0:
        return 0
    a = [[Fraction(x) for x in row] for row in m]
    r = 0
    for j in range(cols):
        pivot = next((i for i in range(r, rows) if a[i][j] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = 1 / a[r][j]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][j]:
                factor = a[i][j]
                a[i] = [x - factor * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == rows:
            break
    return r


def is_unimodular(m) -> bool:
    rows, cols = shape(m)
    return rows == cols and is_integral(m) and abs(det(m)) == 1


@dataclass(frozen=True)
class SNF:
    """U @ M @ V = S with S diagonal, d1 | d2 | ... >= 0, U, V unimodular."""

    S: tuple
    U: tuple
    V: tuple

    def diagonal(self) -> tuple:
        n, m = shape(self.S)
        return tuple(self.S[i][i] for i in range(min(n, m)))

    def invariant_factors(self) -> tuple:
        return tuple(d for d in self.diagonal() if d != 0)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors())


def _exgcd(a, b):
    """(g, x, y) with x*a + y*b = g = gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def snf(matrix) -> SNF:
    """Smith normal form with transformation matrices, re-verified exactly.

    Pivoting clears rows and columns by 2x2 unimodular (extended gcd)
    blocks, which keeps the transform entries near the matrix scale.
    """
    a = [[int(x) for x in row] for row in matrix]
    n, m = len(a), len(a[0]) if a else 0
    u = [list(row) for row in identity(n)]
    v = [list(row) for row in identity(m)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def row_gcd_step(t, i):
        """Unimodular rows (t, i) update making a[t][t] = gcd, a[i][t] = 0."""
        p, q = a[t][t], a[i][t]
        if q == 0:
            return
        if p and q % p == 0:
            c = -(q // p)
            a[i] = [x + c * y for x, y in zip(a[i], a[t])]
            u[i] = [x + c * y for x, y in zip(u[i], u[t])]
            return
        g, x, y = _exgcd(p, q)
        pg, qg = p // g, q // g
        a[t], a[i] = [x * rt + y * ri for rt, ri in zip(a[t], a[i])], \
                     [-qg * rt + pg * ri for rt, ri in zip(a[t], a[i])]
        u[t], u[i] = [x * rt + y * ri for rt, ri in zip(u[t], u[i])], \
                     [-qg * rt + pg * ri for rt, ri in zip(u[t], u[i])]

    def col_gcd_step(t, j):
        p, q = a[t][t], a[t][j]
        if q == 0:
            return
        if p and q % p == 0:
            c = -(q // p)
            for row in a:
                row[j] += c * row[t]
            for row in v:
                row[j] += c * row[t]
            return
        g, x, y = _exgcd(p, q)
        pg, qg = p // g, q // g
        for row in a:
            row[t], row[j] = x * row[t] + y * row[j], -qg * row[t] + pg * row[j]
        for row in v:
            row[t], row[j] = x * row[t] + y * row[j], -qg * row[t] + pg * row[j]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(n, m):
        pivot = None
        best = None
        for i in range(t, n):
            for j in range(t, m):
                x = abs(a[i][j])
                if x and (best is None or x < best):
                    best, pivot = x, (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            for i in range(t + 1, n):
                row_gcd_step(t, i)
            for j in range(t + 1, m):
                col_gcd_step(t, j)
            if all(a[i][t] == 0 for i in range(t + 1, n)) \
                    and all(a[t][j] == 0 for j in range(t + 1, m)):
                break
        p = a[t][t]
        offender = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, m)
                         if a[i][j] % p), None)
        if offender is not None:
            a[t] = [x + y for x, y in zip(a[t], a[offender[0]])]
            u[t] = [x + y for x, y in zip(u[t], u[offender[0]])]
            continue
        if p < 0:
            negate_row(t)
        t += 1
    result = SNF(mat(a), mat(u), mat(v))
    _check_snf(matrix, result)
    return result


def _check_snf(matrix, res: SNF):
    if not mat_equal(matmul(matmul(res.U, mat(matrix)), res.V), res.S):
        raise AssertionError("snf: U @ M @ V != S")
    if abs(det(res.U)) != 1 or abs(det(res.V)) != 1:
        raise AssertionError("snf: transforms are not unimodular")
    diag = res.diagonal()
    for d1, d2 in zip(diag, diag[1:]):
        if d1 < 0 or (d2 and d1 and d2 % d1):
            raise AssertionError("snf: diagonal is not a divisibility chain")
        if d1 == 0 and d2 != 0:
            raise AssertionError("snf: zero before nonzero on the diagonal")


def kernel_basis(matrix) -> tuple:
    """Columns form a saturated basis of the integer kernel {x : Mx = 0}."""
    n, m = shape(matrix)
    if m == 0:
        return tuple()
    res = snf(matrix)
    r = res.rank
    cols = [tuple(res.V[i][j] for i in range(m)) for j in range(r, m)]
    return _columns_to_matrix(cols, m)


def _columns_to_matrix(cols, nrows) -> tuple:
    return tuple(tuple(col[i] for col in cols) for i in range(nrows))


@dataclass(frozen=True)
class Cokernel:
    """Torsion-free cokernel data: projection (t x n) and representatives (n x t).

    projection @ representatives = I, and projection @ M = 0.
    """

    rank: int
    projection: tuple
    representatives: tuple


def cokernel_tf(matrix) -> Cokernel:
    n, m = shape(matrix)
    res = snf(matrix)
    r = res.rank
    proj = tuple(res.U[i] for i in range(r, n))
    uinv = to_int(inverse(res.U)) if n else tuple()
    reps = tuple(tuple(uinv[i][j] for j in range(r, n)) for i in range(n))
    cok = Cokernel(n - r, mat(proj) if proj else zeros(0, n), reps if n else zeros(0, 0))
    if cok.rank:
        if not mat_equal(matmul(cok.projection, cok.representatives), identity(cok.rank)):
            raise AssertionError("cokernel: projection @ representatives != I")
        if m and any(x for row in matmul(cok.projection, mat(matrix)) for x in row):
            raise AssertionError("cokernel: projection does not kill the image")
    return cok


def lcm_denominator(*matrices) -> int:
    """Single scalar clearing all denominators of all given matrices."""
    scale = 1
    for m in matrices:
        for row in m:
            for x in row:
                d = Fraction(x).denominator
                scale = scale * d // _gcd(scale, d)
    return scale


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def clear_denominators(*matrices):
    """(scalar, scaled integer matrices); the same scalar for every matrix."""
    scale = lcm_denominator(*matrices)
    return scale, tuple(to_int(mat_scale(scale, to_fractions(m))) for m in matrices)


def _floor_sqrt(x: Fraction) -> int:
    """Largest integer b with b*b <= x, for x >= 0."""
    if x < 0:
        raise ValueError("negative radicand")
    return isqrt(x.numerator * x.denominator) // x.denominator


def _cholesky(q) -> tuple:
    """Q = L^T D L with L unit upper triangular; raises on non-positive-definite."""
    n, _ = shape(q)
    a = [[Fraction(x) for x in row] for row in q]
    d = [Fraction(0)] * n
    lmat = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = a[i][i]
        if d[i] <= 0:
            raise ValueError("form is not positive definite")
        lmat[i][i] = Fraction(1)
        for j in range(i + 1, n):
            lmat[i][j] = a[i][j] / d[i]
        for j in range(i + 1, n):
            for k in range(j, n):
                a[j][k] -= d[i] * lmat[i][j] * lmat[i][k]
                a[k][j] = a[j][k]
    return d, lmat


def vectors_with_norm(q, target, _cache={}):
    """All integer vectors x with x^T Q x == target, Q positive definite.

    Depth-first with exact rational bounds from the Cholesky splitting
    sum_i d_i (x_i + sum_{j>i} L_ij x_j)^2.
    """
    key = (mat(q), target)
    if key in _cache:
        return _cache[key]
    n, _ = shape(q)
    if n == 0:
        return (tuple(),) if target == 0 else tuple()
    d, lmat = _cholesky(q)
    out = []
    x = [0] * n

    def descend(i, remaining):
        s = sum(lmat[i][j] * x[j] for j in range(i + 1, n))
        bound = _floor_sqrt(remaining / d[i]) + 1
        lo = ceil(-s - bound)
        hi = floor(-s + bound)
        for xi in range(lo, hi + 1):
            used = d[i] * (xi + s) ** 2
            if used > remaining:
                continue
            x[i] = xi
            if i == 0:
                if used == remaining:
                    out.append(tuple(x))
            else:
                descend(i - 1, remaining - used)
        x[i] = 0

    descend(n - 1, Fraction(target))
    result = tuple(sorted(out))
    _cache[key] = result
    return result


def gram_isometries(q1, q2):
    """Unimodular B with B^T Q2 B = Q1, yielded exactly once each.

    Plesken--Souvignier-style column-by-column backtracking; the
    determinant is used as a fast rejector.
    """
    n, _ = shape(q1)
    n2, _ = shape(q2)
    if n != n2:
        raise ValueError("rank mismatch")
    q1 = mat(q1)
    q2 = mat(q2)
    for q in (q1, q2):
        if not mat_equal(q, transpose(q)):
            raise ValueError("forms must be symmetric")
        _cholesky(q)  # positive-definiteness check
    if n == 0:
        yield tuple()
        return
    if det(q1) != det(q2):
        return
    cols = [None] * n
    q2_cols = [None] * n  # cached Q2 @ b_k

    def place(j):
        if j == n:
            b = _columns_to_matrix(cols, n)
            if is_unimodular(b):
                if not mat_equal(matmul(transpose(b), matmul(q2, b)), q1):
                    raise AssertionError("isometry candidate failed the congruence re-check")
                yield b
            return
        for v in vectors_with_norm(q2, q1[j][j]):
            ok = True
            for k in range(j):
                if sum(a * b for a, b in zip(v, q2_cols[k])) != q1[j][k]:
                    ok = False
                    break
            if ok:
                cols[j] = v
                q2_cols[j] = matvec(q2, v)
                yield from place(j + 1)
        cols[j] = None

    yield from place(0)
