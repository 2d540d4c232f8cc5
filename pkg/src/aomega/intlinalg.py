"""Exact linear algebra over the integers on small dense matrices.

Matrices are lists of rows of Python ints.  Dimensions are passed
explicitly so zero-row / zero-column matrices are unambiguous.  The
complexes met by this package have ranks in the tens, so everything here
favours clarity over asymptotics; all arithmetic is exact.
"""

from __future__ import annotations

from math import gcd


def zeros(m: int, n: int) -> list[list[int]]:
    return [[0] * n for _ in range(m)]


def identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(A, B, m: int, k: int, n: int) -> list[list[int]]:
    """(m x k) @ (k x n)."""
    C = zeros(m, n)
    for i in range(m):
        Ai = A[i]
        Ci = C[i]
        for t in range(k):
            a = Ai[t]
            if a:
                Bt = B[t]
                for j in range(n):
                    Ci[j] += a * Bt[j]
    return C


def mat_vec(A, v, m: int, n: int) -> list[int]:
    return [sum(A[i][j] * v[j] for j in range(n)) for i in range(m)]


def transpose(A, m: int, n: int) -> list[list[int]]:
    return [[A[i][j] for i in range(m)] for j in range(n)]


def scale(A, c: int) -> list[list[int]]:
    return [[c * x for x in row] for row in A]


def is_zero(A) -> bool:
    return all(x == 0 for row in A for x in row)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """g, x, y with x*a + y*b == g >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def column_echelon(A, m: int, n: int):
    """Unimodular column reduction A @ U = H.

    Returns (H, U, rank).  H is in column echelon form: pivot columns
    0..rank-1, each pivot entry positive and the first nonzero entry of
    its row among the remaining columns; columns rank..n-1 are zero.
    """
    H = [row[:] for row in A]
    U = identity(n)
    col = 0
    for row in range(m):
        piv = None
        for j in range(col, n):
            if H[row][j]:
                piv = j
                break
        if piv is None:
            continue
        if piv != col:
            for r in range(m):
                H[r][col], H[r][piv] = H[r][piv], H[r][col]
            for r in range(n):
                U[r][col], U[r][piv] = U[r][piv], U[r][col]
        for j in range(col + 1, n):
            while H[row][j]:
                a, b = H[row][col], H[row][j]
                g, x, y = _xgcd(a, b)
                aa, bb = a // g, b // g
                for r in range(m):
                    hc, hj = H[r][col], H[r][j]
                    H[r][col] = x * hc + y * hj
                    H[r][j] = -bb * hc + aa * hj
                for r in range(n):
                    uc, uj = U[r][col], U[r][j]
                    U[r][col] = x * uc + y * uj
                    U[r][j] = -bb * uc + aa * uj
        if H[row][col] < 0:
            for r in range(m):
                H[r][col] = -H[r][col]
            for r in range(n):
                U[r][col] = -U[r][col]
        col += 1
        if col == n:
            break
    return H, U, col


def kernel_basis(A, m: int, n: int) -> list[list[int]]:
    """Basis of the saturated integer kernel {v : A v = 0}."""
    _, U, rank = column_echelon(A, m, n)
    return [[U[r][j] for r in range(n)] for j in range(rank, n)]


def solve_int(A, b, m: int, n: int) -> list[int] | None:
    """One integer solution of A x = b, or None."""
    H, U, rank = column_echelon(A, m, n)
    res = list(b)
    y = [0] * n
    for j in range(rank):
        row = next(r for r in range(m) if H[r][j])
        if res[row] % H[row][j]:
            return None
        c = res[row] // H[row][j]
        y[j] = c
        if c:
            for r in range(m):
                res[r] -= c * H[r][j]
    if any(res):
        return None
    return mat_vec(U, y, n, n)


def solve_matrix(A, B, m: int, n: int, k: int) -> list[list[int]] | None:
    """X (n x k) with A X = B (columnwise), or None."""
    cols = []
    for j in range(k):
        x = solve_int(A, [B[i][j] for i in range(m)], m, n)
        if x is None:
            return None
        cols.append(x)
    return [[cols[j][i] for j in range(k)] for i in range(n)]


def lattice_basis(gens: list[list[int]], n: int) -> list[list[int]]:
    """Echelon basis (list of rows) of the lattice spanned by `gens` in Z^n."""
    if not gens:
        return []
    A = transpose(gens, len(gens), n)
    H, _, rank = column_echelon(A, n, len(gens))
    return [[H[r][j] for r in range(n)] for j in range(rank)]


def in_lattice(basis: list[list[int]], v: list[int], n: int) -> list[int] | None:
    """Coordinates of v in the given lattice basis, or None."""
    if not basis:
        return [] if not any(v) else None
    A = transpose(basis, len(basis), n)
    return solve_int(A, v, n, len(basis))


def lattice_sum(basis_a, basis_b, n: int) -> list[list[int]]:
    return lattice_basis(list(basis_a) + list(basis_b), n)


def lattice_contains(outer, inner, n: int) -> bool:
    return all(in_lattice(outer, v, n) is not None for v in inner)


def preimage_lattice(A, m: int, n: int, target_basis: list[list[int]]) -> list[list[int]]:
    """Basis of {x in Z^n : A x lies in the lattice spanned by target_basis}.

    The target basis lives in Z^m.  Result is full rank whenever the
    target lattice has finite index in the saturation of the image.
    """
    t = len(target_basis)
    B = [[A[i][j] for j in range(n)] + [-target_basis[s][i] for s in range(t)]
         for i in range(m)]
    ker = kernel_basis(B, m, n + t)
    gens = [v[:n] for v in ker]
    return lattice_basis(gens, n)


def snf_divisors(A, m: int, n: int) -> list[int]:
    """Nonzero elementary divisors d1 | d2 | ... of the integer matrix A."""
    M = [row[:] for row in A]
    divisors = []
    top = 0
    left = 0
    while top < m and left < n:
        piv = None
        best = None
        for i in range(top, m):
            for j in range(left, n):
                v = abs(M[i][j])
                if v and (best is None or v < best):
                    best = v
                    piv = (i, j)
        if piv is None:
            break
        pi, pj = piv
        M[top], M[pi] = M[pi], M[top]
        for row in M:
            row[left], row[pj] = row[pj], row[left]
        while True:
            p = M[top][left]
            dirty = False
            for i in range(top + 1, m):
                if M[i][left]:
                    q = M[i][left] // p
                    for j in range(left, n):
                        M[i][j] -= q * M[top][j]
                    if M[i][left]:
                        M[top], M[i] = M[i], M[top]
                        dirty = True
                        break
            if dirty:
                continue
            for j in range(left + 1, n):
                if M[top][j]:
                    q = M[top][j] // p
                    for i in range(top, m):
                        M[i][j] -= q * M[i][left]
                    if M[top][j]:
                        for i in range(top, m):
                            M[i][left], M[i][j] = M[i][j], M[i][left]
                        dirty = True
                        break
            if dirty:
                continue
            # pivot must divide the rest of the block
            bad = None
            for i in range(top + 1, m):
                for j in range(left + 1, n):
                    if M[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            for j in range(left, n):
                M[top][j] += M[bad][j]
        divisors.append(abs(M[top][left]))
        top += 1
        left += 1
    # enforce the divisibility chain
    for i in range(len(divisors)):
        for j in range(i + 1, len(divisors)):
            a, b = divisors[i], divisors[j]
            g = gcd(a, b)
            divisors[i], divisors[j] = g, a * b // g
    return divisors


def quotient_presentation(z_basis: list[list[int]], b_gens: list[list[int]], n: int):
    """Presentation of (lattice Z) / (sublattice spanned by b_gens).

    Returns (free_rank, torsion) with torsion the elementary divisors > 1
    in divisibility order.  Every generator in b_gens must lie in Z.
    """
    k = len(z_basis)
    if k == 0:
        return 0, []
    coords = []
    for g in b_gens:
        c = in_lattice(z_basis, g, n)
        if c is None:
            raise ValueError("generator not contained in the ambient lattice")
        coords.append(c)
    if not coords:
        return k, []
    divisors = snf_divisors(coords, len(coords), k)
    torsion = [d for d in divisors if d > 1]
    free_rank = k - len(divisors)
    return free_rank, torsion
