"""Exact integer linear algebra against symbolic normal forms."""

import random
from fractions import Fraction

import sympy
from sympy.matrices.normalforms import smith_normal_form

from aomega import intlinalg as la


def random_matrix(rng, m, n, bound=6):
    return [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(m)]


def test_column_echelon_transform_is_unimodular():
    rng = random.Random(50)
    for _ in range(40):
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        A = random_matrix(rng, m, n)
        H, U, rank = la.column_echelon(A, m, n)
        assert la.mat_mul(A, U, m, n, n) == H
        det = sympy.Matrix(U).det()
        assert det in (1, -1)
        # columns beyond the rank are zero
        for j in range(rank, n):
            assert all(H[i][j] == 0 for i in range(m))


def test_kernel_basis_spans_and_saturates():
    rng = random.Random(51)
    for _ in range(40):
        m, n = rng.randint(1, 3), rng.randint(1, 4)
        A = random_matrix(rng, m, n)
        kernel = la.kernel_basis(A, m, n)
        for v in kernel:
            assert all(sum(A[i][j] * v[j] for j in range(n)) == 0 for i in range(m))
        assert len(kernel) == n - sympy.Matrix(A).rank()
        # saturated: any integral rational combination lies in the lattice
        if kernel:
            coeffs = [Fraction(rng.randint(-4, 4), rng.choice((1, 2, 3))) for _ in kernel]
            combo = [sum(c * v[j] for c, v in zip(coeffs, kernel)) for j in range(n)]
            if all(x.denominator == 1 for x in combo):
                assert la.in_lattice(kernel, [int(x) for x in combo], n) is not None


def test_solve_int_round_trip_and_unsolvable():
    rng = random.Random(52)
    for _ in range(40):
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        A = random_matrix(rng, m, n)
        x = [rng.randint(-5, 5) for _ in range(n)]
        b = la.mat_vec(A, x, m, n)
        sol = la.solve_int(A, b, m, n)
        assert sol is not None
        assert la.mat_vec(A, sol, m, n) == b
    # 2x = 1 has no integer solution
    assert la.solve_int([[2]], [1], 1, 1) is None


def test_snf_divisors_against_symbolic_oracle():
    rng = random.Random(53)
    for _ in range(60):
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        A = random_matrix(rng, m, n)
        got = la.snf_divisors(A, m, n)
        M = smith_normal_form(sympy.Matrix(A))
        oracle = [abs(M[i, i]) for i in range(min(m, n)) if M[i, i] != 0]
        assert got == oracle, (A, got, oracle)


def test_preimage_lattice_defining_property():
    rng = random.Random(54)
    for _ in range(30):
        m, n = rng.randint(1, 3), rng.randint(1, 3)
        A = random_matrix(rng, m, n)
        f = rng.choice((2, 3, 4))
        target = [[f if i == j else 0 for j in range(m)] for i in range(m)]
        rows = la.preimage_lattice(A, m, n, target)
        # every basis vector maps into f Z^m
        for v in rows:
            image = la.mat_vec(A, v, m, n)
            assert all(x % f == 0 for x in image)
        # every vector with that property lies in the lattice
        for _ in range(10):
            w = [rng.randint(-6, 6) for _ in range(n)]
            image = la.mat_vec(A, w, m, n)
            if all(x % f == 0 for x in image):
                assert la.in_lattice(rows, w, n) is not None


def test_quotient_presentation_examples():
    # Z^2 / <(2,0),(0,3)> = Z/2 + Z/3 = Z/6 in chain form
    from aomega.complexes import chain_normalize

    free, tors = la.quotient_presentation(la.identity(2), [[2, 0], [0, 3]], 2)
    assert free == 0 and chain_normalize(tors) == [6]
    # Z^2 / <(2,0)> = Z + Z/2
    free, tors = la.quotient_presentation(la.identity(2), [[2, 0]], 2)
    assert free == 1 and tors == [2]
    # full lattice: trivial quotient
    free, tors = la.quotient_presentation(la.identity(2), [[1, 0], [0, 1]], 2)
    assert free == 0 and tors == []


def test_lattice_membership_and_sum():
    basis = [[2, 0], [0, 3]]
    assert la.in_lattice(basis, [4, 3], 2) is not None
    assert la.in_lattice(basis, [1, 0], 2) is None
    summed = la.lattice_sum(basis, [[1, 1]], 2)
    assert la.in_lattice(summed, [1, 1], 2) is not None
    assert la.lattice_contains(summed, basis, 2)
