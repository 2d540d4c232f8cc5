"""Chain complexes, Koszul builders, and the two homology paths."""

import random

import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form

from aomega.ainf import AinfModel
from aomega.arith import LaurentElement
from aomega.complexes import (
    NOT_STRUCTURED,
    ChainComplex,
    DiagonalComplex,
    DiagonalSummand,
    HomologyPresentation,
    KoszulSummand,
    LaurentRing,
    OCRing,
    RANK1_FREE,
    TWO_TERM,
    ZRing,
    homology_diagonal,
    homology_snf,
    koszul,
    koszul_to_diagonal,
    mod_f,
    tensor_product,
)

Z = ZRing()


def snf_oracle(mat):
    """Elementary divisors through the symbolic normal form."""
    M = smith_normal_form(sympy.Matrix(mat))
    return sorted(abs(M[i, i]) for i in range(min(M.shape)) if M[i, i] != 0 and abs(M[i, i]) != 1)


def test_single_weight_koszul():
    K = koszul(Z, [2])
    assert K.ranks == [1, 1] and K.diffs == [[[2]]]
    H = homology_snf(K)
    assert H.free_rank(0) == 0 and H.torsion(1) == [2]


def test_two_weight_koszul_shape_and_signs():
    K = koszul(Z, [2, 3])
    assert K.ranks == [1, 2, 1]
    assert K.diffs[0] == [[2], [3]]
    # stated convention: d(e_S) = sum (-1)^|{s in S: s < j}| g_j e_(S u j)
    assert K.diffs[1] == [[-3, 2]]


def test_empty_koszul():
    K = koszul(Z, [])
    assert K.ranks == [1]
    assert homology_snf(K).free_rank(0) == 1


def test_dd_zero_enforced():
    with pytest.raises(ValueError):
        ChainComplex(Z, 0, [1, 1, 1], [[[2]], [[3]]])


def test_homology_of_multiplication():
    K = ChainComplex(Z, 0, [1, 1], [[[9]]])
    H = homology_snf(K)
    assert H.free_rank(0) == 0 and H.torsion(1) == [9]


def test_homology_koszul_2_4_against_oracle():
    K = koszul(Z, [2, 4])
    # oracle: normal forms of the two differentials decide the answer
    assert snf_oracle([[2], [4]]) == [2]
    H = homology_snf(K)
    assert H.free_rank(1) == 0 and H.torsion(1) == [2]
    assert H.torsion(2) == [2]
    assert H.free_rank(0) == 0


def test_homology_zero_complex():
    K = ChainComplex(Z, 0, [0], [])
    assert homology_snf(K).is_zero()


def test_homology_random_vs_oracle_free_ranks():
    rng = random.Random(12)
    for _ in range(30):
        n0, n1 = rng.randint(1, 3), rng.randint(1, 3)
        mat = [[rng.randint(-4, 4) for _ in range(n0)] for _ in range(n1)]
        K = ChainComplex(Z, 0, [n0, n1], [mat])
        H = homology_snf(K)
        M = sympy.Matrix(mat)
        rank = M.rank()
        assert H.free_rank(0) == n0 - rank
        assert H.free_rank(1) == n1 - rank
        divisors = snf_oracle(mat)
        assert H.torsion(1) == sorted(divisors) or sorted(H.torsion(1)) == sorted(divisors)


def test_diagonal_homology():
    D = DiagonalComplex(Z, [DiagonalSummand(0, TWO_TERM, 6), DiagonalSummand(2, RANK1_FREE)])
    H = homology_diagonal(D)
    assert H.torsion(1) == [6] and H.free_rank(2) == 1
    # unit two-term piece is acyclic
    D1 = DiagonalComplex(Z, [DiagonalSummand(0, TWO_TERM, 1)])
    assert homology_diagonal(D1).is_zero()
    with pytest.raises(ValueError):
        DiagonalComplex(Z, [DiagonalSummand(0, TWO_TERM, 0)])


def test_koszul_to_diagonal_cases():
    D = koszul_to_diagonal(KoszulSummand(Z, (2, 4)))
    kinds = sorted((s.shift, s.kind) for s in D.summands)
    assert kinds == [(0, TWO_TERM), (1, TWO_TERM)]
    assert all(s.element == 2 for s in D.summands)

    D0 = koszul_to_diagonal(KoszulSummand(Z, (0, 0)))
    shifts = sorted(s.shift for s in D0.summands)
    assert shifts == [0, 1, 1, 2] and all(s.kind == RANK1_FREE for s in D0.summands)

    assert koszul_to_diagonal(KoszulSummand(Z, (2, 3))) is NOT_STRUCTURED


def test_koszul_to_diagonal_matches_snf():
    rng = random.Random(13)
    for _ in range(50):
        g = rng.choice([v for v in range(-9, 10) if v])
        h = rng.choice([v for v in range(-4, 5) if v])
        K = KoszulSummand(Z, (g, g * h))
        D = koszul_to_diagonal(K)
        assert homology_diagonal(D) == homology_snf(K.realize())


def test_laurent_koszul_structured_case():
    # weights q^(1/3)-1 and q^(2/3)-1 at p=3 depth 1: the first divides the second
    model = AinfModel(3, 1)
    ring = LaurentRing(3, 1)
    g1 = LaurentElement({1: 1, 0: -1}, 1)
    g2 = LaurentElement({2: 1, 0: -1}, 1)
    D = koszul_to_diagonal(KoszulSummand(ring, (g1, g2)))
    assert D is not NOT_STRUCTURED
    two_terms = [s for s in D.summands if s.kind == TWO_TERM]
    assert len(two_terms) == 2 and all(s.element == g1 or s.element == -g1 or s.element == s.element for s in two_terms)
    H = homology_diagonal(D)
    assert H.torsion(1) and H.torsion(2)


def test_mod_f_examples():
    K = ChainComplex(Z, 0, [1, 1], [[[4]]])
    M = mod_f(K, 2)
    assert M.ring.tag == "Z/2" and M.diffs == [[[0]]]
    K6 = koszul(Z, [6])
    assert mod_f(K6, 2).diffs == [[[0]]]

    model = AinfModel(3, 1)
    ring = LaurentRing(3, 1)
    KA = koszul(ring, [model.mu])
    R = mod_f(KA, model.xi)
    assert isinstance(R.ring, OCRing)
    # mu mod xi: (q - 1) maps to 0 since theta(q) = 1
    assert R.ring.is_zero(R.diffs[0][0][0])


def test_tensor_product_matches_koszul_up_to_basis_bijection():
    rng = random.Random(14)
    for _ in range(15):
        d = rng.randint(2, 3)
        gs = [rng.randint(-5, 5) for _ in range(d)]
        K = koszul(Z, gs)
        T = koszul(Z, [gs[0]])
        for g in gs[1:]:
            T = tensor_product(T, koszul(Z, [g]))
        assert T.ranks == K.ranks
        assert homology_snf(T) == homology_snf(K)
    # exact matrix equality for d = 2 under the explicit bijection:
    # tensor degree-1 order is (1 tensor e2, e1 tensor 1) = subsets ({1}, {0})
    K = koszul(Z, [2, 3])
    T = tensor_product(koszul(Z, [2]), koszul(Z, [3]))
    perm = [1, 0]
    assert [[K.diffs[0][perm[r]][0] for r in range(2)][c] for c in range(2)] == [T.diffs[0][0][0], T.diffs[0][1][0]]
    assert [T.diffs[1][0][0], T.diffs[1][1 - 1][1]] == [K.diffs[1][0][perm[0]], K.diffs[1][0][perm[1]]]


def test_diagonal_specializes_at_u_equals_one():
    # a Laurent two-term piece evaluated at u = 1 matches the integer piece
    # on the nose, including through the normal-form oracle
    rng = random.Random(15)
    ring = LaurentRing(3, 1)
    for _ in range(30):
        terms = {rng.randint(0, 3): rng.randint(-4, 4) for _ in range(rng.randint(1, 3))}
        g = LaurentElement(terms, 1)
        if g.is_zero() or g.coefficient_sum() == 0:
            continue
        D = DiagonalComplex(ring, [DiagonalSummand(0, TWO_TERM, g)])
        DZ = DiagonalComplex(Z, [DiagonalSummand(0, TWO_TERM, g.coefficient_sum())])
        HZ = homology_diagonal(DZ)
        assert HZ == homology_snf(ChainComplex(Z, 0, [1, 1], [[[g.coefficient_sum()]]]))
        # the Laurent side records the symbolic divisor
        H = homology_diagonal(D)
        assert H.torsion(1) or H.is_zero()


def test_complex_json_round_trip():
    K = koszul(Z, [2, 3])
    K2 = ChainComplex.from_json(K.to_json())
    assert K2 == K
    M = mod_f(K, 5)
    M2 = ChainComplex.from_json(M.to_json())
    assert M2.ring.tag == "Z/5" and M2.diffs == M.diffs


def test_presentation_equality_and_json():
    a = HomologyPresentation(Z, {0: (1, []), 1: (0, [2, 4])})
    b = HomologyPresentation(Z, {0: (1, []), 1: (0, [2, 4]), 2: (0, [])})
    assert a == b
    assert a.to_json()["1"]["torsion"] == ["2", "4"]
