"""Truncated Witt vectors of a perfect polynomial model, and semilinear fixed points.

The perfect base is F_p[x^(1/p^oo)] truncated to denominators p^depth; its
length-m Witt ring is modeled as (Z/p^m)[x^a : a in Z[1/p], a >= 0], which
is the mod-p^m reduction of the one-parameter deformation of the base.
Teichmuller lifts are computed by the iterated-powering limit and digits by
the reduce / subtract-lift / divide-by-p induction, so the two directions
are genuinely independent of each other.

The unit-root piece: a semilinear endomorphism v -> A sigma(v) of a finite
free module over F_{p^m} (sigma the p-power Frobenius) has its fixed points
computed by F_p-linearization; over a non-closed ground field the fixed
space can be smaller than the rank, which is reported as RequiresExtension
rather than an error.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .arith import validate_exponent


# ---------------------------------------------------------------------------
# perfection and Witt elements
# ---------------------------------------------------------------------------

def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _intkey_mul(a: dict[int, int], b: dict[int, int], mod: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            v = (out.get(e, 0) + c1 * c2) % mod
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def _clean_terms(terms, modulus: int) -> tuple:
    cleaned: dict[Fraction, int] = {}
    items = terms.items() if isinstance(terms, Mapping) else terms
    for e, c in items:
        e = Fraction(e)
        if e < 0:
            raise ValueError("exponents must be nonnegative")
        c = c % modulus
        if c:
            cleaned[e] = (cleaned.get(e, 0) + c) % modulus
            if not cleaned[e]:
                del cleaned[e]
    return tuple(sorted(cleaned.items()))


class PerfectionElement:
    """Element of the truncated perfection of F_p[x]: sparse, coefficients in F_p."""

    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms):
        self.p = p
        self.terms = _clean_terms(terms, p)
        for e, _ in self.terms:
            validate_exponent(e, p)

    @classmethod
    def zero(cls, p: int) -> "PerfectionElement":
        return cls(p, {})

    @classmethod
    def constant(cls, p: int, c: int) -> "PerfectionElement":
        return cls(p, {Fraction(0): c})

    @classmethod
    def monomial(cls, p: int, exponent, coeff: int = 1) -> "PerfectionElement":
        return cls(p, {Fraction(exponent): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "PerfectionElement") -> "PerfectionElement":
        t = dict(self.terms)
        for e, c in other.terms:
            t[e] = t.get(e, 0) + c
        return PerfectionElement(self.p, t)

    def __mul__(self, other: "PerfectionElement") -> "PerfectionElement":
        t: dict[Fraction, int] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                t[e] = t.get(e, 0) + c1 * c2
        return PerfectionElement(self.p, t)

    def frobenius(self) -> "PerfectionElement":
        """x -> x^p: exponent scaling (coefficients are fixed by Frobenius)."""
        return PerfectionElement(self.p, {e * self.p: c for e, c in self.terms})

    def frobenius_inverse(self) -> "PerfectionElement":
        """p-th root; raises the depth of the exponent denominators by one."""
        return PerfectionElement(self.p, {e / self.p: c for e, c in self.terms})

    def depth(self) -> int:
        d = 0
        for e, _ in self.terms:
            den = e.denominator
            k = 0
            while den > 1:
                den //= self.p
                k += 1
            d = max(d, k)
        return d

    def __eq__(self, other):
        return (
            isinstance(other, PerfectionElement)
            and self.p == other.p
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.p, self.terms))

    def __repr__(self):
        return f"Perfection(p={self.p}, {dict(self.terms)})"


class TruncatedWittElement:
    """Element of the length-`precision` Witt ring of the truncated perfection."""

    __slots__ = ("p", "precision", "terms")

    def __init__(self, p: int, precision: int, terms):
        if precision < 1:
            raise ValueError("precision must be >= 1")
        self.p = p
        self.precision = precision
        self.terms = _clean_terms(terms, p**precision)
        for e, _ in self.terms:
            validate_exponent(e, p)

    @classmethod
    def zero(cls, p: int, precision: int) -> "TruncatedWittElement":
        return cls(p, precision, {})

    @classmethod
    def constant(cls, p: int, precision: int, c: int) -> "TruncatedWittElement":
        return cls(p, precision, {Fraction(0): c})

    def _check(self, other: "TruncatedWittElement"):
        if (self.p, self.precision) != (other.p, other.precision):
            raise ValueError("mixed Witt rings")

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for e, c in other.terms:
            t[e] = t.get(e, 0) + c
        return TruncatedWittElement(self.p, self.precision, t)

    def __neg__(self):
        return TruncatedWittElement(self.p, self.precision, {e: -c for e, c in self.terms})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        t: dict[Fraction, int] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                t[e] = t.get(e, 0) + c1 * c2
        return TruncatedWittElement(self.p, self.precision, t)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not defined here")
        if k == 0:
            return TruncatedWittElement.constant(self.p, self.precision, 1)
        # integer exponent keys during the power loop: the repeated
        # convolutions dominate the Teichmuller lift and Fraction keys
        # make them an order of magnitude slower
        den = 1
        for e, _ in self.terms:
            den = den * e.denominator // _gcd(den, e.denominator)
        mod = self.p**self.precision
        base = {int(e * den): c for e, c in self.terms}
        out = None
        while k:
            if k & 1:
                out = base if out is None else _intkey_mul(out, base, mod)
            k >>= 1
            if k:
                base = _intkey_mul(base, base, mod)
        return TruncatedWittElement(
            self.p, self.precision, {Fraction(e, den): c for e, c in out.items()}
        )

    def frobenius(self) -> "TruncatedWittElement":
        """The canonical Frobenius lift: exponent scaling by p."""
        return TruncatedWittElement(self.p, self.precision, {e * self.p: c for e, c in self.terms})

    def reduce_precision(self, m: int) -> "TruncatedWittElement":
        return TruncatedWittElement(self.p, m, dict(self.terms))

    def reduce_mod_p(self) -> PerfectionElement:
        return PerfectionElement(self.p, dict(self.terms))

    def divide_by_p(self) -> "TruncatedWittElement":
        """Exact division by p, dropping one level of precision."""
        out = {}
        for e, c in self.terms:
            if c % self.p:
                raise ValueError("element is not divisible by p")
            out[e] = c // self.p
        return TruncatedWittElement(self.p, self.precision - 1, out)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedWittElement)
            and (self.p, self.precision) == (other.p, other.precision)
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.p, self.precision, self.terms))

    def __repr__(self):
        return f"Witt(p={self.p}, m={self.precision}, {dict(self.terms)})"

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "precision": self.precision,
            "terms": [[[e.numerator, e.denominator], str(c)] for e, c in self.terms],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TruncatedWittElement":
        terms = {Fraction(int(num), int(den)): int(c) for (num, den), c in obj["terms"]}
        return cls(int(obj["p"]), int(obj["precision"]), terms)


def teichmuller_lift(a: PerfectionElement, precision: int) -> TruncatedWittElement:
    """Multiplicative lift [a]: lift a^(1/p^k) naively and raise to the p^k.

    Any k >= precision - 1 gives the stable value; one extra step is taken
    for clarity.  The power is taken as k successive p-th powers with
    reduction mod p^precision after each: every round pushes the non-stable
    cross terms one p-layer deeper, so intermediates stay small.
    Multiplicativity [ab] = [a][b] holds on the nose.
    """
    p = a.p
    k = precision
    root = a
    for _ in range(k):
        root = root.frobenius_inverse()
    den = 1
    for e, _ in root.terms:
        den = den * e.denominator // _gcd(den, e.denominator)
    mod = p**precision
    cur = {int(e * den): c for e, c in root.terms}
    for _ in range(k):
        power = cur
        for _ in range(p - 1):
            power = _intkey_mul(power, cur, mod)
        cur = power
    return TruncatedWittElement(p, precision, {Fraction(e, den): c for e, c in cur.items()})


def teichmuller_digits(w: TruncatedWittElement) -> list[PerfectionElement]:
    """Digits (a_0, ..., a_{m-1}) with w = sum [a_i] p^i at precision m.

    Inductive: reduce mod p, subtract the Teichmuller lift of the
    reduction, divide by p, recurse at one lower precision.
    """
    digits = []
    cur = w
    for i in range(w.precision):
        a = cur.reduce_mod_p()
        digits.append(a)
        if i == w.precision - 1:
            break
        cur = (cur - teichmuller_lift(a, cur.precision)).divide_by_p()
    return digits


def digits_to_witt(digits: Iterable[PerfectionElement], p: int, precision: int) -> TruncatedWittElement:
    """sum [a_i] p^i at the stated precision.

    The i-th lift is only needed modulo p^(precision - i), which keeps the
    later (larger) digits cheap.
    """
    out = TruncatedWittElement.zero(p, precision)
    for i, a in enumerate(digits):
        if i >= precision:
            break
        lifted = teichmuller_lift(a, precision - i)
        out = out + TruncatedWittElement(
            p, precision, {e: c * p**i for e, c in lifted.terms}
        )
    return out


# ---------------------------------------------------------------------------
# small finite fields
# ---------------------------------------------------------------------------

class GF:
    """F_{p^m} as polynomials modulo the first irreducible found in lex order.

    Elements are coefficient tuples of length m over F_p.  Sizes here stay
    tiny (the fixed-point solver is exercised up to F_9), so irreducibility
    is tested by trial division.
    """

    def __init__(self, p: int, m: int, modulus: tuple[int, ...] | None = None):
        self.p = p
        self.m = m
        self.q = p**m
        self.modulus = modulus if modulus is not None else self._find_irreducible(p, m)

    @staticmethod
    def _find_irreducible(p: int, m: int) -> tuple[int, ...]:
        if m == 1:
            return (0, 1)
        def poly_mod(f, g):
            f = list(f)
            while len(f) >= len(g) and any(f):
                while f and f[-1] % p == 0:
                    f.pop()
                if len(f) < len(g):
                    break
                c = f[-1] * pow(g[-1], -1, p) % p
                off = len(f) - len(g)
                for i, gc in enumerate(g):
                    f[off + i] = (f[off + i] - c * gc) % p
                while f and f[-1] % p == 0:
                    f.pop()
            return f
        low_degree_monics = [
            tail + (1,)
            for d in range(1, m // 2 + 1)
            for tail in itertools.product(range(p), repeat=d)
        ]
        for tail in itertools.product(range(p), repeat=m):
            cand = tail + (1,)
            if all(any(poly_mod(cand, g)) for g in low_degree_monics):
                return cand
        raise RuntimeError("no irreducible polynomial found")

    def zero(self):
        return (0,) * self.m

    def one(self):
        return (1,) + (0,) * (self.m - 1)

    def gen(self):
        if self.m == 1:
            return (1,)
        return (0, 1) + (0,) * (self.m - 2)

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def mul(self, a, b):
        p, m = self.p, self.m
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        for d in range(2 * m - 2, m - 1, -1):
            c = prod[d] % p
            if c:
                for i in range(m + 1):
                    prod[d - m + i] = (prod[d - m + i] - c * self.modulus[i]) % p
            prod[d] = 0
        return tuple(c % p for c in prod[:m])

    def pow(self, a, k: int):
        out = self.one()
        base = a
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def inv(self, a):
        if not any(a):
            raise ZeroDivisionError
        return self.pow(a, self.q - 2)

    def frobenius(self, a):
        return self.pow(a, self.p)

    def elements(self):
        for tup in itertools.product(range(self.p), repeat=self.m):
            yield tup

    def to_fp_vector(self, a) -> list[int]:
        return list(a)


@dataclass
class SemilinearModule:
    """Finite free F_{p^m}-module with v -> A sigma(v), sigma the p-Frobenius."""

    field: GF
    matrix: list[list[tuple]]  # r x r over the field

    def __post_init__(self):
        r = len(self.matrix)
        if any(len(row) != r for row in self.matrix):
            raise ValueError("frobenius matrix must be square")
        if not self._invertible():
            raise ValueError("frobenius matrix must be invertible")

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def _invertible(self) -> bool:
        F = self.field
        M = [row[:] for row in self.matrix]
        r = len(M)
        for col in range(r):
            piv = next((i for i in range(col, r) if any(M[i][col])), None)
            if piv is None:
                return False
            M[col], M[piv] = M[piv], M[col]
            inv = F.inv(M[col][col])
            M[col] = [F.mul(inv, x) for x in M[col]]
            for i in range(r):
                if i != col and any(M[i][col]):
                    c = M[i][col]
                    M[i] = [F.sub(x, F.mul(c, y)) for x, y in zip(M[i], M[col])]
        return True

    def apply(self, v: list[tuple]) -> list[tuple]:
        F = self.field
        sv = [F.frobenius(x) for x in v]
        out = []
        for row in self.matrix:
            acc = F.zero()
            for a, x in zip(row, sv):
                acc = F.add(acc, F.mul(a, x))
            out.append(acc)
        return out


def frobenius_fixed_points(module: SemilinearModule) -> tuple[int, list[list[tuple]], dict]:
    """Fixed points of v -> A sigma(v), by F_p-linearization.

    Returns (fp_dimension, basis, check) where basis is an F_p-basis of the
    fixed space L.  check reports whether L spans the module over the
    ground field; when the ground field is too small for the full unit-root
    rank the status is "RequiresExtension" instead of a failure.
    """
    F = module.field
    p, m, r = F.p, F.m, module.rank
    dim = m * r

    def unpack(vec: list[int]) -> list[tuple]:
        return [tuple(vec[i * m : (i + 1) * m]) for i in range(r)]

    def pack(v: list[tuple]) -> list[int]:
        return [c for x in v for c in x]

    cols = []
    for j in range(dim):
        e = [0] * dim
        e[j] = 1
        image = module.apply(unpack(e))
        w = pack(image)
        cols.append([(w[i] - e[i]) % p for i in range(dim)])
    M = [[cols[j][i] for j in range(dim)] for i in range(dim)]

    # kernel of M over F_p
    A = [row[:] for row in M]
    pivots = []
    rowi = 0
    for col in range(dim):
        piv = next((i for i in range(rowi, dim) if A[i][col] % p), None)
        if piv is None:
            continue
        A[rowi], A[piv] = A[piv], A[rowi]
        inv = pow(A[rowi][col], -1, p)
        A[rowi] = [x * inv % p for x in A[rowi]]
        for i in range(dim):
            if i != rowi and A[i][col] % p:
                c = A[i][col]
                A[i] = [(x - c * y) % p for x, y in zip(A[i], A[rowi])]
        pivots.append(col)
        rowi += 1
    free_cols = [c for c in range(dim) if c not in pivots]
    basis_vectors = []
    for fc in free_cols:
        v = [0] * dim
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-A[i][fc]) % p
        basis_vectors.append(v)

    basis = [unpack(v) for v in basis_vectors]
    fp_dim = len(basis)

    # does L span the module over F_{p^m}?  Row-reduce the basis over the field.
    span_rank = 0
    rows = [v[:] for v in basis]
    work = [row[:] for row in rows]
    used = [False] * len(work)
    for col in range(r):
        piv = None
        for i, row in enumerate(work):
            if not used[i] and any(row[col]):
                piv = i
                break
        if piv is None:
            continue
        used[piv] = True
        span_rank += 1
        inv = F.inv(work[piv][col])
        work[piv] = [F.mul(inv, x) for x in work[piv]]
        for i in range(len(work)):
            if i != piv and any(work[i][col]):
                c = work[i][col]
                work[i] = [F.sub(x, F.mul(c, y)) for x, y in zip(work[i], work[piv])]

    spans = span_rank == r
    status = "ok" if (fp_dim == r and spans) else "RequiresExtension"
    check = {
        "expected_rank": r,
        "fp_dimension": fp_dim,
        "field_span_rank": span_rank,
        "spans": spans,
        "status": status,
    }
    return fp_dim, basis, check


def exhaustive_fixed_points(module: SemilinearModule) -> list[list[tuple]]:
    """All fixed vectors found by brute force; the oracle for the solver."""
    F = module.field
    out = []
    for combo in itertools.product(F.elements(), repeat=module.rank):
        v = list(combo)
        if module.apply(v) == v:
            out.append(v)
    return out
