"""Bounded cochain complexes of finite free modules, Koszul complexes, homology.

Three coefficient rings are supported through one small protocol: the
integers (where a Smith-normal-form oracle computes exact homology), the
Laurent carrier of the cyclotomic model, and its residue rings.  Over the
non-principal rings, homology is only offered for divisibility-structured
complexes through the diagonal decomposition; that is all the graded
pipelines need, and the integer oracle covers generic testing.

Differential matrices are stored row-major, d_i of shape rank(i+1) x rank(i),
acting on column vectors.  The Koszul sign convention is fixed once:

    d(e_S) = sum over j not in S of (-1)^(#{s in S : s < j}) g_j e_(S u {j})

with subset bases enumerated in (size, lexicographic) order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd
from typing import Any, Sequence

from . import intlinalg as la
from .arith import LaurentElement, laurent_exact_div, normalize_associate
from .ainf import AinfModel, OCModel, OCModelElement


class NotStructuredType:
    """Marker: a complex without the divisibility structure the symbolic path needs."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NotStructured"


NOT_STRUCTURED = NotStructuredType()


# ---------------------------------------------------------------------------
# ring protocol
# ---------------------------------------------------------------------------

class ZRing:
    """The integers."""

    tag = "Z"

    def zero(self):
        return 0

    def one(self):
        return 1

    def is_zero(self, x):
        return x == 0

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def exact_div(self, a, b):
        if b == 0:
            raise ZeroDivisionError
        if a % b:
            return None
        return a // b

    def is_unit(self, x):
        return x in (1, -1)

    def normalize_quotient(self, g):
        return abs(g)

    def entry_to_json(self, x):
        return str(x)

    def entry_from_json(self, s):
        return int(s)

    def __eq__(self, other):
        return isinstance(other, ZRing)

    def __hash__(self):
        return hash("Z")

    def __repr__(self):
        return "Z"


class ZModRing:
    """Z/m with representatives in [0, m)."""

    def __init__(self, modulus: int):
        self.modulus = modulus
        self.tag = f"Z/{modulus}"

    def zero(self):
        return 0

    def one(self):
        return 1 % self.modulus

    def is_zero(self, x):
        return x % self.modulus == 0

    def add(self, a, b):
        return (a + b) % self.modulus

    def neg(self, a):
        return (-a) % self.modulus

    def mul(self, a, b):
        return (a * b) % self.modulus

    def is_unit(self, x):
        return gcd(x, self.modulus) == 1

    def exact_div(self, a, b):
        g = gcd(b, self.modulus)
        if a % g:
            return None
        return (a // g) * pow(b // g, -1, self.modulus // g) % self.modulus

    def normalize_quotient(self, g):
        return gcd(g, self.modulus)

    def entry_to_json(self, x):
        return str(x % self.modulus)

    def entry_from_json(self, s):
        return int(s) % self.modulus

    def __eq__(self, other):
        return isinstance(other, ZModRing) and self.modulus == other.modulus

    def __hash__(self):
        return hash(("ZMod", self.modulus))

    def __repr__(self):
        return self.tag


class LaurentRing:
    """Z[u^(+-1)] at a fixed (p, depth); elements are LaurentElement."""

    def __init__(self, p: int, depth: int):
        self.p = p
        self.depth = depth
        self.tag = f"A(p={p},depth={depth})"

    def zero(self):
        return LaurentElement.zero(self.depth)

    def one(self):
        return LaurentElement.one(self.depth)

    def is_zero(self, x):
        return x.is_zero()

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def exact_div(self, a, b):
        return laurent_exact_div(a, b)

    def is_unit(self, x):
        return x.is_unit()

    def normalize_quotient(self, g):
        return normalize_associate(g)

    def entry_to_json(self, x):
        return x.to_json()

    def entry_from_json(self, obj):
        return LaurentElement.from_json(obj)

    def __eq__(self, other):
        return isinstance(other, LaurentRing) and (self.p, self.depth) == (other.p, other.depth)

    def __hash__(self):
        return hash(("Laurent", self.p, self.depth))

    def __repr__(self):
        return self.tag


class OCRing:
    """The cyclotomic residue model Z[zeta_{p^depth}]."""

    def __init__(self, p: int, depth: int):
        self.model = OCModel(p, depth)
        self.p = p
        self.depth = depth
        self.tag = f"OC(p={p},depth={depth})"

    def zero(self):
        return self.model.zero()

    def one(self):
        return self.model.one()

    def is_zero(self, x):
        return x.is_zero()

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def exact_div(self, a, b):
        return a.exact_div(b) if not isinstance(a, int) else None

    def is_unit(self, x):
        return x.is_unit()

    def normalize_quotient(self, g):
        return g

    def entry_to_json(self, x):
        return {"coeffs": [str(c) for c in x.coeffs]}

    def entry_from_json(self, obj):
        return OCModelElement(self.model, tuple(int(c) for c in obj["coeffs"]))

    def __eq__(self, other):
        return isinstance(other, OCRing) and (self.p, self.depth) == (other.p, other.depth)

    def __hash__(self):
        return hash(("OC", self.p, self.depth))

    def __repr__(self):
        return self.tag


class FpPolyRing:
    """F_p[u]; elements are coefficient tuples (low degree first)."""

    def __init__(self, p: int):
        self.p = p
        self.tag = f"F{p}[u]"

    def _trim(self, f):
        f = [c % self.p for c in f]
        while f and not f[-1]:
            f.pop()
        return tuple(f)

    def zero(self):
        return ()

    def one(self):
        return (1,)

    def is_zero(self, x):
        return not self._trim(x)

    def add(self, a, b):
        n = max(len(a), len(b))
        return self._trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])

    def neg(self, a):
        return self._trim([-c for c in a])

    def mul(self, a, b):
        a, b = self._trim(a), self._trim(b)
        if not a or not b:
            return ()
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return self._trim(out)

    def exact_div(self, a, b):
        a, b = list(self._trim(a)), list(self._trim(b))
        if not b:
            raise ZeroDivisionError
        if not a:
            return ()
        quo = [0] * (len(a) - len(b) + 1) if len(a) >= len(b) else []
        inv = pow(b[-1], -1, self.p)
        while a and len(a) >= len(b):
            c = a[-1] * inv % self.p
            off = len(a) - len(b)
            quo[off] = c
            for i, bc in enumerate(b):
                a[off + i] = (a[off + i] - c * bc) % self.p
            while a and not a[-1]:
                a.pop()
        if a:
            return None
        return self._trim(quo)

    def is_unit(self, x):
        x = self._trim(x)
        return len(x) == 1

    def normalize_quotient(self, g):
        g = self._trim(g)
        if not g:
            return g
        inv = pow(g[-1], -1, self.p)
        return self._trim([c * inv for c in g])

    def evaluate(self, f, x: int) -> int:
        acc = 0
        for c in reversed(self._trim(f)):
            acc = (acc * x + c) % self.p
        return acc

    def entry_to_json(self, f):
        return [str(c) for c in self._trim(f)]

    def entry_from_json(self, obj):
        return self._trim([int(c) for c in obj])

    def __eq__(self, other):
        return isinstance(other, FpPolyRing) and self.p == other.p

    def __hash__(self):
        return hash(("FpPoly", self.p))

    def __repr__(self):
        return self.tag


# ---------------------------------------------------------------------------
# chain complexes
# ---------------------------------------------------------------------------

class ChainComplex:
    """Bounded cochain complex of finite free modules with explicit matrices.

    `diffs[k]` maps degree lo+k to degree lo+k+1 and has shape
    ranks[k+1] x ranks[k]; d after d = 0 is checked at construction.
    """

    def __init__(self, ring, lo: int, ranks: Sequence[int], diffs: Sequence[Sequence[Sequence[Any]]]):
        self.ring = ring
        self.lo = lo
        self.ranks = list(ranks)
        self.diffs = [[list(row) for row in d] for d in diffs]
        if len(self.diffs) != max(0, len(self.ranks) - 1):
            raise ValueError("need exactly len(ranks)-1 differentials")
        for k, d in enumerate(self.diffs):
            if len(d) != self.ranks[k + 1] or any(len(row) != self.ranks[k] for row in d):
                raise ValueError(f"differential {k} has the wrong shape")
        self._check_dd()

    def _check_dd(self):
        R = self.ring
        for k in range(len(self.diffs) - 1):
            A, B = self.diffs[k + 1], self.diffs[k]
            m, mid, n = self.ranks[k + 2], self.ranks[k + 1], self.ranks[k]
            for i in range(m):
                for j in range(n):
                    acc = R.zero()
                    for t in range(mid):
                        acc = R.add(acc, R.mul(A[i][t], B[t][j]))
                    if not R.is_zero(acc):
                        raise ValueError(f"d o d != 0 at degree {self.lo + k}")

    @property
    def hi(self) -> int:
        return self.lo + len(self.ranks) - 1

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def rank(self, i: int) -> int:
        if self.lo <= i <= self.hi:
            return self.ranks[i - self.lo]
        return 0

    def diff(self, i: int):
        """Matrix of d: K^i -> K^(i+1), zero-padded outside the support."""
        if self.lo <= i < self.hi:
            return self.diffs[i - self.lo]
        return [[self.ring.zero()] * self.rank(i) for _ in range(self.rank(i + 1))]

    def shift(self, s: int) -> "ChainComplex":
        return ChainComplex(self.ring, self.lo + s, self.ranks, self.diffs)

    def total_rank(self) -> int:
        return sum(self.ranks)

    def map_entries(self, ring, fn) -> "ChainComplex":
        return ChainComplex(
            ring, self.lo, self.ranks,
            [[[fn(x) for x in row] for row in d] for d in self.diffs],
        )

    def __eq__(self, other):
        return (
            isinstance(other, ChainComplex)
            and self.ring == other.ring
            and self.lo == other.lo
            and self.ranks == other.ranks
            and self.diffs == other.diffs
        )

    def __repr__(self):
        return f"ChainComplex({self.ring!r}, degrees [{self.lo},{self.hi}], ranks {self.ranks})"

    def to_json(self) -> dict:
        return {
            "ring": self.ring.tag,
            "lo": self.lo,
            "ranks": self.ranks,
            "diffs": [[self.ring.entry_to_json(x) for row in d for x in row] for d in self.diffs],
        }

    @classmethod
    def from_json(cls, obj: dict, ring=None) -> "ChainComplex":
        if ring is None:
            tag = obj["ring"]
            if tag == "Z":
                ring = ZRing()
            elif tag.startswith("Z/"):
                ring = ZModRing(int(tag[2:]))
            else:
                raise ValueError(f"cannot reconstruct ring from tag {tag!r}")
        ranks = [int(r) for r in obj["ranks"]]
        diffs = []
        for k, flat in enumerate(obj["diffs"]):
            rows, cols = ranks[k + 1], ranks[k]
            entries = [ring.entry_from_json(x) for x in flat]
            diffs.append([entries[i * cols : (i + 1) * cols] for i in range(rows)])
        return cls(ring, int(obj["lo"]), ranks, diffs)


def zero_complex(ring) -> ChainComplex:
    return ChainComplex(ring, 0, [0], [])


def koszul_sign(j: int, subset: tuple[int, ...]) -> int:
    return -1 if sum(1 for s in subset if s < j) % 2 else 1


def koszul_basis(d: int, size: int) -> list[tuple[int, ...]]:
    return sorted(itertools.combinations(range(d), size))


def koszul(ring, elements: Sequence[Any], lo: int = 0) -> ChainComplex:
    """Koszul cochain complex on the given elements, degrees lo..lo+d."""
    d = len(elements)
    ranks = [len(koszul_basis(d, k)) for k in range(d + 1)]
    diffs = []
    for k in range(d):
        src = koszul_basis(d, k)
        tgt = {S: i for i, S in enumerate(koszul_basis(d, k + 1))}
        mat = [[ring.zero() for _ in src] for _ in tgt]
        for col, S in enumerate(src):
            for j in range(d):
                if j in S:
                    continue
                T = tuple(sorted(S + (j,)))
                sign = koszul_sign(j, S)
                val = elements[j] if sign == 1 else ring.neg(elements[j])
                row = tgt[T]
                mat[row][col] = ring.add(mat[row][col], val)
        diffs.append(mat)
    return ChainComplex(ring, lo, ranks, diffs)


@dataclass(frozen=True)
class KoszulSummand:
    """Symbolic Koszul data: ring, weight elements, grading vector, twist tag."""

    ring: Any
    elements: tuple
    grading: tuple = ()
    twist: int = 0

    def __post_init__(self):
        if self.grading and len(self.grading) != len(self.elements):
            raise ValueError("grading length must match the number of elements")

    @property
    def dim(self) -> int:
        return len(self.elements)

    def realize(self, lo: int = 0) -> ChainComplex:
        return koszul(self.ring, list(self.elements), lo)


def tensor_product(X: ChainComplex, Y: ChainComplex) -> ChainComplex:
    """Tensor product with the left-factor sign rule d(x@y) = dx@y + (-1)^|x| x@dy.

    Degree-k basis enumerates (i, a, b) with i the X-degree, a and b the
    factor basis indices, ordered by i then a then b.
    """
    if X.ring != Y.ring:
        raise ValueError("mixed rings")
    R = X.ring
    lo = X.lo + Y.lo
    hi = X.hi + Y.hi

    def basis(k):
        out = []
        for i in X.degrees():
            j = k - i
            if Y.lo <= j <= Y.hi:
                for a in range(X.rank(i)):
                    for b in range(Y.rank(j)):
                        out.append((i, a, b))
        return out

    ranks = [len(basis(k)) for k in range(lo, hi + 1)]
    diffs = []
    for k in range(lo, hi):
        src = basis(k)
        tgt = {key: idx for idx, key in enumerate(basis(k + 1))}
        mat = [[R.zero() for _ in src] for _ in range(len(tgt))]
        for col, (i, a, b) in enumerate(src):
            j = k - i
            dX = X.diff(i)
            for a2 in range(X.rank(i + 1)):
                v = dX[a2][a]
                if not R.is_zero(v):
                    row = tgt[(i + 1, a2, b)]
                    mat[row][col] = R.add(mat[row][col], v)
            dY = Y.diff(j)
            for b2 in range(Y.rank(j + 1)):
                v = dY[b2][b]
                if not R.is_zero(v):
                    v = v if i % 2 == 0 else R.neg(v)
                    row = tgt[(i, a, b2)]
                    mat[row][col] = R.add(mat[row][col], v)
        diffs.append(mat)
    return ChainComplex(R, lo, ranks, diffs)


# ---------------------------------------------------------------------------
# homology
# ---------------------------------------------------------------------------

class HomologyPresentation:
    """Per-degree free rank plus torsion divisors (chain order over Z)."""

    def __init__(self, ring, data: dict[int, tuple[int, list]]):
        self.ring = ring
        self.data = {
            i: (free, list(tors))
            for i, (free, tors) in sorted(data.items())
            if free or tors
        }

    def free_rank(self, i: int) -> int:
        return self.data.get(i, (0, []))[0]

    def torsion(self, i: int) -> list:
        return self.data.get(i, (0, []))[1]

    def degrees(self):
        return sorted(self.data)

    def is_zero(self) -> bool:
        return not self.data

    def __eq__(self, other):
        return (
            isinstance(other, HomologyPresentation)
            and self.data == other.data
        )

    def __repr__(self):
        parts = []
        for i, (free, tors) in self.data.items():
            frag = " + ".join(
                ([f"R^{free}"] if free else []) + [f"R/({t!r})" for t in tors]
            )
            parts.append(f"H^{i} = {frag}")
        return "Homology(" + "; ".join(parts) + ")" if parts else "Homology(0)"

    def to_json(self):
        out = {}
        for i, (free, tors) in self.data.items():
            out[str(i)] = {
                "free_rank": free,
                "torsion": [t if isinstance(t, str) else self.ring.entry_to_json(t) for t in tors],
            }
        return out


def chain_normalize(divisors: list[int]) -> list[int]:
    """Rewrite a multiset of cyclic orders in divisibility-chain form."""
    ds = [abs(d) for d in divisors if abs(d) != 1]
    for i in range(len(ds)):
        for j in range(i + 1, len(ds)):
            a, b = ds[i], ds[j]
            g = gcd(a, b)
            ds[i], ds[j] = g, a * b // g
    return sorted(d for d in ds if d != 1)


def homology_snf(K: ChainComplex) -> HomologyPresentation:
    """Exact homology over Z by Smith normal form, degree by degree."""
    if not isinstance(K.ring, ZRing):
        raise ValueError("the normal-form oracle works over Z")
    data = {}
    for i in K.degrees():
        n = K.rank(i)
        if n == 0:
            continue
        d_out = K.diff(i)
        cycles = la.kernel_basis(d_out, K.rank(i + 1), n) if K.rank(i + 1) else la.identity(n)
        d_in = K.diff(i - 1)
        boundary_gens = (
            [[d_in[r][c] for r in range(n)] for c in range(K.rank(i - 1))]
            if K.rank(i - 1)
            else []
        )
        free, tors = la.quotient_presentation(cycles, boundary_gens, n)
        data[i] = (free, chain_normalize(tors))
    return HomologyPresentation(K.ring, data)


# ---------------------------------------------------------------------------
# diagonal complexes
# ---------------------------------------------------------------------------

RANK1_FREE = "free"
TWO_TERM = "two"


@dataclass(frozen=True)
class DiagonalSummand:
    shift: int
    kind: str
    element: Any = None  # the regular element g of a two-term piece


@dataclass
class DiagonalComplex:
    """Finite sum of shifted rank-1 frees and two-term multiplication pieces."""

    ring: Any
    summands: list[DiagonalSummand] = field(default_factory=list)

    def __post_init__(self):
        for s in self.summands:
            if s.kind == TWO_TERM and self.ring.is_zero(s.element):
                raise ValueError("two-term pieces need a nonzero (regular) element")


def homology_diagonal(D: DiagonalComplex) -> HomologyPresentation:
    """Summand-wise homology: a free piece at shift s lands in H^s; a
    two-term piece on a regular g contributes R/(g) to H^(s+1)."""
    acc: dict[int, tuple[int, list]] = {}

    def bump(i, free=0, tor=None):
        f, t = acc.get(i, (0, []))
        if tor is not None:
            t = t + [tor]
        acc[i] = (f + free, t)

    for s in D.summands:
        if s.kind == RANK1_FREE:
            bump(s.shift, free=1)
        else:
            if D.ring.is_unit(s.element):
                continue
            bump(s.shift + 1, tor=D.ring.normalize_quotient(s.element))
    if isinstance(D.ring, ZRing):
        acc = {i: (f, chain_normalize(t)) for i, (f, t) in acc.items()}
    return HomologyPresentation(D.ring, acc)


def koszul_to_diagonal(K: KoszulSummand):
    """Decompose a Koszul complex whose weights are divisibility-comparable.

    All weights zero: the exterior algebra, binom(d, k) free pieces at
    shift k.  Some weight dividing all others: binom(d-1, k) two-term
    pieces on that weight at shift k.  Anything else: NOT_STRUCTURED.
    """
    R = K.ring
    d = K.dim
    nonzero = [g for g in K.elements if not R.is_zero(g)]
    if not nonzero:
        summands = [
            DiagonalSummand(k, RANK1_FREE)
            for k in range(d + 1)
            for _ in range(_binom(d, k))
        ]
        return DiagonalComplex(R, summands)
    g_min = None
    for g in nonzero:
        if all(R.is_zero(h) or R.exact_div(h, g) is not None for h in K.elements):
            g_min = g
            break
    if g_min is None:
        return NOT_STRUCTURED
    summands = [
        DiagonalSummand(k, TWO_TERM, g_min)
        for k in range(d)
        for _ in range(_binom(d - 1, k))
    ]
    return DiagonalComplex(R, summands)


def _binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


# ---------------------------------------------------------------------------
# reduction
# ---------------------------------------------------------------------------

def mod_f(K: ChainComplex, f) -> ChainComplex:
    """Reduce a complex of free modules into a quotient of its base ring.

    Supported quotients: Z -> Z/f for a nonzero integer, and the Laurent
    carrier modulo its theta or theta-tilde kernel generator (the residue
    rings of the two cyclotomic specializations).
    """
    R = K.ring
    if isinstance(R, ZRing):
        if not isinstance(f, int) or f == 0:
            raise ValueError("reduction over Z needs a nonzero integer")
        target = ZModRing(abs(f))
        return K.map_entries(target, lambda x: x % abs(f))
    if isinstance(R, LaurentRing):
        model = AinfModel(R.p, R.depth)
        if f == model.xi:
            target = OCRing(R.p, R.depth)
            return K.map_entries(target, target.model.reduce)
        if f == model.xi_tilde:
            target = OCRing(R.p, R.depth + 1)
            return K.map_entries(target, lambda x: target.model.reduce(x.with_depth(R.depth + 1)))
        raise ValueError("unsupported Laurent quotient; use xi or xi_tilde")
    raise ValueError(f"no quotient rule for ring {R!r}")
