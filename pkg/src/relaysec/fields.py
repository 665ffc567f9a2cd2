"""Exact arithmetic over GF(q) and GF(q^r), plus linear algebra over GF(q).

Prime-field elements are plain Python ints in ``[0, q)``; extension-field
elements carry their coefficient vector in the polynomial basis (lowest
degree first) together with a reference to their field.  Matrices over
GF(q) are integer numpy arrays reduced mod q.

Everything here is deterministic: the extension-field modulus is the
lexicographically first monic irreducible polynomial of the requested
degree, so GF(q^r) has one canonical representation per (q, r).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "PrimeField",
    "ExtField",
    "ExtFieldElement",
    "find_irreducible",
    "is_prime",
    "matrix_row_rank",
    "sample_matrix",
    "matrix_inverse",
    "complete_and_invert",
    "full_rank_fraction",
]


def is_prime(q: int) -> bool:
    """Deterministic trial-division primality test (q is small here)."""
    if q < 2:
        return False
    i = 2
    while i * i <= q:
        if q % i == 0:
            return False
        i += 1
    return True


# ---------------------------------------------------------------------------
# polynomial helpers over GF(q); coefficient lists are lowest-degree first
# ---------------------------------------------------------------------------


def _poly_trim(p: list[int]) -> list[int]:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _poly_mul(a: list[int], b: list[int], q: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % q
    return _poly_trim(out)


def _poly_mod(a: list[int], m: list[int], q: int) -> list[int]:
    """Remainder of a by monic m over GF(q)."""
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and any(a):
        lead = a[-1]
        if lead == 0:
            a.pop()
            continue
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - lead * mi) % q
        a = _poly_trim(a)
    return _poly_trim(a)


def _poly_is_irreducible(p: list[int], q: int) -> bool:
    """Exhaustive trial division by all monic polynomials of degree <= deg/2."""
    deg = len(p) - 1
    if deg == 1:
        return True
    if p[0] == 0:  # divisible by x
        return False
    for ddeg in range(1, deg // 2 + 1):
        for k in range(q**ddeg):
            div = _int_to_digits(k, q, ddeg) + [1]
            rem = _poly_mod(p, div, q)
            if rem == [0]:
                return False
    return True


def _int_to_digits(k: int, q: int, length: int) -> list[int]:
    digits = []
    for _ in range(length):
        digits.append(k % q)
        k //= q
    return digits


@lru_cache(maxsize=None)
def find_irreducible(q: int, r: int) -> tuple[int, ...]:
    """Lexicographically first monic irreducible polynomial of degree r over GF(q).

    Returned as a coefficient tuple of length r + 1, lowest degree first,
    leading coefficient 1.  Candidates are scanned in ascending order of the
    non-leading coefficient vector read as a base-q integer (constant term
    least significant), so the result is deterministic.
    """
    if not is_prime(q):
        raise ValueError(f"q={q} is not prime")
    if r < 1:
        raise ValueError(f"degree must be >= 1, got {r}")
    for k in range(q**r):
        cand = _int_to_digits(k, q, r) + [1]
        if _poly_is_irreducible(cand, q):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # cannot happen


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------


class PrimeField:
    """GF(q) for prime q; elements are ints in [0, q)."""

    def __init__(self, q: int):
        if not is_prime(q):
            raise ValueError(f"q={q} is not prime")
        self.q = q

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.q

    def neg(self, a: int) -> int:
        return (-a) % self.q

    def inv(self, a: int) -> int:
        """Multiplicative inverse; raises ZeroDivisionError for a = 0."""
        a %= self.q
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return pow(a, self.q - 2, self.q)

    def elements(self) -> range:
        return range(self.q)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("PrimeField", self.q))

    def __repr__(self) -> str:
        return f"PrimeField({self.q})"


class ExtField:
    """GF(q^r) in the polynomial basis modulo a monic irreducible polynomial.

    If no modulus is given, the canonical (lex-first) irreducible is used so
    that two ExtField(q, r) instances are interchangeable.
    """

    def __init__(self, q: int, r: int, modulus: tuple[int, ...] | None = None):
        self.base = PrimeField(q)
        self.q = q
        self.r = r
        if modulus is None:
            modulus = find_irreducible(q, r)
        modulus = tuple(int(c) % q for c in modulus)
        if len(modulus) != r + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree r")
        if not _poly_is_irreducible(list(modulus), q):
            raise ValueError(f"modulus {modulus} is reducible over GF({q})")
        self.modulus = modulus
        self.order = q**r

    # -- construction -------------------------------------------------

    def element(self, coeffs) -> "ExtFieldElement":
        coeffs = tuple(int(c) % self.q for c in coeffs)
        if len(coeffs) != self.r:
            raise ValueError(f"need {self.r} coefficients, got {len(coeffs)}")
        return ExtFieldElement(self, coeffs)

    def zero(self) -> "ExtFieldElement":
        return ExtFieldElement(self, (0,) * self.r)

    def one(self) -> "ExtFieldElement":
        return ExtFieldElement(self, (1,) + (0,) * (self.r - 1))

    def x(self) -> "ExtFieldElement":
        """The generator of the polynomial basis (requires r >= 2)."""
        if self.r < 2:
            raise ValueError("x is not a basis element when r == 1")
        return ExtFieldElement(self, (0, 1) + (0,) * (self.r - 2))

    def from_int(self, k: int) -> "ExtFieldElement":
        """Inverse of to_int: base-q digits become coefficients."""
        if not 0 <= k < self.order:
            raise ValueError(f"index {k} out of range [0, {self.order})")
        return ExtFieldElement(self, tuple(_int_to_digits(k, self.q, self.r)))

    def to_int(self, a: "ExtFieldElement") -> int:
        self._check(a)
        k = 0
        for c in reversed(a.coeffs):
            k = k * self.q + c
        return k

    def elements(self):
        return (self.from_int(k) for k in range(self.order))

    def random_element(self, rng: np.random.Generator) -> "ExtFieldElement":
        return self.from_int(int(rng.integers(0, self.order)))

    # -- arithmetic ----------------------------------------------------

    def _check(self, a: "ExtFieldElement"):
        if a.field != self:
            raise ValueError("element belongs to a different field")

    def add(self, a, b) -> "ExtFieldElement":
        self._check(a), self._check(b)
        return ExtFieldElement(
            self, tuple((x + y) % self.q for x, y in zip(a.coeffs, b.coeffs))
        )

    def sub(self, a, b) -> "ExtFieldElement":
        self._check(a), self._check(b)
        return ExtFieldElement(
            self, tuple((x - y) % self.q for x, y in zip(a.coeffs, b.coeffs))
        )

    def neg(self, a) -> "ExtFieldElement":
        self._check(a)
        return ExtFieldElement(self, tuple((-x) % self.q for x in a.coeffs))

    def mul(self, a, b) -> "ExtFieldElement":
        self._check(a), self._check(b)
        prod = _poly_mul(list(a.coeffs), list(b.coeffs), self.q)
        rem = _poly_mod(prod, list(self.modulus), self.q)
        rem = rem + [0] * (self.r - len(rem))
        return ExtFieldElement(self, tuple(rem[: self.r]))

    def pow(self, a, e: int) -> "ExtFieldElement":
        """a**e by square-and-multiply; a**0 = 1."""
        if e < 0:
            raise ValueError("exponent must be nonnegative")
        result = self.one()
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a) -> "ExtFieldElement":
        self._check(a)
        if all(c == 0 for c in a.coeffs):
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return self.pow(a, self.order - 2)

    # -- integer-indexed operation tables (used by the exhaustive oracles) --

    def tables(self) -> dict[str, np.ndarray]:
        """ADD/SUB/MUL/NEG tables indexed by to_int encoding."""
        n = self.order
        elems = [self.from_int(k) for k in range(n)]
        add = np.zeros((n, n), dtype=np.int64)
        mul = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                add[i, j] = self.to_int(self.add(elems[i], elems[j]))
                mul[i, j] = self.to_int(self.mul(elems[i], elems[j]))
        neg = np.array(
            [self.to_int(self.neg(e)) for e in elems], dtype=np.int64
        )
        sub = add[:, neg]
        return {"add": add, "sub": sub, "mul": mul, "neg": neg}

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExtField)
            and other.q == self.q
            and other.r == self.r
            and other.modulus == self.modulus
        )

    def __hash__(self) -> int:
        return hash(("ExtField", self.q, self.r, self.modulus))

    def __repr__(self) -> str:
        return f"ExtField(q={self.q}, r={self.r}, modulus={self.modulus})"


@dataclass(frozen=True)
class ExtFieldElement:
    """Element of GF(q^r): coefficient tuple, lowest degree first."""

    field: ExtField
    coeffs: tuple[int, ...]

    def __add__(self, other):
        return self.field.add(self, other)

    def __sub__(self, other):
        return self.field.sub(self, other)

    def __neg__(self):
        return self.field.neg(self)

    def __mul__(self, other):
        return self.field.mul(self, other)

    def __pow__(self, e: int):
        return self.field.pow(self, e)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __repr__(self) -> str:
        return f"<{self.coeffs} in GF({self.field.q}^{self.field.r})>"


# ---------------------------------------------------------------------------
# matrices over GF(q): plain int64 numpy arrays, entries reduced mod q
# ---------------------------------------------------------------------------


def matrix_row_rank(m: np.ndarray, q: int) -> int:
    """Row rank via Gaussian elimination over GF(q)."""
    field = PrimeField(q)
    a = np.array(m, dtype=np.int64) % q
    if a.ndim != 2:
        raise ValueError("matrix must be 2-D")
    rows, cols = a.shape
    rank = 0
    for col in range(cols):
        pivot = None
        for row in range(rank, rows):
            if a[row, col] != 0:
                pivot = row
                break
        if pivot is None:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        a[rank] = (a[rank] * field.inv(int(a[rank, col]))) % q
        for row in range(rows):
            if row != rank and a[row, col] != 0:
                a[row] = (a[row] - a[row, col] * a[rank]) % q
        rank += 1
        if rank == rows:
            break
    return rank


def sample_matrix(rng: np.random.Generator, rows: int, cols: int, q: int) -> np.ndarray:
    """i.i.d. uniform matrix over GF(q); deterministic given the rng state."""
    return rng.integers(0, q, size=(rows, cols), dtype=np.int64)


def matrix_inverse(m: np.ndarray, q: int) -> np.ndarray:
    """Inverse of a square matrix over GF(q) by Gauss-Jordan elimination."""
    field = PrimeField(q)
    a = np.array(m, dtype=np.int64) % q
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    aug = np.hstack([a, np.eye(n, dtype=np.int64)])
    for col in range(n):
        pivot = None
        for row in range(col, n):
            if aug[row, col] != 0:
                pivot = row
                break
        if pivot is None:
            raise ValueError("matrix is singular over GF(q)")
        aug[[col, pivot]] = aug[[pivot, col]]
        aug[col] = (aug[col] * field.inv(int(aug[col, col]))) % q
        for row in range(n):
            if row != col and aug[row, col] != 0:
                aug[row] = (aug[row] - aug[row, col] * aug[col]) % q
    return aug[:, n:]


def complete_and_invert(g: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Complete a full-row-rank r x N matrix to an invertible square one.

    Returns (g_prime, A) where g_prime is (N - r) x N, the stacked matrix
    [g_prime; g] is invertible, and A is its inverse.  The completion rows
    are standard basis vectors taken greedily in index order, so the result
    is deterministic.
    """
    g = np.array(g, dtype=np.int64) % q
    r, n = g.shape
    if matrix_row_rank(g, q) != r:
        raise ValueError("matrix does not have full row rank")
    basis_rows: list[np.ndarray] = []
    current = g
    rank = r
    for i in range(n):
        if rank == n:
            break
        e = np.zeros(n, dtype=np.int64)
        e[i] = 1
        cand = np.vstack([current, e])
        if matrix_row_rank(cand, q) == rank + 1:
            basis_rows.append(e)
            current = cand
            rank += 1
    g_prime = (
        np.array(basis_rows, dtype=np.int64)
        if basis_rows
        else np.zeros((0, n), dtype=np.int64)
    )
    stacked = np.vstack([g_prime, g])
    a = matrix_inverse(stacked, q)
    return g_prime, a


def full_rank_fraction(q: int, rows: int, cols: int) -> tuple[int, int]:
    """Exact count of full-row-rank rows x cols matrices over GF(q).

    Returns (full_rank_count, total_count) as exact integers:
    count = prod_{i=0}^{rows-1} (q^cols - q^i) when rows <= cols, else 0.
    """
    total = q ** (rows * cols)
    if rows > cols:
        return 0, total
    count = 1
    for i in range(rows):
        count *= q**cols - q**i
    return count, total
