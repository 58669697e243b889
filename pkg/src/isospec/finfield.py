"""Exact arithmetic in finite fields F_{p^n}.

Elements are polynomials over Z/p of degree < n, reduced modulo a fixed monic
irreducible polynomial.  The coefficient vector is stored low degree first.
Every element also has an integer *code* ``sum(c_i * p**i)``; codes are what
the group-level algorithms index with, and code order is the canonical
element order (lexicographic, leading coefficient first).

Additive (F_p-linear) self-maps of F_q are represented as linearized
polynomials ``T(x) = sum_j a_j x^(p^j)``.
"""

from __future__ import annotations

import functools
import itertools
from typing import Iterable, Sequence

import numpy as np
from sympy import isprime

from .errors import FieldMismatch, check_cap

# dense q x q operation tables are only built up to this size
TABLE_CAP = 2**11


# -- polynomials over Z/p: lists of ints, low degree first -------------------

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def poly_divmod(a, b, p):
    """Quotient and remainder of a by b over Z/p (b nonzero)."""
    a = _trim(a)
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(b[-1], -1, p)
    quot = [0] * max(len(a) - len(b) + 1, 0)
    rem = list(a)
    while len(rem) >= len(b):
        shift = len(rem) - len(b)
        c = rem[-1] * inv_lead % p
        quot[shift] = c
        for i, bi in enumerate(b):
            rem[shift + i] = (rem[shift + i] - c * bi) % p
        rem = _trim(rem)
    return _trim(quot), rem


def poly_mod(a, b, p):
    return poly_divmod(a, b, p)[1]


def poly_sub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim((x - y) % p for x, y in zip(a, b))


def poly_gcd(a, b, p):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, poly_mod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def poly_powmod(base, e, mod, p):
    result = [1]
    base = poly_mod(base, mod, p)
    while e:
        if e & 1:
            result = poly_mod(poly_mul(result, base, p), mod, p)
        base = poly_mod(poly_mul(base, base, p), mod, p)
        e >>= 1
    return result


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Irreducibility of a monic polynomial over Z/p.

    f of degree n is irreducible iff gcd(f, x^(p^k) - x) = 1 for k = 1..n//2.
    """
    f = _trim(f)
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    xpk = [0, 1]
    for _ in range(n // 2):
        xpk = poly_powmod(xpk, p, f, p)
        if len(poly_gcd(f, poly_sub(xpk, [0, 1], p), p)) > 1:
            return False
    return True


# -- fields -------------------------------------------------------------------

class FiniteField:
    """Descriptor of F_{p^n} with a fixed irreducible modulus.

    Construct through :func:`make_field`, which picks the modulus
    deterministically and caches the instance.
    """

    def __init__(self, p: int, n: int, modulus: Sequence[int]):
        self.p = p
        self.n = n
        self.q = p**n
        self.modulus = tuple(modulus)
        self._tables = None

    def __repr__(self):
        return f"F{self.q}" if self.n == 1 else f"F{self.q}[{_poly_str(self.modulus)}]"

    def __eq__(self, other):
        return (isinstance(other, FiniteField)
                and (self.p, self.n, self.modulus) == (other.p, other.n, other.modulus))

    def __hash__(self):
        return hash((self.p, self.n, self.modulus))

    def __reduce__(self):
        return make_field, (self.p, self.n)

    # element construction

    def __call__(self, value) -> FqElem:
        """Coerce an int (as an integer residue) or a coefficient sequence."""
        if isinstance(value, FqElem):
            if value.field != self:
                raise FieldMismatch(f"{value!r} is not an element of {self!r}")
            return value
        if isinstance(value, (int, np.integer)):
            return FqElem(self, (int(value) % self.p,) + (0,) * (self.n - 1))
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.n:
            coeffs = poly_mod(coeffs, self.modulus, self.p)
        return FqElem(self, tuple(coeffs) + (0,) * (self.n - len(coeffs)))

    def from_code(self, code: int) -> FqElem:
        if not 0 <= code < self.q:
            raise ValueError(f"code {code} out of range for {self!r}")
        coeffs = []
        for _ in range(self.n):
            code, c = divmod(code, self.p)
            coeffs.append(c)
        return FqElem(self, tuple(coeffs))

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    @property
    def gen(self):
        """The class of x (a primitive element is not guaranteed)."""
        return self([0, 1])

    def elements(self):
        """All elements in canonical (code) order."""
        return [self.from_code(c) for c in range(self.q)]

    def basis(self):
        """The monomial F_p-basis 1, x, ..., x^(n-1)."""
        return [self([0] * i + [1]) for i in range(self.n)]

    # dense tables over codes, used by the group-level algorithms

    def tables(self):
        """``(add, mul, neg, inv)`` as numpy arrays indexed by codes.

        ``inv[0]`` is set to 0.
        """
        if self._tables is None:
            check_cap(self.q, TABLE_CAP, "field operation table")
            self._tables = _build_tables(self)
        return self._tables

    @property
    def add_table(self):
        return self.tables()[0]

    @property
    def mul_table(self):
        return self.tables()[1]

    @property
    def neg_table(self):
        return self.tables()[2]

    @property
    def inv_table(self):
        return self.tables()[3]

    def frobenius_table(self, j: int = 1):
        """Codes of x^(p^j) for every code x."""
        mul = self.mul_table
        table = np.arange(self.q)
        for _ in range(j % self.n if self.n > 1 else 0):
            out = np.ones(self.q, dtype=table.dtype)
            base = table.copy()
            e = self.p
            while e:
                if e & 1:
                    out = mul[out, base]
                base = mul[base, base]
                e >>= 1
            table = out
        return table


def _build_tables(F: FiniteField):
    p, n, q = F.p, F.n, F.q
    codes = np.arange(q)
    digits = np.stack([(codes // p**i) % p for i in range(n)], axis=1)
    weights = p ** np.arange(n)

    def encode(d):
        return (d % p) @ weights

    add = encode(digits[:, None, :] + digits[None, :, :])
    neg = encode(-digits)

    # xb[i] = digits of x^i * b for every b, reduced modulo the modulus
    mod = np.array(F.modulus[:n])
    xb = [digits]
    for _ in range(1, n):
        prev = xb[-1]
        lead = prev[:, n - 1:n]
        shifted = np.concatenate([np.zeros((q, 1), dtype=prev.dtype), prev[:, :n - 1]], axis=1)
        xb.append((shifted - lead * mod[None, :]) % p)
    mul = np.empty((q, q), dtype=np.int64)
    for a in range(q):
        acc = np.zeros((q, n), dtype=np.int64)
        for i in range(n):
            if digits[a, i]:
                acc += digits[a, i] * xb[i]
        mul[a] = encode(acc)
    one = 1
    inv = np.zeros(q, dtype=np.int64)
    rows, cols = np.nonzero(mul == one)
    inv[rows] = cols
    return add, mul, neg, inv


@functools.lru_cache(maxsize=None)
def _lex_smallest_irreducible(p: int, n: int):
    # candidates x^n + c_{n-1} x^{n-1} + ... + c_0 in lexicographic order of (c_0, c_1, ...)
    for tail in itertools.product(range(p), repeat=n):
        f = list(tail) + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


@functools.lru_cache(maxsize=None)
def _make_field(p, n):
    return FiniteField(p, n, _lex_smallest_irreducible(p, n))


def make_field(p: int, n: int = 1, cap: int | None = None) -> FiniteField:
    """Return the field F_{p^n}.

    The modulus is the lexicographically smallest monic irreducible polynomial
    of degree n (coefficients compared from the constant term upward), so the
    result is the same on every run.
    """
    p, n = int(p), int(n)
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if n < 1:
        raise ValueError("extension degree must be at least 1")
    check_cap(p**n, cap, "field")
    return _make_field(p, n)


def field_of_order(q: int, cap: int | None = None) -> FiniteField:
    """Field of order q; raises ValueError if q is not a prime power."""
    q = int(q)
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            break
    n, r = 0, q
    while r % p == 0:
        r //= p
        n += 1
    if r != 1 or not isprime(p):
        raise ValueError(f"{q} is not a prime power")
    return make_field(p, n, cap)


def _poly_str(coeffs):
    terms = []
    for i, c in reversed(list(enumerate(coeffs))):
        if not c:
            continue
        mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
        if not mono:
            terms.append(str(c))
        else:
            terms.append(mono if c == 1 else f"{c}{mono}")
    return " + ".join(terms) or "0"


class FqElem:
    """An element of a finite field; immutable."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FiniteField, coeffs: tuple):
        if len(coeffs) != field.n or any(not 0 <= c < field.p for c in coeffs):
            raise ValueError(f"invalid coefficient vector {coeffs} for {field!r}")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("FqElem is immutable")

    @property
    def code(self) -> int:
        p = self.field.p
        return sum(c * p**i for i, c in enumerate(self.coeffs))

    def __repr__(self):
        return _poly_str(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field(other)
        return isinstance(other, FqElem) and self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field.q, self.coeffs))

    def __lt__(self, other):
        self._check(other)
        return self.code < other.code

    def __le__(self, other):
        return self == other or self < other

    def _check(self, other):
        if not isinstance(other, FqElem) or other.field != self.field:
            raise FieldMismatch(f"cannot combine {self.field!r} with {getattr(other, 'field', other)!r}")

    def _coerce(self, other):
        if isinstance(other, int):
            return self.field(other)
        self._check(other)
        return other

    def __bool__(self):
        return any(self.coeffs)

    def __add__(self, other):
        other = self._coerce(other)
        p = self.field.p
        return FqElem(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FqElem(self.field, tuple(-a % p for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        F = self.field
        prod = poly_mod(poly_mul(_trim(self.coeffs), _trim(other.coeffs), F.p), F.modulus, F.p)
        return FqElem(F, tuple(prod) + (0,) * (F.n - len(prod)))

    __rmul__ = __mul__

    def inverse(self):
        if not self:
            raise ZeroDivisionError("inverse of zero")
        # a^(q-2) = a^-1 in F_q*
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result


def fq_arith(field: FiniteField, op: str, *operands):
    """Dispatch one of ``add, sub, mul, neg, inv, pow`` on field elements.

    For ``pow`` the second operand is a nonnegative integer exponent.
    """
    if op == "pow":
        a, e = operands
        if e < 0:
            raise ValueError("pow takes a nonnegative exponent")
        return field(a) ** int(e)
    args = [field(a) for a in operands]
    if op == "add":
        return args[0] + args[1]
    if op == "sub":
        return args[0] - args[1]
    if op == "mul":
        return args[0] * args[1]
    if op == "neg":
        return -args[0]
    if op == "inv":
        return args[0].inverse()
    raise ValueError(f"unknown field operation {op!r}")


# -- linearized polynomials ---------------------------------------------------

class AdditiveMap:
    """The F_p-linear map ``x -> sum_j a_j * x^(p^j)`` on F_q."""

    __slots__ = ("field", "coeffs", "_table")

    def __init__(self, field: FiniteField, coeffs: Iterable):
        coeffs = tuple(field(a) for a in coeffs)
        if len(coeffs) != field.n:
            raise ValueError(f"expected {field.n} coefficients, got {len(coeffs)}")
        self.field = field
        self.coeffs = coeffs
        self._table = None

    @classmethod
    def zero(cls, field):
        return cls(field, [0] * field.n)

    @classmethod
    def multiplication(cls, field, c):
        return cls(field, [c] + [0] * (field.n - 1))

    @classmethod
    def frobenius(cls, field, j=1):
        coeffs = [0] * field.n
        coeffs[j % field.n] = 1
        return cls(field, coeffs)

    def __repr__(self):
        terms = [f"({a})x^{self.field.p}^{j}" for j, a in enumerate(self.coeffs) if a]
        return "T[" + (" + ".join(terms) or "0") + "]"

    def __eq__(self, other):
        return isinstance(other, AdditiveMap) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        return AdditiveMap(self.field, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        return AdditiveMap(self.field, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __call__(self, x: FqElem) -> FqElem:
        x = self.field(x)
        out = self.field.zero
        power = x
        for a in self.coeffs:
            out = out + a * power
            power = power ** self.field.p
        return out

    def is_multiplication(self) -> bool:
        return not any(self.coeffs[1:])

    def table(self):
        """Codes of T(x) for x in code order."""
        if self._table is None:
            F = self.field
            add, mul = F.add_table, F.mul_table
            out = np.zeros(F.q, dtype=np.int64)
            for j, a in enumerate(self.coeffs):
                if a:
                    out = add[out, mul[a.code, F.frobenius_table(j)]]
            self._table = out
        return self._table


def enumerate_additive_maps(field: FiniteField, fix_a0_zero: bool = False,
                            cap: int | None = None) -> list[AdditiveMap]:
    """All additive maps of F_q (p^(n^2) of them), or those with a_0 = 0.

    Order: coefficient codes ``(a_0, ..., a_{n-1})`` lexicographically.
    """
    check_cap(field.q, cap, "field")
    free = field.n - 1 if fix_a0_zero else field.n
    check_cap(field.q**free, cap, "additive map family")
    elems = field.elements()
    zero = (field.zero,) if fix_a0_zero else None
    out = []
    for tail in itertools.product(elems, repeat=free):
        coeffs = zero + tail if fix_a0_zero else tail
        out.append(AdditiveMap(field, coeffs))
    return out
