"""The Heisenberg group H(F_q) and finite direct products of such groups.

Elements (x, y, z) stand for the unipotent matrix

    [[1, x, y],
     [0, 1, z],
     [0, 0, 1]]

so the group law is ``(x, y, z)(x', y', z') = (x + x', y + y' + x z', z + z')``.

Algorithms work on integer codes.  A Heisenberg element is coded as
``code(x) q^2 + code(y) q + code(z)`` and a tuple in a product group uses
mixed radix with the first factor most significant, so numeric code order
is the canonical (lexicographic) element order in both cases.
"""

from __future__ import annotations

import functools
import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import FieldMismatch, check_cap
from .finfield import AdditiveMap, FiniteField, FqElem, enumerate_additive_maps


@functools.total_ordering
@dataclass(frozen=True, eq=True)
class HeisElem:
    x: FqElem
    y: FqElem
    z: FqElem

    def __post_init__(self):
        if not (self.x.field == self.y.field == self.z.field):
            raise FieldMismatch("coordinates of a Heisenberg element must share a field")

    @property
    def field(self) -> FiniteField:
        return self.x.field

    def _key(self):
        return (self.x.code, self.y.code, self.z.code)

    def __lt__(self, other):
        if self.field != other.field:
            raise FieldMismatch("cannot compare elements over different fields")
        return self._key() < other._key()

    def __mul__(self, other):
        return group_law(self, other)

    def inverse(self):
        return HeisElem(-self.x, -self.y + self.x * self.z, -self.z)

    def matrix(self):
        F = self.field
        return ((F.one, self.x, self.y), (F.zero, F.one, self.z), (F.zero, F.zero, F.one))

    def __repr__(self):
        return f"({self.x}, {self.y}, {self.z})"


def group_law(a: HeisElem, b: HeisElem) -> HeisElem:
    if a.field != b.field:
        raise FieldMismatch(f"elements over {a.field!r} and {b.field!r}")
    return HeisElem(a.x + b.x, a.y + b.y + a.x * b.z, a.z + b.z)


def heis(field: FiniteField, x, y, z) -> HeisElem:
    """Convenience constructor coercing ints / coefficient lists."""
    return HeisElem(field(x), field(y), field(z))


# -- generic machinery over coded groups --------------------------------------

@dataclass(frozen=True)
class ConjugacyClass:
    representative: object
    size: int
    members: tuple  # sorted codes


class ClassTable:
    """Conjugacy classes of a coded group, ordered by (size, least member)."""

    def __init__(self, group, classes: list[tuple[int, ...]]):
        classes = sorted((tuple(sorted(c)) for c in classes), key=lambda c: (len(c), c[0]))
        self.group = group
        self.ambient_order = group.order
        self.classes = [ConjugacyClass(group.decode(c[0]), len(c), c) for c in classes]
        self.class_index = np.full(group.order, -1, dtype=np.int64)
        for i, c in enumerate(classes):
            self.class_index[list(c)] = i

    def __len__(self):
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def sizes(self):
        return [c.size for c in self.classes]

    def partition(self):
        return frozenset(frozenset(c.members) for c in self.classes)

    def class_of(self, element) -> int:
        return int(self.class_index[self.group.encode(element)])

    def __repr__(self):
        return f"ClassTable({self.group!r}, {len(self)} classes)"


class CodedGroup:
    """Shared algorithms for finite groups whose elements are coded 0..order-1.

    Subclasses provide ``order``, ``mul``, ``inv``, ``encode`` and ``decode``;
    ``mul`` and ``inv`` must broadcast over numpy integer arrays.  Code 0 is
    the identity.
    """

    order: int
    identity = 0

    def codes(self):
        return np.arange(self.order, dtype=np.int64)

    def elements(self):
        return [self.decode(c) for c in range(self.order)]

    def conj(self, g, h):
        """g h g^-1, broadcasting."""
        g = np.asarray(g)
        return self.mul(self.mul(g, h), self.inv(g))

    def closure(self, gens) -> tuple[int, ...]:
        """Sorted codes of the subgroup generated by ``gens``."""
        gens = np.unique(np.asarray(list(gens), dtype=np.int64))
        seen = np.zeros(self.order, dtype=bool)
        seen[0] = True
        seen[gens] = True
        frontier = np.flatnonzero(seen)
        while frontier.size and gens.size:
            new = np.unique(self.mul(frontier[:, None], gens[None, :]).ravel())
            new = new[~seen[new]]
            seen[new] = True
            frontier = new
        return tuple(int(c) for c in np.flatnonzero(seen))

    def is_subgroup(self, codes) -> bool:
        codes = np.asarray(list(codes), dtype=np.int64)
        if codes.size == 0 or 0 not in codes:
            return False
        member = np.zeros(self.order, dtype=bool)
        member[codes] = True
        prods = self.mul(codes[:, None], codes[None, :])
        return bool(member[prods].all() and member[self.inv(codes)].all())

    def brute_class_table(self) -> ClassTable:
        check_cap(self.order, None, "group")
        allg = self.codes()
        label = np.full(self.order, -1, dtype=np.int64)
        classes = []
        for h in range(self.order):
            if label[h] >= 0:
                continue
            orbit = np.unique(self.conj(allg, h))
            label[orbit] = len(classes)
            classes.append(tuple(int(c) for c in orbit))
        return ClassTable(self, classes)

    def is_symmetric(self, multiset) -> bool:
        s = [int(c) for c in multiset]
        return Counter(s) == Counter(int(c) for c in self.inv(np.asarray(s, dtype=np.int64)))


class HeisenbergGroup(CodedGroup):
    """H(F_q) with integer-coded elements."""

    def __init__(self, field: FiniteField, cap: int | None = None):
        check_cap(field.q**3, cap, "Heisenberg group")
        self.field = field
        self.q = field.q
        self.order = field.q**3
        self._add, self._mul, self._neg, _ = field.tables()

    def __repr__(self):
        return f"H({self.field!r})"

    def __eq__(self, other):
        return isinstance(other, HeisenbergGroup) and self.field == other.field

    def __hash__(self):
        return hash(("H", self.field))

    @staticmethod
    def element_mul(a, b):
        return group_law(a, b)

    @staticmethod
    def element_inv(a):
        return a.inverse()

    def split(self, codes):
        q = self.q
        codes = np.asarray(codes)
        return codes // (q * q), (codes // q) % q, codes % q

    def join(self, x, y, z):
        q = self.q
        return (np.asarray(x) * q + y) * q + z

    def encode(self, e: HeisElem) -> int:
        if e.field != self.field:
            raise FieldMismatch(f"{e!r} is not in {self!r}")
        return (e.x.code * self.q + e.y.code) * self.q + e.z.code

    def decode(self, code) -> HeisElem:
        x, y, z = (int(v) for v in self.split(int(code)))
        F = self.field
        return HeisElem(F.from_code(x), F.from_code(y), F.from_code(z))

    def mul(self, a, b):
        add, mul = self._add, self._mul
        x1, y1, z1 = self.split(a)
        x2, y2, z2 = self.split(b)
        return self.join(add[x1, x2], add[add[y1, y2], mul[x1, z2]], add[z1, z2])

    def inv(self, a):
        x, y, z = self.split(a)
        neg = self._neg
        return self.join(neg[x], self._add[neg[y], self._mul[x, z]], neg[z])

    def class_table(self, method: str = "brute") -> ClassTable:
        """Conjugacy classes, by exhaustive conjugation or by the closed form.

        Closed form: the q central singletons {(0, y, 0)} and, for each
        (x, z) != (0, 0), the class {(x, *, z)} of size q.
        """
        if method == "brute":
            return self.brute_class_table()
        if method != "formula":
            raise ValueError(f"unknown method {method!r}")
        q = self.q
        ys = np.arange(q)
        classes = [(int(self.join(0, y, 0)),) for y in range(q)]
        for x, z in itertools.product(range(q), repeat=2):
            if x or z:
                classes.append(tuple(int(c) for c in self.join(x, ys, z)))
        return ClassTable(self, classes)

    def generator_battery(self) -> dict[str, list[int]]:
        """Fixed symmetric generating multisets used for Schreier graphs.

        ``standard``: (b,0,0) and (0,0,b) for b in the monomial basis of F_q
        over F_p, with their inverses.  ``enriched``: standard plus the central
        element (0,1,0) and (1,0,1), with inverses.
        """
        F = self.field
        base = []
        for b in F.basis():
            base += [heis(F, b, 0, 0), heis(F, 0, 0, b)]
        extra = [heis(F, 0, 1, 0), heis(F, 1, 0, 1)]

        def sym(elems):
            out = []
            for e in elems:
                out += [self.encode(e), self.encode(e.inverse())]
            return out

        return {"standard": sym(base), "enriched": sym(base + extra)}

    def center(self) -> Subgroup:
        return Subgroup(self, tuple(int(c) for c in self.join(0, np.arange(self.q), 0)))


class ProductGroup(CodedGroup):
    """Direct product of Heisenberg groups; elements are tuples of HeisElem."""

    def __init__(self, factors: Sequence[HeisenbergGroup], cap: int | None = None):
        if not factors:
            raise ValueError("product of zero factors")
        order = 1
        for f in factors:
            order *= f.order
        check_cap(order, cap, "product group")
        self.factors = list(factors)
        self.order = order
        self.radices = [f.order for f in self.factors]
        self.weights = []
        w = 1
        for r in reversed(self.radices):
            self.weights.append(w)
            w *= r
        self.weights.reverse()

    def __repr__(self):
        return " x ".join(repr(f) for f in self.factors)

    def __eq__(self, other):
        return isinstance(other, ProductGroup) and self.factors == other.factors

    def __hash__(self):
        return hash(tuple(self.factors))

    def element_mul(self, a, b):
        return tuple(f.element_mul(x, y) for f, x, y in zip(self.factors, a, b))

    def element_inv(self, a):
        return tuple(x.inverse() for x in a)

    def split(self, codes):
        codes = np.asarray(codes)
        return [(codes // w) % r for w, r in zip(self.weights, self.radices)]

    def join(self, parts):
        out = 0
        for w, c in zip(self.weights, parts):
            out = out + np.asarray(c) * w
        return out

    def encode(self, elems) -> int:
        if len(elems) != len(self.factors):
            raise ValueError("wrong number of components")
        return int(self.join([f.encode(e) for f, e in zip(self.factors, elems)]))

    def decode(self, code):
        return tuple(f.decode(int(c)) for f, c in zip(self.factors, self.split(int(code))))

    def mul(self, a, b):
        return self.join([f.mul(x, y) for f, x, y in zip(self.factors, self.split(a), self.split(b))])

    def inv(self, a):
        return self.join([f.inv(x) for f, x in zip(self.factors, self.split(a))])

    def embed(self, i: int, code: int) -> int:
        """Code of the element with ``code`` in slot i and identity elsewhere."""
        return int(code) * self.weights[i]

    def class_table(self, method: str = "product") -> ClassTable:
        """Classes as products of factor classes, or by exhaustive conjugation."""
        if method == "brute":
            return self.brute_class_table()
        if method != "product":
            raise ValueError(f"unknown method {method!r}")
        tables = [f.class_table("formula") for f in self.factors]
        classes = []
        for combo in itertools.product(*(t.classes for t in tables)):
            grids = np.meshgrid(*(np.array(c.members) for c in combo), indexing="ij")
            classes.append(tuple(int(c) for c in self.join([g.ravel() for g in grids])))
        return ClassTable(self, classes)

    def generator_battery(self) -> dict[str, list[int]]:
        batteries = [f.generator_battery() for f in self.factors]
        out = {}
        for name in batteries[0]:
            out[name] = [self.embed(i, c) for i, b in enumerate(batteries) for c in b[name]]
        return out


# -- subgroups ----------------------------------------------------------------

@dataclass(frozen=True)
class Subgroup:
    """A subgroup given by the sorted tuple of its element codes."""

    group: CodedGroup
    codes: tuple

    def __post_init__(self):
        object.__setattr__(self, "codes", tuple(sorted(set(int(c) for c in self.codes))))

    @property
    def order(self) -> int:
        return len(self.codes)

    @property
    def elements(self):
        return [self.group.decode(c) for c in self.codes]

    @property
    def field(self):
        return getattr(self.group, "field", None)

    def __contains__(self, element):
        code = element if isinstance(element, (int, np.integer)) else self.group.encode(element)
        return int(code) in set(self.codes)

    def __repr__(self):
        return f"Subgroup(order={self.order}, in {self.group!r})"

    def is_valid(self) -> bool:
        return self.group.order % self.order == 0 and self.group.is_subgroup(self.codes)


def subgroup_from_map(T: AdditiveMap, group: HeisenbergGroup | None = None) -> Subgroup:
    """H_T = {(x, T(x), 0)}: the image of H_1 under (x, y, z) -> (x, y + T(x), z)."""
    group = group or HeisenbergGroup(T.field)
    if group.field != T.field:
        raise FieldMismatch("map and group are over different fields")
    xs = np.arange(group.q)
    H = Subgroup(group, tuple(int(c) for c in group.join(xs, T.table(), 0)))
    if H.order != group.q or not H.is_valid():
        raise AssertionError(f"H_T for {T!r} is not a subgroup of order q")
    return H


def shear(T: AdditiveMap, group: HeisenbergGroup):
    """Code table of the automorphism (x, y, z) -> (x, y + T(x), z)."""
    x, y, z = group.split(group.codes())
    return group.join(x, group._add[y, T.table()[x]], z)


def h1(group: HeisenbergGroup) -> Subgroup:
    return subgroup_from_map(AdditiveMap.zero(group.field), group)


def bgg_family(field: FiniteField, group: HeisenbergGroup | None = None,
               cap: int | None = None) -> list[Subgroup]:
    """The p^(n(n-1)) subgroups H_T, T additive with a_0 = 0."""
    group = group or HeisenbergGroup(field, cap)
    return [subgroup_from_map(T, group) for T in enumerate_additive_maps(field, True, cap)]


def product_group(factors: Sequence[FiniteField], cap: int | None = None) -> ProductGroup:
    order = 1
    for F in factors:
        order *= F.q**3
    check_cap(order, cap, "product group")
    return ProductGroup([HeisenbergGroup(F) for F in factors], cap)


def product_family(factor_families: Sequence[Sequence[Subgroup]],
                   group: ProductGroup | None = None, cap: int | None = None) -> list[Subgroup]:
    """All products H_1 x ... x H_r with H_i drawn from the i-th family."""
    if group is None:
        group = ProductGroup([fam[0].group for fam in factor_families], cap)
    count = 1
    for fam in factor_families:
        count *= len(fam)
    check_cap(count, cap, "product family")
    out = []
    for combo in itertools.product(*factor_families):
        grids = np.meshgrid(*(np.array(H.codes) for H in combo), indexing="ij")
        out.append(Subgroup(group, tuple(int(c) for c in group.join([g.ravel() for g in grids]))))
    return out
