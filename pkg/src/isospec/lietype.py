"""Root subgroups of SL_3(F_q) and Sp_4(F_q) and orders of Chevalley groups.

The unipotent group generated by two root subgroups X_r, X_s whose
commutator lands in a third root subgroup X_c is checked, by brute force, to
be a Heisenberg group.  Realizations used here:

* A_2 in SL_3: x_a(t) = I + t E12, x_b(t) = I + t E23, center X_{a+b} = I + t E13.
* B_2 in Sp_4, form J = antidiag(1, 1, -1, -1):
  x_a(t) = I + t (E12 - E34)  (short root a),
  x_{a+b}(t) = I + t (E13 + E24)  (short root a+b),
  x_{2a+b}(t) = I + t E14  (long root, the center).
  With these signs [x_a(s), x_{a+b}(t)] = x_{2a+b}(2st).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IsospecError, check_cap
from .finfield import FiniteField
from .heisenberg import HeisenbergGroup

SL = "special linear"
SP = "symplectic"

_SP4_FORM = ((0, 0, 0, 1), (0, 0, 1, 0), (0, -1, 0, 0), (-1, 0, 0, 0))


class MatrixGroupElem:
    """A d x d matrix over F_q stored as a tuple of entry codes (row major)."""

    __slots__ = ("field", "d", "codes", "tag")

    def __init__(self, field: FiniteField, codes, tag: str = SL):
        codes = tuple(int(c) for c in codes)
        d = int(round(len(codes) ** 0.5))
        if d * d != len(codes):
            raise ValueError("matrix must be square")
        self.field, self.d, self.codes, self.tag = field, d, codes, tag

    @classmethod
    def from_entries(cls, field, rows, tag=SL):
        return cls(field, [field(v).code for row in rows for v in row], tag)

    @property
    def entries(self):
        F, d = self.field, self.d
        return tuple(tuple(F.from_code(self.codes[i * d + j]) for j in range(d)) for i in range(d))

    def array(self):
        return np.array(self.codes, dtype=np.int64).reshape(self.d, self.d)

    def __eq__(self, other):
        return isinstance(other, MatrixGroupElem) and self.codes == other.codes and self.field == other.field

    def __hash__(self):
        return hash(self.codes)

    def __lt__(self, other):
        return self.codes < other.codes

    def __mul__(self, other):
        prod = batched_matmul(self.field, self.array()[None], other.array()[None])[0]
        return MatrixGroupElem(self.field, prod.ravel(), self.tag)

    def __repr__(self):
        return f"MatrixGroupElem({[[str(v) for v in row] for row in self.entries]})"

    def determinant(self):
        return _det([list(row) for row in self.entries])

    def is_symplectic(self) -> bool:
        J = MatrixGroupElem.from_entries(self.field, _SP4_FORM)
        return _transpose(self) * J * self == J


def _transpose(M):
    d = M.d
    return MatrixGroupElem(M.field, [M.codes[j * d + i] for i in range(d) for j in range(d)], M.tag)


def _det(rows):
    # cofactor expansion; matrices here are at most 4 x 4
    if len(rows) == 1:
        return rows[0][0]
    total = rows[0][0].field.zero
    for j, a in enumerate(rows[0]):
        if a:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            term = a * _det(minor)
            total = total + term if j % 2 == 0 else total - term
    return total


def batched_matmul(field: FiniteField, A, B):
    """Products A[i] @ B[i] over F_q for stacks of coded matrices (broadcasting)."""
    add, mul = field.add_table, field.mul_table
    A, B = np.asarray(A), np.asarray(B)
    d = A.shape[-1]
    out = mul[A[..., :, 0, None], B[..., None, 0, :]]
    for k in range(1, d):
        out = add[out, mul[A[..., :, k, None], B[..., None, k, :]]]
    return out


def _unipotent(field, d, positions, t, tag):
    """I + t * sum(sign * E_ij) for (i, j, sign) in positions (1-based)."""
    rows = [[field(int(i == j)) for j in range(d)] for i in range(d)]
    for i, j, sign in positions:
        rows[i - 1][j - 1] = field(sign) * t
    return MatrixGroupElem.from_entries(field, rows, tag)


@dataclass(frozen=True)
class RootSystemPair:
    """Two root subgroups and their commutator subgroup inside one group."""

    tag: str
    d: int
    first: tuple   # positions of x_first
    second: tuple  # positions of x_second
    center: tuple  # positions of the commutator root subgroup


A2_PAIR = RootSystemPair(SL, 3, ((1, 2, 1),), ((2, 3, 1),), ((1, 3, 1),))
B2_PAIR = RootSystemPair(SP, 4, ((1, 2, 1), (3, 4, -1)), ((1, 3, 1), (2, 4, 1)), ((1, 4, 1),))


def root_element(field, pair: RootSystemPair, which: str, t):
    return _unipotent(field, pair.d, getattr(pair, which), field(t), pair.tag)


def sl3_root_generators(field: FiniteField) -> list[MatrixGroupElem]:
    """{I + t E12} and {I + t E23} over all t, identity included in both."""
    return [root_element(field, A2_PAIR, w, t) for w in ("first", "second") for t in field.elements()]


def sp4_root_generators(field: FiniteField) -> list[MatrixGroupElem]:
    """The root subgroups X_a and X_{a+b} of Sp_4 (a short, b long)."""
    if field.p == 2:
        raise IsospecError("the B2 realization needs odd characteristic")
    return [root_element(field, B2_PAIR, w, t) for w in ("first", "second") for t in field.elements()]


def generate_closure(gens, cap: int | None = None) -> list[MatrixGroupElem]:
    """Breadth-first closure of a finite set of invertible matrices, sorted."""
    gens = list(gens)
    if not gens:
        raise ValueError("no generators")
    F, tag, d = gens[0].field, gens[0].tag, gens[0].d
    identity = tuple(int(i == j) for i in range(d) for j in range(d))
    gen_arr = np.unique(np.array([g.codes for g in gens], dtype=np.int64), axis=0).reshape(-1, d, d)
    seen = {identity}
    frontier = [identity]
    for g in gen_arr:
        key = tuple(g.ravel().tolist())
        if key not in seen:
            seen.add(key)
            frontier.append(key)
    limit = cap if cap is not None else None
    while frontier:
        check_cap(len(seen), limit, "matrix group closure")
        cur = np.array(frontier, dtype=np.int64).reshape(-1, 1, d, d)
        prods = batched_matmul(F, cur, gen_arr[None]).reshape(-1, d * d)
        frontier = []
        for row in np.unique(prods, axis=0):
            key = tuple(row.tolist())
            if key not in seen:
                seen.add(key)
                frontier.append(key)
    check_cap(len(seen), limit, "matrix group closure")
    return [MatrixGroupElem(F, c, tag) for c in sorted(seen)]


@dataclass
class EmbeddingCertificate:
    field: FiniteField
    tag: str
    generated_order: int
    isomorphism: bool
    structure_constant: int | None = None
    map_table: dict | None = None
    counterexample: tuple | None = None
    pairs_checked: int = 0
    exhaustive: bool = True
    center_ok: bool = False

    def summary(self) -> dict:
        out = {
            "field": repr(self.field), "q": self.field.q, "ambient": self.tag,
            "generated_order": self.generated_order, "isomorphism": self.isomorphism,
            "structure_constant": self.structure_constant, "pairs_checked": self.pairs_checked,
            "exhaustive": self.exhaustive, "center_in_center": self.center_ok,
        }
        if self.counterexample is not None:
            out["counterexample"] = [repr(c) for c in self.counterexample]
        return out


def structure_constant(field: FiniteField, pair: RootSystemPair) -> int:
    """kappa with [x_first(1), x_second(1)] = x_center(kappa), as an integer residue."""
    a = root_element(field, pair, "first", 1)
    b = root_element(field, pair, "second", 1)
    ainv = root_element(field, pair, "first", -1)
    binv = root_element(field, pair, "second", -1)
    comm = a * b * ainv * binv
    for k in range(field.p):
        if comm == root_element(field, pair, "center", k):
            return k
    raise IsospecError("commutator is not in the center root subgroup")


def _pair_for(U) -> RootSystemPair:
    return A2_PAIR if U[0].tag == SL and U[0].d == 3 else B2_PAIR


def heisenberg_map(field: FiniteField, pair: RootSystemPair):
    """Coded matrices phi(x, y, z) = x_second(z) x_center(kappa y) x_first(x), by Heisenberg code.

    With the Heisenberg law (x,y,z)(x',y',z') = (x+x', y+y'+x z', z+z'), this
    ordering is a homomorphism because x_first(x) x_second(z') =
    x_second(z') x_first(x) x_center(kappa x z').
    """
    kappa = structure_constant(field, pair)
    if kappa % field.p == 0:
        raise IsospecError("structure constant vanishes in this characteristic")
    F, d = field, pair.d
    els = F.elements()
    first = np.array([root_element(F, pair, "first", t).codes for t in els]).reshape(-1, d, d)
    second = np.array([root_element(F, pair, "second", t).codes for t in els]).reshape(-1, d, d)
    center = np.array([root_element(F, pair, "center", F(kappa) * t).codes for t in els]).reshape(-1, d, d)
    G = HeisenbergGroup(F)
    x, y, z = G.split(G.codes())
    phi = batched_matmul(F, batched_matmul(F, second[z], center[y]), first[x])
    return kappa, G, phi


def heisenberg_iso_check(U, field: FiniteField, sample_cap: int = 9) -> EmbeddingCertificate:
    """Certify that U is a Heisenberg group via the explicit map phi.

    phi is checked to be a homomorphism on every pair (q <= ``sample_cap``) or
    on a fixed deterministic subset of pairs, and to be a bijection onto U.
    U itself is also checked for closure, which catches corrupted inputs.
    """
    U = list(U)
    q = field.q
    if len(U) != q**3:
        raise IsospecError(f"|U| = {len(U)} but q^3 = {q**3}")
    pair = _pair_for(U)
    kappa, G, phi = heisenberg_map(field, pair)
    d = pair.d
    cert = EmbeddingCertificate(field, pair.tag, len(U), False, kappa)
    flat = phi.reshape(G.order, d * d)
    ucodes = {u.codes for u in U}
    images = [tuple(r.tolist()) for r in flat]
    cert.map_table = {i: images[i] for i in range(G.order)}

    # bijection onto U
    if len(set(images)) != G.order or set(images) != ucodes:
        missing = sorted(set(images) - ucodes)
        extra = sorted(ucodes - set(images))
        cert.counterexample = (
            MatrixGroupElem(field, missing[0], pair.tag) if missing else None,
            MatrixGroupElem(field, extra[0], pair.tag) if extra else None,
        )
        return cert

    # homomorphism phi(g) phi(h) = phi(gh)
    exhaustive = q <= sample_cap
    cert.exhaustive = exhaustive
    rows = range(G.order) if exhaustive else range(0, G.order, max(1, G.order // 64))
    cols = np.arange(G.order) if exhaustive else np.arange(0, G.order, max(1, G.order // 64))
    checked = 0
    for g in rows:
        lhs = batched_matmul(field, phi[g][None], phi[cols])
        rhs = phi[G.mul(g, cols)]
        bad = np.flatnonzero((lhs != rhs).reshape(len(cols), -1).any(axis=1))
        checked += len(cols)
        if bad.size:
            cert.pairs_checked = checked
            cert.counterexample = (G.decode(g), G.decode(int(cols[bad[0]])))
            return cert
    cert.pairs_checked = checked

    # closure of U (guards against a U that merely has the right size)
    uarr = np.array(sorted(ucodes), dtype=np.int64).reshape(-1, d, d)
    for i in range(0, len(uarr), max(1, len(uarr) // 64) if not exhaustive else 1):
        prods = batched_matmul(field, uarr[i][None], uarr).reshape(len(uarr), -1)
        for row in prods:
            key = tuple(row.tolist())
            if key not in ucodes:
                cert.counterexample = (MatrixGroupElem(field, uarr[i].ravel(), pair.tag),
                                       MatrixGroupElem(field, key, pair.tag))
                return cert

    # y -> phi(0, y, 0) lands in the center of U
    central = phi[G.join(0, np.arange(q), 0)]
    cert.center_ok = bool(all(
        (batched_matmul(field, c[None], uarr) == batched_matmul(field, uarr, c[None])).all()
        for c in central))
    cert.isomorphism = cert.center_ok
    return cert


def embedding_certificate(type_label: str, field: FiniteField, cap: int | None = None) -> EmbeddingCertificate:
    """Generate U from the root subgroups for A2 or B2 and certify it."""
    label = type_label.upper()
    if label == "A2":
        gens = sl3_root_generators(field)
    elif label in ("B2", "C2"):
        gens = sp4_root_generators(field)
    else:
        raise IsospecError(f"no explicit root-subgroup realization for {type_label}")
    U = generate_closure(gens, cap)
    if len(U) != field.q**3:
        return EmbeddingCertificate(field, gens[0].tag, len(U), False)
    return heisenberg_iso_check(U, field)


# -- Chevalley group orders ---------------------------------------------------

_EXCEPTIONAL = {
    "E6": (1, 4, 5, 7, 8, 11),
    "E7": (1, 5, 7, 9, 11, 13, 17),
    "E8": (1, 7, 11, 13, 17, 19, 23, 29),
    "F4": (1, 5, 7, 11),
    "G2": (1, 5),
}


def exponents(type_: str, rank: int | None = None) -> tuple[int, ...]:
    """Lie exponents m_1..m_r of a simple root system."""
    t = type_.upper()
    if t in _EXCEPTIONAL:
        exps = _EXCEPTIONAL[t]
        if rank is not None and rank != len(exps):
            raise IsospecError(f"{t} has rank {len(exps)}, not {rank}")
        return exps
    if t in ("E", "F", "G") and rank is not None:
        return exponents(f"{t}{rank}")
    if rank is None or rank < 1:
        raise IsospecError(f"type {type_} needs a positive rank")
    if t == "A":
        return tuple(range(1, rank + 1))
    if t in ("B", "C"):
        if rank < 2:
            raise IsospecError(f"{t}{rank} is not a separate type (use A1)")
        return tuple(range(1, 2 * rank, 2))
    if t == "D":
        if rank < 4:
            raise IsospecError("D_n needs n >= 4")
        return tuple(sorted(tuple(range(1, 2 * rank - 2, 2)) + (rank - 1,)))
    raise IsospecError(f"unsupported type {type_}")


def chevalley_order(type_: str, rank: int | None, q: int) -> int:
    """q^N * prod(q^(m_i + 1) - 1), N the number of positive roots."""
    exps = exponents(type_, rank)
    out = q ** sum(exps)
    for m in exps:
        out *= q ** (m + 1) - 1
    return out


def parse_type(label: str) -> tuple[str, int]:
    """'A2' -> ('A', 2); 'E6' -> ('E6', 6); 'G2' -> ('G2', 2)."""
    label = label.strip().upper()
    if label[:2] in _EXCEPTIONAL:
        return label[:2], len(_EXCEPTIONAL[label[:2]])
    if len(label) < 2 or not label[1:].isdigit():
        raise IsospecError(f"cannot parse group type {label!r}")
    return label[0], int(label[1:])
