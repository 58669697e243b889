"""Almost conjugacy, conjugator search and Schreier-graph spectra.

Two subgroups H1, H2 of a finite group G are almost conjugate when they meet
every conjugacy class of G in the same number of elements.  Right coset
graphs G/H1 and G/H2 built from the same symmetric generating multiset then
share their adjacency spectrum; here that is checked exactly by comparing
integer characteristic polynomials.
"""

from __future__ import annotations

import functools
import itertools
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from sympy import isprime, prevprime, primitive_root

from .errors import IsospecError, check_cap
from .heisenberg import ClassTable, CodedGroup, Subgroup
from .numfmt import decimal_str

SUBGROUP_ORACLE_CAP = 1024
CHARPOLY_CAP = 2048


@dataclass(frozen=True)
class Fingerprint:
    counts: tuple
    subgroup_order: int
    table: ClassTable = field(compare=False, repr=False)


def fingerprint(table: ClassTable, H: Subgroup) -> Fingerprint:
    """Intersection sizes of H with each conjugacy class in ``table``."""
    if H.group != table.group:
        raise IsospecError(f"{H!r} is not a subgroup of {table.group!r}")
    idx = table.class_index[np.asarray(H.codes)]
    counts = np.bincount(idx, minlength=len(table))
    return Fingerprint(tuple(int(c) for c in counts), H.order, table)


def almost_conjugate(f1: Fingerprint, f2: Fingerprint) -> bool:
    if f1.table.group != f2.table.group or len(f1.counts) != len(f2.counts):
        raise IsospecError("fingerprints taken against different class tables")
    return f1.counts == f2.counts


# -- conjugator search ---------------------------------------------------------

@dataclass(frozen=True)
class ConjugacyVerdict:
    conjugate: bool
    witness: object = None
    witness_code: int | None = None
    search_exhausted: bool = True
    note: str = ""


class ConjugateIndex:
    """Every conjugate g H g^-1 of one subgroup, with the least g producing it.

    Built by scanning all of G once; lookups against it are exhaustive
    conjugator searches.
    """

    def __init__(self, G: CodedGroup, H: Subgroup, cap: int | None = None, chunk: int = 1 << 20):
        check_cap(G.order, cap, "conjugator search")
        self.group = G
        self.subgroup = H
        h = np.asarray(H.codes, dtype=np.int64)
        step = max(1, chunk // max(h.size, 1))
        seen = {}
        for start in range(0, G.order, step):
            g = np.arange(start, min(start + step, G.order), dtype=np.int64)
            rows = np.sort(G.conj(g[:, None], h[None, :]), axis=1)
            uniq, first = np.unique(rows, axis=0, return_index=True)
            for row, i in zip(uniq, first):
                key = row.tobytes()
                if key not in seen:
                    seen[key] = int(g[i])
        self._least = seen

    def __len__(self):
        """Number of distinct conjugates (the index of the normaliser)."""
        return len(self._least)

    def witness(self, H2: Subgroup):
        key = np.asarray(H2.codes, dtype=np.int64).tobytes()
        return self._least.get(key)

    def verdict(self, H2: Subgroup) -> ConjugacyVerdict:
        if H2.order != self.subgroup.order:
            return ConjugacyVerdict(False, note="orders differ")
        g = self.witness(H2)
        if g is None:
            return ConjugacyVerdict(False)
        return ConjugacyVerdict(True, self.group.decode(g), g)


def find_conjugator(G: CodedGroup, H1: Subgroup, H2: Subgroup,
                    cap: int | None = None) -> ConjugacyVerdict:
    """Least g (in code order) with g H1 g^-1 = H2, found by scanning all of G."""
    if H1.order != H2.order:
        return ConjugacyVerdict(False, note="orders differ")
    return ConjugateIndex(G, H1, cap).verdict(H2)


def conjugates_by(G: CodedGroup, g: int, H: Subgroup) -> Subgroup:
    return Subgroup(G, tuple(int(c) for c in G.conj(g, np.asarray(H.codes))))


# -- exhaustive subgroup enumeration -----------------------------------------

def enumerate_subgroups_of_order(G: CodedGroup, m: int,
                                 cap: int = SUBGROUP_ORACLE_CAP) -> list[Subgroup]:
    """Every subgroup of order m, sorted by element codes.

    Grows subgroups one generator at a time from the trivial group, keeping
    only those whose order divides m; any subgroup of order m is reached
    along a chain of such intermediate subgroups.
    """
    check_cap(G.order, cap, "subgroup enumeration")
    if G.order % m:
        return []
    found = {(0,)}
    queue = deque([(0,)])
    result = set()
    if m == 1:
        result.add((0,))
    while queue:
        S = queue.popleft()
        if len(S) >= m:
            continue
        member = np.zeros(G.order, dtype=bool)
        member[list(S)] = True
        for g in range(1, G.order):
            if member[g]:
                continue
            T = G.closure(S + (g,))
            if m % len(T) or T in found:
                continue
            found.add(T)
            if len(T) == m:
                result.add(T)
            else:
                queue.append(T)
    return [Subgroup(G, c) for c in sorted(result)]


# -- Schreier coset graphs ----------------------------------------------------

@dataclass
class SchreierGraph:
    vertex_count: int
    adjacency: np.ndarray
    generators: list
    connected: bool
    coset_labels: list  # least element code of each right coset

    def degree(self) -> int:
        return len(self.generators)


def schreier_graph(G: CodedGroup, H: Subgroup, S) -> SchreierGraph:
    """Multigraph on right cosets Hg with one edge Hg -- Hgs per s in S."""
    S = [int(s) for s in S]
    if not S or not G.is_symmetric(S):
        raise ValueError("generator multiset must be nonempty and closed under inversion")
    h = np.asarray(H.codes, dtype=np.int64)
    labels = G.mul(h[:, None], G.codes()[None, :]).min(axis=0)
    reps = np.unique(labels)
    index = np.full(G.order, -1, dtype=np.int64)
    index[reps] = np.arange(reps.size)
    n = reps.size
    A = np.zeros((n, n), dtype=np.int64)
    svec = np.asarray(S, dtype=np.int64)
    targets = index[labels[G.mul(reps[:, None], svec[None, :])]]
    for i in range(n):
        np.add.at(A[i], targets[i], 1)
    return SchreierGraph(n, A, S, _connected(A), [int(r) for r in reps])


def _connected(A) -> bool:
    n = A.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    stack = [0]
    while stack:
        i = stack.pop()
        for j in np.flatnonzero(A[i]):
            if not seen[j]:
                seen[j] = True
                stack.append(int(j))
    return bool(seen.all())


# -- exact characteristic polynomials -------------------------------------------

# p^2 * 2048 stays below 2^63
_MODULUS_CEILING = 2**26
# matrix entries held at once by one batched reduction
_BATCH_ENTRIES = 1 << 22


@functools.lru_cache(maxsize=None)
def _moduli(count):
    out = []
    p = _MODULUS_CEILING
    for _ in range(count):
        p = prevprime(p)
        out.append(p)
    return tuple(out)


def _inv_mod(x, p):
    """Elementwise x^(p-2) mod p (so 0 maps to 0); p may vary per entry."""
    result = np.ones_like(x)
    base = x % p
    e = p - 2
    while (e > 0).any():
        odd = (e & 1).astype(bool)
        result = np.where(odd, result * base % p, result)
        base = base * base % p
        e = e >> 1
    return result


def _charpoly_mod_batch(mats, primes):
    """Characteristic polynomials of a stack of matrices, each modulo its own prime.

    Hessenberg reduction with per-matrix pivoting, then the standard
    recurrence over the leading principal minors.  Low degree first.
    """
    p = np.asarray(primes, dtype=np.int64)
    pc, pm = p[:, None], p[:, None, None]
    H = np.array(mats, dtype=np.int64) % pm
    B, n, _ = H.shape
    batch = np.arange(B)
    for k in range(n - 2):
        nz = H[:, k + 1:, k] != 0
        i = k + 1 + nz.argmax(axis=1)
        swap = nz.any(axis=1) & (i != k + 1)
        if swap.any():
            s, r = batch[swap], i[swap]
            rows = H[s, r, :].copy()
            H[s, r, :] = H[s, k + 1, :]
            H[s, k + 1, :] = rows
            cols = H[s, :, r].copy()
            H[s, :, r] = H[s, :, k + 1]
            H[s, :, k + 1] = cols
        f = H[:, k + 2:, k] * _inv_mod(H[:, k + 1, k], p)[:, None] % pc
        if not f.any():
            continue
        H[:, k + 2:, :] = (H[:, k + 2:, :] - f[:, :, None] * H[:, k + 1, None, :]) % pm
        H[:, :, k + 1] = (H[:, :, k + 1] + np.einsum("bij,bj->bi", H[:, :, k + 2:], f)) % pc
    # p_m = (t - h_{m-1,m-1}) p_{m-1} - sum_i h_{i-1,m-1} prod_{j=i}^{m-1} h_{j,j-1} p_{i-1}
    P = np.zeros((B, n + 1, n + 1), dtype=np.int64)
    P[:, 0, 0] = 1
    for m in range(1, n + 1):
        cur = np.zeros((B, n + 1), dtype=np.int64)
        cur[:, 1:] = P[:, m - 1, :-1]
        cur = (cur - H[:, m - 1, m - 1, None] * P[:, m - 1]) % pc
        if m > 1:
            coef = np.zeros((B, m - 1), dtype=np.int64)
            prod = np.ones(B, dtype=np.int64)
            for i in range(m - 1, 0, -1):
                prod = prod * H[:, i, i - 1] % p
                coef[:, i - 1] = H[:, i - 1, m - 1] * prod % p
            cur = (cur - np.einsum("bi,bij->bj", coef, P[:, :m - 1]) % pc) % pc
        P[:, m] = cur
    return P[:, n]


def _hessenberg_charpoly_mod(A, p):
    """Characteristic polynomial of A mod p, low degree first."""
    return _charpoly_mod_batch(np.asarray(A)[None], [p])[0]


def _coefficient_bound(A) -> int:
    """|coefficients of det(tI - A)| <= (1 + max absolute row sum)^n."""
    rho = int(np.abs(A).sum(axis=1).max())
    return (1 + rho) ** A.shape[0]


def _enough(moduli_for, bound):
    """Shortest prefix of ``moduli_for(k)`` whose product exceeds 2 * bound."""
    count = max(1, math.ceil((2 * bound + 1).bit_length() / (_MODULUS_CEILING.bit_length() - 2)))
    while math.prod(moduli_for(count)) <= 2 * bound:
        count += 1
    return moduli_for(count)


def _crt_symmetric(residues, moduli) -> list[int]:
    M = math.prod(moduli)
    out = []
    for k in range(len(residues[0])):
        x = 0
        for p, r in zip(moduli, residues):
            Mp = M // p
            x += int(r[k]) * Mp * pow(Mp, -1, p)
        x %= M
        out.append(x - M if x > M // 2 else x)
    return out


def char_poly(graph, cap: int = CHARPOLY_CAP) -> list[int]:
    """Exact integer characteristic polynomial det(tI - A), leading term first.

    Accepts a :class:`SchreierGraph` or a square integer matrix.  Computed
    modulo enough word-sized primes to pin every coefficient (bounded by
    (1 + max absolute row sum)^n) and lifted by Chinese remaindering.
    """
    A = graph.adjacency if isinstance(graph, SchreierGraph) else np.asarray(graph)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n:
        raise ValueError("adjacency matrix must be square")
    check_cap(n, cap, "characteristic polynomial")
    if n == 0:
        return [1]
    moduli = _enough(_moduli, _coefficient_bound(A))
    chunk = max(1, _BATCH_ENTRIES // (n * n))
    residues = []
    for start in range(0, len(moduli), chunk):
        ps = moduli[start:start + chunk]
        residues.extend(_charpoly_mod_batch(np.broadcast_to(A, (len(ps), n, n)), ps))
    return _crt_symmetric(residues, moduli)[::-1]


# -- the same polynomial, split along the centre of H(F_q) ---------------------
#
# Right multiplication by a central element z permutes the cosets Hg and
# commutes with every generator, and it acts freely when H meets the centre
# trivially.  Writing vertices as (orbit o, z) the adjacency only depends on
# the difference of the z's, so over a field with the p-th roots of unity it
# splits into q blocks A_chi[o, o'] = sum_w a[o, o'](w) chi(w), one for each
# additive character chi of F_q.  det(tI - A) is the product of the block
# polynomials.  The roots of unity exist mod primes P = 1 (mod p).

@functools.lru_cache(maxsize=None)
def _moduli_1_mod(p, count):
    out = []
    P = _MODULUS_CEILING - (_MODULUS_CEILING % p) + 1
    while len(out) < count:
        P -= p
        if isprime(P):
            out.append(P)
    return tuple(out)


def _central_split(G, H: Subgroup, graph: SchreierGraph):
    """(a, exponents) with a[o, o', w] the block counts and exponents[b, w] = <b, w> mod p,
    or None when the centre does not act freely."""
    from .heisenberg import HeisenbergGroup

    if not isinstance(G, HeisenbergGroup):
        return None
    q, p = G.q, G.field.p
    center = G.join(0, np.arange(q), 0)
    if np.isin(center[1:], np.asarray(H.codes)).any():
        return None
    h = np.asarray(H.codes, dtype=np.int64)
    reps = np.asarray(graph.coset_labels, dtype=np.int64)
    # vertex index of H r_i z_y for every vertex i and every y
    moved = G.mul(reps[:, None], center[None, :])
    labels = G.mul(h[:, None, None], moved[None]).min(axis=0)
    vertex = np.searchsorted(reps, labels)
    n = graph.vertex_count
    base = vertex.min(axis=1)
    orbits = np.unique(base)
    m = orbits.size
    if m * q != n:
        return None
    orbit_of = np.empty(n, dtype=np.int64)
    shift_of = np.empty(n, dtype=np.int64)
    for o, b in enumerate(orbits):
        orbit_of[vertex[b]] = o
        shift_of[vertex[b]] = np.arange(q)
    a = np.zeros((m, m, q), dtype=np.int64)
    A = graph.adjacency
    for o, b in enumerate(orbits):
        cols = np.flatnonzero(A[b])
        np.add.at(a[o], (orbit_of[cols], shift_of[cols]), A[b, cols])
    digits = np.array([[(c // p**i) % p for i in range(G.field.n)] for c in range(q)], dtype=np.int64)
    exponents = (digits @ digits.T) % p
    return a, exponents


def schreier_char_poly(G: CodedGroup, H: Subgroup, graph: SchreierGraph,
                       cap: int = CHARPOLY_CAP) -> list[int]:
    """``char_poly(graph)``, block-diagonalised over the centre when possible.

    For H(F_q) with H meeting the centre trivially this costs q blocks of
    size [G:H]/q per modulus instead of one [G:H] x [G:H] reduction.
    """
    split = _central_split(G, H, graph)
    if split is None:
        return char_poly(graph, cap)
    check_cap(graph.vertex_count, cap, "characteristic polynomial")
    a, exponents = split
    p = G.field.p
    moduli = _enough(lambda k: _moduli_1_mod(p, k), _coefficient_bound(graph.adjacency))
    q, m = exponents.shape[0], a.shape[0]
    blocks, primes = [], []
    for P in moduli:
        zeta = pow(primitive_root(P), (P - 1) // p, P)
        powers = np.array([pow(zeta, k, P) for k in range(p)], dtype=np.int64)
        blocks.append(np.einsum("ijw,bw->bij", a, powers[exponents]) % P)
        primes += [P] * q
    polys = _charpoly_mod_batch(np.concatenate(blocks), primes).reshape(len(moduli), q, m + 1)
    Pc = np.asarray(moduli, dtype=np.int64)[:, None]
    residues = np.zeros((len(moduli), q * m + 1), dtype=np.int64)
    residues[:, 0] = 1
    for k in range(q):
        acc = np.zeros_like(residues)
        for j in range(m + 1):
            acc[:, j:] = (acc[:, j:] + residues[:, :residues.shape[1] - j] * polys[:, k, j, None]) % Pc
        residues = acc
    return _crt_symmetric(residues, moduli)[::-1]


# -- certificates -------------------------------------------------------------

def _jsonable(element):
    if isinstance(element, tuple):
        return [_jsonable(e) for e in element]
    return [list(element.x.coeffs), list(element.y.coeffs), list(element.z.coeffs)]


def oracle_verdicts(G: CodedGroup, subgroups, pairs):
    """Pairwise (almost conjugate, conjugate) verdicts using element-level arithmetic.

    Conjugacy classes and conjugates are recomputed from ``G.element_mul``
    rather than the vectorised code path; intended for small groups only.
    """
    check_cap(G.order, SUBGROUP_ORACLE_CAP, "oracle")
    elems = G.elements()
    inverses = [G.element_inv(g) for g in elems]
    class_of = {}
    for h in elems:
        if h in class_of:
            continue
        orbit = {G.element_mul(G.element_mul(g, h), gi) for g, gi in zip(elems, inverses)}
        label = len(set(class_of.values()))
        for c in orbit:
            class_of[c] = label
    sets = [frozenset(S.elements) for S in subgroups]
    prints = []
    for s in sets:
        counts = {}
        for e in s:
            counts[class_of[e]] = counts.get(class_of[e], 0) + 1
        prints.append(counts)
    out = {}
    for i, j in pairs:
        conj = any(frozenset(G.element_mul(G.element_mul(g, e), gi) for e in sets[i]) == sets[j]
                   for g, gi in zip(elems, inverses))
        out[(i, j)] = (prints[i] == prints[j], conj)
    return out


def certify_family(G: CodedGroup, family, *, table: ClassTable | None = None,
                   battery: dict | None = None, exhaustive_oracle: bool = False,
                   cap: int | None = None) -> dict:
    """Check a claimed family of almost conjugate, pairwise nonconjugate subgroups.

    Returns a JSON-ready certificate; ``certificate["verified"]`` is True only
    if every pair is almost conjugate, nonconjugate, and has identical
    Schreier-graph characteristic polynomials for every generator set in the
    battery.
    """
    table = table or G.class_table()
    battery = battery or G.generator_battery()
    prints = [fingerprint(table, H) for H in family]
    indexes = [ConjugateIndex(G, H, cap) for H in family]
    pairs = list(itertools.combinations(range(len(family)), 2))
    failures = []
    pair_rows = []
    for i, j in pairs:
        ac = almost_conjugate(prints[i], prints[j])
        v = indexes[i].verdict(family[j])
        row = {"i": i, "j": j, "almost_conjugate": ac, "conjugate": v.conjugate,
               "search_exhausted": v.search_exhausted}
        if v.conjugate:
            row["witness"] = _jsonable(v.witness)
            failures.append(f"subgroups {i} and {j} are conjugate")
        if not ac:
            failures.append(f"subgroups {i} and {j} are not almost conjugate")
        pair_rows.append(row)

    spectra = {}
    for name, S in battery.items():
        polys = []
        for H in family:
            graph = schreier_graph(G, H, S)
            polys.append(schreier_char_poly(G, H, graph))
        spectra[name] = {
            "generators": [_jsonable(G.decode(s)) for s in S],
            "vertex_count": G.order // family[0].order if family else 0,
            "char_polys": [[decimal_str(c) for c in poly] for poly in polys],
            "all_equal": all(poly == polys[0] for poly in polys),
        }
        if not spectra[name]["all_equal"]:
            failures.append(f"characteristic polynomials differ for generator set {name!r}")

    cert = {
        "group": repr(G),
        "group_order": decimal_str(G.order),
        "class_count": len(table),
        "family_size": len(family),
        "subgroup_order": family[0].order if family else 0,
        "subgroups": [[_jsonable(e) for e in H.elements] for H in family],
        "fingerprints": [list(f.counts) for f in prints],
        "pairwise_checks": len(pairs),
        "pairs": pair_rows,
        "spectra": spectra,
    }
    if exhaustive_oracle:
        cert["oracle"] = _oracle_section(G, family, pair_rows)
        failures += cert["oracle"]["failures"]
    cert["failures"] = failures
    cert["verified"] = not failures
    return cert


def _oracle_section(G, family, pair_rows):
    m = family[0].order
    landscape = enumerate_subgroups_of_order(G, m)
    index = {H.codes: k for k, H in enumerate(landscape)}
    failures = []
    positions = []
    for H in family:
        if H.codes not in index:
            failures.append("family member missing from the subgroup enumeration")
        positions.append(index.get(H.codes))
    discrepancies = 0
    if not failures:
        scratch = oracle_verdicts(G, landscape, [(positions[r["i"]], positions[r["j"]]) for r in pair_rows])
        for r in pair_rows:
            ac, conj = scratch[(positions[r["i"]], positions[r["j"]])]
            if (ac, conj) != (r["almost_conjugate"], r["conjugate"]):
                discrepancies += 1
        if discrepancies:
            failures.append(f"{discrepancies} oracle discrepancies")
    return {"subgroups_of_order": len(landscape), "family_positions": positions,
            "discrepancies": discrepancies, "failures": failures}
