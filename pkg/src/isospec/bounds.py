"""Log-space constants for counting isospectral lattices of bounded covolume.

For a field of degree d the construction gives

* covolume at most x with  log x = d * log(c1 * c3 * d^gamma),
* at least p'^((d/2)(d/2 - 1)) almost conjugate nonconjugate subgroups,
* at most (c5 * d^(gamma C))^d of them in one conjugacy class,

so log(number of classes) >= (d/2)(d/2-1) log p' - d log(c5 d^(gamma C)).
All quantities are kept as natural logarithms.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field, replace

from sympy import isprime

from .errors import IsospecError
from .lietype import chevalley_order, exponents

# per-type default for the integer s in the covolume exponent; 0 unless overridden
DEFAULT_S: dict[str, int] = {}

CSV_COLUMNS = ("d", "log_x", "log_subgroup_count", "log_class_cap", "log_nonconjugate_count", "a_running")


@dataclass(frozen=True)
class GroupTypeData:
    label: str
    rank: int
    dim: int
    exponents: tuple
    positive_roots: int
    s: int = 0


def lie_data(type_: str, rank: int | None = None, s: int | None = None) -> GroupTypeData:
    t = type_.upper()
    if t == "A" and rank == 1:
        raise IsospecError("type A1 is excluded")
    exps = exponents(t, rank)
    r = len(exps)
    if r < 2:
        raise IsospecError(f"rank must be at least 2, got {r}")
    N = sum(exps)
    label = t if t[1:].isdigit() else f"{t}{r}"
    if s is None:
        s = DEFAULT_S.get(label, 0)
    return GroupTypeData(label, r, r + 2 * N, exps, N, int(s))


@dataclass(frozen=True)
class BoundParams:
    group: GroupTypeData
    c0: float = 1.0
    c0_prime: float = 1.0
    p0: int = 13
    pprime: int = 5
    C: float = 1.0
    eps: float = 0.05
    torsion_free: bool = False
    c_tf: float = 2.0
    paper_literal: bool = False

    def __post_init__(self):
        if not (isprime(self.p0) and self.p0 > 11):
            raise IsospecError(f"p0 must be a prime > 11, got {self.p0}")
        if self.pprime not in (5, 7, 11):
            raise IsospecError(f"p' must be a prime with 3 < p' <= 11, got {self.pprime}")
        if not 0 < self.eps < 0.25:
            raise IsospecError("eps must lie in (0, 1/4)")
        if min(self.c0, self.c0_prime, self.C, self.c_tf) <= 0:
            raise IsospecError("constants must be positive")

    @property
    def gamma(self) -> float:
        return (self.group.dim + self.group.s) / 2

    @property
    def validity_threshold(self) -> float:
        return 1 / (2 * self.eps)

    def echo(self) -> dict:
        out = asdict(self)
        out["group"]["exponents"] = list(self.group.exponents)
        return out


def default_params(type_label: str = "A2", **overrides) -> BoundParams:
    from .lietype import parse_type

    t, r = parse_type(type_label)
    s = overrides.pop("s", None)
    return BoundParams(lie_data(t, r, s), **overrides)


def compute_c1(params: BoundParams) -> float:
    """log c1, c1 = c0^(dim/2) c0'^(s/2) prod m_i!/(2 pi)^(m_i+1) p0^dim (pi^2/6)^r."""
    g = params.group
    out = 0.5 * g.dim * math.log(params.c0) + 0.5 * g.s * math.log(params.c0_prime)
    for m in g.exponents:
        out += math.lgamma(m + 1) - (m + 1) * math.log(2 * math.pi)
    out += g.dim * math.log(params.p0) + g.rank * math.log(math.pi**2 / 6)
    return out


def compute_c3(params: BoundParams) -> float:
    """log c3, c3 = p'^(dim - 1/2)."""
    return (params.group.dim - 0.5) * math.log(params.pprime)


def compute_c4(params: BoundParams) -> float:
    return (0.25 - params.eps) * math.log(params.pprime)


def compute_c5(params: BoundParams) -> float:
    """log c5 = log c3 + C log c1 + dim log p'."""
    return compute_c3(params) + params.C * compute_c1(params) + params.group.dim * math.log(params.pprime)


@dataclass(frozen=True)
class CovolumeBound:
    log_x: float
    check: float  # gamma d log d
    holds: bool


def covolume_log_bound(params: BoundParams, d: int) -> CovolumeBound:
    """log x = d log(c1 c3 d^gamma), plus d log c_tf for torsion-free subgroups."""
    if d < 2:
        raise IsospecError("degree must be at least 2")
    log_x = d * (compute_c1(params) + compute_c3(params) + params.gamma * math.log(d))
    if params.torsion_free:
        log_x += d * math.log(params.c_tf)
    check = params.gamma * d * math.log(d)
    return CovolumeBound(log_x, check, log_x >= check * (1 - 1e-12))


@dataclass(frozen=True)
class IsospectralCount:
    log_subgroup_count: float
    log_class_cap: float
    log_nonconjugate_count: float
    difference: float  # before clamping at 0
    valid: bool  # d >= 1/(2 eps)


def isospectral_log_count(params: BoundParams, d: int) -> IsospectralCount:
    lp = math.log(params.pprime)
    half = d / 2
    subgroups = half * (half - 1) * lp
    cap = d * (compute_c5(params) + params.gamma * params.C * math.log(d))
    if params.paper_literal:
        diff = d * d * compute_c3(params) - cap
    else:
        diff = subgroups - cap
    return IsospectralCount(subgroups, cap, max(0.0, diff), diff, d >= params.validity_threshold)


@dataclass
class BoundReport:
    d: int
    log_c1: float
    log_c3: float
    log_c4: float
    log_c5: float
    gamma: float
    log_x: float
    log_x_check: float
    log_subgroup_count: float
    log_class_cap: float
    log_nonconjugate_count: float
    a: float | None
    valid: bool
    conductor: int | None = None


def bound_report(params: BoundParams, d: int, conductor: int | None = None) -> BoundReport:
    cov = covolume_log_bound(params, d)
    cnt = isospectral_log_count(params, d)
    a = None
    if cnt.log_nonconjugate_count > 0 and cov.log_x > math.e:
        lx = cov.log_x
        a = cnt.log_nonconjugate_count / (lx * lx / math.log(lx) ** 2)
    return BoundReport(d, compute_c1(params), compute_c3(params), compute_c4(params), compute_c5(params),
                       params.gamma, cov.log_x, cov.check, cnt.log_subgroup_count, cnt.log_class_cap,
                       cnt.log_nonconjugate_count, a, cnt.valid, conductor)


@dataclass
class GrowthTable:
    params: BoundParams
    reports: list
    a: float | None
    a_defined: bool
    threshold: int | None  # least d in the table from which all counts are positive
    monotone_after_threshold: bool
    c6: float | None = None
    notes: list = field(default_factory=list)

    def running_a(self):
        best, out = None, []
        for r in self.reports:
            if r.a is not None and (best is None or r.a < best):
                best = r.a
            out.append(best)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r, a in zip(self.reports, self.running_a()):
            w.writerow([r.d, repr(r.log_x), repr(r.log_subgroup_count), repr(r.log_class_cap),
                        repr(r.log_nonconjugate_count), "" if a is None else repr(a)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "params": self.params.echo(),
            "a": self.a,
            "a_defined": self.a_defined,
            "positivity_threshold": self.threshold,
            "monotone_after_threshold": self.monotone_after_threshold,
            "c6": self.c6,
            "notes": self.notes,
            "reports": [asdict(r) for r in self.reports],
        }


def growth_table(params: BoundParams, d_values, conductors=None) -> GrowthTable:
    """Reports over ``d_values`` and the largest a with
    log(count) >= a (log x)^2 / (log log x)^2 on every positive-count entry."""
    d_values = list(d_values)
    conductors = list(conductors) if conductors is not None else [None] * len(d_values)
    reports = [bound_report(params, d, ell) for d, ell in zip(d_values, conductors)]
    notes = []
    if any(not r.valid for r in reports):
        notes.append(f"entries with d < {params.validity_threshold:g} are outside the validity range")
    positive = [r for r in reports if r.valid and r.log_nonconjugate_count > 0]
    threshold = None
    for k in range(len(reports) - 1, -1, -1):
        if reports[k].log_nonconjugate_count > 0 and reports[k].valid:
            threshold = reports[k].d
        else:
            break
    tail = [r for r in reports if threshold is not None and r.d >= threshold]
    monotone = all(b.log_nonconjugate_count >= a.log_nonconjugate_count for a, b in zip(tail, tail[1:]))
    if not positive:
        notes.append("no entry has a positive count; a is undefined")
        return GrowthTable(params, reports, None, False, None, monotone, None, notes)
    a = min(r.a for r in positive)
    c6 = min(r.log_nonconjugate_count / r.d**2 for r in tail) if tail else None
    return GrowthTable(params, reports, a, True, threshold, monotone, c6, notes)


def positivity_threshold(params: BoundParams, d_max: int = 10**4) -> int | None:
    """Least d such that the count is positive for every d' in [d, d_max]."""
    start = max(2, math.ceil(params.validity_threshold))
    threshold = None
    for d in range(d_max, start - 1, -1):
        if isospectral_log_count(params, d).difference > 0:
            threshold = d
        else:
            break
    return threshold


def prop41_index_bound(type_: str, rank: int | None, p: int, inertia_degrees) -> int:
    """prod #G(F_{p^n_i}) / p^(sum n_i), exact."""
    if type_.upper() == "A" and rank == 1:
        raise IsospecError("type A1 is excluded")
    degrees = [int(n) for n in inertia_degrees]
    if not degrees or min(degrees) < 1:
        raise IsospecError("inertia degrees must be positive")
    if not isprime(p):
        raise IsospecError(f"{p} is not prime")
    num = 1
    for n in degrees:
        num *= chevalley_order(type_, rank, p**n)
    den = p ** sum(degrees)
    q, r = divmod(num, den)
    if r:
        raise IsospecError("group order is not divisible by p^(sum n_i)")
    return q


def with_pprime(params: BoundParams, pprime: int) -> BoundParams:
    return replace(params, pprime=pprime)
