"""Certificate types, size-bound formulas, and independent verifiers.

The verifiers re-derive everything from raw adjacency queries; they share no
logic with the extraction pipeline, so a passing report is evidence about the
graph, not about the code that produced the certificate.

All logarithms are base 2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .graph import Graph


class CertificateSchemaError(ValueError):
    """Raised when certificate JSON does not match the expected shape."""


MIN_TOTAL_LENGTH = 3


def big_constant(t: int) -> int:
    """The leading constant (2t)^4 used by the size bounds."""
    return (2 * t) ** 4


def floor_log2_sq(n: int) -> int:
    """floor(log2(n)^2); the upper bound for certified path lengths."""
    if n < 2:
        return 0
    return int(math.floor(math.log2(n) ** 2))


@dataclass(frozen=True)
class DerivedConstants:
    """Scale constants derived from (n, k, t, d): T = (2t)^4, L = log2 n,
    D = log2 d."""

    n: int
    k: int
    t: int
    d: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.t < 3:
            raise ValueError("t must be at least 3")
        if self.d < 2:
            raise ValueError("d must be at least 2")

    @property
    def T(self) -> int:
        return big_constant(self.t)

    @property
    def L(self) -> float:
        return math.log2(self.n)

    @property
    def D(self) -> float:
        return math.log2(self.d)


def bound_main(n: int, k: int, t: int, d: int) -> float:
    """Guaranteed stable-set size n / ((2t)^(4(k-1)) * log2(n)^(3(k-1)) * log2(d))
    for graphs with clique number <= k and maximum degree <= d that contain no
    certified subdivision."""
    c = DerivedConstants(n, k, t, d)
    if n < 2:
        return 1.0
    denom = float(c.T) ** (k - 1) * c.L ** (3 * (k - 1)) * c.D
    return n / denom


def bound_no_degree(n: int, k: int, t: int) -> float:
    """Degree-free variant: substitute d = n, giving exponent 3k-2 on log2(n)."""
    if n < 2:
        return 1.0
    denom = float(big_constant(t)) ** (k - 1) * math.log2(n) ** (3 * k - 2)
    return n / denom


def bound_clique_free(n: int, t: int) -> float:
    """Variant for graphs with no clique on t-1 vertices (k = t-1):
    n / ((2t)^(4(t-2)) * log2(n)^(3t-5))."""
    return bound_no_degree(n, t - 1, t)


def general_h_order(h: Graph) -> int:
    """Reduction parameter for an arbitrary target graph: its vertex count
    (a subdivision of the complete graph on |V(h)| vertices contains one of h)."""
    return h.n


# ---------------------------------------------------------------------------
# certificate types


@dataclass(frozen=True)
class StableSetCertificate:
    n: int
    k: int
    t: int
    d: int
    claimed_mode: str  # "faithful" | "scaled" | "best-effort"
    members: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class SubdivisionCertificate:
    """Branch vertices plus one connecting path per pair. Path (i, j) uses
    1-based pair indices into `branch`; its vertex list excludes the branch
    vertices, so the certified total length is len(vertices) + 1."""

    n: int
    k: int
    t: int
    d: int
    claimed_mode: str
    branch: tuple[int, ...]
    paths: dict[tuple[int, int], tuple[int, ...]] = field(default_factory=dict)
    min_len: int = MIN_TOTAL_LENGTH
    max_len: int = 0

    def total_length(self, pair: tuple[int, int]) -> int:
        return len(self.paths[pair]) + 1


@dataclass
class StableReport:
    is_stable: bool
    size: int
    meets_faithful_bound: bool
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.is_stable and not self.violations


@dataclass
class SubdivisionReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass
class Outcome:
    """Result of an extraction run. kind is one of "stable", "subdivision",
    "regime-failure". A regime failure still carries the best verified stable
    set found, as a best-effort certificate."""

    kind: str
    stable: StableSetCertificate | None = None
    subdivision: SubdivisionCertificate | None = None
    diagnostic: str = ""
    trace: tuple[str, ...] = ()

    @property
    def certificate(self):
        return self.subdivision if self.kind == "subdivision" else self.stable


# ---------------------------------------------------------------------------
# verifiers


def verify_stable(g: Graph, cert: StableSetCertificate) -> StableReport:
    if cert.n != g.n:
        raise ValueError(f"certificate n={cert.n} does not match graph n={g.n}")
    violations: list[str] = []
    members = cert.members
    if len(set(members)) != len(members):
        violations.append("distinctness: repeated vertex in set")
    for v in members:
        if not (0 <= v < g.n):
            raise ValueError(f"vertex id {v} out of range")
    member_set = sorted(set(members))
    stable = True
    for ai in range(len(member_set)):
        for bi in range(ai + 1, len(member_set)):
            if g.has_edge(member_set[ai], member_set[bi]):
                stable = False
                violations.append(
                    f"stability: edge ({member_set[ai]}, {member_set[bi]}) inside set")
                break
        if not stable:
            break
    size = len(member_set)
    if g.n >= 2 and cert.d >= 2:
        meets = size >= math.ceil(bound_main(g.n, cert.k, cert.t, cert.d))
    else:
        meets = size >= 1 or g.n == 0
    return StableReport(is_stable=stable, size=size, meets_faithful_bound=meets,
                        violations=violations)


def _expected_pairs(t: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, t + 1) for j in range(i + 1, t + 1)]


def verify_subdivision(g: Graph, cert: SubdivisionCertificate) -> SubdivisionReport:
    if cert.n != g.n:
        raise ValueError(f"certificate n={cert.n} does not match graph n={g.n}")
    v_all: list[int] = list(cert.branch)
    for verts in cert.paths.values():
        v_all.extend(verts)
    for v in v_all:
        if not (0 <= v < g.n):
            raise ValueError(f"vertex id {v} out of range")

    violations: list[str] = []
    t = cert.t
    if len(cert.branch) != t:
        violations.append(f"structure: expected {t} branch vertices, got {len(cert.branch)}")
    if sorted(cert.paths.keys()) != _expected_pairs(t):
        violations.append("structure: path map does not cover each pair exactly once")
    if violations:
        return SubdivisionReport(violations)

    if len(set(v_all)) != len(v_all):
        violations.append("distinctness: branch and path vertices are not pairwise distinct")

    for pair in sorted(cert.paths.keys()):
        verts = cert.paths[pair]
        if len(verts) == 0:
            violations.append(f"length-range: pair {pair} has an empty path")
            continue
        total = len(verts) + 1
        if not (cert.min_len <= total <= cert.max_len):
            violations.append(
                f"length-range: pair {pair} total length {total} outside "
                f"[{cert.min_len}, {cert.max_len}]"
            )
        for a, b in zip(verts, verts[1:]):
            if not g.has_edge(a, b):
                violations.append(f"continuity: pair {pair} misses edge ({a}, {b})")
                break
        i, j = pair
        if not g.has_edge(cert.branch[i - 1], verts[0]):
            violations.append(f"continuity: pair {pair} first vertex not adjacent to branch {i}")
        if not g.has_edge(cert.branch[j - 1], verts[-1]):
            violations.append(f"continuity: pair {pair} last vertex not adjacent to branch {j}")

    # Exact adjacency scan: within the certificate's vertex set the only edges
    # allowed are consecutive path edges and the branch-to-endpoint edges.
    allowed: set[frozenset[int]] = set()
    for (i, j), verts in cert.paths.items():
        for a, b in zip(verts, verts[1:]):
            allowed.add(frozenset((a, b)))
        allowed.add(frozenset((cert.branch[i - 1], verts[0])))
        allowed.add(frozenset((cert.branch[j - 1], verts[-1])))
    distinct = sorted(set(v_all))
    for ai in range(len(distinct)):
        for bi in range(ai + 1, len(distinct)):
            u, v = distinct[ai], distinct[bi]
            if g.has_edge(u, v) and frozenset((u, v)) not in allowed:
                violations.append(f"inducedness: unexpected edge ({u}, {v})")
    return SubdivisionReport(violations)


# ---------------------------------------------------------------------------
# JSON serialization


def certificate_to_json(cert: StableSetCertificate | SubdivisionCertificate) -> str:
    if isinstance(cert, StableSetCertificate):
        doc = {
            "type": "stable",
            "n": cert.n,
            "params": {"k": cert.k, "t": cert.t, "d": cert.d, "mode": cert.claimed_mode},
            "set": list(cert.members),
        }
    elif isinstance(cert, SubdivisionCertificate):
        doc = {
            "type": "subdivision",
            "n": cert.n,
            "params": {"k": cert.k, "t": cert.t, "d": cert.d, "mode": cert.claimed_mode},
            "branch": list(cert.branch),
            "paths": [
                {"pair": [i, j], "vertices": list(cert.paths[(i, j)])}
                for i, j in sorted(cert.paths.keys())
            ],
            "min_len": cert.min_len,
            "max_len": cert.max_len,
        }
    else:
        raise TypeError(f"not a certificate: {type(cert)!r}")
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _require(doc: dict, key: str, typ) -> object:
    if key not in doc:
        raise CertificateSchemaError(f"missing key {key!r}")
    val = doc[key]
    # bool is a subclass of int; a certificate with n=true is malformed, not n=1
    if not isinstance(val, typ) or (typ is int and isinstance(val, bool)):
        raise CertificateSchemaError(f"key {key!r} has wrong type {type(val).__name__}")
    return val


def _int_list(val: object, what: str) -> tuple[int, ...]:
    if not isinstance(val, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in val):
        raise CertificateSchemaError(f"{what} must be a list of integers")
    return tuple(val)


def certificate_from_json(text: str) -> StableSetCertificate | SubdivisionCertificate:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CertificateSchemaError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise CertificateSchemaError("certificate must be a JSON object")
    kind = _require(doc, "type", str)
    n = _require(doc, "n", int)
    params = _require(doc, "params", dict)
    k = _require(params, "k", int)
    t = _require(params, "t", int)
    d = _require(params, "d", int)
    mode = _require(params, "mode", str)
    if mode not in ("faithful", "scaled", "best-effort"):
        raise CertificateSchemaError(f"unknown mode {mode!r}")
    if kind == "stable":
        members = _int_list(_require(doc, "set", list), "set")
        return StableSetCertificate(n=n, k=k, t=t, d=d, claimed_mode=mode, members=members)
    if kind == "subdivision":
        branch = _int_list(_require(doc, "branch", list), "branch")
        raw_paths = _require(doc, "paths", list)
        paths: dict[tuple[int, int], tuple[int, ...]] = {}
        for entry in raw_paths:
            if not isinstance(entry, dict):
                raise CertificateSchemaError("each path entry must be an object")
            pair = _int_list(_require(entry, "pair", list), "pair")
            if len(pair) != 2 or not (1 <= pair[0] < pair[1]):
                raise CertificateSchemaError(f"bad pair {list(pair)!r}")
            if pair in paths:
                raise CertificateSchemaError(f"duplicate pair {list(pair)!r}")
            paths[(pair[0], pair[1])] = _int_list(_require(entry, "vertices", list), "vertices")
        min_len = doc.get("min_len", MIN_TOTAL_LENGTH)
        max_len = doc.get("max_len", floor_log2_sq(n))
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in (min_len, max_len)):
            raise CertificateSchemaError("min_len/max_len must be integers")
        return SubdivisionCertificate(
            n=n, k=k, t=t, d=d, claimed_mode=mode, branch=branch, paths=paths,
            min_len=min_len, max_len=max_len,
        )
    raise CertificateSchemaError(f"unknown certificate type {kind!r}")
