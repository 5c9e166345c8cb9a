"""Graphs with legs, axial functions and connections.

A graph is stored as a set of darts: an edge contributes two mutually
opposite darts, a leg contributes a single dart with no opposite and no
target.  Every dart carries an axial value in Z^(n+1) whose last coordinate
is the residual (x) direction.  All iteration is in sorted id order so that
derived data and serializations are reproducible bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import (
    AmbiguousConnection,
    NoPartner,
    NoValidConnection,
    ParseError,
    StructuralError,
)
from .intlinalg import Vec, is_multiple_of, lattice_rank, vec_sub
from . import intlinalg

META_KEYS = ("hyperplane_names", "positive_normals", "comment")


@dataclass(frozen=True)
class Dart:
    id: str
    source: str
    target: str | None
    opposite: str | None
    axial: Vec

    @property
    def is_leg(self):
        return self.opposite is None


@dataclass
class CheckResult:
    name: str
    ok: bool
    offenders: list = field(default_factory=list)
    message: str = ""

    def to_dict(self):
        return {
            "check": self.name,
            "ok": self.ok,
            "offenders": sorted(self.offenders),
            "message": self.message,
        }


@dataclass
class ValidationReport:
    results: list

    @property
    def ok(self):
        return all(r.ok for r in self.results)

    def failed_checks(self):
        return [r.name for r in self.results if not r.ok]

    def to_dict(self):
        return {"ok": self.ok, "checks": [r.to_dict() for r in self.results]}


class GkmGraph:
    """Immutable 2n-valent graph with legs and lattice-valued axial labels.

    The constructor enforces the purely structural invariants (valence,
    opposite involution, connectivity).  The axial-function axioms are the
    business of :func:`validate_axial`, which reports instead of raising.
    """

    def __init__(self, rank, darts, connection=None, meta=None):
        self.rank = int(rank)
        if self.rank < 1:
            raise StructuralError("rank must be at least 1")
        self.darts = {}
        for d in darts:
            if d.id in self.darts:
                raise StructuralError(f"duplicate dart id {d.id!r}")
            self.darts[d.id] = d
        self.vertices = tuple(sorted({d.source for d in self.darts.values()}))
        self.meta = dict(meta) if meta else {}
        self._darts_at = {v: [] for v in self.vertices}
        for did in sorted(self.darts):
            self._darts_at[self.darts[did].source].append(did)
        self._check_structure()
        self._connection = None
        if connection is not None:
            self._connection = {e: dict(m) for e, m in connection.items()}
            _verify_connection(self, self._connection)

    # -- structure ---------------------------------------------------------

    def _check_structure(self):
        n = self.rank
        for d in self.darts.values():
            if len(d.axial) != n + 1:
                raise StructuralError(
                    f"dart {d.id!r} has axial of length {len(d.axial)}, "
                    f"expected {n + 1}"
                )
            if (d.target is None) != (d.opposite is None):
                raise StructuralError(
                    f"dart {d.id!r} must have target and opposite together"
                )
            if d.opposite is not None:
                opp = self.darts.get(d.opposite)
                if opp is None:
                    raise StructuralError(
                        f"dart {d.id!r} has dangling opposite {d.opposite!r}"
                    )
                if opp.opposite != d.id:
                    raise StructuralError(
                        f"opposite of opposite of {d.id!r} is not itself"
                    )
                if opp.source != d.target or opp.target != d.source:
                    raise StructuralError(
                        f"darts {d.id!r}/{opp.id!r} do not swap source and target"
                    )
            if d.target is not None and d.target not in self._darts_at:
                raise StructuralError(
                    f"dart {d.id!r} targets unknown vertex {d.target!r}"
                )
        for v, ids in self._darts_at.items():
            if len(ids) != 2 * n:
                raise StructuralError(
                    f"vertex {v!r} has valence {len(ids)}, expected {2 * n}"
                )
        self._check_connected()

    def _check_connected(self):
        if not self.vertices:
            raise StructuralError("graph has no vertices")
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            v = stack.pop()
            for did in self._darts_at[v]:
                t = self.darts[did].target
                if t is not None and t not in seen:
                    seen.add(t)
                    stack.append(t)
        if len(seen) != len(self.vertices):
            raise StructuralError("underlying graph is not connected")

    # -- accessors ----------------------------------------------------------

    def darts_at(self, v):
        return list(self._darts_at[v])

    def axial(self, dart_id) -> Vec:
        return self.darts[dart_id].axial

    def edge_dart_ids(self):
        return [d for d in sorted(self.darts) if not self.darts[d].is_leg]

    def canonical_edges(self):
        """One dart id per unoriented edge (the lexicographically smaller)."""
        return [
            d
            for d in self.edge_dart_ids()
            if d < self.darts[d].opposite
        ]

    def leg_ids(self):
        return [d for d in sorted(self.darts) if self.darts[d].is_leg]

    @property
    def residual(self) -> Vec:
        return (0,) * self.rank + (1,)

    @property
    def connection(self):
        if self._connection is None:
            self._connection = derive_connection(self)
        return self._connection

    def has_stored_connection(self):
        return self._connection is not None

    # -- equality / serialization -------------------------------------------

    def to_dict(self):
        out = {
            "rank": self.rank,
            "vertices": list(self.vertices),
            "darts": [
                {
                    "id": d.id,
                    "from": d.source,
                    "to": d.target,
                    "opposite": d.opposite,
                    "axial": list(d.axial),
                }
                for _, d in sorted(self.darts.items())
            ],
        }
        if self._connection is not None:
            out["connection"] = {
                e: dict(sorted(m.items()))
                for e, m in sorted(self._connection.items())
            }
        for key in META_KEYS:
            if key in self.meta:
                out[key] = self.meta[key]
        return out

    def __eq__(self, other):
        return isinstance(other, GkmGraph) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return (
            f"GkmGraph(rank={self.rank}, vertices={len(self.vertices)}, "
            f"darts={len(self.darts)})"
        )


def serialize(g: GkmGraph) -> str:
    return json.dumps(g.to_dict(), sort_keys=True, indent=1) + "\n"


def graph_from_dict(obj) -> GkmGraph:
    for key in ("rank", "vertices", "darts"):
        if key not in obj:
            raise ParseError(f"missing field {key!r}", field=key)
    try:
        rank = int(obj["rank"])
    except (TypeError, ValueError):
        raise ParseError("rank must be an integer", field="rank") from None
    darts = []
    for i, rec in enumerate(obj["darts"]):
        try:
            darts.append(
                Dart(
                    id=str(rec["id"]),
                    source=str(rec["from"]),
                    target=None if rec.get("to") is None else str(rec["to"]),
                    opposite=(
                        None
                        if rec.get("opposite") is None
                        else str(rec["opposite"])
                    ),
                    axial=tuple(int(a) for a in rec["axial"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(
                f"bad dart record at index {i}: {exc}", field="darts"
            ) from None
    declared = set(map(str, obj["vertices"]))
    actual = {d.source for d in darts}
    if declared != actual:
        raise ParseError(
            "vertex list does not match dart sources "
            f"(extra: {sorted(declared - actual)}, "
            f"missing: {sorted(actual - declared)})",
            field="vertices",
        )
    meta = {k: obj[k] for k in META_KEYS if k in obj}
    return GkmGraph(rank, darts, connection=obj.get("connection"), meta=meta)


def load_graph(text: str) -> GkmGraph:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ParseError("top level must be a JSON object")
    return graph_from_dict(obj)


# -- connection ---------------------------------------------------------------


def _congruent_images(g: GkmGraph, edge_dart: Dart, source_dart_id: str):
    """Darts at t(edge) congruent to the given dart modulo the edge label."""
    alpha_e = edge_dart.axial
    a = g.axial(source_dart_id)
    out = []
    for cand in g.darts_at(edge_dart.target):
        if is_multiple_of(vec_sub(a, g.axial(cand)), alpha_e) is not None:
            out.append(cand)
    return out


def derive_connection(g: GkmGraph):
    """The unique connection satisfying the congruence relations.

    Works dart by dart: for a 3-independent axial function each dart has at
    most one congruent partner across an edge, which is how uniqueness in
    the small is detected (two candidates raise AmbiguousConnection).
    """
    conn = {}
    for eid in g.edge_dart_ids():
        e = g.darts[eid]
        mapping = {eid: e.opposite}
        used = {e.opposite}
        for did in g.darts_at(e.source):
            if did == eid:
                continue
            # nothing but the edge dart itself may map to the opposite dart
            images = [
                i for i in _congruent_images(g, e, did) if i != e.opposite
            ]
            if not images:
                raise NoValidConnection(
                    f"dart {did!r} has no congruent partner across {eid!r}"
                )
            if len(images) > 1:
                raise AmbiguousConnection(
                    f"dart {did!r} has {len(images)} congruent partners "
                    f"across {eid!r}"
                )
            img = images[0]
            if img in used:
                raise NoValidConnection(
                    f"two darts map to {img!r} across {eid!r}"
                )
            used.add(img)
            mapping[did] = img
        conn[eid] = mapping
    for eid, mapping in conn.items():
        opp = g.darts[eid].opposite
        inverse = {v: k for k, v in conn[opp].items()}
        if mapping != inverse:
            raise NoValidConnection(
                f"connection across {eid!r} is not inverse to {opp!r}"
            )
    return conn


def _verify_connection(g: GkmGraph, conn):
    for eid in g.edge_dart_ids():
        e = g.darts[eid]
        mapping = conn.get(eid)
        if mapping is None:
            raise StructuralError(f"stored connection misses edge dart {eid!r}")
        src = set(g.darts_at(e.source))
        if set(mapping) != src or set(mapping.values()) != set(
            g.darts_at(e.target)
        ):
            raise StructuralError(
                f"stored connection across {eid!r} is not a bijection "
                "between the dart sets"
            )
        if mapping[eid] != e.opposite:
            raise StructuralError(
                f"stored connection across {eid!r} does not send it to its "
                "opposite"
            )
        for did, img in mapping.items():
            if (
                is_multiple_of(vec_sub(g.axial(did), g.axial(img)), e.axial)
                is None
            ):
                raise NoValidConnection(
                    f"stored connection violates the congruence relation on "
                    f"{eid!r} at {did!r}"
                )
    for eid, mapping in conn.items():
        opp = g.darts[eid].opposite
        if {v: k for k, v in conn[opp].items()} != mapping:
            raise StructuralError(
                f"stored connection across {eid!r} is not inverse to {opp!r}"
            )


def forget_connection(g: GkmGraph) -> GkmGraph:
    return GkmGraph(g.rank, list(g.darts.values()), meta=g.meta)


# -- axial validation ----------------------------------------------------------


def _pairs_at(g: GkmGraph, v):
    """Match darts at v into pairs whose axial values sum to x."""
    x = g.residual
    ids = g.darts_at(v)
    unused = set(ids)
    pairs = []
    for did in ids:
        if did not in unused:
            continue
        want = vec_sub(x, g.axial(did))
        partners = [
            o for o in unused if o != did and g.axial(o) == want
        ]
        if len(partners) != 1:
            raise NoPartner(
                f"dart {did!r} at vertex {v!r} has {len(partners)} partners "
                "with complementary axial value"
            )
        other = partners[0]
        unused.discard(did)
        unused.discard(other)
        pairs.append((min(did, other), max(did, other)))
    return pairs


def validate_axial(g: GkmGraph) -> ValidationReport:
    """Run every axial-function axiom and collect the outcomes."""
    results = []
    x = g.residual

    bad = [
        eid
        for eid in g.canonical_edges()
        if is_multiple_of(g.axial(g.darts[eid].opposite), g.axial(eid))
        not in (1, -1)
    ]
    results.append(
        CheckResult(
            "opposite_sign",
            not bad,
            bad,
            "alpha(opposite) must be +-alpha(dart) on every edge",
        )
    )

    bad = []
    for v in g.vertices:
        ids = g.darts_at(v)
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                if lattice_rank([g.axial(ids[i]), g.axial(ids[j])]) < 2:
                    bad.append(f"{v}:{ids[i]},{ids[j]}")
    results.append(
        CheckResult(
            "pairwise_independence",
            not bad,
            bad,
            "axial values at a vertex must be pairwise linearly independent",
        )
    )

    bad = []
    for v in g.vertices:
        ids = g.darts_at(v)
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                for k in range(j + 1, len(ids)):
                    vecs = [g.axial(ids[i]), g.axial(ids[j]), g.axial(ids[k])]
                    if lattice_rank(vecs) < 3:
                        bad.append(f"{v}:{ids[i]},{ids[j]},{ids[k]}")
    results.append(
        CheckResult(
            "three_independence",
            not bad,
            bad,
            "axial values at a vertex must be 3-linearly independent",
        )
    )

    bad = []
    message = "congruence relation must hold across every edge"
    try:
        conn = g.connection
        for eid in g.edge_dart_ids():
            e = g.darts[eid]
            for did, img in conn[eid].items():
                if (
                    is_multiple_of(
                        vec_sub(g.axial(did), g.axial(img)), e.axial
                    )
                    is None
                ):
                    bad.append(f"{eid}:{did}")
    except (NoValidConnection, AmbiguousConnection) as exc:
        bad = ["<no connection>"]
        message = f"no valid connection: {exc}"
    results.append(CheckResult("congruence", not bad, bad, message))

    bad = []
    pair_table = {}
    for v in g.vertices:
        try:
            pair_table[v] = _pairs_at(g, v)
        except NoPartner as exc:
            bad.append(f"{v}: {exc}")
    results.append(
        CheckResult(
            "pair_decomposition",
            not bad,
            bad,
            "darts at each vertex must split into pairs summing to x",
        )
    )

    bad = []
    for v, pairs in pair_table.items():
        reps = [g.axial(p) for p, _ in pairs]
        h = intlinalg.hnf_nonzero_rows(reps + [x])
        identity = [
            [int(i == j) for j in range(g.rank + 1)] for i in range(g.rank + 1)
        ]
        if h != identity:
            bad.append(v)
    results.append(
        CheckResult(
            "span",
            not bad,
            bad,
            "pair representatives together with x must span Z^(n+1)",
        )
    )

    bad = [d for d in sorted(g.darts) if g.axial(d) == x]
    results.append(
        CheckResult(
            "residual_not_realized",
            not bad,
            bad,
            "no dart may carry the residual vector x itself",
        )
    )

    return ValidationReport(results)


# -- pair decompositions -------------------------------------------------------


@dataclass
class PairDecomposition:
    """of each vertex's darts into pairs with axial sum x."""

    pairs: dict

    def pair_of(self, g, vertex, dart_id):
        for a, b in self.pairs[vertex]:
            if dart_id == a:
                return b
            if dart_id == b:
                return a
        raise KeyError(dart_id)

    def to_dict(self):
        return {v: [list(p) for p in ps] for v, ps in sorted(self.pairs.items())}


def pair_decomposition(g: GkmGraph) -> PairDecomposition:
    """Pair up every vertex's darts and assert the connection maps pairs
    to pairs across every edge."""
    table = {v: _pairs_at(g, v) for v in g.vertices}
    dec = PairDecomposition(table)
    conn = g.connection
    for eid in g.edge_dart_ids():
        e = g.darts[eid]
        target_pairs = {frozenset(p) for p in table[e.target]}
        for a, b in table[e.source]:
            image = frozenset((conn[eid][a], conn[eid][b]))
            if image not in target_pairs:
                raise NoPartner(
                    f"connection across {eid!r} does not map the pair "
                    f"({a!r}, {b!r}) to a pair"
                )
    return dec
