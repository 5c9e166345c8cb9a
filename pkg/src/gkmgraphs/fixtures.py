"""Built-in graphs: the figure fixtures and the three-direction line
arrangement family.

The five figure fixtures ship as canonical JSON files under ``data/``.  The
arrangement generator builds the graph from scratch: the direction of a dart
fixes the non-residual part of its label, and the residual coefficients are
the solution of an integer linear system collecting the pair, opposite and
congruence constraints (pinned at the bottom-left vertex so that the
(1,1,1) arrangement reproduces the triangle fixture).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .errors import GkmError, StructuralError
from .graph import Dart, GkmGraph, load_graph
from .intlinalg import is_multiple_of, solve_integer, vec_sub

FIXTURE_IDS = (
    "fig2_left",
    "fig2_right",
    "fig7_pentagon",
    "fig8_line5",
    "fig11_sphere",
)

_LOCAL_MODEL_RE = re.compile(r"^local_model\((\d+)\)$")


def fixture(fixture_id: str) -> GkmGraph:
    """Load a built-in graph by id (``fig2_left``, ..., ``local_model(n)``)."""
    m = _LOCAL_MODEL_RE.match(fixture_id)
    if m:
        return local_model(int(m.group(1)))
    if fixture_id not in FIXTURE_IDS:
        raise GkmError(
            f"unknown fixture {fixture_id!r}; known: "
            + ", ".join(FIXTURE_IDS)
            + ", local_model(n)"
        )
    text = (
        resources.files("gkmgraphs")
        .joinpath(f"data/{fixture_id}.json")
        .read_text()
    )
    return load_graph(text)


def local_model(n: int) -> GkmGraph:
    """One vertex with 2n legs labeled e_1..e_n and x-e_1..x-e_n."""
    if n < 1:
        raise GkmError("local model needs n >= 1")
    darts = []
    for i in range(n):
        plus = tuple(int(j == i) for j in range(n)) + (0,)
        minus = tuple(-int(j == i) for j in range(n)) + (1,)
        darts.append(Dart(f"o:p{i + 1}", "o", None, None, plus))
        darts.append(Dart(f"o:m{i + 1}", "o", None, None, minus))
    return GkmGraph(n, darts)


# -- the L_{k,l,m} family ------------------------------------------------------

# direction suffix -> (unit step in the plane, forgetful label (e1, e2))
_DIRECTIONS = {
    "e": ((1, 0), (0, 1)),
    "w": ((-1, 0), (0, -1)),
    "n": ((0, 1), (1, 0)),
    "s": ((0, -1), (-1, 0)),
    "se": ((1, -1), (-1, 1)),
    "nw": ((-1, 1), (1, -1)),
}

_LINE_KINDS = {
    # kind: (plus direction, minus direction, lambda covector)
    "X": ("e", "w", (1, 0)),
    "Y": ("n", "s", (0, 1)),
    "Z": ("se", "nw", (-1, -1)),
}


@dataclass(frozen=True)
class KlmSpec:
    k: int
    l: int
    m: int

    def __post_init__(self):
        if min(self.k, self.l, self.m) < 1:
            raise GkmError("k, l, m must all be at least 1")


class _Line:
    def __init__(self, name, kind, vertex_ids):
        self.name = name
        self.kind = kind
        self.vertex_ids = vertex_ids  # ordered along the plus direction
        self.plus, self.minus, self.lam = _LINE_KINDS[kind]


def _klm_lines(spec: KlmSpec):
    k, l, m = spec.k, spec.l, spec.m
    # X_r: y = r-1; Y_s: x = s-1; Z_t: x + y = k + l - 2 + t.  The Z offsets
    # exceed every x + y value of an X/Y crossing, so no three lines meet,
    # and the resulting orderings along each line are the ones hard-coded
    # below (Y then Z crossings on an X line, etc).
    lines = []
    for r in range(1, k + 1):
        ids = [f"X{r}.Y{s}" for s in range(1, l + 1)]
        ids += [f"X{r}.Z{t}" for t in range(1, m + 1)]
        lines.append(_Line(f"X{r}", "X", ids))
    for s in range(1, l + 1):
        ids = [f"X{r}.Y{s}" for r in range(1, k + 1)]
        ids += [f"Y{s}.Z{t}" for t in range(1, m + 1)]
        lines.append(_Line(f"Y{s}", "Y", ids))
    for t in range(1, m + 1):
        ids = [f"Y{s}.Z{t}" for s in range(1, l + 1)]
        ids += [f"X{r}.Z{t}" for r in range(k, 0, -1)]
        lines.append(_Line(f"Z{t}", "Z", ids))
    return lines


def gen_klm(spec: KlmSpec) -> GkmGraph:
    """GKM graph of k horizontal, l vertical and m diagonal lines in
    general position, fully validated."""
    lines = _klm_lines(spec)
    dart_dirs = {}  # dart id -> direction suffix
    dart_rows = {}  # dart id -> (source, target, opposite)
    for line in lines:
        ids = line.vertex_ids
        for i, v in enumerate(ids):
            plus_id = f"{v}:{line.plus}"
            minus_id = f"{v}:{line.minus}"
            nxt = ids[i + 1] if i + 1 < len(ids) else None
            prv = ids[i - 1] if i - 1 >= 0 else None
            dart_dirs[plus_id] = line.plus
            dart_rows[plus_id] = (
                v,
                nxt,
                f"{nxt}:{line.minus}" if nxt else None,
            )
            dart_dirs[minus_id] = line.minus
            dart_rows[minus_id] = (
                v,
                prv,
                f"{prv}:{line.plus}" if prv else None,
            )
    residual = _solve_residual_coefficients(lines, dart_dirs, dart_rows)
    darts = []
    for did in sorted(dart_dirs):
        src, tgt, opp = dart_rows[did]
        f1, f2 = _DIRECTIONS[dart_dirs[did]][1]
        darts.append(Dart(did, src, tgt, opp, (f1, f2, residual[did])))
    meta = {
        "hyperplane_names": {
            line.name: sorted(set(line.vertex_ids)) for line in lines
        },
        "positive_normals": _positive_normals(lines),
    }
    g = GkmGraph(2, darts, meta=meta)
    g.connection  # derive and cache so serialization carries it
    from .graph import validate_axial

    report = validate_axial(g)
    if not report.ok:
        raise StructuralError(
            "generated arrangement graph fails validation: "
            + ", ".join(report.failed_checks())
        )
    return g


def _positive_normals(lines):
    """Pick the normal dart fixing each line's halfspace orientation.

    At the line's first vertex, the recorded dart is the one whose
    forgetful label pairs to +1 with the line's characteristic covector.
    """
    by_vertex = {}
    for line in lines:
        for v in line.vertex_ids:
            by_vertex.setdefault(v, []).append(line)
    out = {}
    for line in lines:
        v0 = line.vertex_ids[0]
        other = next(ln for ln in by_vertex[v0] if ln.name != line.name)
        for suffix in (other.plus, other.minus):
            f = _DIRECTIONS[suffix][1]
            if f[0] * line.lam[0] + f[1] * line.lam[1] == 1:
                out[line.name] = f"{v0}:{suffix}"
                break
        else:
            raise StructuralError(f"no normal candidate for line {line.name}")
    return out


def _solve_residual_coefficients(lines, dart_dirs, dart_rows):
    """Residual (x) coefficients of all darts, as the solution of the
    integer system of pair, opposite and congruence constraints."""
    index = {did: i for i, did in enumerate(sorted(dart_dirs))}
    rows, rhs = [], []

    def row(entries, b):
        r = [0] * len(index)
        for did, c in entries:
            r[index[did]] += c
        rows.append(r)
        rhs.append(b)

    for line in lines:
        for v in line.vertex_ids:
            row([(f"{v}:{line.plus}", 1), (f"{v}:{line.minus}", 1)], 1)
    for did, (_, tgt, opp) in dart_rows.items():
        if opp is not None:
            row([(did, 1), (opp, 1)], 0)
    forget = {did: _DIRECTIONS[d][1] for did, d in dart_dirs.items()}
    for eid, (src, tgt, opp) in dart_rows.items():
        if tgt is None:
            continue
        w = forget[eid]
        tangent_at_src = {eid, _sibling(eid, src, dart_dirs)}
        tangent_at_tgt = {opp, _sibling(opp, tgt, dart_dirs)}
        cross_src = [
            d for d in dart_dirs if dart_rows[d][0] == src and d not in tangent_at_src
        ]
        cross_tgt = [
            d for d in dart_dirs if dart_rows[d][0] == tgt and d not in tangent_at_tgt
        ]
        for d in cross_src:
            images = [
                d2
                for d2 in cross_tgt
                if is_multiple_of(vec_sub(forget[d], forget[d2]), w) is not None
            ]
            if len(images) != 1:
                raise StructuralError(
                    f"forgetful labels leave the connection across {eid} "
                    "ambiguous"
                )
            lam = is_multiple_of(vec_sub(forget[d], forget[images[0]]), w)
            row([(d, 1), (images[0], -1), (eid, -lam)], 0)
    # pin the bottom-left vertex to the standard local model
    first_x = lines[0]
    row([(f"{first_x.vertex_ids[0]}:{first_x.plus}", 1)], 0)
    first_y = next(ln for ln in lines if ln.kind == "Y")
    row([(f"{first_y.vertex_ids[0]}:{first_y.plus}", 1)], 0)

    sol = solve_integer(rows, rhs)
    if sol is None:
        raise StructuralError("residual coefficient system has no solution")
    return {did: sol[i] for did, i in index.items()}


def _sibling(dart_id, vertex, dart_dirs):
    """The other dart at `vertex` tangent to the same line."""
    v, suffix = dart_id.rsplit(":", 1)
    for plus, minus, _ in _LINE_KINDS.values():
        if suffix == plus:
            return f"{vertex}:{minus}"
        if suffix == minus:
            return f"{vertex}:{plus}"
    raise KeyError(dart_id)
