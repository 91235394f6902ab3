"""Flatness pairs: certificates, flaps, cell classification, regularity.

A pair bundles a wall with the 7-tuple (X, Y, P, C, Gamma, sigma, pi) that
certifies it is flat: (X, Y) separates the graph, the wall lives in Y, the
pegs sit on the perimeter inside X cap Y, and a tight rendition of G[Y]
draws the compass in a disk whose boundary carries X cap Y in perimeter
order.

Classification of cells against a normal cycle is delegated to the painting
trace; this module builds the runs of the cycle through the cells, computes
the untidy/marginal refinements, and houses the fixture generator used by
the property tests.
"""
from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from .errors import CapacityError, InputError, InternalError
from .graph import Graph, is_separation, norm_edge, vkey
from .painting import Painting, trace_normal_cycle, validate_painting
from .rendition import Rendition, check_tightness, validate_rendition
from .wall import (PegsCorners, Wall, choices_of_pegs_corners, elementary_wall,
                   fresh_names, subdivide_wall, temp_bricks, temp_corners,
                   temp_degree, temp_edges, temp_pegs, temp_perimeter,
                   temp_vertices)

Cycle = Union[Wall, Sequence]


class FlatnessPair:
    """(W, X, Y, P, C) plus the rendition of G[Y]; immutable once built."""

    __slots__ = ("wall", "X", "Y", "pegs_corners", "rendition",
                 "_memo", "_lock")

    def __init__(self, wall: Wall, X, Y, pegs_corners: PegsCorners,
                 rendition: Rendition):
        self.wall = wall
        self.X = frozenset(X)
        self.Y = frozenset(Y)
        self.pegs_corners = pegs_corners
        self.rendition = rendition
        self._memo: Dict = {}
        self._lock = threading.Lock()

    @property
    def height(self) -> int:
        return self.wall.height

    def compass(self) -> Graph:
        return self.rendition.union_graph()

    def ground(self) -> FrozenSet:
        return frozenset(self.rendition.pi.values())

    def edge_owner(self) -> Dict[Tuple, object]:
        with self._lock:
            got = self._memo.get("owner")
        if got is not None:
            return got
        owner = {}
        for cid, g in self.rendition.sigma.items():
            for e in g.edges:
                owner[e] = cid
        with self._lock:
            self._memo["owner"] = owner
        return owner


@dataclass(frozen=True)
class CellClass:
    kind: str          # internal / inner-perimetric / outer-perimetric / external
    marginal: bool
    untidy: bool


@dataclass(frozen=True)
class Flap:
    cell: object
    graph: Graph
    base: FrozenSet
    trivial: bool


def flaps(F: FlatnessPair) -> Dict[object, Flap]:
    ground = F.ground()
    out = {}
    for cid, g in F.rendition.sigma.items():
        base = g.vertex_set & ground
        trivial = len(base) == 2 and g.n == 2 and g.m == 1
        out[cid] = Flap(cid, g, base, trivial)
    return out


def short_edges(F: FlatnessPair) -> FrozenSet:
    return frozenset(f.graph.edges[0] for f in flaps(F).values() if f.trivial)


def untidy_cells(F: FlatnessPair) -> FrozenSet:
    """Cells hiding two wall edges at one ground vertex of their boundary."""
    wedges = F.wall.graph.edge_set
    out = set()
    for cid, g in F.rendition.sigma.items():
        for v in F.rendition.pi_boundary(cid):
            if v not in g:
                continue
            hits = sum(1 for u in g.neighbors(v) if norm_edge(u, v) in wedges)
            if hits >= 2:
                out.add(cid)
                break
    return frozenset(out)


# -- validation ------------------------------------------------------------


def validate_flatness(G: Graph, F: FlatnessPair,
                      strict_pegs: bool = False,
                      lenient_pegs: bool = False) -> List[str]:
    """Check the certificate; lenient_pegs drops the degree-2 peg rule.

    Rerouted walls may carry pegs on 3-branch vertices; for those only the
    chain C <= P <= X cap Y <= V(D(W)) is enforced.
    """
    memo_key = ("validated", id(G), strict_pegs, lenient_pegs)
    with F._lock:
        got = F._memo.get(memo_key)
    if got is not None:
        return list(got)
    problems = []
    W = F.wall
    wall_bad = W.validate()
    problems.extend(f"wall: {p}" for p in wall_bad)

    if not is_separation(G, F.X, F.Y):
        problems.append("(X, Y) is not a separation of G")
    if not W.graph.vertex_set <= F.Y:
        problems.append("wall has vertices outside Y")
    for u, v in W.graph.edges:
        if not G.has_edge(u, v):
            problems.append(f"wall edge {u}-{v} missing from G")
            break

    P, C = F.pegs_corners.pegs, F.pegs_corners.corners
    mid = F.X & F.Y
    per = W.perimeter_set if not wall_bad else frozenset()
    if not C <= P:
        problems.append("corners are not a subset of pegs")
    if not P <= mid:
        problems.append("pegs leave X cap Y")
    if not mid <= per:
        problems.append("X cap Y leaves the wall perimeter")
    if not lenient_pegs:
        for p in P:
            if p in W.graph and W.graph.degree(p) != 2:
                problems.append(f"peg {p} does not have degree 2 in the wall")
    if strict_pegs and not problems:
        try:
            if not any(pc.pegs == P and pc.corners == C
                       for pc in choices_of_pegs_corners(W)):
                problems.append("(P, C) matches no subdivision presentation")
        except CapacityError:
            problems.append("pegs check skipped: wall over the desk limit")

    R = F.rendition
    H = G.subgraph(F.Y)
    problems.extend(f"rendition: {p}" for p in validate_rendition(H, R))
    if not problems:
        want = tuple(v for v in W.perimeter if v in mid)
        if not _cyclic_eq(R.omega, want):
            problems.append("omega disagrees with the perimeter order of X cap Y")
        rep = check_tightness(H, R)
        if not rep.is_tight:
            for cond, items in sorted(rep.violations.items()):
                if items:
                    problems.append(f"tightness ({cond}): {items[:3]}")
    with F._lock:
        F._memo[memo_key] = tuple(problems)
    return problems


def _cyclic_eq(a: Sequence, b: Sequence) -> bool:
    a, b = tuple(a), tuple(b)
    if len(a) != len(b):
        return False
    if not a:
        return True
    doubled = b + b
    for c in (a, tuple(reversed(a))):
        for i, x in enumerate(b):
            if x == c[0] and doubled[i:i + len(c)] == c:
                return True
    return False


# -- cell classification ---------------------------------------------------


def cycle_runs(F: FlatnessPair, cyc: Sequence):
    """Split a compass cycle into maximal runs through single cells.

    Returns (runs, flags, paths): runs as (entry node, cell, exit node),
    one flag per run telling whether the third boundary image is an internal
    vertex of the run, and the vertex path of each run.
    """
    cyc = list(cyc)
    n = len(cyc)
    if n < 3:
        raise InputError("a cycle needs at least three vertices")
    owner = F.edge_owner()
    cids = []
    for i in range(n):
        e = norm_edge(cyc[i], cyc[(i + 1) % n])
        cid = owner.get(e)
        if cid is None:
            raise InputError("cycle uses an edge outside the compass",
                             witness=list(e))
        cids.append(cid)
    if len(set(cids)) == 1:
        raise InputError("cycle is not normal: it lies inside a single flap",
                         witness=cids[0])
    start = next(i for i in range(n) if cids[i - 1] != cids[i])
    cyc = cyc[start:] + cyc[:start]
    cids = cids[start:] + cids[:start]

    pi_inv = {v: p for p, v in F.rendition.pi.items()}
    paths: List[List] = []
    groups: List[object] = []
    for i in range(n):
        if i == 0 or cids[i] != cids[i - 1]:
            groups.append(cids[i])
            paths.append([cyc[i]])
        paths[-1].append(cyc[(i + 1) % n])

    runs = []
    flags = []
    for cid, path in zip(groups, paths):
        pv, qv = path[0], path[-1]
        if pv not in pi_inv or qv not in pi_inv:
            raise InputError("cycle crosses cells away from the ground set",
                             witness=[pv, qv])
        runs.append((pi_inv[pv], cid, pi_inv[qv]))
        b = F.rendition.painting.cells[cid]
        flag = False
        if len(b) == 3:
            rest = [x for x in b if x not in (pi_inv[pv], pi_inv[qv])]
            third = F.rendition.pi.get(rest[0]) if rest else None
            flag = third is not None and third in path[1:-1]
        flags.append(flag)
    return runs, flags, [tuple(p) for p in paths]


def classify_cells(F: FlatnessPair, C: Cycle) -> Dict[object, CellClass]:
    cyc = tuple(C.perimeter) if isinstance(C, Wall) else tuple(C)
    key = ("classes", frozenset(norm_edge(cyc[i], cyc[(i + 1) % len(cyc)])
                                for i in range(len(cyc))))
    with F._lock:
        got = F._memo.get(key)
    if got is not None:
        return got

    runs, flags, _ = cycle_runs(F, cyc)
    trace = trace_normal_cycle(F.rendition.painting, runs, flags)
    untidy = untidy_cells(F)
    out: Dict[object, CellClass] = {}
    for (p, cid, q), flag, side in zip(runs, trace.arc_flags, trace.run_sides):
        if side is None or side:
            kind = "inner-perimetric"
        else:
            kind = "outer-perimetric"
        marginal = (kind == "outer-perimetric" and not flag
                    and cid not in untidy)
        out[cid] = CellClass(kind, marginal, cid in untidy)
    for cid in trace.inside_cells:
        out[cid] = CellClass("internal", False, cid in untidy)
    for cid in trace.outside_cells:
        out[cid] = CellClass("external", False, cid in untidy)
    if set(out) != set(F.rendition.painting.cells):
        raise InternalError("classification missed a cell")
    with F._lock:
        F._memo[key] = out
    return out


def influence(F: FlatnessPair, C: Cycle) -> Dict[object, Graph]:
    classes = classify_cells(F, C)
    return {cid: F.rendition.sigma[cid] for cid, cc in classes.items()
            if cc.kind != "external"}


def influence_union(F: FlatnessPair, C: Cycle) -> Graph:
    vs = set()
    es = set()
    for g in influence(F, C).values():
        vs |= g.vertex_set
        es |= g.edge_set
    return Graph(vs, es)


def is_regular(F: FlatnessPair) -> bool:
    if untidy_cells(F):
        return False
    classes = classify_cells(F, F.wall)
    return all(cc.kind != "external" and not cc.marginal
               for cc in classes.values())


# -- fixture generation ----------------------------------------------------


PROFILES = ("base", "with-flaps", "with-untidy", "with-untidy2",
            "with-marginal", "with-external", "combined", "non-well-aligned")


class _Builder:
    """Mutable painting/rendition under construction for one fixture."""

    def __init__(self, W: Wall, r: int):
        self.W = W
        self.r = r
        self.cells: Dict[str, Tuple] = {}
        self.rot: Dict[str, List[str]] = {}
        self.sigma: Dict[str, Graph] = {}
        self.pi: Dict[str, str] = {}
        self.extra_edges: List[Tuple] = []
        self.names = fresh_names(W.graph.vertices, prefix="g")
        ground = [W.branch_coords[c] for c in sorted(W.branch_coords)]
        for v in ground:
            self.rot[v] = []
            self.pi[v] = v
        elem = elementary_wall(r)
        self.coord = {elem.branch_coords[c]: c for c in elem.branch_coords}
        for key in sorted(W.seg_paths, key=lambda k: (k[0], k[1])):
            path = W.seg_paths[key]
            u, v = path[0], path[-1]
            cid = f"c|{u}|{v}"
            self.cells[cid] = (u, v)
            self.sigma[cid] = Graph((), zip(path, path[1:]))
        # rotations by straight-line angle around each branch vertex
        for v in ground:
            c = self.coord[v]
            inc = [(cid, b) for cid, b in self.cells.items() if v in b]
            def angle(item):
                other = item[1][0] if item[1][1] == v else item[1][1]
                oc = self.coord[other]
                return math.atan2(oc[1] - c[1], oc[0] - c[0])
            self.rot[v] = [cid for cid, _ in sorted(inc, key=angle)]

        self.pegs = frozenset(W.branch_coords[c] for c in temp_pegs(r))
        self.corners = frozenset(W.branch_coords[c] for c in temp_corners(r))
        self.outer = tuple(v for v in W.perimeter if v in self.pegs)

    def fresh(self) -> str:
        return next(self.names)

    def painting(self) -> Painting:
        return Painting(list(self.rot), dict(self.cells),
                        {n: tuple(r) for n, r in self.rot.items()},
                        self.outer)

    def pair(self) -> Tuple[Graph, FlatnessPair]:
        vs = set()
        es = set()
        for g in self.sigma.values():
            vs |= g.vertex_set
            es |= g.edge_set
        G = Graph(vs, es)
        compass = G
        if self.extra_edges:
            G = G.add_edges(self.extra_edges)
        apex = {u for e in self.extra_edges for u in e} - compass.vertex_set
        R = Rendition(self.painting(), dict(self.sigma), dict(self.pi),
                      tuple(self.outer))
        F = FlatnessPair(self.W, self.pegs | apex, compass.vertex_set,
                         PegsCorners(self.pegs, self.corners), R)
        return G, F

    def classify(self, cid: str) -> CellClass:
        _, F = self.pair()
        return classify_cells(F, self.W)[cid]

    def face_with_nodes(self, nodes: FrozenSet):
        from .painting import _face_node_sequence, trace_faces
        P = self.painting()
        for face in trace_faces(P):
            if frozenset(_face_node_sequence(face)) == nodes:
                return face
        raise InternalError("no face spans the requested nodes",
                            witness=sorted(nodes, key=vkey))

    def corner_slot(self, face, node: str) -> int:
        """Rotation index at `node` placing a new spoke into this face."""
        for (u, v), (x, y) in zip(face, face[1:] + face[:1]):
            if v == ("n", node) and u[0] == "c":
                return self.rot[node].index(u[1])
        raise InternalError("node does not meet the face", witness=node)

    def insert_cell(self, face, cid: str, boundary: Sequence[str],
                    want_kind: Optional[str] = None):
        """Add a cell whose existing boundary nodes sit on one face.

        Tries both boundary orientations; keeps the first painting that
        validates (and classifies as `want_kind` when given).
        """
        slots = {}
        for nd in boundary:
            if nd in self.rot and self.rot[nd]:
                slots[nd] = self.corner_slot(face, nd)
        saved = {nd: list(self.rot.get(nd, [])) for nd in boundary}
        for order in (tuple(boundary), tuple(reversed(boundary))):
            for nd in boundary:
                r = list(saved[nd])
                if nd in slots:
                    r.insert(slots[nd], cid)
                else:
                    r = [cid]
                self.rot[nd] = r
            self.cells[cid] = order
            if not validate_painting(self.painting()):
                if want_kind is None or self.classify(cid).kind == want_kind:
                    return
            for nd in boundary:
                self.rot[nd] = list(saved[nd])
        del self.cells[cid]
        raise InternalError("cell placement failed", witness=cid)

    def replace_with_cell(self, old_cids: Sequence[str], cid: str,
                          boundary: Sequence[str], sigma: Graph,
                          want_kind: Optional[str] = None):
        """Swap adjacent cells for one new cell covering their region."""
        saved_rot = {nd: list(self.rot[nd]) for nd in self.rot}
        saved_cells = dict(self.cells)
        for order in (tuple(boundary), tuple(reversed(boundary))):
            for nd in boundary:
                r = [c for c in saved_rot.get(nd, [])]
                pos = min((r.index(c) for c in old_cids if c in r),
                          default=len(r))
                r = [c for c in r if c not in old_cids]
                r.insert(min(pos, len(r)), cid)
                self.rot[nd] = r
            self.cells = {k: v for k, v in saved_cells.items()
                          if k not in old_cids}
            self.cells[cid] = order
            self.sigma[cid] = sigma
            old_sigmas = {c: self.sigma.pop(c) for c in old_cids
                          if c in self.sigma}
            if not validate_painting(self.painting()):
                if want_kind is None or self.classify(cid).kind == want_kind:
                    return
            self.sigma.update(old_sigmas)
            del self.sigma[cid]
            for nd in boundary:
                self.rot[nd] = list(saved_rot[nd])
            self.cells = dict(saved_cells)
        raise InternalError("cell replacement failed", witness=cid)


def _edge_cid(b: _Builder, u: str, v: str) -> str:
    for cid, bd in b.cells.items():
        if set(bd) == {u, v} and len(bd) == 2:
            return cid
    raise InternalError("no edge cell between the endpoints", witness=[u, v])


def _plant_star(b: _Builder, rng: random.Random, brick):
    verts = [b.W.branch_coords[c] for c in brick]
    picks = sorted(rng.sample(range(len(verts)), 3))
    nodes = [verts[i] for i in picks]
    g = b.fresh()
    cid = f"c|star|{g}"
    b.sigma[cid] = Graph((), [(nodes[0], g), (nodes[1], g), (nodes[2], g)])
    face = b.face_with_nodes(frozenset(verts))
    b.insert_cell(face, cid, nodes)


def _plant_untidy(b: _Builder, z_coord, x_coord, y_coord):
    W = b.W
    z = W.branch_coords[z_coord]
    x = W.branch_coords[x_coord]
    y = W.branch_coords[y_coord]
    a = W.seg_paths[_ckey(x_coord, z_coord)]
    bb = W.seg_paths[_ckey(z_coord, y_coord)]
    a = [v for v in a if v not in (x, z)][0]
    bb = [v for v in bb if v not in (z, y)][0]
    w = b.fresh()
    cid = f"c|untidy|{w}"
    sigma = Graph((), [(x, a), (a, z), (z, bb), (bb, y),
                       (w, a), (w, bb), (w, z)])
    e1 = _edge_cid(b, x, z)
    e2 = _edge_cid(b, z, y)
    b.replace_with_cell([e1, e2], cid, (x, z, y), sigma)


def _ckey(a, b):
    return (a, b) if a < b else (b, a)


def _plant_untidy2(b: _Builder, a_coord, b_coord):
    """Mid-segment untidy cell: the middle path vertex becomes a ground
    vertex without being a 3-branch, so a reroute drops it from the wall."""
    from .painting import _face_node_sequence, trace_faces
    W = b.W
    path = W.seg_paths[_ckey(a_coord, b_coord)]
    A, B = path[0], path[-1]
    aa, z, bb = path[1:-1]
    w = b.fresh()
    cid = f"c|untidy2|{w}"
    sigma = Graph((), [(A, aa), (aa, z), (z, bb), (bb, B),
                       (w, aa), (w, bb), (w, z)])
    b.pi[z] = z
    b.rot[z] = []
    e = _edge_cid(b, A, B)
    b.replace_with_cell([e], cid, (A, z, B), sigma)
    # escape route so the new ground vertex reaches the boundary disjointly
    for face in trace_faces(b.painting()):
        seq = _face_node_sequence(face)
        if z not in seq:
            continue
        others = [n for n in seq if n not in (z, A, B) and b.rot.get(n)]
        if not others:
            continue
        o = min(others, key=vkey)
        hid = f"c|helper2|{w}"
        b.sigma[hid] = Graph((), [(z, o)])
        b.insert_cell(face, hid, (z, o), want_kind="internal")
        return
    raise InternalError("no face available for the escape cell", witness=cid)


def _plant_marginal(b: _Builder, o_coord, d_coord, q_coord):
    """Replace perimeter edge d-q by a 3-cell whose extra node escapes to o.

    d is a 3-branch vertex; o is the peg just beyond it, so the escape cell
    fences off no peg from the outer face.
    """
    from .painting import outer_face
    W = b.W
    o = W.branch_coords[o_coord]
    d = W.branch_coords[d_coord]
    q = W.branch_coords[q_coord]
    path = W.seg_paths[_ckey(d_coord, q_coord)]
    s = [v for v in path if v not in (d, q)][0]
    u = b.fresh()
    cid = f"c|marginal|{u}"
    sigma = Graph((), [(d, s), (s, q), (s, u)])
    b.pi[u] = u
    b.rot[u] = []
    e = _edge_cid(b, d, q)
    b.replace_with_cell([e], cid, (d, u, q), sigma,
                        want_kind="outer-perimetric")
    hid = f"c|helper|{u}"
    b.sigma[hid] = Graph((), [(u, o)])
    face = outer_face(b.painting())
    b.insert_cell(face, hid, (u, o), want_kind="external")
    return (o, d, q)


def _plant_external(b: _Builder, p: str, q: str):
    w = b.fresh()
    c1 = f"c|ext|{w}|a"
    c2 = f"c|ext|{w}|b"
    from .painting import outer_face
    b.pi[w] = w
    b.rot[w] = []
    b.sigma[c1] = Graph((), [(p, w)])
    face = outer_face(b.painting())
    b.insert_cell(face, c1, (p, w), want_kind="external")
    b.sigma[c2] = Graph((), [(w, q)])
    face = outer_face(b.painting())
    b.insert_cell(face, c2, (w, q), want_kind="external")


def _marginal_sites(r: int) -> List[Tuple]:
    """Triples (o, d, q) along the perimeter: peg, 3-branch, peg."""
    per = temp_perimeter(r)
    deg = temp_degree(r)
    cset = set(temp_corners(r))
    out = []
    n = len(per)
    for i in range(n):
        o, d, q = per[i - 1], per[i], per[(i + 1) % n]
        if (deg[d] == 3 and deg[o] == 2 and deg[q] == 2
                and d not in cset and q not in cset):
            out.append((o, d, q))
    return out


def generate_fixture(seed: int, r: int,
                     profile: str = "base") -> Tuple[Graph, FlatnessPair]:
    """Deterministic (graph, flatness pair) fixture; profile plants defects."""
    if profile not in PROFILES:
        raise InputError("unknown fixture profile", witness=profile)
    if profile == "non-well-aligned":
        return _non_well_aligned_fixture(seed, r)
    rng = random.Random((seed, r, profile).__repr__())
    deg = temp_degree(r)

    forced: Dict[Tuple, int] = {}
    untidy_site = untidy2_site = marginal_site = external_site = None
    if profile in ("with-untidy", "combined"):
        inner = [c for c in temp_vertices(r)
                 if deg[c] == 3 and c not in set(temp_perimeter(r))]
        z = rng.choice(sorted(inner))
        untidy_site = ((z[0] - 1, z[1]), z, (z[0] + 1, z[1]))
        forced[_ckey(untidy_site[0], z)] = 1
        forced[_ckey(z, untidy_site[2])] = 1
    if profile == "with-untidy2":
        perset = set(temp_perimeter(r))
        sites = [e for e in temp_edges(r)
                 if e[0] not in perset and e[1] not in perset]
        untidy2_site = rng.choice(sorted(sites))
        forced[_ckey(*untidy2_site)] = 3
    if profile in ("with-marginal", "combined"):
        marginal_site = rng.choice(_marginal_sites(r))
        forced[_ckey(marginal_site[1], marginal_site[2])] = 1

    W0 = elementary_wall(r)
    plan = {}
    for (ca, cb) in W0.seg_paths:
        u, v = W0.branch_coords[ca], W0.branch_coords[cb]
        if _ckey(ca, cb) in forced:
            plan[(u, v)] = forced[_ckey(ca, cb)]
        elif rng.random() < 0.12:
            plan[(u, v)] = rng.choice((1, 1, 2))
    W = subdivide_wall(W0, plan)
    b = _Builder(W, r)

    if profile in ("with-flaps", "combined"):
        for brick in rng.sample(temp_bricks(r), 1 + rng.randrange(2)):
            _plant_star(b, rng, brick)
    if untidy_site is not None:
        _plant_untidy(b, untidy_site[1], untidy_site[0], untidy_site[2])
    if untidy2_site is not None:
        _plant_untidy2(b, *untidy2_site)
    reserved = set()
    if marginal_site is not None:
        reserved = {W.branch_coords[c] for c in marginal_site}
        _plant_marginal(b, *marginal_site)
    if profile in ("with-external", "combined"):
        grounds = [v for v in W.perimeter if v in b.pi]
        n = len(grounds)
        i = rng.randrange(n)
        while grounds[i] in reserved or grounds[(i + 1) % n] in reserved:
            i = (i + 1) % n
        _plant_external(b, grounds[i], grounds[(i + 1) % n])

    if rng.random() < 0.5:
        apex = "apex0"
        targets = rng.sample(sorted(b.pegs, key=vkey), 3)
        b.extra_edges = [(apex, t) for t in targets]

    G, F = b.pair()
    bad = validate_flatness(G, F)
    if bad:
        raise InternalError("generated fixture fails validation", witness=bad)
    return G, F


def _non_well_aligned_fixture(seed: int, r: int) -> Tuple[Graph, FlatnessPair]:
    """A pair whose leveling admits no ground-fixing wall representation.

    Built from the marginal profile: the marginal cell replaces a perimeter
    edge by a path through a flap vertex of degree 3, which breaks the
    subdivision correspondence the leveling would need.
    """
    return generate_fixture(seed, r, "with-marginal")
