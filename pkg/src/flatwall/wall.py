"""Walls: elementary walls, subdivisions, subwalls, pegs/corners, tilts.

A Wall always carries its template correspondence: a map from template
coordinates of the elementary r-wall to vertices, plus one subdivision path
per template edge. Everything else (perimeter, bricks, horizontal and
vertical paths) is derived from the template.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .config import DEFAULT_LIMITS
from .errors import CapacityError, InputError, InternalError
from .graph import Graph, vkey

Coord = Tuple[int, int]


# -- template geometry -----------------------------------------------------


def check_height(r: int):
    if r < 3 or r % 2 == 0:
        raise InputError("height must be an odd integer >= 3", witness=r)


def temp_vertices(r: int) -> List[Coord]:
    check_height(r)
    out = [(x, y) for y in range(1, r + 1) for x in range(1, 2 * r + 1)]
    out.remove((2 * r, 1))
    out.remove((1, r))
    return out

def temp_edges(r: int) -> List[Tuple[Coord, Coord]]:
    vs = set(temp_vertices(r))
    out = []
    for (x, y) in sorted(vs):
        if (x + 1, y) in vs:
            out.append(((x, y), (x + 1, y)))
        if (x, y + 1) in vs and (x + y) % 2 == 0:
            out.append(((x, y), (x, y + 1)))
    return out


def temp_degree(r: int) -> Dict[Coord, int]:
    deg: Dict[Coord, int] = {c: 0 for c in temp_vertices(r)}
    for a, b in temp_edges(r):
        deg[a] += 1
        deg[b] += 1
    return deg


def temp_hpath(r: int, j: int) -> List[Coord]:
    vs = set(temp_vertices(r))
    return [(x, j) for x in range(1, 2 * r + 1) if (x, j) in vs]


def temp_vpath(r: int, m: int) -> List[Coord]:
    # snake through columns 2m-1 and 2m
    i = 2 * m - 1
    path = [(i, 1)]
    cur = i
    for y in range(1, r):
        col = i if y % 2 == 1 else i + 1
        if col != cur:
            path.append((col, y))
            cur = col
        path.append((col, y + 1))
    return path


def temp_perimeter(r: int) -> List[Coord]:
    left = temp_vpath(r, 1)                      # (1,1) .. (2,r)
    top = temp_hpath(r, r)                       # (2,r) .. (2r,r)
    right = list(reversed(temp_vpath(r, r)))     # (2r,r) .. (2r-1,1)
    bottom = list(reversed(temp_hpath(r, 1)))    # (2r-1,1) .. (1,1)
    cycle = left + top[1:] + right[1:] + bottom[1:-1]
    return cycle


def temp_bricks(r: int) -> List[List[Coord]]:
    vs = set(temp_vertices(r))
    out = []
    for y in range(1, r):
        cols = [c for c in range(1, 2 * r + 1)
                if (c + y) % 2 == 0 and (c, y) in vs and (c, y + 1) in vs]
        for c1, c2 in zip(cols, cols[1:]):
            cyc = [(x, y) for x in range(c1, c2 + 1)]
            cyc += [(x, y + 1) for x in range(c2, c1 - 1, -1)]
            if all(v in vs for v in cyc):
                out.append(cyc)
    return out


def temp_corners(r: int) -> List[Coord]:
    return [(1, 1), (2, r), (2 * r - 1, 1), (2 * r, r)]


def temp_pegs(r: int) -> List[Coord]:
    deg = temp_degree(r)
    return [c for c in temp_perimeter(r) if deg[c] == 2]


def _norm_cedge(a: Coord, b: Coord) -> Tuple[Coord, Coord]:
    return (a, b) if a < b else (b, a)


# -- the Wall value --------------------------------------------------------


class Wall:
    """A subdivision of the elementary r-wall with explicit correspondence."""

    __slots__ = ("height", "branch_coords", "seg_paths", "_graph", "_vmap")

    def __init__(self, height: int, branch_coords: Dict[Coord, object],
                 seg_paths: Dict[Tuple[Coord, Coord], Sequence]):
        check_height(height)
        self.height = height
        self.branch_coords = dict(branch_coords)
        self.seg_paths = {_norm_cedge(*k): tuple(p) for k, p in seg_paths.items()}
        edges = []
        for p in self.seg_paths.values():
            edges.extend(zip(p, p[1:]))
        self._graph = Graph(self.branch_coords.values(), edges)
        self._vmap = None

    @property
    def graph(self) -> Graph:
        return self._graph

    def coord_of(self, v) -> Optional[Coord]:
        if self._vmap is None:
            self._vmap = {w: c for c, w in self.branch_coords.items()}
        return self._vmap.get(v)

    def expand(self, coords: Sequence[Coord]) -> Tuple:
        """Concatenate subdivision paths along a template coordinate walk."""
        out: List = []
        for a, b in zip(coords, coords[1:]):
            key = _norm_cedge(a, b)
            if key not in self.seg_paths:
                raise InputError("not a template edge", witness=[a, b])
            p = list(self.seg_paths[key])
            if p[0] != self.branch_coords[a]:
                p.reverse()
            if out:
                p = p[1:]
            out.extend(p)
        if not out:
            out = [self.branch_coords[coords[0]]]
        return tuple(out)

    def expand_cycle(self, coords: Sequence[Coord]) -> Tuple:
        walk = list(coords) + [coords[0]]
        return self.expand(walk)[:-1]

    def horizontal_path(self, j: int) -> Tuple:
        return self.expand(temp_hpath(self.height, j))

    def vertical_path(self, m: int) -> Tuple:
        return self.expand(temp_vpath(self.height, m))

    @property
    def perimeter(self) -> Tuple:
        """D(W) as a cyclic vertex sequence."""
        return self.expand_cycle(temp_perimeter(self.height))

    @property
    def perimeter_set(self) -> FrozenSet:
        return frozenset(self.perimeter)

    def bricks(self) -> List[Tuple]:
        return [self.expand_cycle(b) for b in temp_bricks(self.height)]

    def internal_bricks(self) -> List[Tuple]:
        per = self.perimeter_set
        return [b for b in self.bricks() if not (set(b) & per)]

    def three_branch_vertices(self) -> FrozenSet:
        G = self._graph
        return frozenset(v for v in G.vertex_set if G.degree(v) == 3)

    def validate(self) -> List[str]:
        problems = []
        r = self.height
        tset = set(temp_vertices(r))
        if set(self.branch_coords) != tset:
            problems.append("branch coordinate set differs from template")
            return problems
        imgs = list(self.branch_coords.values())
        if len(set(imgs)) != len(imgs):
            problems.append("branch coordinate map is not injective")
        tedges = {_norm_cedge(*e) for e in temp_edges(r)}
        if set(self.seg_paths) != tedges:
            problems.append("subdivision paths do not match template edges")
            return problems
        seen_edges = set()
        seen_internal = set()
        deg = temp_degree(r)
        for (a, b), p in self.seg_paths.items():
            ends = {p[0], p[-1]}
            if ends != {self.branch_coords[a], self.branch_coords[b]}:
                problems.append(f"segment {a}-{b} endpoints mismatch")
            if len(set(p)) != len(p):
                problems.append(f"segment {a}-{b} revisits a vertex")
            for e in zip(p, p[1:]):
                key = (e[0], e[1]) if vkey(e[0]) < vkey(e[1]) else (e[1], e[0])
                if key in seen_edges:
                    problems.append(f"edge {key} used by two segments")
                seen_edges.add(key)
            for v in p[1:-1]:
                if v in seen_internal or v in set(imgs):
                    problems.append(f"subdivision vertex {v} reused")
                seen_internal.add(v)
        for c, v in self.branch_coords.items():
            if v in self._graph and self._graph.degree(v) != deg[c]:
                problems.append(f"vertex {v} degree {self._graph.degree(v)} != template {deg[c]}")
        return problems

    def __eq__(self, other):
        return (isinstance(other, Wall) and self.height == other.height
                and self.branch_coords == other.branch_coords
                and self.seg_paths == other.seg_paths)

    def __repr__(self):
        return f"Wall(height={self.height}, n={self._graph.n})"


@dataclass(frozen=True)
class PegsCorners:
    pegs: FrozenSet
    corners: FrozenSet


# -- constructions ---------------------------------------------------------


def _cid(c: Coord) -> str:
    return f"{c[0]},{c[1]}"


def elementary_wall(r: int) -> Wall:
    check_height(r)
    branch = {c: _cid(c) for c in temp_vertices(r)}
    segs = {e: (_cid(e[0]), _cid(e[1])) for e in temp_edges(r)}
    return Wall(r, branch, segs)


def fresh_names(existing: Iterable, prefix: str = "s"):
    taken = set(existing)
    i = 0
    while True:
        name = f"{prefix}{i}"
        i += 1
        if name not in taken:
            taken.add(name)
            yield name


def subdivide_wall(W: Wall, plan: Dict) -> Wall:
    """Subdivide wall edges; plan maps a wall edge (u,v) to a vertex count."""
    wanted = {}
    for e, cnt in plan.items():
        u, v = e
        key = (u, v) if vkey(u) < vkey(v) else (v, u)
        if not W.graph.has_edge(u, v):
            raise InputError("plan edge not in wall", witness=[u, v])
        if cnt < 0:
            raise InputError("negative subdivision count", witness=cnt)
        wanted[key] = cnt
    names = fresh_names(W.graph.vertices)
    segs = {}
    for ce, p in W.seg_paths.items():
        newp = [p[0]]
        for u, v in zip(p, p[1:]):
            key = (u, v) if vkey(u) < vkey(v) else (v, u)
            for _ in range(wanted.get(key, 0)):
                newp.append(next(names))
            newp.append(v)
        segs[ce] = tuple(newp)
    return Wall(W.height, W.branch_coords, segs)


# -- deriving a template from explicit paths -------------------------------


def _runs_on(path: Sequence, members: FrozenSet) -> List[List]:
    runs = []
    cur: List = []
    for v in path:
        if v in members:
            cur.append(v)
        elif cur:
            runs.append(cur)
            cur = []
    if cur:
        runs.append(cur)
    return runs


def _try_template(hpaths: List[Tuple], vpaths: List[Tuple]) -> Optional[Wall]:
    r = len(hpaths)
    hpos = [{v: i for i, v in enumerate(p)} for p in hpaths]
    vpos = [{v: i for i, v in enumerate(p)} for p in vpaths]

    inter: List[List[Optional[List]]] = [[None] * (r + 1) for _ in range(r + 1)]
    for m in range(1, r + 1):
        for k in range(1, r + 1):
            runs = _runs_on(vpaths[m - 1], frozenset(hpos[k - 1]))
            runs = [run for run in runs if run]
            if len(runs) != 1:
                return None
            run = runs[0]
            # contiguous along the row as well
            idx = sorted(hpos[k - 1][v] for v in run)
            if idx != list(range(idx[0], idx[0] + len(idx))):
                return None
            inter[m][k] = sorted(run, key=lambda v: hpos[k - 1][v])

    branch: Dict[Coord, object] = {}
    segs: Dict[Tuple[Coord, Coord], Tuple] = {}

    def hsub(k: int, a, b) -> Tuple:
        i, j = hpos[k - 1][a], hpos[k - 1][b]
        if i > j:
            return None
        return tuple(hpaths[k - 1][i:j + 1])

    def vsub(m: int, a, b) -> Tuple:
        i, j = vpos[m - 1][a], vpos[m - 1][b]
        if i > j:
            return None
        return tuple(vpaths[m - 1][i:j + 1])

    # middle rows: the run gives the pair (2m-1,k),(2m,k)
    for k in range(2, r):
        for m in range(1, r + 1):
            run = inter[m][k]
            if len(run) < 2:
                return None
            branch[(2 * m - 1, k)] = run[0]
            branch[(2 * m, k)] = run[-1]

    # bottom and top attachments
    bottom_att = []
    top_att = []
    for m in range(1, r + 1):
        run_b = inter[m][1]
        run_t = inter[m][r]
        vp = vpaths[m - 1]
        a = max(run_b, key=lambda v: vpos[m - 1][v])   # go upward from here
        b = min(run_t, key=lambda v: vpos[m - 1][v])
        branch[(2 * m - 1, 1)] = a
        branch[(2 * m, r)] = b
        bottom_att.append(a)
        top_att.append(b)

    # bottom row intermediates (2m,1), top row intermediates (2m+1,r)
    for m in range(1, r):
        k1, k2 = hpos[0][bottom_att[m - 1]], hpos[0][bottom_att[m]]
        if k2 - k1 < 2:
            return None
        branch[(2 * m, 1)] = hpaths[0][k1 + 1]
        k1, k2 = hpos[r - 1][top_att[m - 1]], hpos[r - 1][top_att[m]]
        if k2 - k1 < 2:
            return None
        branch[(2 * m + 1, r)] = hpaths[r - 1][k1 + 1]

    if len(set(branch.values())) != len(branch):
        return None

    # row segments
    for k in range(1, r + 1):
        row_coords = temp_hpath(r, k)
        for ca, cb in zip(row_coords, row_coords[1:]):
            sub = hsub(k, branch[ca], branch[cb])
            if sub is None or len(sub) < 2:
                return None
            segs[_norm_cedge(ca, cb)] = sub

    # vertical segments
    for k in range(1, r):
        for m in range(1, r + 1):
            c = 2 * m - 1 if k % 2 == 1 else 2 * m
            lo, hi = branch.get((c, k)), branch.get((c, k + 1))
            if lo is None or hi is None:
                return None
            sub = vsub(m, lo, hi)
            if sub is None or len(sub) < 2:
                return None
            # internal vertices must avoid the rows strictly
            segs[_norm_cedge((c, k), (c, k + 1))] = sub

    wall = Wall(r, branch, segs)
    if wall.validate():
        return None
    return wall


def wall_from_paths(hpaths: Sequence[Sequence], vpaths: Sequence[Sequence]) -> Wall:
    """Derive a Wall from explicit horizontal/vertical paths.

    Tries the four presentations (row order, column order) and returns the
    first that yields a valid template correspondence.
    """
    hp = [tuple(p) for p in hpaths]
    vp = [tuple(p) for p in vpaths]
    r = len(hp)
    if r != len(vp):
        raise InputError("need equally many horizontal and vertical paths")
    check_height(r)
    for rows_rev in (False, True):
        for cols_rev in (False, True):
            hs = list(reversed(hp)) if rows_rev else list(hp)
            vs = list(reversed(vp)) if cols_rev else list(vp)
            # normalize path orientations against the chosen orders
            hs2 = [_orient(p, vs[0], vs[-1]) for p in hs]
            vs2 = [_orient(p, hs[0], hs[-1]) for p in vs]
            if any(p is None for p in hs2) or any(p is None for p in vs2):
                continue
            got = _try_template(hs2, vs2)
            if got is not None:
                return got
    raise InputError("paths do not assemble into a wall")


def _orient(path: Tuple, first: Tuple, last: Tuple) -> Optional[Tuple]:
    """Orient path so it meets `first` before `last`."""
    fs, ls = set(first), set(last)
    a = next((i for i, v in enumerate(path) if v in fs), None)
    b = next((i for i, v in enumerate(path) if v in ls), None)
    if a is None or b is None:
        return None
    hi_a = max(i for i, v in enumerate(path) if v in fs)
    lo_b = min(i for i, v in enumerate(path) if v in ls)
    if hi_a < lo_b:
        return path
    hi_b = max(i for i, v in enumerate(path) if v in ls)
    if hi_b < a:
        return tuple(reversed(path))
    return None


# -- subwalls --------------------------------------------------------------


def row_selection_valid(rows: Sequence[int]) -> bool:
    """Middle rows must keep a consistent parity pattern."""
    rows = list(rows)
    rp = len(rows)
    mids = rows[1:-1]
    return any(
        all((j - (k + 2) - eps) % 2 == 0 for k, j in enumerate(mids))
        for eps in (0, 1))


def subwall(W: Wall, rows: Sequence[int], cols: Sequence[int]) -> Wall:
    rows = sorted(set(rows))
    cols = sorted(set(cols))
    rp = len(rows)
    if rp != len(cols):
        raise InputError("row and column selections must have equal size")
    check_height(rp)
    r = W.height
    if rows[0] < 1 or rows[-1] > r or cols[0] < 1 or cols[-1] > r:
        raise InputError("selection index out of range",
                         witness={"rows": rows, "cols": cols})
    if not row_selection_valid(rows):
        raise InputError("row selection breaks the wall parity pattern",
                         witness=rows)
    hp = [W.horizontal_path(j) for j in rows]
    vp = [W.vertical_path(m) for m in cols]
    return wall_from_paths(hp, vp)


def enumerate_subwalls(W: Wall, rp: int):
    """All valid (rows, cols, subwall) selections, lexicographic order."""
    check_height(rp)
    idx = range(1, W.height + 1)
    for rows in itertools.combinations(idx, rp):
        if not row_selection_valid(rows):
            continue
        for cols in itertools.combinations(idx, rp):
            yield rows, cols, subwall(W, rows, cols)


def count_subwall_selections(r: int, rp: int) -> int:
    """Number of (rows, cols) selections, including parity-invalid ones."""
    from math import comb
    return comb(r, rp) ** 2


# -- interiors and tilts ---------------------------------------------------


def interior(W: Wall) -> Graph:
    G = W.graph
    per = W.perimeter
    per_set = set(per)
    per_edges = set()
    cyc = list(per) + [per[0]]
    for u, v in zip(cyc, cyc[1:]):
        per_edges.add((u, v) if vkey(u) < vkey(v) else (v, u))
    H = G.remove_edges(per_edges)
    drop = {v for v in per_set if G.degree(v) == 2}
    return H.remove_vertices(drop)


def is_tilt(W1: Wall, W2: Wall) -> bool:
    return interior(W1) == interior(W2)


# -- pegs and corners ------------------------------------------------------


def _suppressed(G: Graph):
    """Branch vertices plus arcs (maximal paths through degree-2 vertices)."""
    branch = sorted((v for v in G.vertex_set if G.degree(v) != 2), key=vkey)
    bset = set(branch)
    arcs = []
    seen_edges = set()
    for b in branch:
        for nb in G.neighbors(b):
            e0 = (b, nb) if vkey(b) < vkey(nb) else (nb, b)
            if e0 in seen_edges:
                continue
            path = [b, nb]
            seen_edges.add(e0)
            while path[-1] not in bset:
                v = path[-1]
                nxt = [u for u in G.neighbors(v) if u != path[-2]]
                if not nxt:
                    break
                path.append(nxt[0])
                e = (v, nxt[0]) if vkey(v) < vkey(nxt[0]) else (nxt[0], v)
                seen_edges.add(e)
            if path[-1] in bset:
                arcs.append(tuple(path))
    # dedupe reversed duplicates
    out = []
    seen = set()
    for a in arcs:
        key = min(a, tuple(reversed(a)), key=lambda p: [vkey(v) for v in p])
        if key not in seen:
            seen.add(key)
            out.append(key)
    return branch, out


def _multigraph_isos(b1, arcs1, b2, arcs2):
    """All isomorphisms of suppressed multigraphs, as (vertex map, arc map)."""
    if len(b1) != len(b2) or len(arcs1) != len(arcs2):
        return
    adj1: Dict = {}
    for a in arcs1:
        adj1.setdefault(a[0], []).append(a)
        if a[-1] != a[0]:
            adj1.setdefault(a[-1], []).append(a)
    adj2: Dict = {}
    for a in arcs2:
        adj2.setdefault(a[0], []).append(a)
        if a[-1] != a[0]:
            adj2.setdefault(a[-1], []).append(a)

    def pair_count(adj, u, v):
        return sum(1 for a in adj.get(u, []) if (a[0], a[-1]) in ((u, v), (v, u)))

    n = len(b1)
    mapping: Dict = {}
    used = set()

    def rec(i):
        if i == n:
            # arcs must match by multiplicity; build one arc matching
            yield dict(mapping)
            return
        v = b1[i]
        for w in b2:
            if w in used:
                continue
            if len(adj1.get(v, [])) != len(adj2.get(w, [])):
                continue
            ok = True
            for u in mapping:
                if pair_count(adj1, v, u) != pair_count(adj2, mapping[u], w):
                    ok = False
                    break
            if not ok:
                continue
            mapping[v] = w
            used.add(w)
            yield from rec(i + 1)
            del mapping[v]
            used.discard(w)

    yield from rec(0)


def choices_of_pegs_corners(W: Wall, limit: Optional[int] = None):
    """Enumerate (P, C) pairs over all elementary presentations, deduped."""
    limit = DEFAULT_LIMITS.pegs_enum if limit is None else limit
    if W.graph.n > limit:
        raise CapacityError("pegs/corners enumeration over desk limit",
                            witness=W.graph.n)
    r = W.height
    T = elementary_wall(r)
    tb, tarcs = _suppressed(T.graph)
    wb, warcs = _suppressed(W.graph)
    deg = temp_degree(r)
    per_coords = temp_perimeter(r)
    peg_coords = set(temp_pegs(r))
    corner_coords = set(temp_corners(r))
    tcoord = {T.branch_coords[c]: c for c in T.branch_coords}

    emitted = set()
    for vmap in _multigraph_isos(tb, tarcs, wb, warcs):
        # match arcs: for each template arc find candidate host arcs
        choice = _match_arcs(tarcs, warcs, vmap)
        if choice is None:
            continue
        # per template arc, distribute its degree-2 template vertices over
        # the host arc's internal vertices, order preserving
        per_arc_options = []
        for tarc, harc in choice:
            t_int = [tcoord[v] for v in tarc[1:-1]]
            # orient host arc to match template arc ends
            if vmap[tarc[0]] == harc[0]:
                h_int = list(harc[1:-1])
            else:
                h_int = list(reversed(harc[1:-1]))
            opts = []
            for pos in itertools.combinations(range(len(h_int)), len(t_int)):
                opts.append(list(zip(t_int, (h_int[p] for p in pos))))
            if not opts:
                break
            per_arc_options.append(opts)
        else:
            for combo in itertools.product(*per_arc_options):
                placed = dict(kv for part in combo for kv in part)
                pegs = set()
                corners = set()
                for c in peg_coords:
                    img = placed.get(c)
                    if img is None:
                        img = vmap.get(T.branch_coords[c])
                    if img is None:
                        break
                    pegs.add(img)
                    if c in corner_coords:
                        corners.add(img)
                else:
                    key = (frozenset(pegs), frozenset(corners))
                    if key not in emitted:
                        emitted.add(key)
                        yield PegsCorners(frozenset(pegs), frozenset(corners))


def _match_arcs(tarcs, harcs, vmap):
    """Greedy arc matching with backtracking; arcs need enough internal room."""
    remaining = list(harcs)

    def fits(tarc, harc):
        ends_t = {vmap[tarc[0]], vmap[tarc[-1]]}
        if ends_t != {harc[0], harc[-1]}:
            return False
        return len(harc) >= len(tarc)  # room for the template's inner vertices

    out = []

    def rec(i):
        if i == len(tarcs):
            return True
        tarc = tarcs[i]
        for j, harc in enumerate(remaining):
            if harc is not None and fits(tarc, harc):
                remaining[j] = None
                out.append((tarc, harc))
                if rec(i + 1):
                    return True
                out.pop()
                remaining[j] = harc
        return False

    if rec(0):
        return out
    return None
