import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatwall.errors import InputError
from flatwall.graph import Graph
from flatwall.wall import (Wall, choices_of_pegs_corners, elementary_wall,
                           enumerate_subwalls, interior, is_tilt,
                           row_selection_valid, subdivide_wall, subwall,
                           temp_bricks, temp_corners, temp_pegs,
                           temp_vertices, wall_from_paths)

import oracles


def random_subdivision(W, seed, max_extra=2):
    rng = random.Random(seed)
    plan = {e: rng.randint(0, max_extra) for e in W.graph.edges}
    return subdivide_wall(W, plan)


def test_elementary_counts():
    for r in (3, 5, 7):
        W = elementary_wall(r)
        assert W.validate() == []
        assert W.graph.n == 2 * r * r - 2
        m = (r - 2) * (2 * r - 1) + 2 * (2 * r - 2) + r * (r - 1)
        assert W.graph.m == m
        assert len(W.bricks()) == (r - 1) ** 2
        assert W.graph.connected()
        assert all(W.graph.degree(v) in (2, 3) for v in W.graph.vertices)


def test_elementary_three_wall_shape():
    W = elementary_wall(3)
    assert W.graph.n == 16 and W.graph.m == 19
    per = W.perimeter
    assert len(per) == 14
    cyc = list(per) + [per[0]]
    for a, b in zip(cyc, cyc[1:]):
        assert W.graph.has_edge(a, b)
    assert len(set(per)) == len(per)
    # every brick is a 6-cycle here
    for b in W.bricks():
        assert len(b) == 6
        for x, y in zip(b, b[1:] + (b[0],)):
            assert W.graph.has_edge(x, y)
    assert W.internal_bricks() == []


def test_internal_brick_counts():
    # bricks not meeting the perimeter form an inner (r-3)x(r-3) pattern
    for r in (3, 5, 7):
        W = elementary_wall(r)
        inner = W.internal_bricks()
        assert len(inner) == (r - 3) ** 2


def test_subdivision_keeps_shape():
    W = elementary_wall(3)
    S = random_subdivision(W, seed=7)
    assert S.validate() == []
    assert oracles.is_subdivision_of(S.graph, W.graph)
    assert len(S.perimeter) >= len(W.perimeter)
    assert len(S.bricks()) == len(W.bricks())


def test_subdivide_rejects_bad_plan():
    W = elementary_wall(3)
    with pytest.raises(InputError):
        subdivide_wall(W, {("1,1", "6,3"): 1})
    e = W.graph.edges[0]
    with pytest.raises(InputError):
        subdivide_wall(W, {e: -1})


def test_wall_from_paths_roundtrip():
    for r in (3, 5):
        W = elementary_wall(r)
        hp = [W.horizontal_path(j) for j in range(1, r + 1)]
        vp = [W.vertical_path(m) for m in range(1, r + 1)]
        got = wall_from_paths(hp, vp)
        assert got.validate() == []
        assert got.graph == W.graph
        # flipped presentations still assemble the same graph
        got2 = wall_from_paths(list(reversed(hp)), list(reversed(vp)))
        assert got2.graph == W.graph


def test_subwall_basic():
    W = elementary_wall(5)
    S = subwall(W, (1, 2, 3), (1, 2, 3))
    assert S.validate() == []
    assert S.height == 3
    assert oracles.is_subdivision_of(S.graph, elementary_wall(3).graph)
    assert S.graph.vertex_set <= W.graph.vertex_set
    for u, v in S.graph.edges:
        assert W.graph.has_edge(u, v)


def test_subwall_of_subdivided_wall():
    W = random_subdivision(elementary_wall(5), seed=11, max_extra=1)
    for rows, cols in [((1, 3, 5), (1, 3, 5)), ((2, 3, 4), (1, 2, 5))]:
        S = subwall(W, rows, cols)
        assert S.validate() == []
        assert oracles.is_subdivision_of(S.graph, elementary_wall(3).graph)
        assert S.graph.vertex_set <= W.graph.vertex_set


def test_row_selection_parity():
    # any three rows work; five rows need a consistent stagger
    assert all(row_selection_valid(rs)
               for rs in itertools.combinations(range(1, 8), 3))
    valid5 = [rs for rs in itertools.combinations(range(1, 8), 5)
              if row_selection_valid(rs)]
    assert len(valid5) == 12
    assert (1, 2, 3, 4, 5) in valid5
    assert (1, 2, 3, 5, 6) not in valid5
    with pytest.raises(InputError):
        subwall(elementary_wall(7), (1, 2, 3, 5, 6), (1, 2, 3, 4, 5))


def test_subwall_enumeration_counts():
    W = elementary_wall(5)
    subs = list(enumerate_subwalls(W, 3))
    assert len(subs) == 100  # C(5,3)^2
    seen = set()
    for rows, cols, S in subs:
        assert S.validate() == []
        key = frozenset(S.graph.edges)
        assert key not in seen
        seen.add(key)


def test_five_subwalls_of_seven_wall():
    W = elementary_wall(7)
    count = 0
    for rows in [(1, 2, 3, 4, 5), (3, 4, 5, 6, 7), (1, 2, 5, 6, 7)]:
        for cols in [(1, 2, 3, 4, 5), (2, 3, 5, 6, 7)]:
            S = subwall(W, rows, cols)
            assert S.validate() == []
            assert oracles.is_subdivision_of(S.graph, elementary_wall(5).graph)
            count += 1
    assert count == 6


def test_interior_and_tilts():
    W = elementary_wall(3)
    assert is_tilt(W, W)
    inner = interior(W)
    # the two inner branch vertices plus the perimeter branch vertices
    assert inner.vertex_set == {"3,2", "4,2", "3,1", "4,3", "2,2", "5,2"}
    assert inner.edge_set == {("3,1", "3,2"), ("3,2", "4,2"),
                              ("4,2", "4,3"), ("2,2", "3,2"), ("4,2", "5,2")}
    # subdividing a perimeter edge leaves the interior alone
    per = W.perimeter
    pe = (per[0], per[1])
    S = subdivide_wall(W, {pe: 1})
    assert is_tilt(W, S)
    # subdividing an interior edge does not
    S2 = subdivide_wall(W, {("3,2", "4,2"): 1})
    assert not is_tilt(W, S2)


def test_pegs_corners_elementary():
    W = elementary_wall(3)
    choices = list(choices_of_pegs_corners(W))
    # the automorphism group (order 4, checked against networkx) yields two
    # corner sets over the same peg set
    assert len(choices) == 2
    std_corners = frozenset(f"{x},{y}" for x, y in temp_corners(3))
    std_pegs = frozenset(f"{x},{y}" for x, y in temp_pegs(3))
    assert std_corners in {pc.corners for pc in choices}
    for pc in choices:
        assert pc.pegs == std_pegs
        assert len(pc.corners) == 4
        assert pc.corners <= pc.pegs
        assert all(W.graph.degree(v) == 2 for v in pc.pegs)


def test_pegs_corners_grow_with_subdivision():
    W = elementary_wall(3)
    per = W.perimeter
    S = subdivide_wall(W, {(per[0], per[1]): 1})
    choices = list(choices_of_pegs_corners(S))
    assert len(choices) > 1
    for pc in choices:
        assert len(pc.corners) == 4
        assert pc.corners <= pc.pegs
        assert all(S.graph.degree(v) == 2 for v in pc.pegs)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_random_subdivisions_stay_walls(seed):
    rng = random.Random(seed)
    r = rng.choice((3, 5))
    W = elementary_wall(r)
    S = random_subdivision(W, seed=seed, max_extra=2)
    assert S.validate() == []
    assert oracles.is_subdivision_of(S.graph, W.graph)
    rows = tuple(sorted(rng.sample(range(1, r + 1), 3)))
    cols = tuple(sorted(rng.sample(range(1, r + 1), 3)))
    T = subwall(S, rows, cols)
    assert T.validate() == []
    assert oracles.is_subdivision_of(T.graph, elementary_wall(3).graph)
