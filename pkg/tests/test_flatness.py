import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatwall.errors import InputError
from flatwall.flatness import (FlatnessPair, classify_cells, cycle_runs,
                               flaps, generate_fixture, influence,
                               influence_union, is_regular, short_edges,
                               untidy_cells, validate_flatness)
from flatwall.wall import enumerate_subwalls, temp_perimeter


def test_base_fixture_valid_and_regular():
    G, F = generate_fixture(0, 3)
    assert validate_flatness(G, F) == []
    assert is_regular(F)


def test_base_fixture_strict_pegs():
    G, F = generate_fixture(0, 3)
    assert validate_flatness(G, F, strict_pegs=True) == []


def test_fixture_deterministic():
    g1, f1 = generate_fixture(7, 3, "with-flaps")
    g2, f2 = generate_fixture(7, 3, "with-flaps")
    assert g1.edge_set == g2.edge_set
    assert f1.rendition.key() == f2.rendition.key()


def test_unknown_profile_rejected():
    with pytest.raises(InputError):
        generate_fixture(0, 3, "no-such-profile")


def test_flap_bases_cover_ground():
    G, F = generate_fixture(1, 5, "with-flaps")
    got = set()
    for fl in flaps(F).values():
        got |= fl.base
    assert got == F.ground()


def test_short_edges_are_trivial_flaps():
    G, F = generate_fixture(3, 3)
    fs = flaps(F)
    want = {f.graph.edges[0] for f in fs.values() if f.trivial}
    assert short_edges(F) == want
    assert want  # the generator leaves some segments unsubdivided


def test_base_classification_counts():
    G, F = generate_fixture(2, 5)
    classes = classify_cells(F, F.wall)
    assert set(classes) == set(F.rendition.painting.cells)
    kinds = [cc.kind for cc in classes.values()]
    assert kinds.count("inner-perimetric") == len(temp_perimeter(5))
    assert kinds.count("external") == 0
    assert kinds.count("outer-perimetric") == 0
    assert not any(cc.marginal or cc.untidy for cc in classes.values())


def test_star_flaps_classify_internal():
    G, F = generate_fixture(4, 5, "with-flaps")
    classes = classify_cells(F, F.wall)
    stars = [cid for cid in classes if str(cid).startswith("c|star")]
    assert stars
    assert all(classes[cid].kind == "internal" for cid in stars)
    assert is_regular(F)


def test_untidy_fixture():
    G, F = generate_fixture(5, 5, "with-untidy")
    assert validate_flatness(G, F) == []
    bad = untidy_cells(F)
    assert len(bad) == 1
    cid = next(iter(bad))
    classes = classify_cells(F, F.wall)
    assert classes[cid].kind == "internal"
    assert classes[cid].untidy
    assert not is_regular(F)


def test_untidy_midsegment_fixture():
    G, F = generate_fixture(6, 5, "with-untidy2")
    assert validate_flatness(G, F) == []
    bad = untidy_cells(F)
    assert len(bad) == 1
    cid = next(iter(bad))
    classes = classify_cells(F, F.wall)
    assert classes[cid].kind == "internal"
    assert classes[cid].untidy and not classes[cid].marginal
    assert not is_regular(F)
    # the flagged ground vertex is not a 3-branch of the wall
    z = next(v for v in F.rendition.pi_boundary(cid)
             if F.wall.graph.degree(v) == 2 and v not in F.wall.perimeter_set)
    assert z in F.ground()


def test_untidy_midsegment_flags_subwall_runs():
    G, F = generate_fixture(6, 5, "with-untidy2")
    cid = next(iter(untidy_cells(F)))
    z = next(v for v in F.rendition.pi_boundary(cid)
             if v in F.wall.graph and F.wall.graph.degree(v) == 2
             and v not in F.wall.perimeter_set)
    touched = {z} | set(F.wall.graph.neighbors(z))
    hits = 0
    for _, _, S in enumerate_subwalls(F.wall, 3):
        if not touched <= S.perimeter_set:
            continue
        runs, flags, _ = cycle_runs(F, S.perimeter)
        for (p, c, q), fl in zip(runs, flags):
            if c == cid:
                assert fl
                hits += 1
    assert hits > 0


def test_marginal_fixture():
    G, F = generate_fixture(7, 5, "with-marginal")
    assert validate_flatness(G, F) == []
    classes = classify_cells(F, F.wall)
    marg = [cid for cid, cc in classes.items() if cc.marginal]
    assert len(marg) == 1
    assert classes[marg[0]].kind == "outer-perimetric"
    helpers = [cid for cid, cc in classes.items() if cc.kind == "external"]
    assert len(helpers) == 1
    assert not is_regular(F)


def test_external_fixture():
    G, F = generate_fixture(8, 5, "with-external")
    assert validate_flatness(G, F) == []
    classes = classify_cells(F, F.wall)
    ext = [cid for cid, cc in classes.items() if cc.kind == "external"]
    assert len(ext) == 2
    assert not is_regular(F)
    assert all(cid not in influence(F, F.wall) for cid in ext)


def test_combined_fixture_has_every_defect():
    G, F = generate_fixture(9, 5, "combined")
    assert validate_flatness(G, F) == []
    classes = classify_cells(F, F.wall)
    assert any(cc.kind == "external" for cc in classes.values())
    assert any(cc.marginal for cc in classes.values())
    assert untidy_cells(F)


def test_influence_excludes_exactly_external():
    G, F = generate_fixture(10, 5, "combined")
    classes = classify_cells(F, F.wall)
    infl = influence(F, F.wall)
    for cid, cc in classes.items():
        assert (cid in infl) == (cc.kind != "external")
    U = influence_union(F, F.wall)
    assert F.wall.graph.edge_set <= U.edge_set


def test_classification_memoized():
    G, F = generate_fixture(11, 3)
    assert classify_cells(F, F.wall) is classify_cells(F, F.wall)


def test_cycle_input_errors():
    G, F = generate_fixture(12, 3)
    per = F.wall.perimeter
    with pytest.raises(InputError):
        cycle_runs(F, per[:2])
    with pytest.raises(InputError):
        cycle_runs(F, (per[0], per[1], "not-a-vertex"))


def test_validation_catches_tampering():
    G, F = generate_fixture(13, 3)
    peg = next(iter(F.pegs_corners.pegs))
    broken = FlatnessPair(F.wall, F.X - {peg}, F.Y, F.pegs_corners,
                          F.rendition)
    assert validate_flatness(G, broken)
    broken = FlatnessPair(F.wall, F.X, F.Y - {peg}, F.pegs_corners,
                          F.rendition)
    assert validate_flatness(G, broken)


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10000))
def test_generated_pairs_always_validate(seed):
    rng = random.Random(seed)
    profile = rng.choice(["base", "with-flaps", "with-untidy", "with-untidy2",
                          "with-marginal", "with-external", "combined"])
    r = rng.choice([3, 5])
    G, F = generate_fixture(seed, r, profile)
    assert validate_flatness(G, F) == []
    classes = classify_cells(F, F.wall)
    assert set(classes) == set(F.rendition.painting.cells)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2000))
def test_subwalls_classify_without_error(seed):
    rng = random.Random(seed)
    profile = rng.choice(["base", "with-flaps", "with-untidy"])
    G, F = generate_fixture(seed, 5, profile)
    subs = list(enumerate_subwalls(F.wall, 3))
    _, _, S = subs[rng.randrange(len(subs))]
    classes = classify_cells(F, S)
    assert set(classes) == set(F.rendition.painting.cells)
    assert set(influence(F, S)) <= set(influence(F, F.wall))
