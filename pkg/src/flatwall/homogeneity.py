"""Flap colorings, palettes, and the homogeneous-subwall search.

A flap coloring assigns each cell one of w colors; the palette of a cycle
is the color set of its influence flaps. A pair is homogeneous when every
internal brick shows the same palette. Walls of height h(r, w) always
contain an r-subwall all of whose tilts are homogeneous, so searching the
subwalls in lexicographic order and tilting each one is guaranteed to
succeed at that height.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Optional, Sequence, Union

from .errors import InputError
from .flatness import FlatnessPair, influence
from .tilt import TiltResult, compute_tilt
from .wall import Wall, enumerate_subwalls


@dataclass(frozen=True)
class FlapColoring:
    """A total map from cell ids to colors 1..w."""

    colors: Dict[object, int]
    w: int

    def __post_init__(self):
        if self.w < 1:
            raise InputError("a coloring needs at least one color")
        bad = [c for c, k in self.colors.items()
               if not isinstance(k, int) or not 1 <= k <= self.w]
        if bad:
            raise InputError("color outside 1..w", witness=sorted(bad, key=str))

    def color(self, cid, fallback=None) -> int:
        if cid in self.colors:
            return self.colors[cid]
        if fallback is not None and fallback(cid) in self.colors:
            return self.colors[fallback(cid)]
        raise InputError("coloring misses a flap", witness=cid)


def example_coloring(F: FlatnessPair, k: int = 2) -> FlapColoring:
    """A demo coloring by boundary size and flap order mod k; not canonical."""
    colors = {}
    for cid, g in F.rendition.sigma.items():
        b = len(F.rendition.painting.cells[cid])
        colors[cid] = 1 + (b + g.n) % k
    return FlapColoring(colors, max(k, max(colors.values(), default=1)))


def h(r: int, w: int) -> int:
    if r < 3 or r % 2 == 0:
        raise InputError("height parameter must be odd and at least 3",
                         witness=r)
    if w < 1:
        raise InputError("color count must be positive", witness=w)
    val = r
    for _ in range(w - 1):
        val = r * (val - 1) + 1
    return val


Cycle = Union[Wall, Sequence]


def palette(F: FlatnessPair, zeta: FlapColoring, C: Cycle,
            fallback=None) -> FrozenSet:
    return frozenset(zeta.color(cid, fallback) for cid in influence(F, C))


def is_homogeneous(F: FlatnessPair, zeta: FlapColoring,
                   fallback=None) -> bool:
    pals = {palette(F, zeta, b, fallback)
            for b in F.wall.internal_bricks()}
    return len(pals) <= 1


def find_homogeneous(G, F: FlatnessPair, zeta: FlapColoring, r: int,
                     allow_short: bool = False) -> Optional[TiltResult]:
    """First r-subwall (lexicographic) whose tilt is homogeneous.

    New chain cells created by a tilt inherit the color of their source
    cell; internal bricks never see them when the tilt properties hold, so
    this only matters for palettes of larger cycles.
    """
    need = h(r, zeta.w)
    if F.height < need and not allow_short:
        raise InputError(
            f"height {F.height} is below the guarantee threshold {need}",
            witness=(r, zeta.w))
    for rows, cols, S in enumerate_subwalls(F.wall, r):
        res = compute_tilt(G, F, S)
        src = res.provenance
        if is_homogeneous(res.pair, zeta,
                          fallback=lambda cid: src.get(cid, (cid,))[0]):
            return res
    if allow_short:
        return None
    raise InputError("no homogeneous subwall found despite admissible height")
