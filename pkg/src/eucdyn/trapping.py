"""Trapped rectangles: cells whose closure lies in a norm neighborhood.

A cell is trapped below threshold t for a lattice point q when the
largest of the four corner values |s - conj(q)| * |u - q| is strictly
below t; the corner rule is exact because on a box the per-axis maximum
of |coordinate - center| is attained at an endpoint.  Only single-point
trapping is tested (a cell jointly covered by several neighborhoods but
by no single one is not counted); that under-approximation keeps every
derived bound sound and does not disturb the limit, and ``straddling``
reports where it could bite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .geometry import Iv, Rect, lattice_in_box
from .partition import Partition
from .qfield import FieldContext, QElem


@dataclass(frozen=True)
class TrapConfig:
    t: Fraction
    points: tuple[QElem, ...]
    n: int

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError("threshold must be positive")


def big_rectangle(ctx: FieldContext) -> Rect:
    """The origin-symmetric search box; its half-width is a certified
    rational outer bound for sqrt(eps*(m1_bound+1)), so it is only ever
    used to bound enumerations, never to decide trapping."""
    w = ctx.elem(ctx.box_halfwidth)
    return Rect(Iv(-w, w), Iv(-w, w))


def i_k_set(ctx: FieldContext, p0: Partition, extra: int = 0) -> list[QElem]:
    """All lattice points q such that some level-0 cell translated by q
    meets the search box; contains 0.  ``extra`` widens the search box by
    that many units on every side, which can only enlarge the set."""
    if p0.level != 0:
        raise ValueError("level-0 partition required")
    w = ctx.elem(ctx.box_halfwidth)
    pad = ctx.elem(extra * 1)
    seen = {}
    for r in p0.rects:
        s_iv = Iv(r.s.lo - w - pad, r.s.hi + w + pad)
        u_iv = Iv(r.u.lo - w - pad, r.u.hi + w + pad)
        for q in lattice_in_box(ctx, s_iv, u_iv, open_box=True):
            seen[ctx.xy_of(q)] = q
    return [seen[key] for key in sorted(seen, key=lambda xy: (xy[1], xy[0]))]


def corner_sup(a: Rect, q: QElem) -> QElem:
    """Largest |s - conj(q)| * |u - q| over the four closed corners."""
    qs, qu = q.conj(), q
    best = None
    for cs, cu in a.corners():
        v = abs(cs - qs) * abs(cu - qu)
        if best is None or v > best:
            best = v
    return best


def rect_trapped_single(a: Rect, q: QElem, t) -> bool:
    """True iff the closed cell lies strictly inside the norm-t
    neighborhood of the lattice point q; exact, ties excluded."""
    return corner_sup(a, q) < t


def trap_threshold(a: Rect, points) -> QElem | None:
    """Least corner supremum over the lattice points: the cell is trapped
    at threshold t exactly when this value is < t.  None without points."""
    best = None
    for q in points:
        v = corner_sup(a, q)
        if best is None or v < best:
            best = v
    return best


def trapped_set(partition: Partition, cfg: TrapConfig) -> list[Rect]:
    """Cells of the partition whose closure is trapped by some single
    lattice point of the configuration at threshold cfg.t."""
    if partition.level != cfg.n:
        raise ValueError(f"partition level {partition.level} != cfg.n={cfg.n}")
    out = []
    for a in partition.rects:
        if any(rect_trapped_single(a, q, cfg.t) for q in cfg.points):
            out.append(a)
    return out


def straddling(partition: Partition, cfg: TrapConfig) -> list[Rect]:
    """Diagnostic: cells not trapped by any single lattice point although
    each corner is below threshold for some point; these are the only
    candidates on which joint-neighborhood trapping could do better."""
    out = []
    for a in partition.rects:
        if any(rect_trapped_single(a, q, cfg.t) for q in cfg.points):
            continue
        if all(
            any(abs(cs - q.conj()) * abs(cu - q) < cfg.t for q in cfg.points)
            for cs, cu in a.corners()
        ):
            out.append(a)
    return out
