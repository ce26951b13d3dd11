"""Exact axis-parallel rectangle geometry in the stable/unstable plane.

Intervals and rectangles carry field-element endpoints, so emptiness,
containment and tiling questions are decided exactly.  The lattice is
the ring of integers embedded as q -> (conj(q), q); all torus operations
reduce to enumerating the finitely many lattice translates that can meet
a bounded region, which needs only exact floors of field elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .qfield import FieldContext, QElem


@dataclass(frozen=True)
class Iv:
    """Closed interval [lo, hi] with exact endpoints; used openly where noted."""

    lo: QElem
    hi: QElem

    def length(self) -> QElem:
        return self.hi - self.lo

    def shift(self, delta) -> "Iv":
        return Iv(self.lo + delta, self.hi + delta)

    def scale(self, factor: QElem) -> "Iv":
        a, b = self.lo * factor, self.hi * factor
        return Iv(a, b) if factor.sign() >= 0 else Iv(b, a)

    def intersect_open(self, other: "Iv") -> "Iv | None":
        lo = self.lo if self.lo >= other.lo else other.lo
        hi = self.hi if self.hi <= other.hi else other.hi
        return Iv(lo, hi) if lo < hi else None

    def contains_closed(self, z) -> bool:
        return self.lo <= z <= self.hi

    def __eq__(self, other):
        return self.lo == other.lo and self.hi == other.hi


@dataclass(frozen=True)
class Rect:
    """Plane rectangle s x u; ``word`` is its coordinate word when it
    belongs to a partition (a tuple of generator symbol indices)."""

    s: Iv
    u: Iv
    word: tuple[int, ...] = field(default=())

    def area(self) -> QElem:
        return self.s.length() * self.u.length()

    def corners(self):
        for cs in (self.s.lo, self.s.hi):
            for cu in (self.u.lo, self.u.hi):
                yield cs, cu

    def translate(self, q: QElem) -> "Rect":
        """This rectangle shifted by the lattice point q: subtract (conj q, q)."""
        return Rect(self.s.shift(-q.conj()), self.u.shift(-q), self.word)


def phi_rect(ctx: FieldContext, r: Rect) -> Rect:
    """Image under the unit map: s scaled by conj(eps), u by eps."""
    return Rect(r.s.scale(ctx.eps_conj), r.u.scale(ctx.eps), r.word)


def phi_inv_rect(ctx: FieldContext, r: Rect) -> Rect:
    return Rect(r.s.scale(ctx.eps * ctx.nm_eps), r.u.scale(ctx.eps_inv), r.word)


def lattice_in_box(ctx: FieldContext, s_iv: Iv, u_iv: Iv, open_box: bool = True):
    """All lattice elements q with conj(q) in s_iv and q in u_iv.

    Yields QElems q = m + n*alpha in deterministic (n, m) order.  With
    ``open_box`` the interval endpoints are excluded.
    """
    alpha, alpha_conj = ctx.alpha, ctx.alpha_conj
    covol = ctx.covolume

    def int_range(lo_e: QElem, hi_e: QElem) -> range:
        # integers in the open (resp. closed) interval [lo_e, hi_e]
        if open_box:
            return range(lo_e.floor() + 1, hi_e.ceil())
        return range(lo_e.ceil(), hi_e.floor() + 1)

    # q - conj(q) = n * (alpha - conj(alpha)) constrains n
    for n in int_range((u_iv.lo - s_iv.hi) / covol, (u_iv.hi - s_iv.lo) / covol):
        m_lo_1 = s_iv.lo - alpha_conj * n
        m_hi_1 = s_iv.hi - alpha_conj * n
        m_lo_2 = u_iv.lo - alpha * n
        m_hi_2 = u_iv.hi - alpha * n
        m_lo_e = m_lo_1 if m_lo_1 >= m_lo_2 else m_lo_2
        m_hi_e = m_hi_1 if m_hi_1 <= m_hi_2 else m_hi_2
        for m in int_range(m_lo_e, m_hi_e):
            yield ctx.from_xy(m, n)


def torus_components(ctx: FieldContext, moving: Rect, fixed: Rect):
    """Components of (moving - q) meet fixed over all lattice translates q.

    Open-rectangle semantics: touching boundaries do not count.  Returns
    a list of (q, piece) with piece an open sub-rectangle of ``fixed``.
    """
    s_box = Iv(moving.s.lo - fixed.s.hi, moving.s.hi - fixed.s.lo)
    u_box = Iv(moving.u.lo - fixed.u.hi, moving.u.hi - fixed.u.lo)
    out = []
    for q in lattice_in_box(ctx, s_box, u_box, open_box=True):
        shifted = moving.translate(q)
        s_iv = shifted.s.intersect_open(fixed.s)
        if s_iv is None:
            continue
        u_iv = shifted.u.intersect_open(fixed.u)
        if u_iv is None:
            continue
        out.append((q, Rect(s_iv, u_iv)))
    return out


def point_translates(ctx: FieldContext, s: QElem, u: QElem, rect: Rect):
    """Lattice q such that (s, u) - (conj q, q) lies in the closed rect."""
    s_box = Iv(s - rect.s.hi, s - rect.s.lo)
    u_box = Iv(u - rect.u.hi, u - rect.u.lo)
    return list(lattice_in_box(ctx, s_box, u_box, open_box=False))


def covers_exactly(region: Rect, pieces: list[Rect]) -> bool:
    """True iff the closed pieces cover the closed region, decided exactly.

    Sweep over the s-axis: between consecutive breakpoints the active
    pieces' u-intervals must cover the region's u-interval.
    """
    breaks = {region.s.lo, region.s.hi}
    for p in pieces:
        for e in (p.s.lo, p.s.hi):
            if region.s.lo < e < region.s.hi:
                breaks.add(e)
    bs = sorted(breaks)
    for left, right in zip(bs, bs[1:]):
        active = [
            p for p in pieces if p.s.lo <= left and right <= p.s.hi
        ]
        active.sort(key=lambda p: p.u.lo)
        reach = region.u.lo
        for p in active:
            if p.u.lo > reach:
                return False
            if p.u.hi > reach:
                reach = p.u.hi
            if reach >= region.u.hi:
                break
        if reach < region.u.hi:
            return False
    return True
