"""Two-rectangle Markov partitions and their refinements, verified exactly.

The seed partition follows Adler's uniform description in stable/unstable
coordinates: a tall rectangle left of the unstable axis and a short one
right of it,

    R1 = (-1, 0) x (0, alpha),      R0 = (0, -conj(alpha)) x (0, 1),

whose closed areas sum to the lattice covolume for every D.  For D = 5
the pair itself generates; otherwise the generator consists of the
connected components of A meet phi^{-1}(B) over seed pairs (A, B).  In
either case nothing is trusted: ``verify_markov`` re-derives every
transition geometrically and checks, with exact interval arithmetic,
that images stretch fully across target cells in the expanding direction
and stay inside them in the contracting one.

Level-n cells are labelled by admissible words of generator symbols; the
representative rectangle of a word is computed by folding one exact
affine contraction per symbol onto the central cell's footprint.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .geometry import Iv, Rect, covers_exactly, phi_inv_rect, phi_rect, torus_components
from .qfield import FieldContext, QElem


class MarkovError(Exception):
    """Raised when a constructed partition fails its exact verification."""

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


@dataclass
class MarkovReport:
    ok: bool
    counterexample: tuple | None = None  # (word_a, word_b, reason)

    def __str__(self):
        if self.ok:
            return "markov: ok"
        a, b, reason = self.counterexample
        return f"markov violation at pair ({a}, {b}): {reason}"


class Partition:
    """A level-n partition: rectangles labelled by coordinate words over
    the generator alphabet, plus the transition relation.

    ``base`` is the level-0 generator partition (self, at level 0).
    Instances are immutable after construction.
    """

    def __init__(self, ctx: FieldContext, level: int, rects: list[Rect], base=None):
        self.ctx = ctx
        self.level = level
        self.rects = list(rects)
        self.base = base if base is not None else self
        self.word_index = {r.word: i for i, r in enumerate(self.rects)}
        if len(self.word_index) != len(self.rects):
            raise ValueError("duplicate coordinate words")
        self._succ: list[tuple[int, ...]] | None = None
        self._comp_follow: dict[tuple[int, int], Rect] = {}
        self._comp_precede: dict[tuple[int, int], Rect] = {}

    # -- transition structure ---------------------------------------------

    def successors(self, i: int) -> tuple[int, ...]:
        if self._succ is None:
            self._build_transitions()
        return self._succ[i]

    def admissible(self, i: int, j: int) -> bool:
        return j in self.successors(i)

    def transitions(self):
        for i in range(len(self.rects)):
            for j in self.successors(i):
                yield i, j

    def _build_transitions(self):
        n = len(self.rects)
        if self.level == 0:
            succ = []
            for i in range(n):
                row = []
                for j in range(n):
                    pieces = torus_components(
                        self.ctx, phi_inv_rect(self.ctx, self.rects[j]), self.rects[i]
                    )
                    if pieces:
                        row.append(j)
                succ.append(tuple(row))
            self._succ = succ
        else:
            # words overlap-compatible under a one-step shift
            by_prefix: dict[tuple[int, ...], list[int]] = {}
            for j, r in enumerate(self.rects):
                by_prefix.setdefault(r.word[:-1], []).append(j)
            self._succ = [
                tuple(sorted(by_prefix.get(r.word[1:], ()))) for r in self.rects
            ]

    # -- geometric components ----------------------------------------------

    def component_following(self, i: int, j: int) -> Rect:
        """The single component of A_i meet phi^{-1}(A_j), inside A_i."""
        key = (i, j)
        if key not in self._comp_follow:
            pieces = torus_components(
                self.ctx, phi_inv_rect(self.ctx, self.rects[j]), self.rects[i]
            )
            if len(pieces) != 1:
                raise MarkovError(
                    MarkovReport(
                        False,
                        (
                            self.rects[i].word,
                            self.rects[j].word,
                            f"{len(pieces)} components, expected 1",
                        ),
                    )
                )
            self._comp_follow[key] = pieces[0][1]
        return self._comp_follow[key]

    def component_preceding(self, i: int, j: int) -> Rect:
        """The single component of A_i meet phi(A_j), inside A_i."""
        key = (i, j)
        if key not in self._comp_precede:
            pieces = torus_components(
                self.ctx, phi_rect(self.ctx, self.rects[j]), self.rects[i]
            )
            if len(pieces) != 1:
                raise MarkovError(
                    MarkovReport(
                        False,
                        (
                            self.rects[j].word,
                            self.rects[i].word,
                            f"{len(pieces)} components, expected 1",
                        ),
                    )
                )
            self._comp_precede[key] = pieces[0][1]
        return self._comp_precede[key]

    # -- bookkeeping ---------------------------------------------------------

    def total_area(self) -> QElem:
        total = self.ctx.elem(0)
        for r in self.rects:
            total = total + r.area()
        return total

    @property
    def words(self):
        return [r.word for r in self.rects]

    def center_symbol(self, i: int) -> int:
        return self.rects[i].word[self.level]

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> str:
        def enc(z: QElem):
            return {
                "a": [z.a.numerator, z.a.denominator],
                "b": [z.b.numerator, z.b.denominator],
            }

        data = {
            "D": self.ctx.D,
            "level": self.level,
            "rectangles": [
                {
                    "word": list(r.word),
                    "s_lo": enc(r.s.lo),
                    "s_hi": enc(r.s.hi),
                    "u_lo": enc(r.u.lo),
                    "u_hi": enc(r.u.hi),
                }
                for r in self.rects
            ],
            "transitions": [[i, j] for i, j in self.transitions()],
        }
        return json.dumps(data, indent=1)


def base_rectangles(ctx: FieldContext) -> tuple[Rect, Rect]:
    """The Adler seed pair (R0, R1), anchored at (-1,0), (-conj(alpha),0),
    (0,1) and (0,alpha); closed areas sum to the covolume."""
    zero, one = ctx.elem(0), ctx.elem(1)
    r1 = Rect(Iv(-one, zero), Iv(zero, ctx.alpha), (1,))
    r0 = Rect(Iv(zero, -ctx.alpha_conj), Iv(zero, one), (0,))
    return r0, r1


def generator(ctx: FieldContext, base: tuple[Rect, Rect] | None = None) -> Partition:
    """The level-0 Markov generator.

    For D = 5 the seed pair is itself a generator; otherwise the
    generator consists of the components of A meet phi^{-1}(B) over seed
    pairs.  The result is verified exactly and the constructor fails with
    the violating pair if verification does not pass.
    """
    if base is None:
        base = base_rectangles(ctx)
    if ctx.D == 5:
        rects = [Rect(r.s, r.u, (i,)) for i, r in enumerate(base)]
    else:
        pieces = []
        for a_idx, A in enumerate(base):
            for b_idx, B in enumerate(base):
                comps = torus_components(ctx, phi_inv_rect(ctx, B), A)
                comps.sort(key=lambda item: _lattice_key(ctx, item[0]))
                for _, piece in comps:
                    pieces.append((a_idx, b_idx, piece))
        rects = [
            Rect(piece.s, piece.u, (k,)) for k, (_, _, piece) in enumerate(pieces)
        ]
    part = Partition(ctx, 0, rects)
    report = verify_markov(part)
    if not report.ok:
        raise MarkovError(report)
    return part


def _lattice_key(ctx: FieldContext, q: QElem):
    x, y = ctx.xy_of(q)
    return (y, x)


def refine(p: Partition) -> Partition:
    """Level n+1 from level n: extend every admissible word one symbol on
    each side and fold the exact affine contractions onto the new word."""
    base = p.base
    preds: dict[int, list[int]] = {i: [] for i in range(len(base.rects))}
    for i, j in base.transitions():
        preds[j].append(i)
    new_words = []
    for r in p.rects:
        w = r.word
        for a in preds[w[0]]:
            for b in base.successors(w[-1]):
                new_words.append((a,) + w + (b,))
    new_words.sort()
    level = p.level + 1
    rects = [
        Rect(_fold_s(base, w[: level + 1]), _fold_u(base, w[level:]), w)
        for w in new_words
    ]
    return Partition(p.ctx, level, rects, base=base)


def _fold_u(base: Partition, future: tuple[int, ...]) -> Iv:
    """Unstable interval of the cell with the given forward word, anchored
    in the footprint of its first symbol."""
    ctx = base.ctx
    j = future[-1]
    iv = base.rects[j].u
    for i in reversed(range(len(future) - 1)):
        a, b = future[i], future[i + 1]
        comp = base.component_following(a, b)
        lo_b = base.rects[b].u.lo
        iv = Iv(
            comp.u.lo + (iv.lo - lo_b) * ctx.eps_inv,
            comp.u.lo + (iv.hi - lo_b) * ctx.eps_inv,
        )
    return iv


def _fold_s(base: Partition, past: tuple[int, ...]) -> Iv:
    """Stable interval of the cell with the given backward word (oldest
    symbol first), anchored in the footprint of its last symbol."""
    ctx = base.ctx
    iv = base.rects[past[0]].s
    for i in range(len(past) - 1):
        prev, cur = past[i], past[i + 1]
        comp = base.component_preceding(cur, prev)
        lo_b = base.rects[prev].s.lo
        if ctx.eps_conj_sign > 0:
            iv = Iv(
                comp.s.lo + (iv.lo - lo_b) * ctx.eps_conj,
                comp.s.lo + (iv.hi - lo_b) * ctx.eps_conj,
            )
        else:
            # orientation-reversing: interval endpoints swap
            iv = Iv(
                comp.s.hi + (iv.hi - lo_b) * ctx.eps_conj,
                comp.s.hi + (iv.lo - lo_b) * ctx.eps_conj,
            )
    return iv


def verify_markov(p: Partition, disjointness: str = "auto") -> MarkovReport:
    """Exact Markov verification.

    For every admissible pair (A, B) the torus intersection
    A meet phi^{-1}(B) must be a single rectangle that spans the full
    stable extent of A and whose unstable footprint is the full image of
    B (images stretch fully across in the expanding direction, stay
    inside in the contracting one).  Cells must be pairwise disjoint as
    open torus sets and their areas must sum to the covolume.

    ``disjointness``: "full" checks all pairs geometrically, "structural"
    skips the quadratic scan for refined levels (distinct words lie in
    disjoint pullbacks of level-0 cells once level 0 has been checked),
    "auto" picks "full" for small alphabets.
    """
    ctx = p.ctx
    for r in p.rects:
        if not (r.s.lo < r.s.hi and r.u.lo < r.u.hi):
            return MarkovReport(False, (r.word, r.word, "degenerate rectangle"))

    if p.total_area() != ctx.covolume:
        return MarkovReport(
            False, (None, None, f"area sum {p.total_area()} != covolume {ctx.covolume}")
        )

    do_full = disjointness == "full" or (
        disjointness == "auto" and (p.level == 0 or len(p.rects) <= 64)
    )
    if do_full:
        for i, a in enumerate(p.rects):
            for j in range(i, len(p.rects)):
                b = p.rects[j]
                for q, piece in torus_components(ctx, a, b):
                    if i == j and q == ctx.elem(0):
                        continue  # the rectangle itself
                    return MarkovReport(
                        False,
                        (a.word, b.word, f"open overlap at translate {q!r}"),
                    )

    # For large refined alphabets only admissible pairs are checked
    # geometrically: a non-overlapping word pair meets phi^{-1} of the
    # other inside pullbacks of two distinct level-0 cells, so emptiness
    # follows from the level-0 disjointness established above.
    if do_full:
        pair_iter = (
            (i, j) for i in range(len(p.rects)) for j in range(len(p.rects))
        )
    else:
        pair_iter = ((i, j) for i in range(len(p.rects)) for j in p.successors(i))
    for i, j in pair_iter:
        a, b = p.rects[i], p.rects[j]
        adm = p.admissible(i, j)
        pieces = torus_components(ctx, phi_inv_rect(ctx, b), a)
        if not adm:
            if pieces:
                return MarkovReport(
                    False,
                    (a.word, b.word, "inadmissible pair has nonempty intersection"),
                )
            continue
        if len(pieces) != 1:
            return MarkovReport(
                False, (a.word, b.word, f"{len(pieces)} components, expected 1")
            )
        q, piece = pieces[0]
        if piece.s != a.s:
            return MarkovReport(
                False,
                (a.word, b.word, "intersection does not span the stable extent"),
            )
        expected_u = phi_inv_rect(ctx, b).u.shift(-q)
        if piece.u != expected_u:
            return MarkovReport(
                False,
                (a.word, b.word, "image clipped in the expanding direction"),
            )
    return MarkovReport(True)


def tiles_plane(ctx: FieldContext, rects: list[Rect], span: int = 1) -> bool:
    """Exact check that lattice translates of the closed cells cover the
    block of translates around the origin (a (2*span+1)^2 block)."""
    zero = ctx.elem(0)
    s_all = Iv(min((r.s.lo for r in rects), default=zero), max((r.s.hi for r in rects), default=zero))
    u_all = Iv(min((r.u.lo for r in rects), default=zero), max((r.u.hi for r in rects), default=zero))
    region = Rect(s_all, u_all)
    pieces = []
    for m in range(-3 * span, 3 * span + 1):
        for n in range(-3 * span, 3 * span + 1):
            q = ctx.from_xy(m, n)
            for r in rects:
                pieces.append(r.translate(q))
    return covers_exactly(region, pieces)


def perturbed(p: Partition, index: int = 0, amount=Fraction(1, 100)) -> Partition:
    """A copy with one cell nudged sideways (area preserved); a
    negative-control fixture that must fail verification with a named pair."""
    rects = list(p.rects)
    r = rects[index]
    d = p.ctx.elem(amount)
    rects[index] = Rect(Iv(r.s.lo + d, r.s.hi + d), r.u, r.word)
    q = Partition(p.ctx, p.level, rects, base=p.base if p.level else None)
    q._succ = [p.successors(i) for i in range(len(p.rects))]
    return q
