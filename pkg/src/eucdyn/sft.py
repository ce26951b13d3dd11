"""Subshifts of finite type over partition alphabets.

A Subshift is the set of bi-infinite paths through a 0-1 transition
matrix over a symbol set; symbols are coordinate words of a partition.
Entropy is the log of the spectral radius of the essential transition
matrix, computed per strongly connected component by shifted power
iteration with a two-sided Collatz-Wielandt certificate.  This is the
only place floating point enters the pipeline; everything upstream is
exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .coding import SymbolicPoint
from .qfield import FieldContext


@dataclass
class Subshift:
    """Vertex shift on ``symbols`` with 0-1 ``matrix``; pruned to its
    essential part (symbols lying on bi-infinite paths).

    ``source_ids`` maps each symbol back to the rectangle index in the
    partition the subshift was built from; ``removed`` records forbidden
    words.  ``base_succ`` is the generator transition structure, kept so
    the subshift can be recoded to other block levels.
    """

    level: int
    symbols: tuple[tuple[int, ...], ...]
    matrix: np.ndarray
    base_succ: tuple[tuple[int, ...], ...]
    source_ids: tuple[int, ...] = ()
    removed: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def empty(self) -> bool:
        return len(self.symbols) == 0

    @property
    def alphabet_size(self) -> int:
        return len(self.symbols)

    def successors(self, i: int) -> tuple[int, ...]:
        return tuple(int(j) for j in np.flatnonzero(self.matrix[i]))

    def index_of_source(self, rect_id: int) -> int:
        return self.source_ids.index(rect_id)

    @staticmethod
    def from_matrix(matrix, symbols=None) -> "Subshift":
        mat = np.asarray(matrix, dtype=bool)
        n = mat.shape[0]
        symbols = tuple(symbols) if symbols is not None else tuple((i,) for i in range(n))
        succ = tuple(tuple(int(j) for j in np.flatnonzero(mat[i])) for i in range(n))
        return _pruned(Subshift(0, symbols, mat, succ, tuple(range(n))))


def _pruned(s: Subshift) -> Subshift:
    """Restrict to symbols with arbitrarily long forward and backward
    extensions (iterated removal of degree-zero symbols)."""
    keep = np.ones(len(s.symbols), dtype=bool)
    changed = True
    while changed:
        changed = False
        sub = s.matrix[np.ix_(keep, keep)]
        if sub.size == 0:
            break
        out_deg = sub.sum(axis=1)
        in_deg = sub.sum(axis=0)
        alive = (out_deg > 0) & (in_deg > 0)
        if not alive.all():
            idx = np.flatnonzero(keep)
            keep[idx[~alive]] = False
            changed = True
    idx = np.flatnonzero(keep)
    return Subshift(
        s.level,
        tuple(s.symbols[i] for i in idx),
        s.matrix[np.ix_(keep, keep)],
        s.base_succ,
        tuple(s.source_ids[i] for i in idx),
        s.removed,
    )


def avoid(partition, forbidden) -> Subshift:
    """The subshift of the partition's full shift avoiding the forbidden
    rectangles (given as Rects or coordinate words; coarser words are
    decomposed into the level-n words refining them)."""
    words = partition.words
    n = partition.level
    banned: set[tuple[int, ...]] = set()
    removed = []
    for item in forbidden:
        w = tuple(item.word) if hasattr(item, "word") else tuple(item)
        removed.append(w)
        if len(w) == 2 * n + 1:
            if w not in partition.word_index:
                raise ValueError(f"forbidden word {w} not in the alphabet")
            banned.add(w)
        elif len(w) < 2 * n + 1 and len(w) % 2 == 1:
            m = (len(w) - 1) // 2
            off = n - m
            hits = [v for v in words if v[off : off + len(w)] == w]
            if not hits:
                raise ValueError(f"forbidden word {w} matches no cell")
            banned.update(hits)
        else:
            raise ValueError(f"forbidden word {w} incompatible with level {n}")
    keep_ids = [i for i, w in enumerate(words) if w not in banned]
    symbols = tuple(words[i] for i in keep_ids)
    pos = {rid: k for k, rid in enumerate(keep_ids)}
    mat = np.zeros((len(keep_ids), len(keep_ids)), dtype=bool)
    for k, rid in enumerate(keep_ids):
        for j in partition.successors(rid):
            if j in pos:
                mat[k, pos[j]] = True
    base = partition.base
    base_succ = tuple(base.successors(i) for i in range(len(base.rects)))
    return _pruned(
        Subshift(n, symbols, mat, base_succ, tuple(keep_ids), tuple(removed))
    )


@dataclass(frozen=True)
class EntropyResult:
    value: float
    lower: float
    upper: float
    empty: bool
    iterations: int

    def __float__(self):
        return self.value


def _spectral_radius_cw(mat: np.ndarray, tol: float, max_iter: int):
    """Two-sided Collatz-Wielandt bracket for the Perron root of an
    irreducible 0-1 block, via power iteration on (A + I)."""
    a = mat.astype(float)
    n = a.shape[0]
    x = np.ones(n)
    best_lo, best_hi = 0.0, math.inf
    it = 0
    for it in range(1, max_iter + 1):
        ax = a @ x
        ratios = ax / x
        best_lo = max(best_lo, float(ratios.min()))
        best_hi = min(best_hi, float(ratios.max()))
        if best_hi - best_lo <= tol * max(1.0, best_hi):
            break
        x = ax + x
        x /= x.max()
    return best_lo, best_hi, it


def entropy(s: Subshift, tol: float = 1e-12, max_iter: int = 100000) -> EntropyResult:
    """log of the spectral radius of the essential transition matrix,
    with a certified two-sided bracket; empty subshift is flagged and
    reported as entropy 0."""
    if s.empty:
        return EntropyResult(0.0, 0.0, 0.0, True, 0)
    n_comp, labels = connected_components(
        csr_matrix(s.matrix), directed=True, connection="strong"
    )
    # spectral radius of the whole matrix = max over its cyclic components
    lo_all, hi_all, iters = 1.0, 1.0, 0
    for c in range(n_comp):
        idx = np.flatnonzero(labels == c)
        sub = s.matrix[np.ix_(idx, idx)]
        if len(idx) == 1 and not sub[0, 0]:
            continue  # transient single symbol
        lo, hi, it = _spectral_radius_cw(sub, tol, max_iter)
        iters = max(iters, it)
        lo_all = max(lo_all, lo)
        hi_all = max(hi_all, hi)
    value = 0.5 * (lo_all + hi_all)
    return EntropyResult(
        math.log(value), math.log(lo_all), math.log(hi_all), False, iters
    )


def dimension(h, ctx: FieldContext) -> float:
    """2h / log(eps), the dimension bound for entropy h; clamped to 2 when
    numerical noise exceeds it by less than 1e-9."""
    hv = float(h)
    if hv < 0:
        raise ValueError(f"entropy must be nonnegative, got {hv}")
    d = 2.0 * hv / math.log(float(ctx.eps))
    if d > 2.0:
        if d > 2.0 + 1e-9:
            raise ValueError(f"dimension bound {d} exceeds 2 beyond tolerance")
        d = 2.0
    return d


def block_recode(s: Subshift, m: int) -> Subshift:
    """The canonically conjugate subshift presented on level-m words.

    For m >= level the recoding always exists; for m = level-1 it exists
    when one-step memory suffices, which is checked exactly (every length-3
    path of the candidate presentation must span an allowed word), and a
    ValueError is raised otherwise.  Entropy is preserved.
    """
    n = s.level
    if m < n - 1:
        raise ValueError(f"target level {m} below {n - 1}")
    if m == n:
        return s
    if s.empty:
        return Subshift(m, (), np.zeros((0, 0), dtype=bool), s.base_succ, (), s.removed)
    if m > n:
        return block_recode(_extend_once(s), m)
    return _truncate_once(s)


def _extend_once(s: Subshift) -> Subshift:
    n = s.level
    allowed = set(s.symbols)
    preds: dict[int, list[int]] = {}
    for i, row in enumerate(s.base_succ):
        for j in row:
            preds.setdefault(j, []).append(i)
    new_words = []
    for w in s.symbols:
        # the two windows a left/right extension introduces must be allowed
        for a in preds.get(w[0], ()):
            if (a,) + w[:-1] not in allowed:
                continue
            for b in s.base_succ[w[-1]]:
                if w[1:] + (b,) not in allowed:
                    continue
                new_words.append((a,) + w + (b,))
    new_words = sorted(set(new_words))
    mat = np.zeros((len(new_words), len(new_words)), dtype=bool)
    by_prefix: dict[tuple[int, ...], list[int]] = {}
    for k, w in enumerate(new_words):
        by_prefix.setdefault(w[:-1], []).append(k)
    for k, w in enumerate(new_words):
        for j in by_prefix.get(w[1:], ()):
            mat[k, j] = True
    return _pruned(
        Subshift(n + 1, tuple(new_words), mat, s.base_succ, tuple(range(len(new_words))), s.removed)
    )


def _truncate_once(s: Subshift) -> Subshift:
    n = s.level
    trunc = sorted({w[1:-1] for w in s.symbols})
    index = {w: k for k, w in enumerate(trunc)}
    mat = np.zeros((len(trunc), len(trunc)), dtype=bool)
    for i, w in enumerate(s.symbols):
        for j in np.flatnonzero(s.matrix[i]):
            mat[index[w[1:-1]], index[s.symbols[int(j)][1:-1]]] = True
    allowed = set(s.symbols)
    # faithfulness: every admissible triple must span an allowed word
    for p_i, p in enumerate(trunc):
        for q_i in np.flatnonzero(mat[p_i]):
            q = trunc[int(q_i)]
            if p[1:] != q[:-1]:
                raise ValueError("inconsistent truncation overlap")
            for r_i in np.flatnonzero(mat[int(q_i)]):
                r = trunc[int(r_i)]
                spanned = p[:1] + q + r[-1:]
                if spanned not in allowed:
                    raise ValueError(
                        "subshift is not one-step at the coarser level; "
                        f"path spans forbidden word {spanned}"
                    )
    return _pruned(
        Subshift(n - 1, tuple(trunc), mat, s.base_succ, tuple(range(len(trunc))), s.removed)
    )


def periodize(s: Subshift, w, u=(), v=()) -> SymbolicPoint:
    """An eventually-periodic bi-infinite element of the subshift that
    contains ``w``, obtained by looping a repeated symbol found in each
    flank (extending the flanks through the graph when they carry no
    repeat yet); fails if ``w`` has no bi-infinite extension."""
    w, u, v = tuple(w), tuple(u), tuple(v)
    if not w:
        raise ValueError("empty word")
    ids = {rid: k for k, rid in enumerate(s.source_ids)}
    path = u + w + v
    for sym in path:
        if sym not in ids:
            raise ValueError(f"symbol {sym} not in the subshift")
    for a, b in zip(path, path[1:]):
        if not s.matrix[ids[a], ids[b]]:
            raise ValueError(f"word {path} is not admissible")

    def succs(sym):
        return [s.source_ids[int(j)] for j in np.flatnonzero(s.matrix[ids[sym]])]

    def preds(sym):
        return [s.source_ids[int(j)] for j in np.flatnonzero(s.matrix[:, ids[sym]])]

    def first_repeat(seq):
        seen = {}
        for i2, sym in enumerate(seq):
            if sym in seen:
                return seen[sym], i2
            seen[sym] = i2
        return None

    cap = len(s.symbols) + 1
    left = list(u)
    while first_repeat(left) is None:
        head = left[0] if left else w[0]
        p = preds(head)
        if not p:
            raise ValueError("word does not extend bi-infinitely (left)")
        left.insert(0, min(p))
        if len(left) > 2 * cap:
            raise AssertionError("pigeonhole failure")
    i1, i2 = first_repeat(left)
    left_loop, left_pre = tuple(left[i1:i2]), tuple(left[i2:])

    right = list(v)
    while first_repeat(right) is None:
        tail = right[-1] if right else w[-1]
        nxt = succs(tail)
        if not nxt:
            raise ValueError("word does not extend bi-infinitely (right)")
        right.append(min(nxt))
        if len(right) > 2 * cap:
            raise AssertionError("pigeonhole failure")
    i1, i2 = first_repeat(right)
    right_pre, right_loop = tuple(right[: i1 + 1]), tuple(right[i1 + 1 : i2 + 1])

    return SymbolicPoint(
        level=s.level,
        center=w,
        right_pre=right_pre,
        right_loop=right_loop,
        left_pre=left_pre,
        left_loop=left_loop,
    )


def export_matrix(s: Subshift, fp) -> None:
    """Sparse coordinate triples, one ``i j 1`` line per transition."""
    fp.write(f"# alphabet {s.alphabet_size} level {s.level}\n")
    for i in range(s.alphabet_size):
        for j in np.flatnonzero(s.matrix[i]):
            fp.write(f"{i} {int(j)} 1\n")
