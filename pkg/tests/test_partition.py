import itertools
import json
from fractions import Fraction

import pytest

from eucdyn.geometry import Iv, Rect
from eucdyn.partition import (
    MarkovError,
    base_rectangles,
    generator,
    perturbed,
    tiles_plane,
    verify_markov,
)
from eucdyn.qfield import make_context


def test_base_anchor_points(ctx5):
    r0, r1 = base_rectangles(ctx5)
    # anchors (-1,0), ((-1+sqrt5)/2, 0), (0,1), (0,(1+sqrt5)/2)
    assert r1.s.lo == ctx5.elem(-1) and r1.s.hi == ctx5.elem(0)
    assert r1.u.lo == ctx5.elem(0) and r1.u.hi == ctx5.alpha
    assert r0.s.lo == ctx5.elem(0)
    assert r0.s.hi == ctx5.elem(Fraction(-1, 2), Fraction(1, 2))
    assert r0.u.lo == ctx5.elem(0) and r0.u.hi == ctx5.elem(1)


def test_base_area_is_covolume(ctx5):
    r0, r1 = base_rectangles(ctx5)
    assert r0.area() + r1.area() == ctx5.elem(0, 1)  # sqrt5


@pytest.mark.parametrize("D", [2, 3, 5, 13])
def test_base_tiles_plane(D):
    ctx = make_context(D)
    assert tiles_plane(ctx, list(base_rectangles(ctx)))


def test_generator_d5_transitions(parts5):
    p0 = parts5[0]
    assert len(p0.rects) == 2
    # the short cell cannot follow itself; the other three transitions exist
    assert not p0.admissible(0, 0)
    assert p0.admissible(0, 1) and p0.admissible(1, 0) and p0.admissible(1, 1)
    # each admissible transition is a single nonempty cell
    for i, j in ((0, 1), (1, 0), (1, 1)):
        comp = p0.component_following(i, j)
        assert comp.s.lo < comp.s.hi and comp.u.lo < comp.u.hi


@pytest.mark.parametrize("fixture", ["parts2", "parts3", "parts5", "parts13"])
def test_generator_surjective_transitions(fixture, request):
    p0 = request.getfixturevalue(fixture)[0]
    n = len(p0.rects)
    for i in range(n):
        assert p0.successors(i)
    incoming = {j for i in range(n) for j in p0.successors(i)}
    assert incoming == set(range(n))


def test_refine_count_matches_path_oracle(parts5):
    # independent oracle: enumerate words of length 3 avoiding the
    # forbidden transition by brute force
    p0, p1 = parts5[0], parts5[1]
    ok = lambda a, b: p0.admissible(a, b)
    words = [
        w
        for w in itertools.product(range(2), repeat=3)
        if ok(w[0], w[1]) and ok(w[1], w[2])
    ]
    assert len(p1.rects) == len(words) == 5
    assert sorted(r.word for r in p1.rects) == sorted(words)


def test_refinement_nesting(parts5):
    for coarse, fine in zip(parts5, parts5[1:]):
        n = coarse.level
        for r in fine.rects:
            parent = coarse.rects[coarse.word_index[r.word[1 : 2 * n + 2]]]
            assert parent.s.lo <= r.s.lo and r.s.hi <= parent.s.hi
            assert parent.u.lo <= r.u.lo and r.u.hi <= parent.u.hi


def test_unstable_length_shrinks(parts5, ctx5):
    base_max = max((r.u.length() for r in parts5[0].rects), key=float)
    for n, p in enumerate(parts5):
        bound = base_max * (ctx5.eps_inv ** n)
        for r in p.rects:
            assert r.u.length() <= bound


def test_words_restrict_by_truncation(parts5):
    for coarse, fine in zip(parts5, parts5[1:]):
        coarse_words = set(coarse.word_index)
        for r in fine.rects:
            assert r.word[1:-1] in coarse_words


def test_admissibility_coherence(parts5):
    # overlap rule matches the geometry: words admissible iff they overlap
    # by one shift (checked against the geometric components in verify)
    p1 = parts5[1]
    for i, a in enumerate(p1.rects):
        for j, b in enumerate(p1.rects):
            assert p1.admissible(i, j) == (a.word[1:] == b.word[:-1])


@pytest.mark.parametrize("level", [0, 1, 2])
def test_verify_markov_d5(parts5, level):
    assert verify_markov(parts5[level], disjointness="full").ok


def test_total_area_every_level(parts5, ctx5):
    for p in parts5:
        assert p.total_area() == ctx5.covolume


def test_perturbed_fails_with_named_pair(parts5):
    bad = perturbed(parts5[0], index=0, amount=Fraction(1, 100))
    report = verify_markov(bad)
    assert not report.ok
    assert report.counterexample is not None
    a, b, reason = report.counterexample
    assert a is not None and reason


def test_generator_raises_on_unverifiable(ctx5):
    # feeding nonsense seed rectangles must surface a MarkovError
    zero, one = ctx5.elem(0), ctx5.elem(1)
    bad = (
        Rect(Iv(zero, one), Iv(zero, one), (0,)),
        Rect(Iv(-one, zero), Iv(zero, ctx5.alpha), (1,)),
    )
    with pytest.raises(MarkovError):
        generator(ctx5, bad)


@pytest.mark.parametrize("fixture", ["parts2", "parts3", "parts13"])
def test_verify_markov_other_fields(fixture, request):
    parts = request.getfixturevalue(fixture)
    for p in parts:
        assert verify_markov(p).ok
        assert p.total_area() == p.ctx.covolume


def test_d13_alpha_branch(ctx13):
    assert ctx13.alpha == ctx13.elem(Fraction(1, 2), Fraction(1, 2))
    assert ctx13.nm_eps == -1


def test_d3_positive_conjugate_unit(parts3):
    # Nm(2+sqrt3) = +1: the orientation-preserving stable branch
    assert parts3[0].ctx.eps_conj_sign == 1


def test_json_dump(parts5):
    doc = json.loads(parts5[1].to_json())
    assert doc["level"] == 1 and doc["D"] == 5
    assert len(doc["rectangles"]) == 5
    words = {tuple(r["word"]) for r in doc["rectangles"]}
    assert words == set(parts5[1].word_index)
    for r in doc["rectangles"]:
        for key in ("s_lo", "s_hi", "u_lo", "u_hi"):
            assert set(r[key]) == {"a", "b"}
            num, den = r[key]["a"]
            assert isinstance(num, int) and den >= 1
    trans = {tuple(t) for t in doc["transitions"]}
    assert trans == set(parts5[1].transitions())
