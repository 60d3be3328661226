import math

import pytest
from hypothesis import given, settings, strategies as st

from tubepack.budget import Budget
from tubepack.circlepack import (CrossSection, PackOutcome, _Section, greedy_construct, pack_t1,
                                 pack_t2, tangency_candidates, telescope_fill, top_level)
from tubepack.model import RingPlacement, TubeType

from oracles import min_height_exhaustive


def tube(tid, ediam, n, idiam=None, length=1000.0):
    return TubeType(tid, ediam * 0.8 if idiam is None else idiam, ediam, length, n)


def near(pts, x, y, tol=1e-2):
    return any(abs(px - x) <= tol and abs(py - y) <= tol for px, py in pts)


# ------------------------------------------------------------ candidates

def test_empty_section_has_wall_floor_corners():
    pts = tangency_candidates(100, [], CrossSection(1000, 10_000))
    assert near(pts, 100, 100) and near(pts, 900, 100)
    assert pts[0] == pytest.approx((100, 100))


def test_candidate_tangent_to_two_circles():
    placed = [(100, 100, 100), (300, 100, 100)]
    pts = tangency_candidates(100, placed, CrossSection(1000, 10_000))
    hits = [(x, y) for x, y in pts if abs(x - 200) < 1e-6 and abs(y - 273.205) < 1e-3]
    assert hits
    x, y = hits[0]
    for cx, cy, _ in placed:
        assert math.hypot(x - cx, y - cy) == pytest.approx(200, abs=1e-6)


def test_candidate_on_floor_beside_circle():
    pts = tangency_candidates(50, [(100, 100, 100)], CrossSection(1000, 10_000))
    assert near(pts, 100 + math.sqrt(150 ** 2 - 50 ** 2), 50)


def test_candidates_sorted_bottom_left_and_feasible():
    placed = [(100, 100, 100), (260, 80, 80), (420, 50, 50)]
    cs = CrossSection(600, 400)
    pts = tangency_candidates(40, placed, cs)
    assert pts == sorted(pts, key=lambda p: (round(p[1], 9), round(p[0], 9)))
    for x, y in pts:
        assert 40 - 1e-6 <= x <= 560 + 1e-6 and 40 - 1e-6 <= y <= 360 + 1e-6
        assert all(math.hypot(x - cx, y - cy) >= 40 + cr - 1e-6 for cx, cy, cr in placed)


def test_nothing_fits_gives_empty_list():
    assert tangency_candidates(100, [], CrossSection(150, 1000)) == []
    with pytest.raises(ValueError):
        tangency_candidates(0, [], CrossSection(150, 1000))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 1), st.sampled_from([20.0, 35.0, 50.0])), max_size=10),
       st.sampled_from([20.0, 35.0, 50.0]))
def test_incremental_candidates_match_full_scan(raw, r):
    """The constructor's incremental candidate heap equals a brute-force scan."""
    cs = CrossSection(300, 260)
    sec = _Section(cs.width, cs.height_cap, 50.0)
    sec.activate(r)
    placed = []
    for u, rc in raw:
        pts = tangency_candidates(rc, placed, cs)
        if not pts:
            continue
        x, y = pts[int(u * (len(pts) - 1))]
        placed.append((x, y, rc))
        sec.add(x, y, rc)
    expected = tangency_candidates(r, placed, cs)
    got = sec.live_candidates(r)
    assert len(got) == len(expected)
    for (a, b), (c, d) in zip(got, expected):
        assert a == pytest.approx(c, abs=1e-6) and b == pytest.approx(d, abs=1e-6)


# ------------------------------------------------------------ construction

def test_two_tubes_on_the_floor():
    out = greedy_construct([tube("a", 100, 2)], CrossSection(2350, 2690), noise=0)
    assert [(r.x, r.y) for r in out.rings] == [(50, 50), (150, 50)]
    assert out.used_height == 100


def test_tube_wider_than_section_is_not_placed():
    out = greedy_construct([tube("a", 2500, 1)], CrossSection(2350, 2690), noise=0)
    assert out.rings == [] and out.incomplete


def test_same_seed_same_outcome():
    ts = [tube("a", 90, 20), tube("b", 60, 30), tube("c", 35, 40)]
    cs = CrossSection(500, 400)
    a = greedy_construct(ts, cs, rng_seed=5, noise=0.5)
    b = greedy_construct(ts, cs, rng_seed=5, noise=0.5)
    assert a == b


def test_types_go_by_decreasing_diameter_without_noise():
    out = greedy_construct([tube("s", 40, 3), tube("l", 100, 2)], CrossSection(1000, 1000), noise=0)
    assert [r.tube_type for r in out.rings][:2] == ["l", "l"]
    assert out.type_ids == ("l", "s")


# ------------------------------------------------------------ telescoping

def test_h_fits_in_g(sample):
    cat = {t.id: t for t in sample.tubes}
    host = RingPlacement("R1", "G", 100, 100)
    rings, rest = telescope_fill([host], [cat["H"].with_count(1)], cat)
    assert len(rings) == 2 and rings[1].parent == "R1"
    assert rest[0].count == 0


def test_e_rejected_by_d(sample):
    cat = {t.id: t for t in sample.tubes}
    rings, rest = telescope_fill([RingPlacement("R1", "D", 100, 100)], [cat["E"].with_count(1)], cat)
    assert len(rings) == 1 and rest[0].count == 1


def test_length_budget_of_host(sample):
    cat = {t.id: t for t in sample.tubes}
    rings, rest = telescope_fill([RingPlacement("R1", "F", 100, 100)], [cat["H"].with_count(2)], cat)
    kids = [r for r in rings if r.parent == "R1"]
    assert len(kids) == 1 and rest[0].count == 1


def test_short_tubes_go_end_to_end():
    host_t = TubeType("big", 90, 100, 6000, 1)
    kid_t = TubeType("kid", 40, 50, 2000, 5)
    rings, rest = telescope_fill([RingPlacement("R1", "big", 60, 60)], [kid_t],
                                 {"big": host_t, "kid": kid_t})
    kids = [r for r in rings if r.parent == "R1"]
    assert [k.z_offset for k in kids] == [0, 2000, 4000]
    assert rest[0].count == 2


def test_clearance_is_configurable():
    host_t = TubeType("big", 50, 60, 1000, 1)
    kid_t = TubeType("kid", 40, 50, 1000, 1)
    cat = {"big": host_t, "kid": kid_t}
    assert len(telescope_fill([RingPlacement("R1", "big", 30, 30)], [kid_t], cat)[0]) == 2
    assert len(telescope_fill([RingPlacement("R1", "big", 30, 30)], [kid_t], cat, clearance=1)[0]) == 1


def test_recursive_telescoping_clearance(sample):
    cat = {t.id: t for t in sample.tubes}
    pool = [cat[k].with_count(5) for k in "DGH"]
    rings, _ = telescope_fill([RingPlacement("R1", "A", 200, 200)], pool, cat)
    byid = {r.id: r for r in rings}
    assert len(rings) > 3
    for r in rings:
        if r.parent:
            p = byid[r.parent]
            dist = math.hypot(r.x - p.x, r.y - p.y)
            assert dist + cat[r.tube_type].ediam / 2 <= cat[p.tube_type].idiam / 2 + 1e-6
            assert cat[r.tube_type].ediam <= cat[p.tube_type].idiam + 1e-6


# ------------------------------------------------------------ T1 / T2

def test_tiny_budget_t1_equals_noise_free_greedy():
    ts = [tube("a", 90, 40), tube("b", 50, 40)]
    cs = CrossSection(400, 300)
    t1 = pack_t1(ts, cs, Budget.nodes(0), seed=3)
    g = greedy_construct(ts, cs, rng_seed=3, noise=0)
    assert t1.counts_by_type == g.counts_by_type and t1.rings == g.rings


def test_lexicographic_count_order():
    assert (3, 5) > (3, 4)
    assert (4, 0) > (3, 99)


def test_t1_five_circles_under_low_cap():
    out = pack_t1([tube("a", 100, 5)], CrossSection(190, 100), restarts=50)
    assert out.counts_by_type == (1,)


def test_t2_single_tube_height(sample):
    a = next(t for t in sample.tubes if t.id == "A").with_count(1)
    out = pack_t2([a], CrossSection(2350, 2690), Budget.nodes(0))
    assert out.used_height == pytest.approx(128.33)


def test_t2_three_circles_nest():
    out = pack_t2([tube("a", 100, 3)], CrossSection(200, 10_000), restarts=200)
    assert out.used_height == pytest.approx(100 + math.sqrt(100 ** 2 - 50 ** 2), abs=1e-6)
    assert out.used_height == pytest.approx(min_height_exhaustive([50, 50, 50], 200), abs=1e-6)


def test_t2_empty_input():
    out = pack_t2([], CrossSection(200, 200))
    assert out.used_height == 0 and out.rings == []


def test_t2_flags_incomplete_and_returns_lex_best():
    out = pack_t2([tube("a", 100, 10)], CrossSection(200, 200), restarts=5)
    assert out.incomplete and out.counts_by_type == (4,)


def test_margin_inflates_radii():
    out = pack_t2([tube("a", 100, 2)], CrossSection(1000, 1000), restarts=1, margin=0.01)
    a, b = out.rings
    assert a.x == pytest.approx(50.01) and b.x - a.x == pytest.approx(100.02)


def test_worker_pool_gives_the_same_answer():
    ts = [tube("a", 90, 25), tube("b", 50, 30)]
    cs = CrossSection(420, 300)
    one = pack_t2(ts, cs, Budget.nodes(20_000), seed=11, workers=1)
    two = pack_t2(ts, cs, Budget.nodes(20_000), seed=11, workers=2)
    assert one.rings == two.rings and one.restarts == two.restarts


# ------------------------------------------------------------ properties

radius_sets = st.lists(st.tuples(st.sampled_from([15.0, 25.0, 40.0]), st.integers(1, 12)),
                       min_size=1, max_size=3, unique_by=lambda p: p[0])


@settings(max_examples=40, deadline=None)
@given(radius_sets, st.integers(0, 50), st.floats(0, 1))
def test_outcome_is_geometrically_sound(shape, seed, noise):
    ts = [TubeType(f"r{int(r)}", r * 1.2, 2 * r, 1000, n) for r, n in shape]
    cs = CrossSection(260, 180)
    out = greedy_construct(ts, cs, rng_seed=seed, noise=noise)
    tops = top_level(out.rings)
    rad = {t.id: t.ediam / 2 for t in ts}
    for i, a in enumerate(tops):
        ra = rad[a.tube_type]
        assert ra - 1e-6 <= a.x <= cs.width - ra + 1e-6
        assert ra - 1e-6 <= a.y <= cs.height_cap - ra + 1e-6
        for b in tops[i + 1:]:
            assert math.hypot(a.x - b.x, a.y - b.y) >= ra + rad[b.tube_type] - 1e-6
    assert sum(out.counts_by_type) == len(out.rings)
    expected = max((r.y + rad[r.tube_type] for r in tops), default=0.0)
    assert out.used_height == pytest.approx(expected)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.sampled_from([30.0, 50.0, 80.0]), min_size=1, max_size=5), st.sampled_from([30.0, 50.0, 80.0]))
def test_t2_height_monotone_when_adding_a_tube(radii, extra):
    def pack(rs):
        counts = {}
        for r in rs:
            counts[r] = counts.get(r, 0) + 1
        ts = [TubeType(f"r{int(r)}", r, 2 * r, 1000, n) for r, n in counts.items()]
        return pack_t2(ts, CrossSection(350, 10_000), seed=0, restarts=30, order_noise=0.0)
    assert pack(radii + [extra]).used_height >= pack(radii).used_height - 1e-9


def test_outcome_type_is_dataclass():
    out = PackOutcome([], (), 0.0)
    assert out.placed == 0
