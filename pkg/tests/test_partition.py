from collections import Counter

import pytest

from tubepack.budget import Budget, split_budget
from tubepack.generate import preset, generate_instance
from tubepack.model import BOXES, TUBES, BoxType, ContainerSpec, Instance, TubeType
from tubepack.partition import Unpackable, select_slice_length, solve
from tubepack.validate import validate


def lengths(*ls):
    return [TubeType(f"t{i}", 50, 60, v, 1) for i, v in enumerate(ls)]


# ------------------------------------------------------------ slice length

def test_slice_length_is_the_longest_that_fits():
    assert select_slice_length(lengths(12000, 6000, 3000, 5000), 12000) == 12000
    assert select_slice_length(lengths(6000), 5000) is None
    assert select_slice_length(lengths(6000, 5000), 5000) == 5000


def test_slice_length_ignores_exhausted_types():
    ts = [TubeType("a", 50, 60, 6000, 0), TubeType("b", 50, 60, 3000, 2)]
    assert select_slice_length(ts, 12000) == 3000


# ------------------------------------------------------------ budget split

def test_split_is_proportional():
    parent = Budget.nodes(1_000_000)
    assert split_budget(parent, 100, 50).total == 500_000


def test_split_has_a_floor():
    parent = Budget.nodes(1_000_000)
    assert split_budget(parent, 10_000, 1, quantum=2500).total == 2500


def test_grants_never_exceed_the_total():
    parent = Budget.nodes(10_000)
    granted = 0
    for _ in range(20):
        child = split_budget(parent, 7, 3)
        child.charge(child.total)
        parent.charge(child.used)
        granted += child.total
    assert granted <= 10_000 and parent.remaining == 0


# ------------------------------------------------------------ solve

def test_empty_instance_needs_no_container():
    sol = solve(Instance(ContainerSpec(1000, 1000, 1000), (), ()))
    assert sol.containers == [] and sol.metrics["containers_used"] == 0


def test_tube_longer_than_container_is_unpackable():
    inst = Instance(ContainerSpec(1000, 1000, 1000), (TubeType("t", 50, 60, 1200, 1),), ())
    with pytest.raises(Unpackable):
        solve(inst)


def test_oversized_box_is_unpackable():
    inst = Instance(ContainerSpec(1000, 1000, 1000), (), (BoxType("b", 1100, 1100, 1100, 1),))
    with pytest.raises(Unpackable):
        solve(inst)


def test_full_section_leaves_no_room_above():
    c = ContainerSpec(301, 301, 1000)
    inst = Instance(c, (TubeType("t", 80, 100, 1000, 12),), ())
    sol = solve(inst, time_limit=0.5)
    first = sol.containers[0].holders
    # an incomplete section keeps the full height, so nothing is stacked on it
    assert len(first) == 1 and first[0].dims == (301, 301, 1000)
    assert sol.containers_used >= 2
    assert sum(len(h.rings) for pc in sol.containers for h in pc.holders) == 12


def test_boxes_go_above_a_short_tube_holder():
    c = ContainerSpec(1000, 1000, 1000)
    inst = Instance(c, (TubeType("t", 80, 100, 1000, 5),), (BoxType("b", 200, 200, 200, 2),))
    sol = solve(inst, time_limit=0.5)
    assert sol.containers_used == 1
    h1, h2 = sol.containers[0].holders
    assert (h1.id, h1.kind, h1.origin) == ("H1", TUBES, (0, 0, 0))
    assert h1.dims[1] == pytest.approx(100.01)
    assert (h2.id, h2.kind) == ("H2", BOXES)
    assert h2.origin == (0, h1.dims[1], 0)
    assert validate(inst, sol) == []


def test_no_tubes_fit_so_boxes_fill_the_tail():
    c = ContainerSpec(301, 301, 1000)
    inst = Instance(c, (TubeType("t", 80, 100, 700, 12),), (BoxType("b", 250, 250, 250, 1),))
    sol = solve(inst, time_limit=0.5)
    holders = sol.containers[0].holders
    assert [h.kind for h in holders] == [TUBES, BOXES]
    tail = holders[1]
    assert tail.origin == (0, 0, 700) and tail.dims == (301, 301, 300)
    assert len(tail.boxes) == 1
    assert validate(inst, sol) == []


@pytest.fixture(scope="module")
def solved():
    out = []
    for name, seed in (("occ-cie-7", 1), ("occ-cie-1", 2), ("occ-cie-8", 3)):
        inst = generate_instance(preset(name, seed))
        out.append((inst, solve(inst, time_limit=0.2, seed=seed)))
    return out


def boxes_of(h):
    return tuple(h.origin) + tuple(h.origin[k] + h.dims[k] for k in range(3))


def test_holders_partition_each_container(solved):
    for inst, sol in solved:
        c = inst.container
        for pc in sol.containers:
            bs = [boxes_of(h) for h in pc.holders]
            for i, a in enumerate(bs):
                assert a[0] >= -1e-6 and a[1] >= -1e-6 and a[2] >= -1e-6
                assert a[3] <= c.width + 1e-6 and a[4] <= c.height + 1e-6 and a[5] <= c.depth + 1e-6
                for b in bs[i + 1:]:
                    assert not all(a[k] < b[k + 3] - 1e-6 and b[k] < a[k + 3] - 1e-6 for k in range(3))
            for h in pc.holders:
                assert h.dims[0] == c.width
                if h.kind == TUBES:
                    lens = {inst_type.len for inst_type in inst.tubes
                            if any(r.tube_type == inst_type.id and r.parent is None for r in h.rings)}
                    assert lens == {h.dims[2]}


def test_slices_are_non_increasing(solved):
    for _, sol in solved:
        for pc in sol.containers:
            floor = sorted((h for h in pc.holders if h.origin[1] == 0), key=lambda h: h.origin[2])
            depths = [h.dims[2] for h in floor if h.kind == TUBES]
            assert depths == sorted(depths, reverse=True)


def test_items_are_conserved(solved):
    for inst, sol in solved:
        tubes, boxes = Counter(), Counter()
        for pc in sol.containers:
            for h in pc.holders:
                tubes.update(r.tube_type for r in h.rings)
                boxes.update(p.box_type for p in h.boxes)
        tubes.update(sol.unpacked_tubes)
        boxes.update(sol.unpacked_boxes)
        assert tubes == Counter({t.id: t.count for t in inst.tubes if t.count})
        assert boxes == Counter({b.id: b.count for b in inst.boxes if b.count})
        assert not sol.unpacked_tubes and not sol.unpacked_boxes


def test_loading_order_is_bottom_up_rear_to_door(solved):
    for _, sol in solved:
        for pc in sol.containers:
            order = sorted(pc.holders, key=lambda h: (h.origin[2], h.origin[1]))
            for i, later in enumerate(order):
                lb = boxes_of(later)
                for earlier in order[:i]:
                    eb = boxes_of(earlier)
                    overlap_xz = eb[0] < lb[3] and lb[0] < eb[3] and eb[2] < lb[5] and lb[2] < eb[5]
                    assert not (overlap_xz and lb[4] <= eb[1] + 1e-6)


def test_solutions_validate(solved):
    for inst, sol in solved:
        assert validate(inst, sol) == []


def test_same_quota_same_layout():
    inst = generate_instance(preset("occ-cie-7", 4))
    a = solve(inst, time_limit=0.1, seed=9)
    b = solve(inst, time_limit=0.1, seed=9)
    assert a.containers == b.containers and a.metrics["nodes_used"] == b.metrics["nodes_used"]
