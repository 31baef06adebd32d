import json
import math

import numpy as np
import pytest

from eonspectra.errors import ArchitectureError
from eonspectra.lightpath import (
    FULL,
    SHARE_PER_LINK,
    SHARE_PER_NODE,
    SIMPLE,
    BlockingDiagnostics,
    NodeArchitecture,
    PathContext,
    blocking_full_at,
    blocking_full_conversion,
    blocking_without_conversion,
    converter_layout,
    exact_layout_success,
    layout_availability,
    layout_power_set,
    lightpath_blocking,
    load_architectures,
    node_mean_free_prob,
    segment_success_prob,
    share_per_link_availability,
    share_per_node_availability,
    uniform_architectures,
)
from eonspectra.topology import (
    CrossingStats,
    Link,
    NetworkGraph,
    RoutedPath,
    crossing_stats,
)

from oracles import mc_segmented_blocking


def line_path(hops):
    links = tuple(Link(h + 1, h + 1, h + 2, 1.0) for h in range(hops))
    return RoutedPath(nodes=tuple(range(1, hops + 2)), links=links)


def line_graph(hops, slot_count):
    links = [Link(h + 1, h + 1, h + 2, 1.0) for h in range(hops)]
    return NetworkGraph(labels=list(range(1, hops + 2)), links=links, slot_count=slot_count)


def empty_stats(hops):
    g = line_graph(hops, 4)
    return crossing_stats(g, [])


TWO_HOP = line_path(2)
PHIS_HALF = {1: 0.5, 2: 0.5}


# --- layouts -----------------------------------------------------------------


def test_layout_all_simple():
    path = line_path(3)
    assert converter_layout(path, {}) == (1, 4)


def test_layout_from_positions():
    path = line_path(5)
    archs = {2: NodeArchitecture(FULL), 4: NodeArchitecture(FULL)}
    assert converter_layout(path, archs) == (1, 2, 4, 6)


def test_layout_excludes_endpoints():
    path = line_path(2)
    archs = {1: NodeArchitecture(FULL), 3: NodeArchitecture(FULL)}
    assert converter_layout(path, archs) == (1, 3)


def test_power_set_order_and_contents():
    assert layout_power_set((1, 6)) == [(1, 6)]
    assert layout_power_set((1, 2, 4, 6)) == [(1, 6), (1, 2, 6), (1, 4, 6), (1, 2, 4, 6)]
    assert len(layout_power_set((1, 2, 3, 4, 9))) == 8


def test_power_set_guard():
    layout = tuple(range(1, 24))
    with pytest.raises(ValueError):
        layout_power_set(layout)


# --- segments and the layout expansion --------------------------------------


def test_segment_success_single_segment():
    got = segment_success_prob(2, 3, (1, 3), (0.5, 0.5))
    assert got == pytest.approx(0.109375, abs=1e-15)


def test_segment_success_split():
    got = segment_success_prob(2, 3, (1, 2, 3), (0.5, 0.5))
    assert got == pytest.approx(0.375**2, abs=1e-15)


def test_segment_success_zero_segment():
    assert segment_success_prob(2, 3, (1, 2, 3), (0.0, 0.9)) == 0.0


def test_exact_layout_success_worked_example():
    ctx = PathContext(slot_count=3, hop_free_probs=(0.5, 0.5))
    assert exact_layout_success(2, (1, 3), ctx) == pytest.approx(0.109375)
    assert exact_layout_success(2, (1, 2, 3), ctx) == pytest.approx(0.03125)
    total = sum(exact_layout_success(2, l, ctx) for l in layout_power_set((1, 2, 3)))
    assert total == pytest.approx(0.140625)


def test_layout_success_sums_to_finest_segmentation_without_clamps():
    rng = np.random.default_rng(2)
    clamped_runs = 0
    for _ in range(200):
        hops = int(rng.integers(1, 7))
        slot_count = int(rng.integers(2, 13))
        min_run = int(rng.integers(1, min(slot_count, 4) + 1))
        phis = tuple(float(x) for x in rng.uniform(0.2, 1.0, hops))
        interior = tuple(p for p in range(2, hops + 1) if rng.random() < 0.6)
        layout = (1,) + interior + (hops + 1,)
        ctx = PathContext(slot_count=slot_count, hop_free_probs=phis)
        total = math.fsum(exact_layout_success(min_run, l, ctx) for l in layout_power_set(layout))
        finest = segment_success_prob(min_run, slot_count, layout, phis)
        if ctx.ramp_clamps == 0:
            assert total == pytest.approx(finest, abs=1e-12)
        else:
            clamped_runs += 1
            assert total >= finest - 1e-12
    assert clamped_runs < 100  # the clamp-free branch must dominate


# --- availability ------------------------------------------------------------


def test_share_per_link_availability_values():
    assert share_per_link_availability(1, 2, 2.0, 0.5) == pytest.approx(0.25)
    assert share_per_link_availability(3, 2, 5.0, 0.3) == 1.0
    assert share_per_link_availability(1, 1, 2.0, 0.9) == pytest.approx(0.81)
    assert share_per_link_availability(2, 0, 0.0, 0.4) == 1.0  # no contention


def test_share_per_node_availability_matches_link_form():
    assert share_per_node_availability(1, 2, 2.0, 0.5) == pytest.approx(0.25)
    assert share_per_node_availability(3, 0, 0.0, 0.1) == 1.0
    assert share_per_node_availability(5, 4, 6.0, 0.7) == 1.0


def test_availability_in_unit_interval():
    rng = np.random.default_rng(4)
    for _ in range(300):
        n_sc = int(rng.integers(1, 6))
        n = int(rng.integers(0, 9))
        s = float(rng.uniform(0, 4) * n)
        phi = float(rng.random())
        value = share_per_link_availability(n_sc, n, s, phi)
        assert 0.0 <= value <= 1.0


def test_node_mean_free_prob():
    stats = CrossingStats(
        port_paths={1: 1, 2: 3},
        port_slots={1: 0.0, 2: 0.0},
        node_paths={1: 4},
        node_slots={1: 0.0},
        node_ports={1: (1, 2)},
    )
    assert node_mean_free_prob(stats, {1: 0.4, 2: 0.8}, 1) == pytest.approx(0.7)
    single = CrossingStats({1: 2}, {1: 0.0}, {1: 2}, {1: 0.0}, {1: (1,)})
    assert node_mean_free_prob(single, {1: 0.55}, 1) == pytest.approx(0.55)
    idle = CrossingStats({1: 0, 2: 0}, {1: 0.0, 2: 0.0}, {1: 0}, {1: 0.0}, {1: (1, 2)})
    assert node_mean_free_prob(idle, {1: 0.2, 2: 0.6}, 1) == pytest.approx(0.4)


def test_layout_availability_trivial_cases():
    stats = empty_stats(2)
    assert layout_availability((1, 3), TWO_HOP, {}, stats, PHIS_HALF) == 1.0
    archs = {2: NodeArchitecture(FULL)}
    assert layout_availability((1, 2, 3), TWO_HOP, archs, stats, PHIS_HALF) == 1.0


def test_layout_availability_single_shared_factor():
    stats = CrossingStats(
        port_paths={1: 0, 2: 2},
        port_slots={1: 0.0, 2: 2.0},
        node_paths={1: 0, 2: 2, 3: 0},
        node_slots={1: 0.0, 2: 2.0, 3: 0.0},
        node_ports={1: (1,), 2: (2,), 3: ()},
    )
    archs = {2: NodeArchitecture(SHARE_PER_LINK, 1)}
    got = layout_availability((1, 2, 3), TWO_HOP, archs, stats, PHIS_HALF)
    assert got == pytest.approx(0.25)


# --- blocking ----------------------------------------------------------------


def test_blocking_worked_examples():
    stats = empty_stats(2)
    no_conv = lightpath_blocking(2, TWO_HOP, {}, PHIS_HALF, stats, 3)
    assert no_conv == pytest.approx(0.890625)
    full = lightpath_blocking(2, TWO_HOP, {2: NodeArchitecture(FULL)}, PHIS_HALF, stats, 3)
    assert full == pytest.approx(0.859375)
    shared_stats = CrossingStats(
        port_paths={1: 0, 2: 2},
        port_slots={1: 0.0, 2: 2.0},
        node_paths={1: 0, 2: 2, 3: 0},
        node_slots={1: 0.0, 2: 2.0, 3: 0.0},
        node_ports={1: (1,), 2: (2,), 3: ()},
    )
    shared = lightpath_blocking(
        2, TWO_HOP, {2: NodeArchitecture(SHARE_PER_LINK, 1)}, PHIS_HALF, shared_stats, 3
    )
    assert shared == pytest.approx(1.0 - (0.109375 + 0.03125 * 0.25))


def test_blocking_request_larger_than_fiber():
    stats = empty_stats(2)
    assert lightpath_blocking(5, TWO_HOP, {}, PHIS_HALF, stats, 3) == 1.0


def _random_instance(rng, max_hops=6, max_slots=12):
    hops = int(rng.integers(1, max_hops + 1))
    slot_count = int(rng.integers(2, max_slots + 1))
    min_run = int(rng.integers(1, min(slot_count, 4) + 1))
    phis = {h + 1: float(x) for h, x in enumerate(rng.uniform(0.2, 1.0, hops))}
    path = line_path(hops)
    stats = empty_stats(hops)
    return hops, slot_count, min_run, phis, path, stats


def test_engine_collapses_to_special_cases():
    rng = np.random.default_rng(9)
    checked = 0
    for _ in range(200):
        hops, slot_count, min_run, phis, path, stats = _random_instance(rng)
        hop_probs = tuple(phis[h + 1] for h in range(hops))
        diag = BlockingDiagnostics()
        # empty layout reproduces the no-conversion closed form
        got = lightpath_blocking(min_run, path, {}, phis, stats, slot_count,
                                 diagnostics=diag)
        assert got == pytest.approx(blocking_without_conversion(min_run, slot_count, hop_probs), abs=1e-12)
        # all-full interior reproduces the per-hop closed form
        archs = {n: NodeArchitecture(FULL) for n in range(2, hops + 1)}
        diag = BlockingDiagnostics()
        got = lightpath_blocking(min_run, path, archs, phis, stats, slot_count,
                                 diagnostics=diag)
        if diag.ramp_clamps == 0:
            assert got == pytest.approx(blocking_full_conversion(min_run, slot_count, hop_probs), abs=1e-12)
            checked += 1
        # full converters at a random interior subset reproduce the
        # segmented closed form
        interior = tuple(p for p in range(2, hops + 1) if rng.random() < 0.5)
        archs = {path.nodes[p - 1]: NodeArchitecture(FULL) for p in interior}
        diag = BlockingDiagnostics()
        got = lightpath_blocking(min_run, path, archs, phis, stats, slot_count,
                                 diagnostics=diag)
        if diag.ramp_clamps == 0:
            layout = (1,) + interior + (hops + 1,)
            assert got == pytest.approx(blocking_full_at(min_run, slot_count, layout, hop_probs), abs=1e-12)
    assert checked >= 100


def test_upgrading_architecture_never_increases_blocking():
    rng = np.random.default_rng(13)
    ladder = [
        {},
        {"kind": SHARE_PER_NODE, "n_sc": 1},
        {"kind": SHARE_PER_NODE, "n_sc": 3},
        {"kind": FULL, "n_sc": None},
    ]
    for _ in range(120):
        hops, slot_count, min_run, phis, path, _ = _random_instance(rng, max_hops=5)
        if hops < 2:
            continue
        node = int(rng.integers(2, hops + 1))
        # nonzero crossing statistics so shared availability is nontrivial
        g = line_graph(hops, slot_count)
        crossing = [
            RoutedPath(nodes=path.nodes, links=path.links,
                       demand=None)
        ]
        stats = crossing_stats(g, [])
        for link in path.links:
            stats.port_paths[link.id] = int(rng.integers(0, 5))
            stats.port_slots[link.id] = stats.port_paths[link.id] * float(rng.uniform(1, 3))
        for v in range(2, hops + 1):
            ports = stats.node_ports[v]
            stats.node_paths[v] = sum(stats.port_paths[j] for j in ports)
            stats.node_slots[v] = sum(stats.port_slots[j] for j in ports)
        previous = None
        for rung in ladder:
            archs = {} if not rung else {node: NodeArchitecture(rung["kind"], rung["n_sc"])}
            value = lightpath_blocking(min_run, path, archs, phis, stats, slot_count)
            if previous is not None:
                assert value <= previous + 1e-12
            previous = value


def test_blocking_against_monte_carlo_masks():
    rng = np.random.default_rng(21)
    samples = 200_000
    for _ in range(8):
        hops = int(rng.integers(1, 6))
        slot_count = int(rng.integers(2, 17))
        min_run = int(rng.integers(1, min(slot_count, 3) + 1))
        probs = rng.uniform(0.5, 0.98, hops)
        phis = {h + 1: float(p) for h, p in enumerate(probs)}
        interior = tuple(p for p in range(2, hops + 1) if rng.random() < 0.5)
        layouts = [
            (1, hops + 1),
            tuple(range(1, hops + 2)),
            (1,) + interior + (hops + 1,),
        ]
        mc = mc_segmented_blocking(min_run, slot_count, layouts, probs, samples, rng)
        analytic = [
            blocking_without_conversion(min_run, slot_count, probs),
            blocking_full_conversion(min_run, slot_count, probs),
            blocking_full_at(min_run, slot_count, layouts[2], probs),
        ]
        for a, m in zip(analytic, mc):
            se = max(math.sqrt(a * (1 - a) / samples), 1e-7)
            assert abs(a - m) <= 4 * se, (hops, slot_count, min_run)


# --- architecture documents --------------------------------------------------


def test_load_architectures():
    g = line_graph(2, 4)
    archs = load_architectures(
        json.dumps({"2": {"kind": "share_per_link", "n_sc": 2}, "3": {"kind": "full"}}), g
    )
    assert archs[2] == NodeArchitecture(SHARE_PER_LINK, 2)
    assert archs[3] == NodeArchitecture(FULL)
    assert 1 not in archs  # stays simple


def test_load_architectures_rejects_bad_entries():
    g = line_graph(2, 4)
    with pytest.raises(ArchitectureError):
        load_architectures(json.dumps({"2": {"kind": "warp"}}), g)
    with pytest.raises(ArchitectureError):
        load_architectures(json.dumps({"2": {"kind": "share_per_node"}}), g)
    with pytest.raises(ArchitectureError):
        load_architectures(json.dumps({"9": {"kind": "full"}}), g)
    with pytest.raises(ArchitectureError):
        NodeArchitecture(SHARE_PER_LINK, 0)


def test_uniform_architectures():
    g = line_graph(3, 4)
    archs = uniform_architectures(g, NodeArchitecture(SHARE_PER_NODE, 2))
    assert set(archs) == set(g.nodes)
    assert uniform_architectures(g, NodeArchitecture(SIMPLE)) == {}
