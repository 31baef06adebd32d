"""Discrete-event Monte Carlo of online spectrum assignment.

Requests arrive as merged Poisson streams, hold exponentially and ask for
S contiguous slots on their precomputed shortest path.  Admission is
staged: first try a window that is free on the whole path; only when
continuity fails, enumerate ever larger sets of usable converters and
place each resulting segment with Random Fit.  Converter boxes are scarce:
a shared bank grants one box per conversion and holds it for the whole
connection.

Per-link occupancy lives in Python integer bitmasks (bit s set = slot s
occupied), which keeps the per-event work to a few dozen integer ops.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import partial
from itertools import combinations

import numpy as np
from scipy import stats as sps

from ._parallel import parallel_map
from .errors import SimulatorFault
from .lightpath import (
    SHARE_PER_LINK,
    SHARE_PER_NODE,
    SIMPLE_NODE,
    ArchitectureMap,
)
from .topology import DemandSpec, NetworkGraph, RoutedPath, route_all

_POLICIES = ("minimal-conversions",)
_ARRIVAL, _DEPART = 0, 1


@dataclass
class SimConfig:
    seed: int = 0
    warmup: float | None = None  # default: 10 mean holding times
    horizon: float | None = None  # default: warmup + enough for 1e4 offers per demand
    replications: int = 1
    policy: str = "minimal-conversions"
    subset_limit_bits: int = 12  # enumerate at most 2^bits converter subsets

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.policy not in _POLICIES:
            raise ValueError(f"unknown admission policy {self.policy!r}")
        if self.warmup is not None and self.warmup < 0:
            raise ValueError("warmup must be >= 0")
        if (
            self.warmup is not None
            and self.horizon is not None
            and self.horizon <= self.warmup
        ):
            raise ValueError("horizon must exceed warmup")


@dataclass
class Connection:
    id: int
    slots: int
    segments: tuple[tuple[int, tuple[int, ...]], ...]  # (start slot, link ids)
    banks: tuple[tuple[str, int], ...]
    departure: float | None = None


class NetworkState:
    """Mutable spectrum and converter-bank state of one replication."""

    def __init__(self, graph: NetworkGraph, archs: ArchitectureMap, subset_limit_bits: int = 12):
        self.slot_count = graph.slot_count
        self.full_mask = (1 << graph.slot_count) - 1
        self.subset_limit_bits = subset_limit_bits
        self.occupied = {link.id: 0 for link in graph.links}
        self.bank_capacity: dict[tuple[str, int], int] = {}
        self.bank_in_use: dict[tuple[str, int], int] = {}
        for node in graph.nodes:
            arch = archs.get(node, SIMPLE_NODE)
            if arch.kind == SHARE_PER_NODE:
                key = ("node", node)
                self.bank_capacity[key] = arch.n_sc
                self.bank_in_use[key] = 0
            elif arch.kind == SHARE_PER_LINK:
                for link in graph.out_links(node):
                    key = ("port", link.id)
                    self.bank_capacity[key] = arch.n_sc
                    self.bank_in_use[key] = 0
        self.connections: dict[int, Connection] = {}
        self.next_id = 1
        self.fallback_admissions = 0

    def bank_key(self, node: int, exit_link_id: int, arch) -> tuple[str, int] | None:
        if arch.kind == SHARE_PER_NODE:
            return ("node", node)
        if arch.kind == SHARE_PER_LINK:
            return ("port", exit_link_id)
        return None  # full: no finite bank

    def bank_free(self, key: tuple[str, int] | None) -> bool:
        if key is None:
            return True
        return self.bank_in_use[key] < self.bank_capacity[key]

    def verify_conservation(self):
        """Cross-check masks and bank counters against the ledger."""
        expected = {lid: 0 for lid in self.occupied}
        banks = {key: 0 for key in self.bank_in_use}
        for conn in self.connections.values():
            for _start, link_ids in conn.segments:
                for lid in link_ids:
                    expected[lid] += conn.slots
            for key in conn.banks:
                banks[key] += 1
        for lid, occ in self.occupied.items():
            if occ.bit_count() != expected[lid]:
                raise SimulatorFault(
                    f"link {lid}: {occ.bit_count()} slots occupied, ledger says {expected[lid]}"
                )
        for key, used in self.bank_in_use.items():
            if used != banks[key]:
                raise SimulatorFault(f"bank {key}: counter {used}, ledger says {banks[key]}")


def _window_starts(mask: int, min_run: int, limit: int) -> int:
    """Bit i set in the result when slots i..i+min_run-1 are all set in mask."""
    result = mask
    for shift in range(1, min_run):
        result &= mask >> shift
        if not result:
            return 0
    return result & limit


def _pick_start(starts: int, rng) -> int:
    positions = []
    while starts:
        low = starts & -starts
        positions.append(low.bit_length() - 1)
        starts ^= low
    if len(positions) == 1:
        return positions[0]
    return positions[int(rng.integers(len(positions)))]


def admit(
    state: NetworkState,
    route: RoutedPath,
    slots: int,
    archs: ArchitectureMap,
    rng,
) -> int | None:
    """Try to carry a request for ``slots`` contiguous slots on ``route``.

    Returns the new connection id, or None when blocked.  Accepting
    mutates the state: slots are marked occupied and one converter box is
    drawn from the bank of every conversion point used.
    """
    if slots > state.slot_count:
        return None
    links = route.links
    hops = len(links)
    free = [state.full_mask & ~state.occupied[link.id] for link in links]
    limit = (1 << (state.slot_count - slots + 1)) - 1

    whole = state.full_mask
    for mask in free:
        whole &= mask
        if not whole:
            break
    starts = _window_starts(whole, slots, limit) if whole else 0
    if starts:
        start = _pick_start(starts, rng)
        return _allocate(state, route, slots, [(1, hops + 1, start)], ())

    # continuity failed: gather converters whose bank still has a free box
    usable: list[tuple[int, tuple[str, int] | None]] = []
    for pos in range(2, hops + 1):
        node = route.nodes[pos - 1]
        arch = archs.get(node, SIMPLE_NODE)
        if not arch.converts:
            continue
        key = state.bank_key(node, links[pos - 1].id, arch)
        if state.bank_free(key):
            usable.append((pos, key))
    if not usable:
        return None

    if len(usable) > state.subset_limit_bits:
        return _greedy_admit(state, route, slots, free, limit, usable, rng)

    keys = dict(usable)
    positions = [pos for pos, _ in usable]
    for size in range(1, len(positions) + 1):
        for subset in combinations(positions, size):
            bounds = (1,) + subset + (hops + 1,)
            segment_starts = []
            feasible = True
            for a, b in zip(bounds, bounds[1:]):
                mask = state.full_mask
                for h in range(a, b):
                    mask &= free[h - 1]
                    if not mask:
                        break
                seg = _window_starts(mask, slots, limit) if mask else 0
                if not seg:
                    feasible = False
                    break
                segment_starts.append(seg)
            if not feasible:
                continue
            segments = [
                (a, b, _pick_start(seg, rng))
                for (a, b), seg in zip(zip(bounds, bounds[1:]), segment_starts)
            ]
            banks = tuple(key for key in (keys[p] for p in subset) if key is not None)
            return _allocate(state, route, slots, segments, banks)
    return None


def _greedy_admit(state, route, slots, free, limit, usable, rng) -> int | None:
    """Fallback for routes with too many converters to enumerate: extend
    each segment as far as continuity allows, splitting at the latest
    usable converter when it breaks."""
    state.fallback_admissions += 1
    hops = len(route.links)
    positions = [pos for pos, _ in usable]
    keys = dict(usable)
    bounds: list[tuple[int, int]] = []
    used: list[int] = []
    a, h = 1, 1
    mask = state.full_mask
    while h <= hops:
        trial = mask & free[h - 1]
        if _window_starts(trial, slots, limit):
            mask = trial
            h += 1
            continue
        splits = [p for p in positions if a < p <= h and p not in used]
        if not splits:
            return None
        cut = max(splits)
        used.append(cut)
        bounds.append((a, cut))
        a = cut
        mask = state.full_mask
        for k in range(cut, h):
            mask &= free[k - 1]
    bounds.append((a, hops + 1))
    segments = []
    for seg_a, seg_b in bounds:
        seg_mask = state.full_mask
        for k in range(seg_a, seg_b):
            seg_mask &= free[k - 1]
        seg = _window_starts(seg_mask, slots, limit)
        if not seg:
            return None
        segments.append((seg_a, seg_b, _pick_start(seg, rng)))
    banks = tuple(key for key in (keys[p] for p in used) if key is not None)
    return _allocate(state, route, slots, segments, banks)


def _allocate(state, route, slots, segments, bank_keys) -> int:
    window = (1 << slots) - 1
    stored = []
    for a, b, start in segments:
        link_ids = tuple(route.links[h - 1].id for h in range(a, b))
        shifted = window << start
        for lid in link_ids:
            if state.occupied[lid] & shifted:
                raise SimulatorFault(f"double allocation on link {lid}")
            state.occupied[lid] |= shifted
        stored.append((start, link_ids))
    for key in bank_keys:
        state.bank_in_use[key] += 1
    conn = Connection(
        id=state.next_id, slots=slots, segments=tuple(stored), banks=tuple(bank_keys)
    )
    state.connections[conn.id] = conn
    state.next_id += 1
    return conn.id


def release(state: NetworkState, conn_id: int):
    """Free a connection's slots and converter boxes."""
    conn = state.connections.pop(conn_id, None)
    if conn is None:
        raise SimulatorFault(f"release of unknown connection {conn_id}")
    window = (1 << conn.slots) - 1
    for start, link_ids in conn.segments:
        shifted = window << start
        for lid in link_ids:
            if (state.occupied[lid] & shifted) != shifted:
                raise SimulatorFault(f"releasing slots not held on link {lid}")
            state.occupied[lid] &= ~shifted
    for key in conn.banks:
        state.bank_in_use[key] -= 1


# ---------------------------------------------------------------------------
# event loop


@dataclass
class SimResult:
    demand_offered: list[int]
    demand_blocked: list[int]
    demand_blocking: list[float]
    replication_blockings: list[float]
    network_blocking_prob: float
    ci95_half_width: float
    offered_total: int
    blocked_total: int
    fallback_admissions: int
    warmup: float
    horizon: float
    per_replication_offered: list[list[int]] = field(default_factory=list)
    per_replication_blocked: list[list[int]] = field(default_factory=list)


def _slot_sampler(demand: DemandSpec):
    items = sorted(demand.slot_pmf.items())
    if len(items) == 1:
        value = items[0][0]
        return lambda rng: value
    values = [s for s, _ in items]
    cumulative = np.cumsum([p for _, p in items])

    def draw(rng):
        u = rng.random()
        return values[int(np.searchsorted(cumulative, u, side="right").clip(0, len(values) - 1))]

    return draw


def _run_replication(graph, demands, routes, archs, config, warmup, horizon, trace, rep):
    entropy = np.random.SeedSequence(entropy=(config.seed, rep))
    children = entropy.spawn(len(demands) + 1)
    demand_rngs = [np.random.default_rng(c) for c in children[:-1]]
    admit_rng = np.random.default_rng(children[-1])
    samplers = [_slot_sampler(d) for d in demands]

    state = NetworkState(graph, archs, config.subset_limit_bits)
    heap: list[tuple] = []
    seq = 0

    def schedule(d_idx, now):
        nonlocal seq
        rng = demand_rngs[d_idx]
        dt = rng.exponential(1.0 / demands[d_idx].rate)
        s = samplers[d_idx](rng)
        hold = rng.exponential(demands[d_idx].hold)
        heapq.heappush(heap, (now + dt, seq, _ARRIVAL, d_idx, s, hold))
        seq += 1

    for i in range(len(demands)):
        schedule(i, 0.0)

    offered = [0] * len(demands)
    blocked = [0] * len(demands)
    while heap:
        event = heapq.heappop(heap)
        t = event[0]
        if t > horizon:
            break
        if event[2] == _ARRIVAL:
            _, _, _, d_idx, s, hold = event
            schedule(d_idx, t)
            counted = t > warmup
            if counted:
                offered[d_idx] += 1
            conn_id = admit(state, routes[d_idx], s, archs, admit_rng)
            if conn_id is None:
                if counted:
                    blocked[d_idx] += 1
                if trace is not None:
                    trace(f"{t:.6f} arrival demand={d_idx} slots={s} blocked\n")
            else:
                state.connections[conn_id].departure = t + hold
                heapq.heappush(heap, (t + hold, seq, _DEPART, conn_id, 0, 0.0))
                seq += 1
                if trace is not None:
                    segs = state.connections[conn_id].segments
                    trace(
                        f"{t:.6f} arrival demand={d_idx} slots={s} "
                        f"accepted conn={conn_id} segments={segs}\n"
                    )
        else:
            release(state, event[3])
            if trace is not None:
                trace(f"{t:.6f} departure conn={event[3]}\n")
    return offered, blocked, state.fallback_admissions


def resolve_windows(demands: list[DemandSpec], config: SimConfig) -> tuple[float, float]:
    """Fill in default warmup (10 mean holds) and horizon (offers at least
    1e4 requests for the slowest demand)."""
    warmup = config.warmup
    if warmup is None:
        warmup = 10.0 * max(d.hold for d in demands) if demands else 0.0
    horizon = config.horizon
    if horizon is None:
        slowest = min((d.rate for d in demands), default=1.0)
        horizon = warmup + 1e4 / slowest
    if horizon <= warmup:
        raise ValueError("horizon must exceed warmup")
    return warmup, horizon


def simulate(
    graph: NetworkGraph,
    demands: list[DemandSpec],
    archs: ArchitectureMap,
    config: SimConfig | None = None,
    routes: list[RoutedPath] | None = None,
    trace=None,
) -> SimResult:
    """Run ``config.replications`` independent replications and aggregate.

    Replication r draws every stream from (seed, r), so results are
    reproducible bit for bit and independent of parallel scheduling.  When
    ``trace`` is given (a callable receiving text lines), replications run
    sequentially in-process.
    """
    config = config or SimConfig()
    if routes is None:
        routes = route_all(graph, demands)
    warmup, horizon = resolve_windows(demands, config)

    runner = partial(
        _run_replication, graph, demands, routes, archs, config, warmup, horizon, trace
    )
    reps = list(range(config.replications))
    if trace is not None:
        outcomes = [runner(rep) for rep in reps]
    else:
        outcomes = parallel_map(runner, reps)

    per_offered = [o for o, _, _ in outcomes]
    per_blocked = [b for _, b, _ in outcomes]
    fallback = sum(f for _, _, f in outcomes)

    demand_offered = [sum(o[i] for o in per_offered) for i in range(len(demands))]
    demand_blocked = [sum(b[i] for b in per_blocked) for i in range(len(demands))]
    demand_blocking = [
        (b / o) if o else 0.0 for b, o in zip(demand_blocked, demand_offered)
    ]
    rep_blockings = []
    for o, b in zip(per_offered, per_blocked):
        total_o, total_b = sum(o), sum(b)
        rep_blockings.append((total_b / total_o) if total_o else 0.0)
    offered_total = sum(demand_offered)
    blocked_total = sum(demand_blocked)
    network = (blocked_total / offered_total) if offered_total else 0.0
    if len(rep_blockings) > 1:
        spread = float(np.std(rep_blockings, ddof=1)) / math.sqrt(len(rep_blockings))
        half_width = float(sps.t.ppf(0.975, len(rep_blockings) - 1)) * spread
    else:
        half_width = 0.0
    return SimResult(
        demand_offered=demand_offered,
        demand_blocked=demand_blocked,
        demand_blocking=demand_blocking,
        replication_blockings=rep_blockings,
        network_blocking_prob=network,
        ci95_half_width=half_width,
        offered_total=offered_total,
        blocked_total=blocked_total,
        fallback_admissions=fallback,
        warmup=warmup,
        horizon=horizon,
        per_replication_offered=per_offered,
        per_replication_blocked=per_blocked,
    )
