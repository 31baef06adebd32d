"""Blocking probability of a single routed lightpath.

A request for S contiguous slots succeeds on a converter-free path only if
some S-slot window is free on every hop.  Converters at interior nodes cut
the path into segments that may use different windows.  The general engine
expands the path's converter layout into its power set: for each
sub-layout l it combines

  * the probability the path is established using exactly the converters
    of l (``exact_layout_success``), and
  * the probability those converters are actually free to take the request
    (``layout_availability``, architecture dependent),

and sums the products.  Layouts are tuples of path positions
``(1, p2, ..., H+1)``: fixed endpoints plus the interior positions that
hold a converter.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from .errors import ArchitectureError
from .runprob import ramp, run_probability
from .topology import CrossingStats, NetworkGraph, RoutedPath

log = logging.getLogger(__name__)

SIMPLE = "simple"
FULL = "full"
SHARE_PER_LINK = "share_per_link"
SHARE_PER_NODE = "share_per_node"

_KINDS = (SIMPLE, FULL, SHARE_PER_LINK, SHARE_PER_NODE)
_SHARED_KINDS = (SHARE_PER_LINK, SHARE_PER_NODE)

_MAX_LAYOUT = 20  # power-set guard: 2^20 sub-layouts
_CLAMP_NOISE = 1e-12  # ramp arguments above -this are float dust, not clamps
_BREACH_TOL = 1e-9


@dataclass(frozen=True)
class NodeArchitecture:
    """Spectrum-conversion capability of one cross-connect."""

    kind: str
    n_sc: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ArchitectureError(f"unknown architecture kind {self.kind!r}")
        if self.kind in _SHARED_KINDS:
            if self.n_sc is None or self.n_sc < 1:
                raise ArchitectureError(f"{self.kind} requires n_sc >= 1, got {self.n_sc}")

    @property
    def converts(self) -> bool:
        return self.kind != SIMPLE


SIMPLE_NODE = NodeArchitecture(SIMPLE)

# map: node id -> architecture; nodes absent from the map are simple
ArchitectureMap = dict[int, NodeArchitecture]
# map: link id -> probability that one slot on the link is free
LinkFreeProbs = dict[int, float]


def load_architectures(document, graph: NetworkGraph) -> ArchitectureMap:
    """Parse an architecture document ``{"<node label>": {"kind", "n_sc"?}}``.

    Nodes not mentioned stay simple.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ArchitectureError(f"invalid architecture JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ArchitectureError("architecture document must be a JSON object")
    archs: ArchitectureMap = {}
    for label, entry in document.items():
        node = _resolve_label(label, graph)
        try:
            kind = entry["kind"]
        except (KeyError, TypeError) as exc:
            raise ArchitectureError(f"malformed architecture entry {entry!r}") from exc
        archs[node] = NodeArchitecture(kind=kind, n_sc=entry.get("n_sc"))
    return archs


def _resolve_label(label, graph: NetworkGraph):
    # JSON object keys are strings even when node labels are integers
    try:
        return graph.node_of(label)
    except Exception:
        pass
    try:
        return graph.node_of(int(label))
    except (ValueError, TypeError):
        raise ArchitectureError(f"unknown node label {label!r}") from None


def uniform_architectures(graph: NetworkGraph, arch: NodeArchitecture) -> ArchitectureMap:
    """The same architecture at every node of the graph."""
    if not arch.converts:
        return {}
    return {node: arch for node in graph.nodes}


# ---------------------------------------------------------------------------
# layouts


def converter_layout(path: RoutedPath, archs: ArchitectureMap) -> tuple[int, ...]:
    """Positions along ``path`` that hold a converter, endpoints included.

    Only strictly interior nodes count: conversion capability at the source
    or destination cannot help the request.
    """
    hops = path.hop_count
    interior = tuple(
        pos
        for pos in range(2, hops + 1)
        if archs.get(path.nodes[pos - 1], SIMPLE_NODE).converts
    )
    if len(interior) > _MAX_LAYOUT:
        raise ValueError(f"layout with {len(interior)} converters exceeds guard {_MAX_LAYOUT}")
    return (1,) + interior + (hops + 1,)


@lru_cache(maxsize=4096)
def _power_set_cached(layout: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    interior = layout[1:-1]
    if len(interior) > _MAX_LAYOUT:
        raise ValueError(f"layout with {len(interior)} converters exceeds guard {_MAX_LAYOUT}")
    first, last = layout[0], layout[-1]
    subs = []
    for size in range(len(interior) + 1):
        for chosen in combinations(interior, size):
            subs.append((first,) + chosen + (last,))
    return tuple(subs)


def layout_power_set(layout: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Every sub-layout of ``layout`` keeping the endpoints, ordered by
    interior size then lexicographically."""
    return list(_power_set_cached(layout))


def segment_success_prob(
    min_run: int,
    slot_count: int,
    layout: tuple[int, ...],
    hop_free_probs,
    run_memo: dict | None = None,
) -> float:
    """Probability that every segment of ``layout`` offers ``min_run``
    contiguous free slots.

    Segment k spans hops layout[k]..layout[k+1]-1; a slot is free on the
    whole segment with the product of the per-hop probabilities.
    """
    result = 1.0
    for a, b in zip(layout, layout[1:]):
        rho = math.prod(hop_free_probs[h - 1] for h in range(a, b))
        if run_memo is None:
            result *= run_probability(min_run, slot_count, rho)
        else:
            key = (min_run, slot_count, rho)
            value = run_memo.get(key)
            if value is None:
                value = run_probability(min_run, slot_count, rho)
                run_memo[key] = value
            result *= value
        if result == 0.0:
            break
    return result


@dataclass
class PathContext:
    """Shared scratch state for evaluating one lightpath."""

    slot_count: int
    hop_free_probs: tuple[float, ...]
    memo: dict = field(default_factory=dict)  # (min_run, layout) -> success prob
    run_memo: dict = field(default_factory=dict)  # (S, F, rho) -> run probability
    ramp_clamps: int = 0


def exact_layout_success(min_run: int, layout: tuple[int, ...], ctx: PathContext) -> float:
    """Probability the lightpath is established with exactly the converters
    of ``layout`` participating.

    The segmented success probability counts every establishment that uses
    at most these converters, so the contributions of all strict
    sub-layouts are subtracted; the ramp keeps the approximation
    nonnegative.
    """
    key = (min_run, layout)
    value = ctx.memo.get(key)
    if value is not None:
        return value
    seg = segment_success_prob(min_run, ctx.slot_count, layout, ctx.hop_free_probs, ctx.run_memo)
    if len(layout) == 2:
        value = seg
    else:
        below = math.fsum(
            exact_layout_success(min_run, sub, ctx)
            for sub in _power_set_cached(layout)[:-1]  # strict sub-layouts
        )
        raw = seg - below
        if raw < -_CLAMP_NOISE:
            ctx.ramp_clamps += 1
        value = ramp(raw)
    ctx.memo[key] = value
    return value


# ---------------------------------------------------------------------------
# converter availability


def share_per_link_availability(n_sc: int, n_port: int, s_port: float, phi_port: float) -> float:
    """Probability that the SCB bank of one output port has a free box.

    Each of the ``n_port`` transit paths crossing the port skips conversion
    with probability phi_port^(s_port/n_port); the bank is free when fewer
    than ``n_sc`` paths need conversion.  No crossing paths means no
    contention.
    """
    if n_sc < 1:
        raise ValueError(f"n_sc must be >= 1, got {n_sc}")
    if n_port < 0 or s_port < 0:
        raise ValueError("path and slot counts must be nonnegative")
    if n_port == 0 or n_sc > n_port:
        return 1.0
    no_conv = phi_port ** (s_port / n_port)
    terms = [
        math.comb(n_port, k) * (1.0 - no_conv) ** k * no_conv ** (n_port - k)
        for k in range(n_sc)
    ]
    return min(math.fsum(terms), 1.0)


def node_mean_free_prob(stats: CrossingStats, phis: LinkFreeProbs, node: int) -> float:
    """Slot-free probability an average transit path sees at ``node``:
    the crossing-count-weighted mean over the node's output ports."""
    ports = stats.node_ports[node]
    if not ports:
        return 1.0
    n_node = stats.node_paths[node]
    if n_node == 0:
        return math.fsum(phis[j] for j in ports) / len(ports)
    return math.fsum(stats.port_paths[j] / n_node * phis[j] for j in ports)


def share_per_node_availability(n_sc: int, n_node: int, s_node: float, phi_node: float) -> float:
    """Probability that a node-wide SCB bank has a free box; same binomial
    form as the per-port bank with node-level aggregates."""
    return share_per_link_availability(n_sc, n_node, s_node, phi_node)


def converter_availability(
    position: int,
    path: RoutedPath,
    archs: ArchitectureMap,
    stats: CrossingStats,
    phis: LinkFreeProbs,
) -> float:
    """Probability the converter at path position ``position`` is free for
    this request, per its architecture."""
    node = path.nodes[position - 1]
    arch = archs.get(node, SIMPLE_NODE)
    if arch.kind == FULL:
        return 1.0
    if arch.kind == SHARE_PER_LINK:
        exit_link = path.links[position - 1]
        return share_per_link_availability(
            arch.n_sc,
            stats.port_paths[exit_link.id],
            stats.port_slots[exit_link.id],
            phis[exit_link.id],
        )
    if arch.kind == SHARE_PER_NODE:
        return share_per_node_availability(
            arch.n_sc,
            stats.node_paths[node],
            stats.node_slots[node],
            node_mean_free_prob(stats, phis, node),
        )
    raise ArchitectureError(f"node {node} has no converter")


def layout_availability(
    layout: tuple[int, ...],
    path: RoutedPath,
    archs: ArchitectureMap,
    stats: CrossingStats,
    phis: LinkFreeProbs,
) -> float:
    """Probability that every converter of ``layout`` is free: the product
    of the per-converter availabilities (1.0 for the empty layout)."""
    result = 1.0
    for position in layout[1:-1]:
        result *= converter_availability(position, path, archs, stats, phis)
    return result


# ---------------------------------------------------------------------------
# blocking


@dataclass
class BlockingDiagnostics:
    """Counters exposed for validation: how often the ramp clamped and the
    worst amount by which the final probability left [0, 1]."""

    ramp_clamps: int = 0
    clamp_breach: float = 0.0


def lightpath_blocking(
    min_run: int,
    path: RoutedPath,
    archs: ArchitectureMap,
    phis: LinkFreeProbs,
    stats: CrossingStats,
    slot_count: int,
    run_memo: dict | None = None,
    diagnostics: BlockingDiagnostics | None = None,
) -> float:
    """Blocking probability of a request for ``min_run`` contiguous slots
    on ``path``, combining establishment and converter availability over
    the power set of the path's converter layout."""
    if min_run > slot_count:
        return 1.0
    hop_probs = tuple(phis[link.id] for link in path.links)
    ctx = PathContext(slot_count=slot_count, hop_free_probs=hop_probs)
    if run_memo is not None:
        ctx.run_memo = run_memo
    layout = converter_layout(path, archs)
    avail = {
        pos: converter_availability(pos, path, archs, stats, phis) for pos in layout[1:-1]
    }
    established = 0.0
    for sub in _power_set_cached(layout):
        success = exact_layout_success(min_run, sub, ctx)
        if success == 0.0:
            continue
        established += success * math.prod(avail[pos] for pos in sub[1:-1])
    blocking = 1.0 - established
    if diagnostics is not None:
        diagnostics.ramp_clamps += ctx.ramp_clamps
    if blocking < 0.0 or blocking > 1.0:
        breach = max(-blocking, blocking - 1.0)
        if diagnostics is not None:
            diagnostics.clamp_breach = max(diagnostics.clamp_breach, breach)
        if breach > _BREACH_TOL:
            log.debug("lightpath blocking %.3e outside [0, 1] by %.3e", blocking, breach)
        blocking = min(max(blocking, 0.0), 1.0)
    return blocking


# ---------------------------------------------------------------------------
# closed forms for the no-conversion / all-full special cases, used as
# cross-checks of the general engine


def blocking_without_conversion(min_run: int, slot_count: int, hop_free_probs) -> float:
    """Continuity everywhere: one window must be free on the whole path."""
    rho = math.prod(hop_free_probs)
    return 1.0 - run_probability(min_run, slot_count, rho)


def blocking_full_conversion(min_run: int, slot_count: int, hop_free_probs) -> float:
    """Continuity fully relaxed: every hop independently needs a window."""
    result = 1.0
    for phi in hop_free_probs:
        result *= run_probability(min_run, slot_count, phi)
    return 1.0 - result


def blocking_full_at(min_run: int, slot_count: int, layout: tuple[int, ...], hop_free_probs) -> float:
    """Always-available converters at the layout's interior positions:
    every segment independently needs a window."""
    return 1.0 - segment_success_prob(min_run, slot_count, layout, hop_free_probs)
