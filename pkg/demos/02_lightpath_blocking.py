"""Blocking of one lightpath under the four node architectures.

A 4-hop path with mixed link states.  Watch the blocking probability fall
as the middle nodes gain conversion capability, and how a shared converter
bank's availability depends on how many transit paths compete for it.
"""

from eonspectra import (
    FULL,
    SHARE_PER_LINK,
    SHARE_PER_NODE,
    NodeArchitecture,
    crossing_stats,
    lightpath_blocking,
    load_topology,
    route_all,
    share_per_link_availability,
    DemandSpec,
)

SLOTS = 8
graph = load_topology({
    "name": "line5",
    "slot_count": SLOTS,
    "nodes": [1, 2, 3, 4, 5],
    "edges": [{"a": i, "b": i + 1, "weight": 1} for i in range(1, 5)],
})

# transit traffic crossing the interior nodes, so shared banks see contention
demands = [DemandSpec(s, d, 0.8, 1.0, {2: 1.0})
           for s, d in [(1, 5), (1, 4), (2, 5), (1, 3), (3, 5)]]
routes = route_all(graph, demands)
stats = crossing_stats(graph, routes)
path = routes[0]  # the full 1 -> 5 path
# a congested path: roughly half the slots taken on every hop
phis = {link.id: phi for link, phi in zip(path.links, (0.45, 0.55, 0.5, 0.6))}
for link in graph.links:
    phis.setdefault(link.id, 0.55)

print(f"request: 2 contiguous slots, 4 hops, per-hop free probs "
      f"{[round(phis[l.id], 2) for l in path.links]}")
print()
settings = [
    ("no conversion anywhere", {}),
    ("share-per-node bank (1 box) at node 3", {3: NodeArchitecture(SHARE_PER_NODE, 1)}),
    ("share-per-link bank (1 box) at node 3", {3: NodeArchitecture(SHARE_PER_LINK, 1)}),
    ("full converter at node 3", {3: NodeArchitecture(FULL)}),
    ("full converters at nodes 2,3,4", {n: NodeArchitecture(FULL) for n in (2, 3, 4)}),
]
for label, archs in settings:
    blocking = lightpath_blocking(2, path, archs, phis, stats, SLOTS)
    print(f"  {label:45s} blocking = {blocking:.6f}")

print()
print("a shared bank saturates as more transit paths compete for it")
print(f"{'paths':>6} {'availability':>13}")
for n_port in (0, 1, 2, 4, 8, 16):
    avail = share_per_link_availability(2, n_port, 2.0 * n_port, 0.85)
    print(f"{n_port:>6} {avail:>13.6f}")
