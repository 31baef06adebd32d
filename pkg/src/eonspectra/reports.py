"""Result document writers and the reproducibility manifest.

Every CLI run writes its primary document plus ``<stem>.manifest.json``
recording the artifact version, the resolved parameters and the SHA-256 of
each input file: enough to reproduce the run byte for byte.  CSV column
orders are fixed; see the README for the schemas.  Some results carry more
than one table, which CSV cannot hold in a single file, so those write
documented sidecar files next to the main one.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

from . import __version__
from .analyzer import AnalysisResult
from .placement import PlacementResult
from .simulator import SimResult
from .topology import DemandSpec, NetworkGraph, RoutedPath


def _stem(path: Path) -> Path:
    return path.with_suffix("") if path.suffix else path


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_path, command: str, parameters: dict, inputs: dict) -> Path:
    """``inputs`` maps role -> file path (or None); hashes are recorded."""
    out_path = Path(out_path)
    manifest = {
        "artifact": "eonspectra",
        "version": __version__,
        "command": command,
        "parameters": parameters,
        "inputs": {
            role: None if path is None else {"path": str(path), "sha256": sha256_file(path)}
            for role, path in inputs.items()
        },
    }
    target = _stem(out_path).with_suffix(".manifest.json")
    target.write_text(json.dumps(manifest, indent=1) + "\n")
    return target


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def analysis_document(
    result: AnalysisResult,
    graph: NetworkGraph,
    demands: list[DemandSpec],
    routes: list[RoutedPath],
) -> dict:
    return {
        "network": graph.name,
        "converged": result.converged,
        "iterations": result.iterations,
        "network_blocking": result.network_blocking_prob,
        "demands": [
            {
                "src": graph.label_of(d.src),
                "dst": graph.label_of(d.dst),
                "hops": r.hop_count,
                "blocking": b,
            }
            for d, r, b in zip(demands, routes, result.demand_blockings)
        ],
        "links": [
            {
                "link": link.id,
                "tail": graph.label_of(link.tail),
                "head": graph.label_of(link.head),
                "phi": result.phis.get(link.id, 1.0),
            }
            for link in graph.links
        ],
        "trajectory": result.trajectory,
    }


def write_analysis(out_path, fmt, result, graph, demands, routes) -> list[Path]:
    """JSON: one document.  CSV: per-demand table in the main file, per-link
    table in ``<stem>.links.csv``, run summary in ``<stem>.run.json``."""
    out_path = Path(out_path)
    doc = analysis_document(result, graph, demands, routes)
    if fmt == "json":
        out_path.write_text(json.dumps(doc, indent=1) + "\n")
        return [out_path]
    _write_csv(
        out_path,
        ["src", "dst", "hops", "blocking"],
        [[d["src"], d["dst"], d["hops"], repr(d["blocking"])] for d in doc["demands"]],
    )
    links_path = _stem(out_path).with_suffix(".links.csv")
    _write_csv(
        links_path,
        ["link", "tail", "head", "phi"],
        [[l["link"], l["tail"], l["head"], repr(l["phi"])] for l in doc["links"]],
    )
    run_path = _stem(out_path).with_suffix(".run.json")
    run_path.write_text(
        json.dumps(
            {
                "network": doc["network"],
                "converged": doc["converged"],
                "iterations": doc["iterations"],
                "network_blocking": doc["network_blocking"],
            },
            indent=1,
        )
        + "\n"
    )
    return [out_path, links_path, run_path]


def simulation_document(result: SimResult, graph, demands) -> dict:
    return {
        "network": graph.name,
        "replications": len(result.replication_blockings),
        "warmup": result.warmup,
        "horizon": result.horizon,
        "offered": result.offered_total,
        "blocked": result.blocked_total,
        "network_blocking": result.network_blocking_prob,
        "ci95_half_width": result.ci95_half_width,
        "fallback_admissions": result.fallback_admissions,
        "replication_blockings": result.replication_blockings,
        "demands": [
            {
                "src": graph.label_of(d.src),
                "dst": graph.label_of(d.dst),
                "offered": o,
                "blocked": b,
                "blocking": p,
            }
            for d, o, b, p in zip(
                demands, result.demand_offered, result.demand_blocked, result.demand_blocking
            )
        ],
    }


def write_simulation(out_path, fmt, result, graph, demands) -> list[Path]:
    """JSON: one document.  CSV: one row per replication plus an aggregate
    row; the per-demand table goes to ``<stem>.demands.csv``."""
    out_path = Path(out_path)
    doc = simulation_document(result, graph, demands)
    if fmt == "json":
        out_path.write_text(json.dumps(doc, indent=1) + "\n")
        return [out_path]
    rows = []
    for i, blocking in enumerate(result.replication_blockings):
        offered = sum(result.per_replication_offered[i])
        blocked = sum(result.per_replication_blocked[i])
        rows.append([i, offered, blocked, repr(blocking), ""])
    rows.append(
        [
            "aggregate",
            result.offered_total,
            result.blocked_total,
            repr(result.network_blocking_prob),
            repr(result.ci95_half_width),
        ]
    )
    _write_csv(out_path, ["replication", "offered", "blocked", "blocking", "ci95_half_width"], rows)
    demands_path = _stem(out_path).with_suffix(".demands.csv")
    _write_csv(
        demands_path,
        ["src", "dst", "offered", "blocked", "blocking"],
        [
            [d["src"], d["dst"], d["offered"], d["blocked"], repr(d["blocking"])]
            for d in doc["demands"]
        ],
    )
    return [out_path, demands_path]


def placement_document(result: PlacementResult, graph) -> dict:
    def arch_entry(arch):
        return {"kind": arch.kind, "n_sc": arch.n_sc}

    return {
        "network": graph.name,
        "method": result.method,
        "baseline_blocking": result.baseline_blocking,
        "achieved_blocking": result.achieved_blocking,
        "evaluations": result.evaluations,
        "all_converged": result.all_converged,
        "ranked_inventory": [
            {**arch_entry(arch), "merit": merit} for arch, merit in result.ranked
        ],
        "assignment": [
            {"node": graph.label_of(node), **arch_entry(arch)}
            for node, arch in sorted(result.assignment.items())
        ],
        "steps": [
            {
                **arch_entry(step.arch),
                "chosen_node": graph.label_of(step.chosen_node),
                "blocking": step.blocking,
                "candidates": [
                    {"node": graph.label_of(n), "blocking": b, "converged": c}
                    for n, b, c in step.candidates
                ],
            }
            for step in result.steps
        ],
    }


def write_placement(out_path, fmt, result, graph) -> list[Path]:
    """JSON: one document.  CSV: the per-step candidate table in the main
    file, summary and final assignment in ``<stem>.summary.json``."""
    out_path = Path(out_path)
    doc = placement_document(result, graph)
    if fmt == "json":
        out_path.write_text(json.dumps(doc, indent=1) + "\n")
        return [out_path]
    rows = []
    for step_idx, step in enumerate(doc["steps"]):
        for cand in step["candidates"]:
            rows.append(
                [
                    step_idx,
                    step["kind"],
                    step["n_sc"] if step["n_sc"] is not None else "",
                    cand["node"],
                    repr(cand["blocking"]),
                    cand["converged"],
                    "1" if cand["node"] == step["chosen_node"] else "0",
                ]
            )
    _write_csv(out_path, ["step", "kind", "n_sc", "node", "blocking", "converged", "chosen"], rows)
    summary_path = _stem(out_path).with_suffix(".summary.json")
    summary = {k: doc[k] for k in (
        "network", "method", "baseline_blocking", "achieved_blocking",
        "evaluations", "all_converged", "ranked_inventory", "assignment",
    )}
    summary_path.write_text(json.dumps(summary, indent=1) + "\n")
    return [out_path, summary_path]


def write_sweep(out_path, fmt, rows: list[dict]) -> list[Path]:
    """One row per (traffic target, architecture setting)."""
    out_path = Path(out_path)
    if fmt == "json":
        out_path.write_text(json.dumps(rows, indent=1) + "\n")
        return [out_path]
    header = [
        "traffic",
        "setting",
        "scale",
        "analytic_blocking",
        "analytic_converged",
        "sim_blocking",
        "sim_ci95",
    ]
    table = []
    for row in rows:
        table.append(
            [
                repr(row["traffic"]),
                row["setting"],
                repr(row["scale"]),
                repr(row["analytic_blocking"]),
                row["analytic_converged"],
                "" if row.get("sim_blocking") is None else repr(row["sim_blocking"]),
                "" if row.get("sim_ci95") is None else repr(row["sim_ci95"]),
            ]
        )
    _write_csv(out_path, header, table)
    return [out_path]
