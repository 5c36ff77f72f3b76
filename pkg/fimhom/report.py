"""
Report builders and renderers.

Every report is a plain dict of lists, ints, bools and strings so that the
JSON form parses back to an equal value; text output is rendered from the
same dict.  Objects are listed in (rank, lex) order, coordinates 1-based.
"""

from __future__ import annotations

import json
from collections import Counter
from typing import Any, Dict, List, Optional, Sequence

from .category import Obj
from .checks import CheckResult, Verdict
from .homology import NEG_INF, DegreeReport, HomologyTable, Resolution, TorsionVector
from .module import PointwiseModule, Presentation
from .tree import TorsionTree, TreeNode, format_set


Report = Dict[str, Any]


def _reg(value: Optional[int]) -> Any:
    return NEG_INF if value is None else value


def _header(command: str, P: Presentation) -> Report:
    return {"command": command, "field": P.p, "m": P.m, "bounds": list(P.bounds)}


def _dims(V: PointwiseModule) -> List[Report]:
    return [{"object": list(n), "dim": d} for n, d in V.dims_table()]


def _homology(table: HomologyTable) -> List[Report]:
    return [
        {"s": s, "entries": [{"object": list(n), "dim": table.dim(s, n)} for n in table.support(s)]}
        for s in range(table.s_max + 1)
    ]


def _degrees(report: DegreeReport) -> Report:
    return {
        "hd": list(report.hd),
        "gd": report.gd,
        "prd": report.prd,
        "reg": _reg(report.reg),
        "boundary_flag": report.boundary_flag,
        "shell_rows": list(report.shell_rows),
    }


def _torsion(torsion: Optional[TorsionVector], singular: Sequence[int]) -> Report:
    return {
        "torsion": None if torsion is None else list(torsion.t),
        "tsum": None if torsion is None else torsion.tsum,
        "singular": sorted(i + 1 for i in singular),
    }


def analyze_report(
    P: Presentation,
    V: PointwiseModule,
    table: HomologyTable,
    degrees: DegreeReport,
    torsion: Optional[TorsionVector],
    singular: Sequence[int],
) -> Report:
    out = _header("analyze", P)
    out["s_max"] = table.s_max
    out["dims"] = _dims(V)
    out["homology"] = _homology(table)
    out.update(_degrees(degrees))
    out.update(_torsion(torsion, singular))
    return out


def resolve_report(P: Presentation, V: PointwiseModule, res: Resolution, defect: Dict[Obj, int]) -> Report:
    out = _header("resolve", P)
    out["s_max"] = res.table.s_max
    out["dims"] = _dims(V)
    out["homology"] = _homology(res.table)
    out["covers"] = [
        {
            "s": s,
            "generators": [list(d) for d in res.degrees[s]],
            "dims": [{"object": list(n), "dim": cover.get(n, 0)} for n in res.grid.objects()],
        }
        for s, cover in enumerate(res.covers)
    ]
    out["terminated"] = res.terminated
    bad = [{"object": list(n), "defect": d} for n, d in defect.items() if d]
    out["euler"] = {"ok": not bad, "defects": bad}
    return out


def _node(node: TreeNode) -> Report:
    out: Report = {
        "path": node.path_text(),
        "level": node.level,
        "status": node.status,
        "bounds": list(node.module.grid.bounds),
        "total_dim": node.module.total_dim(),
    }
    out.update(_torsion(node.torsion, node.singular))
    out.update({"gd": node.report.gd, "prd": node.report.prd, "reg": _reg(node.report.reg)})
    return out


def tree_report(P: Presentation, tree: TorsionTree) -> Report:
    out = _header("tree", P)
    out.update(
        {
            "level_cap": tree.level_cap,
            "node_count": tree.node_count,
            "depth": tree.depth,
            "terminated": tree.terminated,
            "truncated": tree.truncated,
            "nodes": [_node(node) for node in tree.nodes()],
            "edges": [
                {
                    "parent": parent.path_text(),
                    "child": c.path_text(),
                    "coordinate": c.path[-1] + 1,
                    "descent": None if c.tsum is None else parent.tsum - c.tsum,
                }
                for parent, c in tree.edges()
            ],
        }
    )
    return out


def summarize(results: Sequence[CheckResult]) -> Report:
    counts = Counter(r.verdict for r in results)
    return {v.value: counts.get(v, 0) for v in Verdict}


def verify_report(mode: Report, results: Sequence[CheckResult], case_count: int) -> Report:
    return {
        "command": "verify",
        "mode": mode,
        "cases": case_count,
        "results": [r.to_dict() for r in results],
        "summary": summarize(results),
    }


def has_failures(report: Report) -> bool:
    return report.get("summary", {}).get(Verdict.FAIL.value, 0) > 0


# ─────────────────────────────────────────────────────────────────────────────
# Rendering
# ─────────────────────────────────────────────────────────────────────────────


def to_json(report: Report) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def _fmt(values: Optional[List[int]]) -> str:
    return "n/a" if values is None else "(" + ",".join(str(v) for v in values) + ")"


def _text_module(report: Report) -> List[str]:
    lines = [f"field F_{report['field']}, m={report['m']}, bounds {_fmt(report['bounds'])}", "dims:"]
    lines += [f"  {_fmt(row['object'])}: {row['dim']}" for row in report["dims"]]
    lines.append(f"homology (s <= {report['s_max']}):")
    for row in report["homology"]:
        entries = ", ".join(f"{_fmt(e['object'])}:{e['dim']}" for e in row["entries"]) or "0"
        lines.append(f"  H_{row['s']}: {entries}")
    return lines


def _text_analyze(report: Report) -> List[str]:
    lines = _text_module(report)
    lines.append(f"hd: {_fmt(report['hd'])}")
    lines.append(f"gd: {report['gd']}  prd: {report['prd']}  reg: {report['reg']}")
    shell = [str(s) for s, flag in enumerate(report["shell_rows"]) if flag]
    lines.append(f"boundary_flag: {report['boundary_flag']}" + (f" (rows {','.join(shell)})" if shell else ""))
    lines.append(f"torsion: {_fmt(report['torsion'])}  tsum: {report['tsum']}")
    lines.append(f"singular: {format_set([i - 1 for i in report['singular']])}")
    return lines


def _text_resolve(report: Report) -> List[str]:
    lines = _text_module(report)
    for cover in report["covers"]:
        gens = " ".join(_fmt(d) for d in cover["generators"]) or "none"
        dims = ", ".join(f"{_fmt(e['object'])}:{e['dim']}" for e in cover["dims"] if e["dim"]) or "0"
        lines.append(f"P_{cover['s']}: generators {gens}")
        lines.append(f"  dims {dims}")
    lines.append(f"terminated: {report['terminated']}")
    euler = report["euler"]
    if euler["ok"]:
        lines.append("euler: PASS")
    else:
        first = euler["defects"][0]
        lines.append(f"euler: FAIL at {_fmt(first['object'])} (defect {first['defect']})")
    return lines


def _text_tree(report: Report) -> List[str]:
    lines = [
        f"field F_{report['field']}, m={report['m']}, bounds {_fmt(report['bounds'])}",
        f"nodes: {report['node_count']}  depth: {report['depth']}  level cap: {report['level_cap']}",
        f"terminated: {report['terminated']}  truncated: {report['truncated']}",
    ]
    for node in report["nodes"]:
        indent = "  " * (1 - node["level"])
        lines.append(
            f"{indent}[{node['path']}] level {node['level']} {node['status']}: "
            f"bounds {_fmt(node['bounds'])}, dim {node['total_dim']}, "
            f"t {_fmt(node['torsion'])} tsum {node['tsum']}, "
            f"singular {format_set([i - 1 for i in node['singular']])}, "
            f"gd {node['gd']} prd {node['prd']} reg {node['reg']}"
        )
    for edge in report["edges"]:
        lines.append(f"edge {edge['parent']} -> {edge['child']}: tsum drops by {edge['descent']}")
    return lines


def _text_verify(report: Report) -> List[str]:
    mode = report["mode"]
    lines = ["verify " + " ".join(f"{k}={v}" for k, v in mode.items()), f"cases: {report['cases']}"]
    for r in report["results"]:
        where = f" @ {r['location']}" if r["location"] else ""
        detail = f" {r['detail']}" if r["detail"] else ""
        lines.append(f"case {r['case']} {r['name']}: {r['verdict']}{where}{detail}")
    summary = report["summary"]
    lines.append("summary: " + ", ".join(f"{k} {v}" for k, v in summary.items()))
    return lines


_RENDERERS = {
    "analyze": _text_analyze,
    "resolve": _text_resolve,
    "tree": _text_tree,
    "verify": _text_verify,
}


def to_text(report: Report) -> str:
    return "\n".join(_RENDERERS[report["command"]](report)) + "\n"


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return to_json(report)
    if fmt == "text":
        return to_text(report)
    raise ValueError(f"unknown report format {fmt!r}")


__all__ = [
    "Report",
    "analyze_report",
    "has_failures",
    "render",
    "resolve_report",
    "summarize",
    "to_json",
    "to_text",
    "tree_report",
    "verify_report",
]
