"""Report assembly and JSON / CSV / text serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal, localcontext
from fractions import Fraction
from importlib import resources
from typing import Any

from .density import AnalysisConfig, DensityTrace, Status, Verdict

__all__ = [
    "SCHEMA_VERSION",
    "CSV_HEADER",
    "Report",
    "load_schema",
    "verdict_to_dict",
    "verdict_from_dict",
    "density_to_dict",
    "density_from_dict",
]

SCHEMA_VERSION = "1.0"
CSV_HEADER = ("class", "status", "epsilon", "finalDensity", "horizon")


def load_schema() -> dict:
    return json.loads(resources.files("wardlab").joinpath("report_schema.json").read_text())


def _num(v: float | None):
    if v is None:
        return None
    v = float(v)
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    return v


def _unnum(v) -> float | None:
    if v is None:
        return None
    return float(v)  # float() understands "Infinity", "-Infinity" and "NaN"


def _decimal(q: Fraction) -> str:
    with localcontext() as ctx:
        ctx.prec = 28
        return str(Decimal(q.numerator) / Decimal(q.denominator))


def density_to_dict(q: Fraction | None) -> dict | None:
    """Exact rational plus its decimal expansion (28 significant digits)."""
    if q is None:
        return None
    return {"exact": str(q), "decimal": _decimal(q)}


def density_from_dict(d: dict | None) -> Fraction | None:
    return None if d is None else Fraction(d["exact"])


def verdict_to_dict(v: Verdict) -> dict[str, Any]:
    out: dict[str, Any] = {
        "label": v.label,
        "status": v.status.value,
        "horizon": v.horizon,
        "epsilon": v.epsilon,
        "witnessIndices": list(v.witness_indices),
        "witnessSequence": v.witness_sequence,
        "trace": [[n, c] for n, c in v.trace.checkpoints],
        "finalDensity": density_to_dict(v.final_density),
        "tailDensity": density_to_dict(v.tail_density),
        "metric": _num(v.metric),
        "note": v.note,
        "profile": [[_num(a), _num(b)] for a, b in v.profile],
        "components": [verdict_to_dict(c) for c in v.components],
    }
    return out


def verdict_from_dict(d: dict[str, Any]) -> Verdict:
    return Verdict(
        status=Status(d["status"]),
        horizon=int(d["horizon"]),
        epsilon=d.get("epsilon"),
        witness_indices=tuple(d.get("witnessIndices", ())),
        trace=DensityTrace(tuple((int(n), int(c)) for n, c in d.get("trace", ()))),
        note=d.get("note", ""),
        metric=_unnum(d.get("metric")),
        tail_density=density_from_dict(d.get("tailDensity")),
        components=tuple(verdict_from_dict(c) for c in d.get("components", ())),
        witness_sequence=d.get("witnessSequence"),
        profile=tuple((_unnum(a), _unnum(b)) for a, b in d.get("profile", ())),
        label=d.get("label", ""),
    )


def _verdicts_in(result: dict) -> list[dict]:
    if "verdict" in result:
        return [result["verdict"]]
    if result.get("kind") == "lattice":
        return list(result["properties"].values())
    return []


@dataclass
class Report:
    command: str
    argv: list[str]
    config: AnalysisConfig
    results: list[dict] = field(default_factory=list)
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))
    diagnostics: list[str] = field(default_factory=list)
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        out = {
            "schemaVersion": self.schema_version,
            "command": {"name": self.command, "argv": list(self.argv)},
            "config": self.config.to_dict(),
            "results": self.results,
            "timestamp": self.timestamp,
        }
        if self.diagnostics:
            out["diagnostics"] = list(self.diagnostics)
        return out

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Report":
        return cls(
            command=d["command"]["name"],
            argv=list(d["command"]["argv"]),
            config=AnalysisConfig.from_dict(d["config"]),
            results=list(d["results"]),
            timestamp=d["timestamp"],
            diagnostics=list(d.get("diagnostics", [])),
            schema_version=d["schemaVersion"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False, allow_nan=False) + "\n"

    def statuses(self) -> list[Status]:
        return [Status(v["status"]) for r in self.results for v in _verdicts_in(r)]

    def to_csv(self) -> str:
        """One row per epsilon component (descending), or one row for verdicts without components."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.results:
            for v in _verdicts_in(r):
                label = v.get("label") or r.get("class", "")
                for row_label, c in _csv_rows(label, v):
                    fd = c.get("finalDensity")
                    writer.writerow([
                        row_label,
                        c["status"],
                        "" if c.get("epsilon") is None else repr(c["epsilon"]),
                        "" if fd is None else fd["decimal"],
                        c["horizon"],
                    ])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"{self.command}: horizon {self.config.horizon}"]
        lines += [f"  note: {d}" for d in self.diagnostics]
        for r in self.results:
            lines.extend(_text_lines(r))
        return "\n".join(lines) + "\n"


def _csv_rows(label: str, v: dict) -> list[tuple[str, dict]]:
    """Per-epsilon components under the parent label, else one row per sub-verdict."""
    comps = v["components"]
    eps = [c.get("epsilon") for c in comps]
    if comps and None not in eps and len(set(eps)) == len(eps):
        return [(label, c) for c in sorted(comps, key=lambda c: -c["epsilon"])]
    if comps:
        return [row for c in comps for row in _csv_rows(c.get("label") or label, c)]
    return [(label, v)]


def _text_lines(r: dict) -> list[str]:
    kind = r["kind"]
    subject = r.get("subject", "")
    if kind in ("classification", "density"):
        v = r["verdict"]
        return [f"{subject}  {r['class']}: {v['status']}  ({v['note']})" + _witness_text(v)]
    if kind == "method":
        v = r["verdict"]
        est = r["limitEstimate"]
        return [f"{subject}  {r['method']} limit {est}: {v['status']}  ({v['note']})" + _witness_text(v)]
    if kind == "lattice":
        out = [f"{subject}"]
        for label, v in r["properties"].items():
            out.append(f"  {label}: {v['status']}" + (f"  [witness {v['witnessSequence']}]" if v["witnessSequence"] else ""))
        for imp in r["implications"]:
            out.append(f"  {imp['from']} => {imp['to']}: {'consistent' if imp['consistent'] else 'CONTRADICTED'}")
        return out
    if kind == "compactness":
        out = [
            f"{subject}  boundedBelow={r['boundedBelow']} boundedAbove={r['boundedAbove']} "
            f"statUpwardCompact={r['statUpwardCompact']} statDownwardCompact={r['statDownwardCompact']} "
            f"bounded={r['bounded']}"
        ]
        if "witness" in r:
            out.append(f"  {r['witnessDirection']} witness: {r['witness']}")
        if "witnessError" in r:
            out.append(f"  witness: {r['witnessError']}")
        return out
    if kind == "witnessSearch":
        if r["noneFound"]:
            return [f"{subject}  none found for n <= {r['nMax']} at eps0 = {r['eps0']}"]
        ns = [p["n"] for p in r["pairs"]]
        return [f"{subject}  pairs found for {len(ns)} of {r['nMax']} values of n"] + [
            f"  n={p['n']}: x={p['x']!r} y={p['y']!r} |f(x)-f(y)|={abs(p['fy'] - p['fx'])!r}" for p in r["pairs"]
        ]
    if kind == "catalogue":
        claims = ", ".join(f"{c['class']}={c['status']}" for c in r["claims"])
        return [f"{subject}  {r.get('description', '')}  [{claims}]"]
    return [json.dumps(r)]


def _witness_text(v: dict) -> str:
    if v["witnessIndices"]:
        return f"  witnesses {v['witnessIndices']}"
    return ""
