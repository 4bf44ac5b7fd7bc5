"""Report construction and rendering (fixed-width table, delimited, JSON).

Reports are plain JSON-native dictionaries so the structured-object output
round-trips exactly.  Whenever the bundled fixtures are analyzed, a
paper-comparison block is attached with every figure labeled ``paper`` or
``computed``; the source material's own counts are not reproducible from its
printed rules, and the comparison records both sides instead of forcing
either.
"""

from __future__ import annotations

import json
from fractions import Fraction

from . import __version__
from .equilibrium import EquilibriumCertificate

# Figures as printed in the source material.
PAPER_FIGURES = {
    "action_profiles": 432,
    "row_space": 110592,
    "admissible_rows": 3136,
    "max_global_utility": 7,
    "top_gu_rows": 26,
    "pure_nash_member": "(Publish OA, Grant TA)",
    "table5_publish_ta_grant_ta": "(3,1)",
}

# Recorded oracle values for the bundled game under strict semantics and the
# max-global-utility completion policy.  The reproduce run fails when the
# computed values drift from these, never when they differ from the published
# figures above.
GOLDEN_FIGURES = {
    "action_profiles": 432,
    "row_space": 110592,
    "admissible_rows": 17640,
    "max_global_utility": 8,
    "top_gu_rows": 30,
    "pure_nash_member": "(Publish OA, Grant TA)",
    "table5_publish_ta_grant_ta": "(2,1)",
}

TABLE6_EU_NOTE = (
    "note: the printed 2x2 collapse lists expected utilities '3q' (row TA) "
    "and 'p' (Editors' TA column) that do not follow from the standard "
    "bilinear expectation over its own cells; this tool reports the "
    "standard expectation (row TA gives the constant 3, Editors' TA "
    "column gives the constant 1)."
)

FORMATS = ("table", "delimited", "json")


def number(x) -> int | str:
    """JSON-native scalar for an exact number: int when integral, else 'a/b'."""
    f = Fraction(x)
    return f.numerator if f.denominator == 1 else str(f)


def base_report(inputs: dict[str, str]) -> dict:
    return {"tool": "oagame", "version": __version__, "inputs": inputs}


def certificate_to_obj(cert: EquilibriumCertificate) -> dict:
    return {
        "kind": cert.kind,
        "degenerate": cert.degenerate,
        "strategies": [
            {"player": s.player,
             "probabilities": {a: number(p) for a, p in s.probs}}
            for s in cert.strategies
        ],
        "expected_utilities": {
            s.player: number(u)
            for s, u in zip(cert.strategies, cert.expected_utilities)
        },
        "verification": [
            {"player": s.player,
             "alternatives": {a: number(u) for a, u in record}}
            for s, record in zip(cert.strategies, cert.verification)
        ],
    }


def comparison_entry(claim: str, paper, computed) -> dict:
    return {"claim": claim, "paper": paper, "computed": computed,
            "matches": paper == computed}


# ---------------------------------------------------------------------------
# Rendering


def _fixed_width_table(records: list[dict]) -> list[str]:
    headers = list(records[0].keys())
    cells = [[str(r.get(h, "")) for h in headers] for r in records]
    widths = [max(len(h), *(len(row[i]) for row in cells))
              for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in cells:
        lines.append("  ".join(c.ljust(w)
                               for c, w in zip(row, widths)).rstrip())
    return lines


def render_table(report: dict) -> str:
    lines: list[str] = []
    for key, value in report.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{key}:")
            lines.extend("  " + ln for ln in _fixed_width_table(value))
        elif isinstance(value, list):
            lines.append(f"{key}: {', '.join(str(v) for v in value)}")
        elif isinstance(value, dict):
            lines.append(f"{key}:")
            for k, v in value.items():
                lines.append(f"  {k}: {v}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def render_delimited(report: dict) -> str:
    lines: list[str] = []
    for key, value in report.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            headers = list(value[0].keys())
            lines.append("\t".join(headers))
            for rec in value:
                lines.append("\t".join(str(rec.get(h, "")) for h in headers))
        elif isinstance(value, dict):
            for k, v in value.items():
                lines.append(f"{key}.{k}\t{v}")
        else:
            lines.append(f"{key}\t{value}")
    return "\n".join(lines) + "\n"


def emit_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt == "delimited":
        return render_delimited(report)
    if fmt == "table":
        return render_table(report)
    raise ValueError(f"unknown format {fmt!r}")
