"""JSON and aligned-text renderings of witness chains."""

from __future__ import annotations

import json

from .types import WitnessChain
from .validate import ChainReport

_SYMBOL = {
    "beta": "β",
    "gamma": "γ",
    "alpha_beta": "αβ",
    "alpha_gamma": "αγ",
    "alpha_gamma_beta": "α(γ∘β)",
    "equal": "=",
}


def chain_to_json(chain: WitnessChain, report: ChainReport | None = None) -> dict:
    oks = [s.ok for s in report.steps] if report is not None else [None] * len(chain.steps)
    out = {
        "a": chain.a,
        "e": chain.e,
        "steps": [
            {"from": s.src, "to": s.dst, "label": s.label, "justification": s.justification,
             "term": s.display, "ok": ok}
            for s, ok in zip(chain.steps, oks)
        ],
        "factors": chain.factors,
        "factor_count": chain.factor_count,
        "compositions": chain.circ_count,
        "effective_factor_count": chain.effective_factor_count,
        "meta": {k: v for k, v in chain.meta.items()},
    }
    if report is not None:
        out["validation"] = report.to_json()
    return out


def chain_dumps(chain, report=None) -> str:
    return json.dumps(chain_to_json(chain, report), indent=2, sort_keys=False)


def render_text(chain: WitnessChain, report: ChainReport | None = None) -> str:
    """One line per element, relation symbol in front."""
    rows = [("", chain.start_display, str(chain.a), "")]
    for i, s in enumerate(chain.steps):
        mark = ""
        if report is not None and not report.steps[i].ok:
            mark = "  <-- FAILS"
        rows.append((_SYMBOL.get(s.label, s.label), s.display, str(s.dst), s.justification + mark))
    w_rel = max(len(r[0]) for r in rows)
    w_term = max(len(r[1]) for r in rows)
    w_val = max(len(r[2]) for r in rows)
    lines = [f"{r[0]:>{w_rel}} {r[1]:<{w_term}}  = {r[2]:>{w_val}}   {r[3]}".rstrip() for r in rows]
    lines.append("")
    lines.append(f"factors: {' ∘ '.join(_SYMBOL[f] for f in chain.factors) or '(identity)'}")
    lines.append(f"factor_count: {chain.factor_count} (compositions: {chain.circ_count}, "
                 f"effective: {chain.effective_factor_count})")
    if report is not None:
        lines.append(f"validation: {'ok' if report.ok else 'FAILED at ' + str(report.first_failure)}")
    return "\n".join(lines)
