"""The search loop over (Deg, Deg_Q) and the run report."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from .algsys import Budget, SolverBudgetExceeded
from .darboux import find_eigenpolynomials
from .firstintegral import integrate_invariant
from .odemodel import Soode
from .polyring import format_coeff, format_poly
from .srsearch import (
    check_determination_1,
    check_determination_2,
    check_log_derivative,
    check_third_condition,
    solve_sr,
)

STATUS_TWO = "two_independent_invariants"
STATUS_ONE = "one_invariant"
STATUS_NONE = "no_invariant_found_within_budget"


@dataclass
class Config:
    max_deg: int = 2
    degq_factor: int = 10
    time_budget_s: float = 10.0
    total_budget_s: float | None = None
    parametric: bool = False
    pins: dict = field(default_factory=dict)
    output: str = "text"
    max_steps: int = 2_000_000
    target_invariants: int = 2

    def __post_init__(self):
        if self.max_deg < 1:
            raise ValueError("max_deg must be at least 1")
        if self.degq_factor < 1:
            raise ValueError("degq_factor must be at least 1")
        if self.target_invariants not in (1, 2):
            raise ValueError("target_invariants must be 1 or 2")
        if self.output not in ("json", "text"):
            raise ValueError("output must be 'json' or 'text'")


class BudgetExhausted(RuntimeError):
    """The wall-clock budget ran out; ``report`` holds what was found."""

    def __init__(self, report):
        super().__init__("budget exhausted")
        self.report = report


@dataclass
class RunReport:
    soode: Soode
    declared_params: tuple = ()
    pins: dict = field(default_factory=dict)
    parametric: bool = False
    darboux: list = field(default_factory=list)
    sr_solutions: list = field(default_factory=list)
    out_of_class: list = field(default_factory=list)
    first_integrals: list = field(default_factory=list)
    independent: int = 0
    termination: str = ""
    searched: list = field(default_factory=list)
    stalled: list = field(default_factory=list)

    @property
    def status(self):
        verified = [fi for fi in self.first_integrals if fi.verified]
        if not verified:
            return STATUS_NONE
        return STATUS_TWO if self.independent >= 2 else STATUS_ONE


def _deadline_budget(cfg: Config, deadline):
    secs = cfg.time_budget_s
    if deadline is not None:
        secs = max(min(secs, deadline - time.monotonic()), 0.0)
    return Budget(max_steps=cfg.max_steps, max_seconds=secs)


def _group_key(cons, group):
    return cons, tuple(sorted(str(p.v) for p in group))


def run(s: Soode, cfg: Config | None = None, declared_params=(), raise_on_budget=False) -> RunReport:
    """Deg = 1..max_deg; Deg_Q = 0..degq_factor*Deg; stop at ``target_invariants``.

    ``s`` is the equation after pins were substituted.  Two invariants count
    as independent when their reduced S differ (within one parameter branch).
    """
    cfg = cfg or Config()
    report = RunReport(s, tuple(declared_params), dict(cfg.pins), cfg.parametric)
    deadline = time.monotonic() + cfg.total_budget_s if cfg.total_budget_s else None
    seen_pairs = set()
    seen_S = {}
    seen_ooc = set()
    per_branch = {}
    progress = {}
    report.termination = "max_deg"
    try:
        for deg in range(1, cfg.max_deg + 1):
            pairs = find_eigenpolynomials(s, deg, parametric=cfg.parametric,
                                          budget=_deadline_budget(cfg, deadline))
            groups = {}
            for p in pairs:
                key = (p.constraints, p.v)
                if key not in seen_pairs:
                    seen_pairs.add(key)
                    report.darboux.append(p)
                groups.setdefault(p.constraints, []).append(p)
            # a group whose solve ran out of time at some Deg_Q is not retried
            # at larger Deg_Q for this Deg: those systems are strictly bigger
            # a group with the same pairs as at a lower Deg resumes where that
            # one stopped, since its systems are identical
            stalled = set()
            for cons, group in groups.items():
                if progress.get(_group_key(cons, group)) == "stalled":
                    stalled.add(cons)
            for degq in range(0, cfg.degq_factor * deg + 1):
                if len(stalled) == len(groups):
                    break
                report.searched.append((deg, degq))
                for cons, group in groups.items():
                    gkey = _group_key(cons, group)
                    if cons in stalled or progress.get(gkey, -1) >= degq:
                        continue
                    bs = group[0].soode
                    try:
                        sols, ooc, _ = solve_sr(bs, group, degq,
                                                budget=_deadline_budget(cfg, deadline))
                    except SolverBudgetExceeded:
                        if deadline is not None and time.monotonic() >= deadline:
                            raise
                        stalled.add(cons)
                        progress[gkey] = "stalled"
                        report.stalled.append((deg, degq, cons))
                        continue
                    progress[gkey] = degq
                    for o in ooc:
                        okey = (cons, tuple(o.constraints))
                        if okey not in seen_ooc:
                            seen_ooc.add(okey)
                            o.branch_constraints = cons
                            report.out_of_class.append(o)
                    for sr in sols:
                        known = seen_S.setdefault(cons, [])
                        if sr.S in known:
                            continue
                        known.append(sr.S)
                        sr.deg = deg
                        report.sr_solutions.append(sr)
                        fi = integrate_invariant(bs, sr)
                        fi.branch_constraints = cons
                        fi.independent = False
                        report.first_integrals.append(fi)
                        if fi.verified:
                            count = per_branch.get(cons, 0)
                            if count < 2:
                                fi.independent = True
                                per_branch[cons] = count + 1
                    report.independent = max(per_branch.values(), default=0)
                    if report.independent >= cfg.target_invariants:
                        report.termination = "complete"
                        return report
                if deadline is not None and time.monotonic() >= deadline:
                    raise SolverBudgetExceeded("total budget")
    except SolverBudgetExceeded:
        report.termination = "budget"
        if raise_on_budget:
            raise BudgetExhausted(report)
    return report


# ---------------------------------------------------------------------------
# serialization


def _pair_json(p):
    return {
        "v": format_poly(p.v),
        "g": format_poly(p.g),
        "degree": p.v.degree(),
        "constraints": list(p.constraints),
    }


def _sr_json(sr):
    return {
        "class": "rational",
        "S": str(sr.S),
        "P": format_poly(sr.P),
        "Q": format_poly(sr.Q),
        "R": sr.R_text(),
        "factors": [{"v": format_poly(v), "m": format_coeff(m)} for v, _, m in sr.factors],
        "deg": getattr(sr, "deg", None),
        "degQ": sr.degQ,
        "constraints": list(sr.constraints),
        "checks": {
            "determination_1": check_determination_1(sr),
            "determination_2": check_determination_2(sr),
            "log_derivative": check_log_derivative(sr),
            "third_condition": check_third_condition(sr.soode, sr),
        },
    }


def _ooc_json(o):
    return {
        "class": "out_of_class",
        "reason": o.reason,
        "degQ": o.degQ,
        "constraints": list(getattr(o, "branch_constraints", ())),
        "relations": list(o.constraints),
    }


def _fi_json(fi, index):
    return {
        "I": fi.text,
        "closed_form": fi.closed_form,
        "verified": fi.verified,
        "independent": bool(getattr(fi, "independent", False)),
        "sr_index": index,
        "constraints": list(getattr(fi, "branch_constraints", ())),
        "note": fi.note,
    }


def report_dict(report: RunReport) -> dict:
    s = report.soode
    return {
        "ode": {"text": s.text(), "M": format_poly(s.M), "N": format_poly(s.N)},
        "parameters": {
            "declared": list(report.declared_params),
            "free": list(s.params),
            "pins": {k: format_coeff(v) for k, v in sorted(report.pins.items())},
            "mode": "parametric" if report.parametric else "numeric",
        },
        "darboux": [_pair_json(p) for p in report.darboux],
        "sr_solutions": [_sr_json(sr) for sr in report.sr_solutions]
        + [_ooc_json(o) for o in report.out_of_class],
        "first_integrals": [_fi_json(fi, k) for k, fi in enumerate(report.first_integrals)],
        "status": report.status,
    }


def emit(report: RunReport, format="json") -> str:
    """Deterministic JSON or a short text summary."""
    if format == "json":
        return json.dumps(report_dict(report), indent=2, sort_keys=False)
    d = report_dict(report)
    lines = [f"ODE: {d['ode']['text']}"]
    if d["parameters"]["declared"]:
        lines.append(f"parameters: {', '.join(d['parameters']['declared'])} ({d['parameters']['mode']})")
    lines.append("Darboux pairs:")
    for p in d["darboux"]:
        c = f"  [{'; '.join(p['constraints'])}]" if p["constraints"] else ""
        lines.append(f"  v = {p['v']}   g = {p['g']}{c}")
    lines.append("S/R solutions:")
    for sr in d["sr_solutions"]:
        if sr["class"] == "rational":
            lines.append(f"  S = {sr['S']}   R = {sr['R']}   (Deg_Q = {sr['degQ']})")
        else:
            lines.append(f"  out of class ({sr['reason']}): {'; '.join(sr['relations'])}")
    lines.append("first integrals:")
    for fi in d["first_integrals"]:
        flag = "verified" if fi["verified"] else "NOT verified"
        kind = "" if fi["closed_form"] else " (unevaluated integrals)"
        lines.append(f"  I = {fi['I']}   [{flag}{kind}]")
    lines.append(f"status: {d['status']} ({report.termination})")
    return "\n".join(lines)
