"""Scenario runner, configuration parsing and report emission.

Configurations are JSON objects with exact rational fields; unknown keys
are rejected (exact arithmetic has no tolerance knobs).  Reports come in a
human-readable text form and a structured form: a single self-describing
JSON tree with version field "valkit-report/1", sorted keys and canonical
"num/den" rationals, byte-identical across runs and thread counts for
identical inputs.

Exit codes: 0 for a decisive, agreeing run; 2 for an inconclusive run;
3 for invariant violations or computation failures; 4 for bad configs.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import (
    ConfigError,
    HypothesisViolatedError,
    InconclusiveError,
    ScenarioDataError,
    ValkitError,
)
from .fields import Backend
from .groups import (
    ClosedForm,
    FiniteList,
    GroupElem,
    canonicalize,
    format_rational,
    largest_delta,
    rat1,
)
from .kahler import (
    BSetReport,
    InvariantStream,
    VerdictKind,
    alpha_beta_segments,
    b_set,
    classify,
    ideal_inclusion_check,
    invariant_stream,
    invariant_stream_from_schedule,
    omega_verdict,
)
from .keyseq import (
    CoefValueLaw,
    ExplicitStage,
    FinalStage,
    KeySequence,
    PlateauStage,
    ScheduleStage,
    artin_schreier_family,
    hensel_family,
    validate_sequence,
)
from .poly import Poly
from .truncation import NuOracle

REPORT_VERSION = "valkit-report/1"

SCENARIOS = ("artin-schreier", "kummer-schedule", "hensel-immediate", "unramified", "custom")

_COMMON_KEYS = {"scenario", "p", "terms", "window", "budget", "format"}
_ALLOWED_KEYS = {
    "artin-schreier": _COMMON_KEYS | {"va"},
    "kummer-schedule": _COMMON_KEYS | {"vp", "gamma", "scale", "schedule"},
    "hensel-immediate": _COMMON_KEYS | {"g", "start"},
    "unramified": _COMMON_KEYS | {"g"},
    "custom": _COMMON_KEYS | {"backend", "g", "stages", "oracle"},
}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    p: int
    terms: int = 8
    window: int = 3
    budget: int = 64
    fmt: str = "text"
    va: Fraction | None = None
    vp: Fraction | None = None
    gamma: Fraction | None = None
    scale: Fraction | None = None
    schedule: tuple[Fraction, ...] | None = None
    g: tuple[str, ...] | None = None
    start: int | None = None
    backend: str | None = None
    stages: tuple[dict, ...] | None = None
    oracle: str | None = None


def _rational(raw, field: str) -> Fraction:
    if isinstance(raw, bool) or not isinstance(raw, (str, int, Fraction)):
        raise ConfigError("rationals must be exact strings or integers", field)
    try:
        return Fraction(str(raw))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not an exact rational: {raw!r} ({exc})", field) from None


def _positive_int(raw, field: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int) or raw < 1:
        raise ConfigError("must be a positive integer", field)
    return raw


def parse_config_dict(data: dict) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    scenario = data.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}", "scenario")
    allowed = _ALLOWED_KEYS[scenario]
    for key in data:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} for scenario {scenario}", key)

    p = _positive_int(data.get("p", _default_p(scenario)), "p")
    if p < 2:
        raise ConfigError("p must be at least 2", "p")
    cfg = ScenarioConfig(
        scenario=scenario,
        p=p,
        terms=_positive_int(data.get("terms", 8), "terms"),
        window=_positive_int(data.get("window", 3), "window"),
        budget=_positive_int(data.get("budget", 64), "budget"),
        fmt=data.get("format", "text"),
    )
    if cfg.fmt not in ("text", "structured"):
        raise ConfigError("format must be 'text' or 'structured'", "format")

    if scenario == "artin-schreier":
        va = _rational(data.get("va", "-1"), "va")
        if not va < 0:
            raise ConfigError("va must be negative (approximation regime)", "va")
        cfg = replace(cfg, va=va)
    elif scenario == "kummer-schedule":
        vp = _rational(data.get("vp", "1"), "vp")
        if not vp > 0:
            raise ConfigError("vp must be positive", "vp")
        gamma = _rational(data.get("gamma", vp / (cfg.p - 1)), "gamma")
        scale = _rational(data.get("scale", "1"), "scale")
        if not scale > 0:
            raise ConfigError("scale must be positive", "scale")
        if gamma > vp / (cfg.p - 1):
            raise ConfigError(
                "gamma exceeds vp/(p-1), impossible for a Kummer value schedule",
                "gamma",
            )
        schedule = None
        if "schedule" in data:
            raw = data["schedule"]
            if not isinstance(raw, list) or not raw:
                raise ConfigError("schedule must be a nonempty list", "schedule")
            values = tuple(_rational(x, "schedule") for x in raw)
            if any(not a < b for a, b in zip(values, values[1:])):
                raise ConfigError("schedule values must increase strictly", "schedule")
            schedule = values
        cfg = replace(cfg, vp=vp, gamma=gamma, scale=scale, schedule=schedule)
    elif scenario == "hensel-immediate":
        g = tuple(str(c) for c in data.get("g", ["2", "1", "1"]))
        cfg = replace(cfg, g=g, start=data.get("start", 0))
        if not isinstance(cfg.start, int):
            raise ConfigError("start must be an integer", "start")
    elif scenario == "unramified":
        cfg = replace(cfg, g=tuple(str(c) for c in data.get("g", ["1", "1", "1"])))
    else:  # custom
        for required in ("backend", "g", "stages", "oracle"):
            if required not in data:
                raise ConfigError(f"custom scenario requires {required!r}", required)
        if data["backend"] not in ("padic", "hahn"):
            raise ConfigError("custom backend must be 'padic' or 'hahn'", "backend")
        if data["oracle"] not in ("resultant", "stabilization"):
            raise ConfigError("oracle must be 'resultant' or 'stabilization'", "oracle")
        stages = data["stages"]
        if not isinstance(stages, list) or not stages:
            raise ConfigError("stages must be a nonempty list", "stages")
        for st in stages:
            if not isinstance(st, dict) or set(st) - {"poly", "family", "va", "start"}:
                raise ConfigError("bad stage entry", "stages")
        cfg = replace(
            cfg,
            backend=data["backend"],
            g=tuple(str(c) for c in data["g"]),
            stages=tuple(stages),
            oracle=data["oracle"],
        )
    return cfg


def parse_config(text: str) -> ScenarioConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: line {exc.lineno} column {exc.colno}: {exc.msg}")
    return parse_config_dict(data)


def emit_config(cfg: ScenarioConfig) -> dict:
    """Canonical JSON form; parse(emit(cfg)) == cfg."""
    out: dict = {
        "scenario": cfg.scenario,
        "p": cfg.p,
        "terms": cfg.terms,
        "window": cfg.window,
        "budget": cfg.budget,
        "format": cfg.fmt,
    }
    if cfg.va is not None:
        out["va"] = format_rational(cfg.va)
    if cfg.vp is not None:
        out["vp"] = format_rational(cfg.vp)
    if cfg.gamma is not None:
        out["gamma"] = format_rational(cfg.gamma)
    if cfg.scale is not None:
        out["scale"] = format_rational(cfg.scale)
    if cfg.schedule is not None:
        out["schedule"] = [format_rational(x) for x in cfg.schedule]
    if cfg.g is not None:
        out["g"] = list(cfg.g)
    if cfg.start is not None:
        out["start"] = cfg.start
    if cfg.backend is not None:
        out["backend"] = cfg.backend
    if cfg.stages is not None:
        out["stages"] = [dict(s) for s in cfg.stages]
    if cfg.oracle is not None:
        out["oracle"] = cfg.oracle
    return out


def _default_p(scenario: str) -> int:
    return {"kummer-schedule": 3}.get(scenario, 2)


# ---------------------------------------------------------------------------
# Scenario construction
# ---------------------------------------------------------------------------

def _artin_schreier_g(backend: Backend, a) -> Poly:
    coeffs = [-a, -backend.one()] + [backend.zero()] * (backend.p - 2) + [backend.one()]
    return Poly.make(backend, coeffs)


def build_stream(cfg: ScenarioConfig) -> InvariantStream:
    if cfg.scenario == "artin-schreier":
        backend = Backend("hahn", cfg.p)
        a = backend.element_from_value(cfg.va)
        g = _artin_schreier_g(backend, a)
        family = artin_schreier_family(backend, a, budget=cfg.budget)
        nu = NuOracle.stabilization(g, family.center, window=cfg.window, budget=cfg.budget)
        ks = KeySequence((PlateauStage(family),), FinalStage.of(g), cfg.p, backend)
        validate_sequence(ks, nu, min(cfg.terms, 6))
        return invariant_stream(ks, nu, cfg.terms)

    if cfg.scenario == "kummer-schedule":
        stage = _kummer_stage(cfg)
        return invariant_stream_from_schedule(
            stage, g_degree=cfg.p, nu_gprime=rat1(cfg.vp), p=cfg.p, terms=cfg.terms
        )

    if cfg.scenario == "hensel-immediate":
        backend = Backend("padic", cfg.p)
        g = Poly.make(backend, [backend.parse(c) for c in cfg.g])
        family = hensel_family(backend, g, cfg.start, budget=cfg.budget)
        nu = NuOracle.stabilization(g, family.center, window=cfg.window, budget=cfg.budget)
        ks = KeySequence((PlateauStage(family),), FinalStage.of(g), cfg.p, backend)
        validate_sequence(ks, nu, min(cfg.terms, 6))
        return invariant_stream(ks, nu, cfg.terms)

    if cfg.scenario == "unramified":
        backend = Backend("padic", cfg.p)
        g = Poly.make(backend, [backend.parse(c) for c in cfg.g])
        nu = NuOracle.from_resultant(g, window=cfg.window, budget=cfg.budget)
        ks = KeySequence((ExplicitStage(Poly.x(backend)),), FinalStage.of(g), cfg.p, backend)
        validate_sequence(ks, nu)
        return invariant_stream(ks, nu, cfg.terms)

    # custom
    backend = Backend(cfg.backend, cfg.p)
    g = Poly.make(backend, [backend.parse(c) for c in cfg.g])
    stages = []
    family = None
    for st in cfg.stages:
        if "poly" in st:
            stages.append(
                ExplicitStage(Poly.make(backend, [backend.parse(c) for c in st["poly"]]))
            )
        elif st.get("family") == "artin_schreier":
            a = backend.element_from_value(_rational(st.get("va", "-1"), "va"))
            family = artin_schreier_family(backend, a, budget=cfg.budget)
            stages.append(PlateauStage(family))
        elif st.get("family") == "hensel_lift":
            family = hensel_family(backend, g, int(st.get("start", 0)), budget=cfg.budget)
            stages.append(PlateauStage(family))
        else:
            raise ConfigError("stage needs 'poly' or a known 'family'", "stages")
    if cfg.oracle == "stabilization":
        if family is None:
            raise ConfigError("stabilization oracle needs a plateau family", "oracle")
        nu = NuOracle.stabilization(g, family.center, window=cfg.window, budget=cfg.budget)
    else:
        nu = NuOracle.from_resultant(g, window=cfg.window, budget=cfg.budget)
    ks = KeySequence(tuple(stages), FinalStage.of(g), cfg.p, backend)
    validate_sequence(ks, nu, min(cfg.terms, 6))
    return invariant_stream(ks, nu, cfg.terms)


def _kummer_stage(cfg: ScenarioConfig) -> ScheduleStage:
    """Value schedule for g = x**p - a with v(a) = 0.

    The key-value law is nu(x - a_n) = gamma - scale * p**-n; the expansion
    slots of g carry v(binom(p, b)) = vp for 0 < b < p and p * key_value at
    the outer slots; those of g' carry vp + b * key_value.
    """
    p = cfg.p
    vp = rat1(cfg.vp)
    zero = GroupElem.zero()
    if cfg.schedule is not None:
        key_values = FiniteList(tuple(rat1(x) for x in cfg.schedule))
    else:
        key_values = ClosedForm(rat1(-cfg.scale), rat1(cfg.gamma), p)
    g_laws = [CoefValueLaw(zero, p)]
    g_laws += [CoefValueLaw(vp, b) for b in range(1, p)]
    g_laws.append(CoefValueLaw(zero, p))
    gp_laws = [CoefValueLaw(vp, b) for b in range(0, p)]
    return ScheduleStage(
        key_values=key_values,
        g_coef_laws=tuple(g_laws),
        gprime_coef_laws=tuple(gp_laws),
        nu_gprime=vp,
    )


# ---------------------------------------------------------------------------
# Running and reporting
# ---------------------------------------------------------------------------

def run(cfg: ScenarioConfig) -> dict:
    """Execute all criteria and assemble the report tree.

    Computation failures and invariant violations raised anywhere in the
    analysis are embedded in the report with a failure status rather than
    escaping.
    """
    report: dict = {"version": REPORT_VERSION, "scenario": emit_config(cfg)}
    try:
        stream = build_stream(cfg)
    except (ValkitError, ZeroDivisionError) as exc:
        report.update(status="error", error=f"{type(exc).__name__}: {exc}", exit_code=3)
        return report
    try:
        return _analyze(stream, report)
    except ScenarioDataError as exc:
        report.update(status="violation", error=str(exc), exit_code=3)
        return report
    except (ValkitError, ZeroDivisionError) as exc:
        report.update(status="error", error=f"{type(exc).__name__}: {exc}", exit_code=3)
        return report


def _analyze(stream: InvariantStream, report: dict) -> dict:
    ideal_inclusion_check(stream)
    inclusion_ok = True

    report["nu_gprime"] = str(stream.nu_gprime)
    report["records"] = [
        {
            "index": r.index.label(),
            "degree": r.degree,
            "nu_key": str(r.nu_key),
            "nu_key_deriv": str(r.nu_key_deriv),
            "alpha": str(r.alpha),
            "beta": str(r.beta),
            "beta_tilde": str(r.beta_tilde),
            "nu_i_g": str(r.nu_i_g),
            "nu_i_gprime": str(r.nu_i_gprime),
        }
        for r in stream.records
    ]
    report["laws"] = {
        f"stage{info.stage_pos}.{name}": tail.describe()
        for info in stream.plateaus
        for name, tail in sorted(info.tails.items())
    }

    alpha_seg, beta_seg = alpha_beta_segments(stream)
    report["alpha_segment"] = _segment_payload(alpha_seg)
    report["beta_segment"] = _segment_payload(beta_seg)
    if alpha_seg is not None:
        report["delta_suffix_len"] = largest_delta(alpha_seg, stream.rank).suffix_len
    else:
        report["delta_suffix_len"] = None

    v_segment = omega_verdict(stream)
    v_classify = classify(stream)
    b_report: BSetReport | None = None
    b_error: str | None = None
    try:
        b_report = b_set(stream)
    except HypothesisViolatedError as exc:
        b_error = str(exc)
    except InconclusiveError as exc:
        b_error = f"inconclusive: {exc}"

    report["verdicts"] = {
        "segment": v_segment.describe(),
        "classification": v_classify.describe(),
        "b1": (
            {"applicable": True, **b_report.describe()}
            if b_report is not None
            else {"applicable": False, "why": b_error}
        ),
    }

    kinds = {v_segment.kind, v_classify.kind}
    if b_report is not None:
        if b_report.b1 is None:
            kinds.add(VerdictKind.INCONCLUSIVE)
        else:
            kinds.add(VerdictKind.OMEGA_ZERO if b_report.b1 else VerdictKind.OMEGA_NONZERO)
    contradictory = {VerdictKind.OMEGA_ZERO, VerdictKind.OMEGA_NONZERO} <= kinds
    decisive = VerdictKind.INCONCLUSIVE not in kinds
    report["criteria_agree"] = not contradictory
    report["inclusion_check"] = inclusion_ok
    if contradictory:
        report.update(status="violation", error="decisive criteria contradict", exit_code=3)
    elif decisive:
        report.update(status="decisive", error=None, exit_code=0)
    else:
        report.update(status="inconclusive", error=None, exit_code=2)
    return report


def _segment_payload(seg) -> dict:
    if seg is None:
        return {"kind": "undecided"}
    canon = canonicalize(seg)
    if canon is None:
        return {"kind": "undecided"}
    return canon.describe()


def render_structured(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def render_text(report: dict) -> str:
    lines = [f"valkit report ({report['version']})"]
    cfg = report["scenario"]
    lines.append(f"scenario: {cfg['scenario']}  p={cfg['p']}  terms={cfg['terms']}")
    if report.get("status") in ("error", "violation") and report.get("error"):
        lines.append(f"status: {report['status']}: {report['error']}")
        return "\n".join(lines) + "\n"
    header = ("index", "nu_key", "nu_key'", "alpha", "beta", "beta~", "nu_i(g)", "nu_i(g')")
    rows = [header] + [
        (
            r["index"],
            r["nu_key"],
            r["nu_key_deriv"],
            r["alpha"],
            r["beta"],
            r["beta_tilde"],
            r["nu_i_g"],
            r["nu_i_gprime"],
        )
        for r in report["records"]
    ]
    widths = [max(len(row[k]) for row in rows) for k in range(len(header))]
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
    lines.append(f"alpha segment: {report['alpha_segment']}")
    lines.append(f"beta segment:  {report['beta_segment']}")
    lines.append(f"delta suffix length: {report['delta_suffix_len']}")
    verdicts = report["verdicts"]
    lines.append(f"segment verdict: {verdicts['segment']['kind']}")
    cls = verdicts["classification"]
    case = f" case ({cls['case']})" if cls.get("case") else ""
    lines.append(f"classification: {cls['kind']}{case}")
    b1 = verdicts["b1"]
    if b1.get("applicable"):
        lines.append(f"b1 criterion: 1 in B_1 = {b1['b1']}  (B = {b1['b_set']})")
    else:
        lines.append(f"b1 criterion: not applicable ({b1.get('why')})")
    lines.append(f"criteria agree: {report['criteria_agree']}")
    lines.append(f"status: {report['status']}")
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str) -> str:
    return render_structured(report) if fmt == "structured" else render_text(report)


# ---------------------------------------------------------------------------
# Command line
# ---------------------------------------------------------------------------

def _scenario_config_from_args(args) -> ScenarioConfig:
    data: dict = {"scenario": args.id}
    if args.p is not None:
        data["p"] = args.p
    if args.va is not None:
        data["va"] = args.va
    if args.vp is not None:
        data["vp"] = args.vp
    if args.gamma is not None:
        data["gamma"] = args.gamma
    if args.scale is not None:
        data["scale"] = args.scale
    if args.terms is not None:
        data["terms"] = args.terms
    if args.window is not None:
        data["window"] = args.window
    if args.budget is not None:
        data["budget"] = args.budget
    if args.g is not None:
        data["g"] = args.g.split(",")
    if args.start is not None:
        data["start"] = args.start
    data["format"] = args.format
    return parse_config_dict(data)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="valkit",
        description="Exact invariants and vanishing criteria for valued-field extensions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a JSON scenario configuration file")
    p_run.add_argument("config", help="path to the configuration file")

    p_sc = sub.add_parser("scenario", help="run a built-in scenario")
    p_sc.add_argument("id", choices=SCENARIOS)
    p_sc.add_argument("--p", type=int)
    p_sc.add_argument("--va")
    p_sc.add_argument("--vp")
    p_sc.add_argument("--gamma")
    p_sc.add_argument("--scale")
    p_sc.add_argument("--terms", type=int)
    p_sc.add_argument("--window", type=int)
    p_sc.add_argument("--budget", type=int)
    p_sc.add_argument("--g", help="comma-separated coefficient list, constant first")
    p_sc.add_argument("--start", type=int)
    p_sc.add_argument("--format", choices=("text", "structured"), default="text")

    p_self = sub.add_parser("selftest", help="run the invariant suites")
    p_self.add_argument("--seed", type=int, default=0)
    p_self.add_argument("--instances", type=int, default=200)

    args = parser.parse_args(argv)

    if args.command == "selftest":
        from .selftest import run_selftest

        results = run_selftest(seed=args.seed, instances=args.instances)
        failed = 0
        for res in results:
            status = "pass" if not res.failures else "FAIL"
            print(f"{status}  {res.name}  ({res.runs} instances)")
            for note in res.failures[:5]:
                print(f"      {note}")
            failed += bool(res.failures)
        return 0 if failed == 0 else 3

    try:
        if args.command == "run":
            with open(args.config, "r", encoding="utf-8") as fh:
                cfg = parse_config(fh.read())
        else:
            cfg = _scenario_config_from_args(args)
    except (ConfigError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 4

    report = run(cfg)
    sys.stdout.write(render(report, cfg.fmt))
    return report["exit_code"]


if __name__ == "__main__":
    raise SystemExit(main())
