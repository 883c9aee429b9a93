"""Invariant streams and the three vanishing criteria.

For every key index i below the support polynomial g the stream records

    nu(Q_i), nu(Q_i'), alpha_i = nu(Q_i') - nu(Q_i),
    nu_i(g), nu_i(g'), beta_i = nu(g') - nu_i(g),
    beta_tilde_i = nu_i(g') - nu_i(g).

Plateau columns additionally carry a tail description: an exact geometric
law ``c * p**-n + d`` fitted on at least four consecutive computed terms and
verified on four more, or a divergence certificate inherited from the
family's construction.  Segments, verdicts and the expansion-slot criterion
are decided from those descriptions; a column with neither yields an
inconclusive outcome, never a guess.

The three independent routes to the vanishing decision:

* `omega_verdict` -- equality of the segments generated by the alpha and
  beta streams;
* `classify` -- the minimum / no-minimum case analysis (maximal index,
  beta-tilde domination and expansion-support witness; respectively first
  minimizing plateau, beta-tilde regeneration and weak limit relative to
  the largest invariant subgroup);
* `b1_criterion` -- slot 1 of the expansion of g staying below the
  instability cut along the single plateau.

Valid scenario data makes all three agree; structural violations raise
`ScenarioDataError` instead of producing a verdict.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .errors import (
    EmptyRootDataError,
    HypothesisViolatedError,
    InconclusiveError,
    LawMismatchError,
    ScenarioDataError,
)
from .groups import (
    CanonicalSegment,
    ClosedForm,
    EmptySegment,
    ExtValue,
    FiniteList,
    GeneratedBy,
    GroupElem,
    MinClosed,
    Segment,
    SegmentRelation,
    Stabilized,
    WholeGroup,
    canonicalize,
    compare_canonical,
    fit_closed_form,
    largest_delta,
    min_value,
    rat1,
    segment_compare,
    wlim,
)
from .keyseq import (
    CoefValueLaw,
    ExplicitStage,
    KeyIndex,
    KeySequence,
    ScheduleStage,
)
from .poly import derivative, q_expand
from .truncation import NuOracle

COLUMNS = (
    "nu_key",
    "nu_key_deriv",
    "alpha",
    "beta",
    "beta_tilde",
    "nu_i_g",
    "nu_i_gprime",
)

_FIT_NEED = 4
_FIT_VERIFY = 4


@dataclass(frozen=True)
class InvariantRecord:
    """Exact per-index invariant tuple; all entries finite below g."""

    index: KeyIndex
    degree: int
    nu_key: GroupElem
    nu_key_deriv: GroupElem
    alpha: GroupElem
    beta: GroupElem
    beta_tilde: GroupElem
    nu_i_g: GroupElem
    nu_i_gprime: GroupElem

    def column(self, name: str) -> GroupElem:
        return getattr(self, name)


@dataclass(frozen=True)
class ColumnTail:
    """Tail description of one plateau column.

    kind "law":       value at materialized position offset+k is law.term(k),
                      fitted and verified on exact computations;
    kind "diverging": certified strictly monotone and unbounded;
    kind "unknown":   no recognized description.
    """

    kind: str
    law: ClosedForm | None = None
    offset: int = 0
    increasing: bool | None = None

    def describe(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.law is not None:
            out["scale"] = str(self.law.c)
            out["limit"] = str(self.law.d)
            out["ratio"] = self.law.p
            out["offset"] = self.offset
            out["verified"] = True
        if self.increasing is not None:
            out["increasing"] = self.increasing
        return out


@dataclass(frozen=True)
class PlateauInfo:
    stage_pos: int
    degree: int
    start_record: int
    count: int
    tails: dict[str, ColumnTail]

    def column_values(self, stream: "InvariantStream", name: str) -> list[GroupElem]:
        recs = stream.records[self.start_record : self.start_record + self.count]
        return [r.column(name) for r in recs]


@dataclass(frozen=True, eq=False)
class InvariantStream:
    """Materialized records plus tail descriptions and source handles."""

    records: tuple[InvariantRecord, ...]
    plateaus: tuple[PlateauInfo, ...]
    nu_gprime: GroupElem
    g_degree: int
    istar_has_max: bool
    rank: int = 1
    ks: KeySequence | None = None
    nu: NuOracle | None = None
    schedule_stage: ScheduleStage | None = None
    terms: int = 8

    def plateau_at(self, stage_pos: int) -> PlateauInfo | None:
        for info in self.plateaus:
            if info.stage_pos == stage_pos:
                return info
        return None

    def explicit_records(self) -> list[InvariantRecord]:
        plateau_rows: set[int] = set()
        for info in self.plateaus:
            plateau_rows.update(range(info.start_record, info.start_record + info.count))
        return [r for k, r in enumerate(self.records) if k not in plateau_rows]


class VerdictKind(Enum):
    OMEGA_ZERO = "omega_zero"
    OMEGA_NONZERO = "omega_nonzero"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    case: str | None = None  # "i" (minimum) or "ii" (no minimum)
    witness: dict = field(default_factory=dict)
    reason: str = ""

    @property
    def decisive(self) -> bool:
        return self.kind is not VerdictKind.INCONCLUSIVE

    def describe(self) -> dict:
        return {
            "kind": self.kind.value,
            "case": self.case,
            "witness": {k: self.witness[k] for k in sorted(self.witness)},
            "reason": self.reason,
        }


# ---------------------------------------------------------------------------
# Stream construction
# ---------------------------------------------------------------------------

def invariant_stream(ks: KeySequence, nu: NuOracle, terms: int = 8) -> InvariantStream:
    """Exact records for a field-backed key sequence.

    Every value is computed through the oracle; plateau tails are then
    described by fitted laws, re-verified against further exact terms, or
    by the family's divergence certificate.
    """
    g = ks.g
    gp = derivative(g)
    if gp.is_zero():
        raise ScenarioDataError("the support polynomial must be separable")
    nu_gprime = nu.nu(gp).expect_finite()

    def record_for(index: KeyIndex) -> InvariantRecord:
        q = ks.key_poly(index)
        nu_q = nu.nu(q).expect_finite()
        nu_qp = nu.nu(derivative(q)).expect_finite()
        nu_i_g = nu.nu_q(g, q).expect_finite()
        nu_i_gp = nu.nu_q(gp, q).expect_finite()
        return InvariantRecord(
            index=index,
            degree=q.degree,
            nu_key=nu_q,
            nu_key_deriv=nu_qp,
            alpha=nu_qp - nu_q,
            beta=nu_gprime - nu_i_g,
            beta_tilde=nu_i_gp - nu_i_g,
            nu_i_g=nu_i_g,
            nu_i_gprime=nu_i_gp,
        )

    records: list[InvariantRecord] = []
    infos: list[PlateauInfo] = []
    for pos, stage in enumerate(ks.stages):
        if isinstance(stage, ExplicitStage):
            records.append(record_for(KeyIndex(pos, 0)))
            continue
        if isinstance(stage, ScheduleStage):
            raise ScenarioDataError(
                "schedule stages are handled by invariant_stream_from_schedule"
            )
        start = len(records)
        count = min(terms, stage.family.budget)
        for n in range(1, count + 1):
            records.append(record_for(KeyIndex(pos, n)))
        block = records[start:]

        def extender(name: str, pos=pos, budget=stage.family.budget):
            def extend(k: int) -> GroupElem | None:
                if k + 1 > budget:
                    return None
                return record_for(KeyIndex(pos, k + 1)).column(name)

            return extend

        tails: dict[str, ColumnTail] = {}
        for name in COLUMNS:
            values = [r.column(name) for r in block]
            fitted = fit_closed_form(
                values,
                ks.p,
                extend=extender(name),
                fit_terms=_FIT_NEED,
                verify_terms=_FIT_VERIFY,
            )
            if fitted is not None:
                tails[name] = ColumnTail("law", fitted[1], fitted[0])
            else:
                tails[name] = ColumnTail("unknown")
        if stage.family.divergence_bound is not None:
            tails = _apply_divergence_cert(block, tails, stage.family.divergence_bound)
        infos.append(PlateauInfo(pos, stage.degree, start, count, tails))

    return InvariantStream(
        records=tuple(records),
        plateaus=tuple(infos),
        nu_gprime=nu_gprime,
        g_degree=ks.final.degree,
        istar_has_max=ks.istar_has_max(),
        ks=ks,
        nu=nu,
        terms=terms,
    )


def _apply_divergence_cert(block, tails, bound) -> dict[str, ColumnTail]:
    """Upgrade unknown columns using the family's construction certificate.

    The certificate guarantees nu(Q_n) >= bound(n) -> infinity; the
    materialized prefix is validated against it, as is domination of the
    truncated values of g (every expansion slot of g carries nonnegative
    coefficient value for an integral family, so nu_n(g) >= nu(Q_n)).
    Columns paired with an eventually constant partner then diverge with
    the key value.
    """
    for n, rec in enumerate(block, start=1):
        if not rec.nu_key >= bound(n):
            raise LawMismatchError("divergence certificate fails on the prefix")
        if not rec.nu_i_g >= bound(n):
            raise LawMismatchError(
                "truncated values of g do not dominate the certificate bound"
            )
    out = dict(tails)
    up = ColumnTail("diverging", increasing=True)
    down = ColumnTail("diverging", increasing=False)
    if out["nu_key"].kind == "unknown":
        out["nu_key"] = up
    if out["nu_i_g"].kind == "unknown":
        out["nu_i_g"] = up
    deriv_constant = (
        out["nu_key_deriv"].kind == "law" and out["nu_key_deriv"].law.c.is_zero()
    )
    if deriv_constant and out["alpha"].kind == "unknown":
        out["alpha"] = down
    if out["nu_i_g"].kind == "diverging" and out["beta"].kind == "unknown":
        out["beta"] = down
    gp_constant = (
        out["nu_i_gprime"].kind == "law" and out["nu_i_gprime"].law.c.is_zero()
    )
    if gp_constant and out["nu_i_g"].kind == "diverging" and out["beta_tilde"].kind == "unknown":
        out["beta_tilde"] = down
    return out


def invariant_stream_from_schedule(
    stage: ScheduleStage,
    g_degree: int,
    nu_gprime: GroupElem,
    p: int,
    terms: int = 8,
) -> InvariantStream:
    """Records synthesized from value laws alone (no field arithmetic).

    The keys are monic linear, so nu(Q') = 0; truncations of g and g' are
    the least slot values of the supplied coefficient laws.
    """
    zero = GroupElem.zero()
    count = stage.available_terms(terms)

    def slot_value(law: CoefValueLaw, kv: GroupElem) -> ExtValue:
        if law.const is None:
            return ExtValue.infinity()
        return ExtValue.of(law.const + kv.scale(law.mult))

    def record_for(n: int) -> InvariantRecord:
        kv = stage.key_value(n)
        nu_i_g = min_value(slot_value(law, kv) for law in stage.g_coef_laws).expect_finite()
        nu_i_gp = min_value(
            slot_value(law, kv) for law in stage.gprime_coef_laws
        ).expect_finite()
        return InvariantRecord(
            index=KeyIndex(0, n),
            degree=stage.degree,
            nu_key=kv,
            nu_key_deriv=zero,
            alpha=zero - kv,
            beta=nu_gprime - nu_i_g,
            beta_tilde=nu_i_gp - nu_i_g,
            nu_i_g=nu_i_g,
            nu_i_gprime=nu_i_gp,
        )

    records = [record_for(n) for n in range(1, count + 1)]
    can_extend = not isinstance(stage.key_values, FiniteList)

    def extender(name: str):
        if not can_extend:
            return None

        def extend(k: int) -> GroupElem:
            return record_for(k + 1).column(name)

        return extend

    tails: dict[str, ColumnTail] = {}
    for name in COLUMNS:
        values = [r.column(name) for r in records]
        fitted = None
        for ratio in dict.fromkeys((p, 2, 3, 5)):
            fitted = fit_closed_form(
                values,
                ratio,
                extend=extender(name),
                fit_terms=_FIT_NEED,
                verify_terms=_FIT_VERIFY,
            )
            if fitted is not None:
                break
        tails[name] = (
            ColumnTail("law", fitted[1], fitted[0]) if fitted else ColumnTail("unknown")
        )

    info = PlateauInfo(0, stage.degree, 0, count, tails)
    return InvariantStream(
        records=tuple(records),
        plateaus=(info,),
        nu_gprime=nu_gprime,
        g_degree=g_degree,
        istar_has_max=False,
        schedule_stage=stage,
        terms=terms,
    )


# ---------------------------------------------------------------------------
# Segments
# ---------------------------------------------------------------------------

def _canon_union(parts: Sequence[CanonicalSegment]) -> CanonicalSegment:
    """Union of nested final segments: the containment-largest part."""
    biggest = parts[0]
    for c in parts[1:]:
        if compare_canonical(biggest, c) is SegmentRelation.B_CONTAINS_A:
            biggest = c
    return biggest


def segment_from_canonical(canon: CanonicalSegment) -> Segment:
    if canon.kind == "empty":
        return EmptySegment(canon.rank)
    if canon.kind == "whole":
        return WholeGroup(canon.rank)
    if canon.kind == "closed":
        return MinClosed(canon.point)
    coords = [Fraction(0)] * canon.rank
    coords[canon.depth - 1] = Fraction(1)
    return GeneratedBy(ClosedForm(GroupElem(tuple(coords)), canon.point, 2))


def _law_canon(law: ClosedForm) -> CanonicalSegment:
    return canonicalize(GeneratedBy(law))


def _tail_canon(
    tail: ColumnTail, values: Sequence[GroupElem], rank: int, drop_prefix: bool = False
) -> CanonicalSegment | None:
    """Canonical segment generated by one plateau column.

    With drop_prefix the materialized terms before the law offset are
    ignored (the tail-truncated index set); for law and decreasing
    divergence the result is then invariant under further truncation.
    """
    if tail.kind == "unknown":
        return None
    if tail.kind == "diverging":
        if tail.increasing:
            pts = list(values)
            if drop_prefix and len(pts) > 1:
                pts = pts[-1:]
            return CanonicalSegment("closed", rank, min(pts))
        return CanonicalSegment("whole", rank)
    law_canon = _law_canon(tail.law)
    prefix = [] if drop_prefix else list(values[: tail.offset])
    if not prefix:
        return law_canon
    m = min(prefix)
    if law_canon.kind == "closed":
        return CanonicalSegment("closed", rank, min(m, law_canon.point))
    if law_canon.contains(m):
        return law_canon
    return CanonicalSegment("closed", rank, m)


def column_segment(stream: InvariantStream, name: str) -> Segment | None:
    """Final segment generated by one column over all indices below g."""
    parts: list[CanonicalSegment] = []
    explicit = stream.explicit_records()
    if explicit:
        parts.append(
            CanonicalSegment(
                "closed", stream.rank, min(r.column(name) for r in explicit)
            )
        )
    for info in stream.plateaus:
        values = info.column_values(stream, name)
        canon = _tail_canon(info.tails[name], values, stream.rank)
        if canon is None:
            return None
        parts.append(canon)
    if not parts:
        raise ScenarioDataError("stream has no records")
    return segment_from_canonical(_canon_union(parts))


def alpha_beta_segments(stream: InvariantStream) -> tuple[Segment | None, Segment | None]:
    """The segments generated by the alpha and beta columns."""
    return column_segment(stream, "alpha"), column_segment(stream, "beta")


def ideal_inclusion_check(stream: InvariantStream) -> bool:
    """Verify the beta segment sits inside the alpha segment.

    Checks the segment comparison and, record by record, the witness chain
    beta_i >= beta_tilde_i >= alpha_{i'} for some i' <= i.  A failure is a
    hard scenario-data error, not a verdict.
    """
    alpha_seg, beta_seg = alpha_beta_segments(stream)
    if alpha_seg is not None and beta_seg is not None:
        rel = segment_compare(beta_seg, alpha_seg)
        if rel not in (SegmentRelation.EQUAL, SegmentRelation.B_CONTAINS_A):
            raise ScenarioDataError("beta segment escapes the alpha segment")
    for k, rec in enumerate(stream.records):
        if not rec.beta >= rec.beta_tilde:
            raise ScenarioDataError("beta < beta_tilde at a record")
        if not any(rec.beta_tilde >= r.alpha for r in stream.records[: k + 1]):
            raise ScenarioDataError("no earlier alpha witnesses beta_tilde")
    return True


# ---------------------------------------------------------------------------
# Criterion 1: segment equality
# ---------------------------------------------------------------------------

def omega_verdict(stream: InvariantStream) -> Verdict:
    """Vanishing holds exactly when the alpha and beta segments coincide."""
    alpha_seg, beta_seg = alpha_beta_segments(stream)
    if alpha_seg is None or beta_seg is None:
        return Verdict(
            VerdictKind.INCONCLUSIVE,
            reason="a value column has no recognized tail description",
        )
    rel = segment_compare(alpha_seg, beta_seg)
    ca, cb = canonicalize(alpha_seg), canonicalize(beta_seg)
    if rel is SegmentRelation.EQUAL:
        return Verdict(
            VerdictKind.OMEGA_ZERO, witness={"shared_segment": _canon_str(ca)}
        )
    if rel is SegmentRelation.INCONCLUSIVE:
        return Verdict(VerdictKind.INCONCLUSIVE, reason="segment comparison inconclusive")
    if rel is SegmentRelation.B_CONTAINS_A:
        raise ScenarioDataError("beta segment strictly contains alpha segment")
    witness = {"alpha_segment": _canon_str(ca), "beta_segment": _canon_str(cb)}
    sep = _separating_value(ca, cb)
    if sep is not None:
        witness["separating_value"] = str(sep)
    return Verdict(VerdictKind.OMEGA_NONZERO, witness=witness)


def _canon_str(canon: CanonicalSegment) -> str:
    if canon.kind in ("empty", "whole"):
        return canon.kind
    if canon.kind == "closed":
        return f"[{canon.point}, inf)"
    return f"({canon.point}, inf) depth {canon.depth}"


def _separating_value(ca: CanonicalSegment, cb: CanonicalSegment) -> GroupElem | None:
    """Some element of the larger segment missing from the smaller (rank 1)."""
    if ca.rank != 1:
        return None
    if ca.kind == "whole":
        if cb.kind == "closed":
            return cb.point - rat1(1)
        if cb.kind == "open":
            return cb.point
        return None
    if ca.kind == "closed":
        return ca.point
    if cb.kind == "open":
        return (ca.point + cb.point).scale(Fraction(1, 2))
    return (ca.point + cb.point).scale(Fraction(1, 2))


# ---------------------------------------------------------------------------
# Criterion 2: case classification
# ---------------------------------------------------------------------------

def first_minimizing_plateau(stream: InvariantStream) -> tuple[int, int]:
    """Smallest degree whose alpha values already generate the alpha segment.

    Requires alpha without a minimum.  Returns (stage position of the
    plateau at that degree, certificate index): the certificate is the
    1-based materialized term from which the alpha column decreases
    strictly, the tail description guaranteeing continuation.
    """
    alpha_seg = column_segment(stream, "alpha")
    if alpha_seg is None:
        raise InconclusiveError("alpha segment undecidable")
    canon = canonicalize(alpha_seg)
    if canon.kind == "closed":
        raise HypothesisViolatedError("alpha attains a minimum; no plateau is involved")
    if not stream.plateaus:
        raise HypothesisViolatedError("no plateau in the sequence")

    explicit = stream.explicit_records()
    for deg in sorted({r.degree for r in stream.records}):
        parts: list[CanonicalSegment] = []
        deg_explicit = [r.alpha for r in explicit if r.degree == deg]
        if deg_explicit:
            parts.append(CanonicalSegment("closed", stream.rank, min(deg_explicit)))
        deg_infos = [p for p in stream.plateaus if p.degree == deg]
        for info in deg_infos:
            part = _tail_canon(info.tails["alpha"], info.column_values(stream, "alpha"), stream.rank)
            if part is None:
                raise InconclusiveError("plateau alpha column undecidable")
            parts.append(part)
        if not parts:
            continue
        if compare_canonical(_canon_union(parts), canon) is SegmentRelation.EQUAL:
            if not deg_infos:
                raise ScenarioDataError(
                    "alpha without minimum generated by explicit keys alone"
                )
            info = deg_infos[0]
            values = info.column_values(stream, "alpha")
            tail = info.tails["alpha"]
            if tail.kind == "law" and not tail.law.c > GroupElem.zero(stream.rank):
                raise ScenarioDataError("minimizing plateau alpha tail is not decreasing")
            if tail.kind == "diverging" and tail.increasing:
                raise ScenarioDataError("minimizing plateau alpha tail increases")
            return info.stage_pos, _strictly_decreasing_from(values)
    raise ScenarioDataError("no degree generates the alpha segment")


def _strictly_decreasing_from(values: Sequence[GroupElem]) -> int:
    cert = len(values)
    for k in range(len(values) - 1, 0, -1):
        if values[k - 1] > values[k]:
            cert = k
        else:
            break
    if cert >= len(values):
        raise ScenarioDataError("alpha column never starts decreasing")
    return cert


def classify(stream: InvariantStream, probe: int = 64) -> Verdict:
    """Case analysis for the vanishing decision.

    With a minimal alpha value: the index set below g must have a maximal
    element whose beta-tilde lies below every beta and matches the minimal
    alpha at an expansion-support witness.  Without one: the first
    minimizing plateau (or a tail truncation of it) must regenerate alpha
    through its beta-tilde values and carry nu(g') as a weak limit of the
    truncated values relative to the largest invariant subgroup.
    """
    alpha_seg = column_segment(stream, "alpha")
    if alpha_seg is None:
        return Verdict(VerdictKind.INCONCLUSIVE, reason="alpha column undecidable")
    canon = canonicalize(alpha_seg)
    delta = largest_delta(alpha_seg, stream.rank)
    base = {"delta_suffix_len": delta.suffix_len}
    if canon.kind == "closed":
        return _classify_min_case(stream, canon, base)
    return _classify_no_min_case(stream, canon, delta, base, probe)


def _classify_min_case(stream, canon, base) -> Verdict:
    min_alpha = canon.point
    if not stream.istar_has_max:
        return Verdict(
            VerdictKind.OMEGA_NONZERO,
            case="i",
            witness={**base, "failed": "no_maximal_index"},
        )
    rec = stream.records[-1]

    beta_seg = column_segment(stream, "beta")
    if beta_seg is None:
        return Verdict(VerdictKind.INCONCLUSIVE, reason="beta column undecidable")
    beta_canon = canonicalize(beta_seg)
    if beta_canon.kind == "whole":
        dominated = False
    else:
        dominated = rec.beta_tilde <= beta_canon.point
    if not dominated:
        return Verdict(
            VerdictKind.OMEGA_NONZERO,
            case="i",
            witness={**base, "failed": "beta_tilde_not_below_all_betas"},
        )

    if rec.beta_tilde != min_alpha:
        return Verdict(
            VerdictKind.OMEGA_NONZERO,
            case="i",
            witness={**base, "failed": "beta_tilde_differs_from_min_alpha"},
        )
    if stream.ks is None or stream.nu is None:
        return Verdict(
            VerdictKind.INCONCLUSIVE,
            reason="minimum case needs polynomial data for the support witness",
        )
    from .expansion import i0_set

    support = i0_set(stream.ks.g, rec.index, stream.ks, stream.nu, stream.terms)
    by_index = {r.index: r for r in stream.records}
    for ell in sorted(support):
        rec_ell = by_index.get(ell)
        if rec_ell is not None and rec_ell.alpha == min_alpha:
            return Verdict(
                VerdictKind.OMEGA_ZERO,
                case="i",
                witness={
                    **base,
                    "i": rec.index.label(),
                    "ell": ell.label(),
                    "min_alpha": str(min_alpha),
                    "beta_tilde_i": str(rec.beta_tilde),
                },
            )
    return Verdict(
        VerdictKind.OMEGA_NONZERO,
        case="i",
        witness={**base, "failed": "no_support_witness"},
    )


def _classify_no_min_case(stream, canon, delta, base, probe) -> Verdict:
    try:
        stage_pos, cert = first_minimizing_plateau(stream)
    except InconclusiveError as exc:
        return Verdict(VerdictKind.INCONCLUSIVE, reason=str(exc))
    info = stream.plateau_at(stage_pos)

    # (a): the beta-tilde values along the plateau tail regenerate alpha.
    # Dropping the prefix makes the generated segment invariant under all
    # further tail truncations, so one comparison decides them all.
    bt_values = info.column_values(stream, "beta_tilde")
    bt_tail = info.tails["beta_tilde"]
    tail_only = _tail_canon(bt_tail, bt_values, stream.rank, drop_prefix=True)
    if tail_only is None:
        return Verdict(VerdictKind.INCONCLUSIVE, reason="beta_tilde tail unrecognized")
    if compare_canonical(tail_only, canon) is not SegmentRelation.EQUAL:
        full_bt = column_segment(stream, "beta_tilde")
        if full_bt is not None:
            rel_full = compare_canonical(canonicalize(full_bt), canon)
            if rel_full is SegmentRelation.A_CONTAINS_B:
                raise ScenarioDataError("beta_tilde values escape the alpha segment")
            if rel_full is not SegmentRelation.EQUAL:
                # No index subset can regenerate alpha: its beta-tilde values
                # generate at most the full beta-tilde segment.
                return Verdict(
                    VerdictKind.OMEGA_NONZERO,
                    case="ii",
                    witness={
                        **base,
                        "failed": "beta_tilde_cannot_regenerate_alpha",
                        "alpha_segment": _canon_str(canon),
                        "beta_tilde_segment": _canon_str(canonicalize(full_bt)),
                    },
                )
        return Verdict(
            VerdictKind.INCONCLUSIVE,
            reason="plateau beta_tilde tail does not regenerate alpha; "
            "another index subset might",
        )

    # (b): nu(g') is a weak limit of the truncated values along the plateau,
    # tail truncations of the index set allowed.
    gp_values = info.column_values(stream, "nu_i_gprime")
    gp_tail = info.tails["nu_i_gprime"]
    branch = None
    if gp_tail.kind == "law":
        if gp_tail.law.c.is_zero():
            for offset in range(gp_tail.offset + 1):
                seq = Stabilized(tuple(gp_values[offset : gp_tail.offset]), gp_tail.law.d)
                if wlim(stream.nu_gprime, seq, delta, probe):
                    branch = 2
                    break
        else:
            if wlim(stream.nu_gprime, gp_tail.law, delta, probe):
                branch = 1
    elif gp_tail.kind == "unknown":
        return Verdict(VerdictKind.INCONCLUSIVE, reason="nu_i(g') tail unrecognized")
    if branch is None:
        return Verdict(
            VerdictKind.INCONCLUSIVE,
            reason="weak-limit condition fails along every plateau tail; "
            "another index subset might satisfy it",
        )
    return Verdict(
        VerdictKind.OMEGA_ZERO,
        case="ii",
        witness={
            **base,
            "plateau_stage": stage_pos,
            "plateau_degree": info.degree,
            "certificate_index": cert,
            "wlim_branch": branch,
        },
    )


# ---------------------------------------------------------------------------
# Criterion 3: slot membership along a single plateau
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cut:
    """An initial segment (downward-closed set) in canonical form.

    kind "whole"; "closed_below": {x : x <= bound}; "open_below":
    {x : x < bound}.
    """

    kind: str
    rank: int
    bound: GroupElem | None = None

    def describe(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.bound is not None:
            out["bound"] = str(self.bound)
        return out


def _cut_from_column(tail: ColumnTail, values: Sequence[GroupElem], rank: int) -> Cut | None:
    """Smallest initial segment containing one plateau column."""
    if tail.kind == "unknown":
        return None
    if tail.kind == "diverging":
        if tail.increasing:
            return Cut("whole", rank)
        return Cut("closed_below", rank, max(values))
    law = tail.law
    if law.c.is_zero():
        top, attained = law.d, True
    elif law.c < GroupElem.zero(rank):
        top, attained = law.d, False
    else:
        top, attained = law.term(0), True
    prefix = values[: tail.offset]
    if prefix and max(prefix) >= top:
        return Cut("closed_below", rank, max(prefix))
    return Cut("closed_below" if attained else "open_below", rank, top)


def cut_contains_eventually(cut: Cut, tail: ColumnTail) -> bool | None:
    """Whether a slot-value stream lies in the cut for all large terms."""
    if tail.kind == "unknown":
        return None
    if cut.kind == "whole":
        return True
    if tail.kind == "diverging":
        return not tail.increasing
    law = tail.law
    limit = law.d
    from_above = law.c > GroupElem.zero(law.d.rank)
    if cut.kind == "closed_below":
        if from_above:
            return limit < cut.bound
        return limit <= cut.bound
    # open_below
    if from_above:
        return limit < cut.bound
    if law.c.is_zero():
        return limit < cut.bound
    return limit <= cut.bound


@dataclass(frozen=True)
class SlotReport:
    slot: int
    member: bool | None
    note: str = ""


@dataclass(frozen=True)
class BSetReport:
    cut: Cut
    slots: tuple[SlotReport, ...]
    b_set: frozenset[int]
    b1: bool | None  # None: slot 1 membership undecided

    def describe(self) -> dict:
        return {
            "cut": self.cut.describe(),
            "slots": [{"slot": s.slot, "member": s.member, "note": s.note} for s in self.slots],
            "b_set": sorted(self.b_set),
            "b1": self.b1,
        }


def check_b1_hypotheses(stream: InvariantStream) -> None:
    """Single degree-1 plateau, no last degree-1 key, no intermediate degrees."""
    if not any(p.degree == 1 for p in stream.plateaus):
        raise HypothesisViolatedError("no degree-1 plateau: key values attain a maximum")
    for rec in stream.records:
        if 1 < rec.degree < stream.g_degree:
            raise HypothesisViolatedError("keys of intermediate degree exist")
    for info in stream.plateaus:
        if 1 < info.degree < stream.g_degree:
            raise HypothesisViolatedError("plateau of intermediate degree exists")


def b_set(stream: InvariantStream) -> BSetReport:
    """Expansion slots of g whose term values stay inside the instability cut.

    The cut is the smallest initial segment containing the truncated values
    of g along the plateau; slot b (1 <= b <= deg(g) - 1) belongs to the
    set when its term value lies in the cut for every sufficiently late
    plateau member.
    """
    check_b1_hypotheses(stream)
    info = max((p for p in stream.plateaus if p.degree == 1), key=lambda p: p.stage_pos)
    cut = _cut_from_column(
        info.tails["nu_i_g"], info.column_values(stream, "nu_i_g"), stream.rank
    )
    if cut is None:
        raise InconclusiveError("instability cut undecidable")

    reports: list[SlotReport] = []
    members: set[int] = set()
    undecided: set[int] = set()
    for b in range(1, stream.g_degree):
        kind, tail = _slot_tail(stream, info, b)
        if kind == "zero":
            reports.append(SlotReport(b, False, "slot vanishes on the materialized prefix"))
            continue
        if tail is None:
            reports.append(SlotReport(b, None, "no recognized tail"))
            undecided.add(b)
            continue
        member = cut_contains_eventually(cut, tail)
        reports.append(SlotReport(b, member))
        if member:
            members.add(b)
        elif member is None:
            undecided.add(b)
    b1 = True if 1 in members else (None if 1 in undecided else False)
    return BSetReport(cut, tuple(reports), frozenset(members), b1)


def _slot_tail(stream: InvariantStream, info: PlateauInfo, b: int):
    """Tail description of the b-th expansion-slot values of g."""
    if stream.schedule_stage is not None:
        stage = stream.schedule_stage
        law = stage.g_coef_laws[b]
        if law.const is None:
            return "zero", None
        kv = stage.key_values
        if isinstance(kv, ClosedForm):
            slot_law = ClosedForm(
                kv.c.scale(law.mult), law.const + kv.d.scale(law.mult), kv.p
            )
            return "values", ColumnTail("law", slot_law, 0)
        vals = [
            law.const + stage.key_value(n).scale(law.mult)
            for n in range(1, stage.available_terms(stream.terms) + 1)
        ]
        fitted = fit_closed_form(vals, 2) or fit_closed_form(vals, 3) or fit_closed_form(vals, 5)
        return "values", (ColumnTail("law", fitted[1], fitted[0]) if fitted else None)

    ks, nu = stream.ks, stream.nu
    stage = ks.stages[info.stage_pos]
    g = ks.g

    def slot_value(n: int) -> GroupElem | None:
        if n > stage.family.budget:
            return None
        q = stage.family.poly(n)
        coeff = q_expand(g, q).coeff(b)
        if coeff.is_zero():
            return None
        return (nu.nu(coeff) + nu.nu(q).expect_finite().scale(b)).expect_finite()

    vals: list[GroupElem] = []
    gap = False
    for n in range(1, info.count + 1):
        v = slot_value(n)
        if v is None:
            gap = True
            continue
        vals.append(v)
    if not vals:
        return "zero", None
    # Extension keeps term positions aligned with n, so it only applies to
    # gap-free prefixes.
    extend = (lambda k: slot_value(k + 1)) if not gap else None
    fitted = fit_closed_form(vals, ks.p, extend=extend)
    if fitted is not None:
        return "values", ColumnTail("law", fitted[1], fitted[0])
    cert = stage.family.divergence_bound
    if cert is not None and all(y > x for x, y in zip(vals, vals[1:])):
        # Slot value >= b * nu(Q_n) plus a nonnegative coefficient value,
        # already validated against the certificate for the g column.
        return "values", ColumnTail("diverging", increasing=True)
    return "values", None


def b1_criterion(stream: InvariantStream) -> bool:
    """The single-plateau vanishing test: slot 1 stays inside the cut."""
    b1 = b_set(stream).b1
    if b1 is None:
        raise InconclusiveError("slot 1 membership undecided")
    return b1


# ---------------------------------------------------------------------------
# Epsilon spot check
# ---------------------------------------------------------------------------

def epsilon_check(root_data: Sequence[tuple[str, GroupElem]]) -> GroupElem:
    """Largest root-closeness value from scenario-supplied root data."""
    if not root_data:
        raise EmptyRootDataError("no root data supplied")
    return max(v for _, v in root_data)
