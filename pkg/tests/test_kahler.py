"""Invariant streams, segments and the three vanishing criteria."""
from fractions import Fraction

import pytest

from valkit.cli import parse_config_dict, build_stream
from valkit.errors import EmptyRootDataError, HypothesisViolatedError
from valkit.groups import (
    ClosedForm,
    MinClosed,
    SegmentRelation,
    WholeGroup,
    canonicalize,
    rat1,
    segment_compare,
)
from valkit.kahler import (
    VerdictKind,
    alpha_beta_segments,
    b1_criterion,
    b_set,
    classify,
    epsilon_check,
    first_minimizing_plateau,
    ideal_inclusion_check,
    invariant_stream_from_schedule,
    omega_verdict,
)
from valkit.keyseq import CoefValueLaw, ScheduleStage
from valkit.groups import FiniteList


def stream_for(data):
    return build_stream(parse_config_dict(data))


AS2 = stream_for({"scenario": "artin-schreier", "p": 2, "va": "-1"})
AS3 = stream_for({"scenario": "artin-schreier", "p": 3, "va": "-1"})
UNRAMIFIED = stream_for({"scenario": "unramified"})
HENSEL = stream_for({"scenario": "hensel-immediate"})
KUMMER_AT = stream_for({"scenario": "kummer-schedule", "p": 3, "vp": "1"})
KUMMER_BELOW = stream_for({"scenario": "kummer-schedule", "p": 3, "vp": "1", "gamma": "1/3"})


class TestInvariantStream:
    @pytest.mark.parametrize("stream,p", [(AS2, 2), (AS3, 3)])
    def test_artin_schreier_records(self, stream, p):
        for n, rec in enumerate(stream.records, start=1):
            assert rec.alpha == rat1(Fraction(1, p**n))
            assert rec.beta == rat1(Fraction(1, p ** (n - 1)))
            assert rec.beta_tilde == rec.beta
            assert rec.nu_i_gprime == rat1(0)
        assert stream.nu_gprime == rat1(0)
        law = stream.plateaus[0].tails["alpha"].law
        assert law.d == rat1(0) and law.p == p

    def test_unramified_single_record(self):
        (rec,) = UNRAMIFIED.records
        assert rec.alpha == rec.beta == rec.beta_tilde == rat1(0)
        assert rec.nu_key == rec.nu_key_deriv == rat1(0)
        assert UNRAMIFIED.istar_has_max

    def test_hensel_divergence(self):
        tails = HENSEL.plateaus[0].tails
        assert tails["alpha"].kind == "diverging" and not tails["alpha"].increasing
        assert tails["beta"].kind == "diverging" and not tails["beta"].increasing
        assert tails["nu_i_g"].kind == "diverging" and tails["nu_i_g"].increasing
        for rec, nxt in zip(HENSEL.records, HENSEL.records[1:]):
            assert nxt.alpha < rec.alpha

    def test_kummer_records(self):
        # nu(x - a_n) = 1/2 - 3^-n, alpha_n its negative, beta via p * kv
        rec2 = KUMMER_AT.records[1]
        assert rec2.nu_key == rat1(Fraction(1, 2) - Fraction(1, 3))
        assert rec2.alpha == -rec2.nu_key
        assert rec2.nu_i_g == rec2.nu_key.scale(3)
        assert rec2.nu_i_gprime == rat1(1)


class TestSegments:
    def test_artin_schreier_open_at_zero(self):
        alpha_seg, beta_seg = alpha_beta_segments(AS2)
        ca, cb = canonicalize(alpha_seg), canonicalize(beta_seg)
        assert ca.kind == "open" and ca.point == rat1(0)
        assert segment_compare(alpha_seg, beta_seg) is SegmentRelation.EQUAL

    def test_unramified_min_closed_zero(self):
        alpha_seg, beta_seg = alpha_beta_segments(UNRAMIFIED)
        assert alpha_seg == MinClosed(rat1(0)) == beta_seg

    def test_hensel_whole_group(self):
        alpha_seg, beta_seg = alpha_beta_segments(HENSEL)
        assert isinstance(alpha_seg, WholeGroup)
        assert isinstance(beta_seg, WholeGroup)

    def test_inclusion_check_all_builtins(self):
        for stream in (AS2, AS3, UNRAMIFIED, HENSEL, KUMMER_AT, KUMMER_BELOW):
            assert ideal_inclusion_check(stream)


class TestOmegaVerdict:
    def test_artin_schreier_zero(self):
        assert omega_verdict(AS2).kind is VerdictKind.OMEGA_ZERO
        assert omega_verdict(AS3).kind is VerdictKind.OMEGA_ZERO

    def test_kummer_threshold(self):
        assert omega_verdict(KUMMER_AT).kind is VerdictKind.OMEGA_ZERO
        v = omega_verdict(KUMMER_BELOW)
        assert v.kind is VerdictKind.OMEGA_NONZERO
        assert "separating_value" in v.witness

    def test_unramified_and_hensel_zero(self):
        assert omega_verdict(UNRAMIFIED).kind is VerdictKind.OMEGA_ZERO
        assert omega_verdict(HENSEL).kind is VerdictKind.OMEGA_ZERO


class TestClassify:
    def test_unramified_case_i(self):
        v = classify(UNRAMIFIED)
        assert v.kind is VerdictKind.OMEGA_ZERO and v.case == "i"
        assert v.witness["min_alpha"] == "0/1"
        assert v.witness["delta_suffix_len"] == 0

    def test_artin_schreier_case_ii_branch2(self):
        v = classify(AS2)
        assert v.kind is VerdictKind.OMEGA_ZERO and v.case == "ii"
        assert v.witness["delta_suffix_len"] == 0
        assert v.witness["wlim_branch"] == 2

    def test_hensel_case_ii(self):
        v = classify(HENSEL)
        assert v.kind is VerdictKind.OMEGA_ZERO and v.case == "ii"
        assert v.witness["delta_suffix_len"] == 1  # whole group in rank 1

    def test_kummer_below_fails_regeneration(self):
        v = classify(KUMMER_BELOW)
        assert v.kind is VerdictKind.OMEGA_NONZERO and v.case == "ii"
        assert v.witness["failed"] == "beta_tilde_cannot_regenerate_alpha"

    def test_kummer_at_threshold_case_ii(self):
        v = classify(KUMMER_AT)
        assert v.kind is VerdictKind.OMEGA_ZERO and v.case == "ii"
        assert v.witness["wlim_branch"] == 2


class TestFirstMinimizingPlateau:
    def test_artin_schreier_degree_one(self):
        stage_pos, cert = first_minimizing_plateau(AS2)
        assert stage_pos == 0
        assert cert == 1  # strictly decreasing from the first record

    def test_hensel_degree_one(self):
        stage_pos, _ = first_minimizing_plateau(HENSEL)
        assert stage_pos == 0

    def test_no_plateau_rejected(self):
        with pytest.raises(HypothesisViolatedError):
            first_minimizing_plateau(UNRAMIFIED)


class TestBSet:
    def test_artin_schreier_b1(self):
        report = b_set(AS2)
        assert report.cut.kind == "open_below" and report.cut.bound == rat1(0)
        assert report.b_set == frozenset({1})
        assert report.b1 and b1_criterion(AS2)

    def test_artin_schreier_p3_vanishing_slot(self):
        report = b_set(AS3)
        # slot 2 of x^3 - x - a vanishes identically in characteristic 3
        assert report.b_set == frozenset({1})
        notes = {s.slot: s for s in report.slots}
        assert notes[2].member is False

    def test_kummer_threshold_vs_below(self):
        assert b_set(KUMMER_AT).b1
        report = b_set(KUMMER_BELOW)
        assert not report.b1
        assert report.b_set == frozenset()

    def test_deep_prime_slot_streams_extend(self):
        # slot-value laws must be recognized even when fewer terms are
        # materialized than the fit window, by extending along the family
        stream = stream_for({"scenario": "artin-schreier", "p": 5, "va": "-1", "terms": 6})
        report = b_set(stream)
        assert report.b1 is True
        assert report.b_set == frozenset({1})

    def test_hensel_whole_cut(self):
        report = b_set(HENSEL)
        assert report.cut.kind == "whole"
        assert report.b1

    def test_unramified_hypotheses_violated(self):
        with pytest.raises(HypothesisViolatedError):
            b_set(UNRAMIFIED)

    def test_linear_limit_polynomial_empty_range(self):
        stage = ScheduleStage(
            key_values=ClosedForm(rat1(-1), rat1(0), 2),
            g_coef_laws=(CoefValueLaw(rat1(0), 1), CoefValueLaw(rat1(0), 1)),
            gprime_coef_laws=(CoefValueLaw(rat1(0), 0),),
            nu_gprime=rat1(0),
        )
        stream = invariant_stream_from_schedule(stage, g_degree=1, nu_gprime=rat1(0), p=2)
        report = b_set(stream)
        assert report.b_set == frozenset() and not report.b1


class TestCriterionAgreement:
    @pytest.mark.parametrize(
        "stream,expect_zero",
        [
            (AS2, True),
            (AS3, True),
            (UNRAMIFIED, True),
            (HENSEL, True),
            (KUMMER_AT, True),
            (KUMMER_BELOW, False),
        ],
    )
    def test_all_routes_agree(self, stream, expect_zero):
        v1 = omega_verdict(stream)
        v2 = classify(stream)
        expected = VerdictKind.OMEGA_ZERO if expect_zero else VerdictKind.OMEGA_NONZERO
        assert v1.kind is expected
        assert v2.kind is expected
        try:
            assert b1_criterion(stream) is expect_zero
        except HypothesisViolatedError:
            pass  # criterion not applicable; the other two decided


class TestMinimizingPlateauMonotonicity:
    @pytest.mark.parametrize("stream", [AS2, AS3, HENSEL])
    def test_alpha_strictly_decreasing_beyond_certificate(self, stream):
        stage_pos, cert = first_minimizing_plateau(stream)
        info = stream.plateau_at(stage_pos)
        values = info.column_values(stream, "alpha")
        assert len(values) >= 8
        tail_values = values[cert - 1 :]
        assert all(b < a for a, b in zip(tail_values, tail_values[1:]))
        tail = info.tails["alpha"]
        if tail.kind == "law":
            assert tail.law.c > rat1(0)  # keeps decreasing forever
        else:
            assert tail.kind == "diverging" and not tail.increasing


class TestEpsilonCheck:
    def test_single_root(self):
        assert epsilon_check([("x - a", rat1(3))]) == rat1(3)

    def test_artin_schreier_symmetric_roots(self):
        # all p roots differ by constants of value 0, so the closeness
        # values coincide and the maximum is that common value
        common = rat1(Fraction(-1, 4))
        data = [(f"eta + {c}", common) for c in range(2)]
        assert epsilon_check(data) == common

    def test_product_of_linears(self):
        assert epsilon_check([("x-a", rat1(1)), ("x-b", rat1(5))]) == rat1(5)

    def test_empty_rejected(self):
        with pytest.raises(EmptyRootDataError):
            epsilon_check([])

    def test_key_sequence_epsilons_not_decreasing(self):
        # spot check: epsilon over growing root sets is monotone
        values = [rat1(Fraction(-1, 2**n)) for n in range(1, 6)]
        eps = [epsilon_check([("r", v) for v in values[: k + 1]]) for k in range(5)]
        assert all(b >= a for a, b in zip(eps, eps[1:]))


class TestScheduleValidation:
    def test_finite_schedule_without_law_is_undecided(self):
        # an explicit nongeometric list gives no tail description
        values = tuple(rat1(Fraction(-1, n)) for n in range(1, 9))
        stage = ScheduleStage(
            key_values=FiniteList(values),
            g_coef_laws=(
                CoefValueLaw(rat1(0), 3),
                CoefValueLaw(rat1(1), 1),
                CoefValueLaw(rat1(1), 2),
                CoefValueLaw(rat1(0), 3),
            ),
            gprime_coef_laws=(CoefValueLaw(rat1(1), 0), CoefValueLaw(rat1(1), 1), CoefValueLaw(rat1(1), 2)),
            nu_gprime=rat1(1),
        )
        stream = invariant_stream_from_schedule(stage, g_degree=3, nu_gprime=rat1(1), p=3)
        assert omega_verdict(stream).kind is VerdictKind.INCONCLUSIVE
        assert classify(stream).kind is VerdictKind.INCONCLUSIVE
