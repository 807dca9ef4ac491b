"""
Tests for the verification harness
"""

from dataclasses import replace

import numpy as np
import pytest

from bicarleman.pipeline.documents import load_operator
from bicarleman.pipeline.kernel import KERNEL_STAR, kernel_grid
from bicarleman.pipeline.service import PipelineService
from bicarleman.pipeline.verification import (
    FAILED_RESIDUAL,
    AdjointRelationCheck,
    AssignmentConsistencyCheck,
    ConditionCheck,
    ConjugateSymmetryCheck,
    DecompositionCheck,
    IsometryCheck,
    QRepresentationCheck,
    SplittingIdentityCheck,
    SummabilityCheck,
    SvdReconstructionCheck,
    TransferNormsCheck,
    TruncationCheck,
    UnitarityCheck,
    VerificationCheck,
    VerificationContext,
    check_condition_ii,
    format_report,
    get_default_checks,
    run_all,
)


class RaisingCheck(VerificationCheck):
    name = "raising"
    tolerance_key = "parseval"

    def measure(self, ctx):
        raise RuntimeError("boom")


class NanCheck(VerificationCheck):
    name = "not_a_number"
    tolerance_key = "parseval"

    def measure(self, ctx):
        return float("nan"), None


def algebraic_checks():
    return [
        SvdReconstructionCheck(),
        SplittingIdentityCheck(),
        AdjointRelationCheck(),
        QRepresentationCheck(),
        UnitarityCheck(),
        IsometryCheck(),
        AssignmentConsistencyCheck(),
        SummabilityCheck(),
        TransferNormsCheck(),
        DecompositionCheck(),
        ConjugateSymmetryCheck(),
        TruncationCheck(),
    ]


class TestDefaultChecks:
    def test_condition_checks_per_order(self):
        names = [check.name for check in get_default_checks(2)]

        for order in range(3):
            assert f"condition_ii_order{order}" in names
            assert f"condition_iii_order{order}" in names
        assert len(names) == len(set(names))

    def test_condition_check_tolerance_keys(self):
        assert ConditionCheck(1).tolerance_key == "condition_ii"
        assert ConditionCheck(1, KERNEL_STAR).tolerance_key == "condition_iii"
        assert ConditionCheck(1, KERNEL_STAR).name == "condition_iii_order1"


class TestZeroOperator:
    def test_every_check_passes(self, zero_pipeline, basis, config):
        env, split, assignment, model = zero_pipeline
        report = run_all(env, split, assignment, model, basis, config)

        failed = [r['name'] for r in report['records'] if not r['passed']]
        assert failed == []
        assert report['passed']
        assert report['summary']['failed'] == 0
        assert report['summary']['total'] == len(report['records'])

    def test_report_is_deterministic(self, zero_pipeline, basis, config):
        env, split, assignment, model = zero_pipeline
        checks = algebraic_checks()

        first = format_report(run_all(env, split, assignment, model, basis, config, checks))
        second = format_report(run_all(env, split, assignment, model, basis, config, checks))
        assert first == second
        assert first.splitlines()[-1].endswith("PASS")


class TestRankOne:
    def test_algebraic_checks_pass(self, rank_one_pipeline, basis, config):
        env, split, assignment, model = rank_one_pipeline
        report = run_all(env, split, assignment, model, basis, config, algebraic_checks())

        assert [r['name'] for r in report['records'] if not r['passed']] == []

    def test_condition_record(self, rank_one_pipeline, basis):
        _, _, _, model = rank_one_pipeline
        record = check_condition_ii(model, basis, 0, np.linspace(-5.0, 5.0, 501))

        assert record['name'] == "condition_ii_order0"
        assert record['passed']
        assert 0.0 < record['residual'] <= 1.0

    def test_condition_record_for_adjoint(self, rank_one_pipeline, basis):
        _, _, _, model = rank_one_pipeline
        record = check_condition_ii(model, basis, 1, np.linspace(-5.0, 5.0, 501), KERNEL_STAR)

        assert record['name'] == "condition_iii_order1"
        assert record['passed']


class TestRankTwo:
    def test_series_are_populated(self, rank_two_pipeline):
        _, (env, _, assignment, model) = rank_two_pipeline

        assert env.dim == 8
        assert assignment.v_indices == (3,)
        assert assignment.x_indices == (4, 5, 6, 7)
        assert len(model.P_terms) == 3
        assert len(model.F_terms) == 1
        assert len(model.Ftilde_terms) == 1

    def test_kernel_is_nonzero(self, rank_two_pipeline, basis):
        _, (_, _, _, model) = rank_two_pipeline
        points = np.linspace(-4.0, 4.0, 17)

        assert np.max(np.abs(kernel_grid(model, basis, points, points))) > 1e-6

    def test_every_default_check_passes(self, rank_two_pipeline, basis, config):
        seed, (env, split, assignment, model) = rank_two_pipeline
        report = run_all(env, split, assignment, model, basis, replace(config, seed=seed))

        failed = [(r['name'], r['residual'], r['detail']) for r in report['records'] if not r['passed']]
        assert failed == []
        assert report['summary'] == {'total': 29, 'passed': 29, 'failed': 0}
        assert [r['name'] for r in report['records']] == [c.name for c in get_default_checks(2)]


class TestFaults:
    def test_swapped_u_rows_fail_consistency(self, fixtures_dir, basis, config):
        env = load_operator(fixtures_dir / "corrupted_u.json")
        service = PipelineService(env, config, basis=basis, checks=[UnitarityCheck(), AssignmentConsistencyCheck()])
        report = service.verify()

        by_name = {r['name']: r for r in report['records']}
        assert by_name['unitarity']['passed']
        assert not by_name['assignment_consistency']['passed']
        assert not report['passed']
        assert report['summary'] == {'total': 2, 'passed': 1, 'failed': 1}

    def test_scaled_p_coefficient_fails_decomposition(self, fixtures_dir, basis, config):
        env = load_operator(fixtures_dir / "rank_one.json")
        env = replace(env, fault={'scale_p_coefficient': [0, 3, 2.0]})
        service = PipelineService(env, config, basis=basis, checks=[DecompositionCheck()])

        record = service.verify()['records'][0]
        assert record['name'] == "decomposition"
        assert not record['passed']
        assert record['residual'] > 1e-3


class TestRunner:
    def test_raising_check_is_recorded(self, zero_pipeline, basis, config):
        env, split, assignment, model = zero_pipeline
        report = run_all(env, split, assignment, model, basis, config, [RaisingCheck(), UnitarityCheck()])

        raising, unitarity = report['records']
        assert not raising['passed']
        assert raising['residual'] == FAILED_RESIDUAL
        assert "boom" in raising['detail']
        assert unitarity['passed']
        assert report['summary'] == {'total': 2, 'passed': 1, 'failed': 1}

    def test_non_finite_residual_fails(self, zero_pipeline, basis, config):
        env, split, assignment, model = zero_pipeline
        record = run_all(env, split, assignment, model, basis, config, [NanCheck()])['records'][0]

        assert not record['passed']
        assert record['residual'] == FAILED_RESIDUAL

    def test_condition_checks_skip_orders_above_i_max(self, zero_pipeline, basis, config):
        env, split, assignment, model = zero_pipeline
        report = run_all(env, split, assignment, model, basis, config, [ConditionCheck(5)])

        assert report['records'] == []
        assert report['passed']

    def test_tolerance_override(self, zero_pipeline, basis, config):
        env, split, assignment, model = zero_pipeline
        config.tolerances['unitarity'] = 0.5
        record = run_all(env, split, assignment, model, basis, config, [UnitarityCheck()])['records'][0]

        assert record['bound'] == 0.5

    def test_format_report(self):
        report = {
            'records': [
                {'name': "unitarity", 'bound': 0.0, 'residual': 0.0, 'passed': True, 'runtime': 0.1, 'detail': None},
                {'name': "summability", 'bound': 0.0, 'residual': 2.5, 'passed': False, 'runtime': 0.2, 'detail': "x"},
            ],
            'passed': False,
            'summary': {'total': 2, 'passed': 1, 'failed': 1},
        }

        assert format_report(report).splitlines() == [
            "CHECK unitarity residual=0.000000e+00 bound=0.000000e+00 PASS",
            "CHECK summability residual=2.500000e+00 bound=0.000000e+00 FAIL",
            "SUMMARY passed=1 failed=1 total=2 FAIL",
        ]


class TestContext:
    def test_rng_is_seeded_per_name(self, zero_pipeline, basis, config):
        env, split, assignment, model = zero_pipeline
        ctx = VerificationContext(env, split, assignment, model, basis, config)

        assert ctx.rng("a").random() == ctx.rng("a").random()
        assert ctx.rng("a").random() != ctx.rng("b").random()

    def test_frame_scale(self, rank_one_pipeline, basis, config):
        env, split, assignment, model = rank_one_pipeline
        ctx = VerificationContext(env, split, assignment, model, basis, config)

        # coarsest slot is label 29 at j = -3
        assert ctx.frame_scale == 8.0
        assert ctx.frame_points(5).min() == pytest.approx(-config.frame_outer * 8.0)
        assert ctx.core_points(3).tolist() == [-config.core_extent * 8.0, 0.0, config.core_extent * 8.0]
