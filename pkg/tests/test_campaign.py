import numpy as np
import pytest

from src.evaluation.campaign import CampaignConfig, aggregate_records, run_campaign, run_campaign_config
from src.evaluation.presets import PRESETS, get_preset
from src.evaluation.tuning import TuningGrid
from src.models import Regularizer, SolverConfig
from src.synthetic import SamplingScheme, ScenarioSpec
from src.utils.file_parser import write_frame

TINY_GRID = TuningGrid(
    lambda_multipliers=[1e-2, 1e-3],
    a_values=[1.0, 10.0],
    fixed=SolverConfig(lam=1.0, max_iters=150),
)


def _scenario(seed=3, snr_db=10.0):
    return ScenarioSpec(
        m1=15, m2=15, r=2, scheme=SamplingScheme.S1, sampling_ratio=0.5, snr_db=snr_db, seed=seed
    )


def test_single_trial_aggregate():
    result = run_campaign([_scenario()], [Regularizer.TL1], trials=1, grid=TINY_GRID)
    assert len(result.records) == 1
    record = result.records[0]
    aggregate = result.aggregates[0]
    assert record.trial == 1
    assert aggregate.mean_relative_error == record.relative_error
    assert aggregate.std_relative_error == 0.0
    assert aggregate.trials == 1


def test_records_cover_every_cell():
    scenarios = [_scenario(seed=3), _scenario(seed=4, snr_db=None)]
    result = run_campaign(scenarios, [Regularizer.TL1, Regularizer.NUCLEAR], trials=2, grid=TINY_GRID)
    assert len(result.records) == 2 * 2 * 2
    assert len(result.aggregates) == 4
    assert {(a.scenario, a.method) for a in result.aggregates} == {
        (s.label, m) for s in scenarios for m in ("tl1", "nuclear")
    }
    assert all(np.isfinite(r.relative_error) for r in result.records)


def test_tuned_config_frozen_across_trials():
    result = run_campaign([_scenario()], [Regularizer.TL1], trials=3, grid=TINY_GRID)
    multipliers = {r.lambda_multiplier for r in result.records}
    a_values = {r.a for r in result.records}
    assert len(multipliers) == 1 and len(a_values) == 1
    assert len({r.seed for r in result.records}) == 3


def test_rerun_is_byte_identical(tmp_path):
    campaign = CampaignConfig(scenarios=[_scenario()], methods=[Regularizer.TL1], trials=2, grid=TINY_GRID)
    first = write_frame(tmp_path / "first.csv", run_campaign_config(campaign).records_frame())
    second = write_frame(tmp_path / "second.csv", run_campaign_config(campaign).records_frame())
    assert first.read_bytes() == second.read_bytes()
    assert "seconds" not in first.read_text().splitlines()[0].split(",")


def test_workers_do_not_change_results():
    campaign = CampaignConfig(scenarios=[_scenario()], methods=[Regularizer.NUCLEAR], trials=3, grid=TINY_GRID)
    serial = run_campaign_config(campaign, workers=1).records_frame()
    parallel = run_campaign_config(campaign, workers=2).records_frame()
    assert serial.equals(parallel)


def test_aggregate_uses_population_std():
    result = run_campaign([_scenario()], [Regularizer.NUCLEAR], trials=3, grid=TINY_GRID)
    errors = [r.relative_error for r in result.records]
    aggregate = aggregate_records(result.records, {})[0]
    assert aggregate.std_relative_error == pytest.approx(float(np.std(errors)))
    assert np.isnan(aggregate.tuning_score)


def test_metadata_echoes_configuration():
    result = run_campaign([_scenario()], [Regularizer.TL1], trials=1, grid=TINY_GRID)
    assert result.metadata["trials"] == 1
    assert result.metadata["grid"]["fixed"]["lambda"] == 1.0
    assert len(result.metadata["tuning"]) == 1


def test_rejects_zero_trials():
    with pytest.raises(ValueError):
        run_campaign([_scenario()], [Regularizer.TL1], trials=0, grid=TINY_GRID)


class TestPresets:
    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_builds(self, name):
        campaign = get_preset(name)
        assert campaign.scenarios
        assert len({s.label for s in campaign.scenarios}) == len(campaign.scenarios)

    def test_scheme_table_rows(self):
        campaign = get_preset("scheme2")
        assert len(campaign.scenarios) == 8
        assert {s.scheme for s in campaign.scenarios} == {SamplingScheme.S2}

    def test_rank_preset_fixes_a(self):
        assert get_preset("rank").grid.a_values == [100.0]

    def test_unknown(self):
        with pytest.raises(KeyError):
            get_preset("nope")
