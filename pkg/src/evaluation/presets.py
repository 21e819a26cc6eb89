"""
Built-in campaign presets for the standard simulation grids
"""

from typing import Callable, Dict, List, Optional

from ..synthetic import SamplingScheme, ScenarioSpec
from .campaign import CampaignConfig

RANK_SR_PAIRS = [(5, 0.1), (5, 0.2), (10, 0.1), (10, 0.2)]
TABLE_SIZES = [300, 500]


def _rows(
    sizes: List[int], scheme: SamplingScheme, snr_db: Optional[float], base_seed: int
) -> List[ScenarioSpec]:
    scenarios = []
    for m in sizes:
        for r, sr in RANK_SR_PAIRS:
            scenarios.append(
                ScenarioSpec(
                    m1=m, m2=m, r=r, scheme=scheme, sampling_ratio=sr, snr_db=snr_db,
                    seed=base_seed + len(scenarios),
                )
            )
    return scenarios


def scheme_table(scheme: SamplingScheme, snr_db: Optional[float] = 10.0, trials: int = 10) -> CampaignConfig:
    """All (m, r, SR) rows of one scheme table"""
    return CampaignConfig(
        scenarios=_rows(TABLE_SIZES, scheme, snr_db, base_seed=100 * int(scheme)),
        trials=trials,
    )


def large_single_trial(snr_db: Optional[float]) -> CampaignConfig:
    """1000 x 1000 rows for every scheme, one realization each"""
    scenarios = []
    for scheme in SamplingScheme:
        scenarios.extend(_rows([1000], scheme, snr_db, base_seed=1000 + 10 * int(scheme)))
    return CampaignConfig(scenarios=scenarios, trials=1)


def rank_comparison(trials: int = 1) -> CampaignConfig:
    """500 x 500, r = 5, Scheme 2, SR = 0.2, SNR = 10 with TL1 at a = 100"""
    scenario = ScenarioSpec(
        m1=500, m2=500, r=5, scheme=SamplingScheme.S2, sampling_ratio=0.2, snr_db=10.0, seed=500
    )
    campaign = CampaignConfig(scenarios=[scenario], trials=trials)
    return campaign.model_copy(update={"grid": campaign.grid.model_copy(update={"a_values": [100.0]})})


def table1_row(trials: int = 10) -> CampaignConfig:
    """300 x 300, r = 5, Scheme 1, SR = 0.1, SNR = 10"""
    scenario = ScenarioSpec(
        m1=300, m2=300, r=5, scheme=SamplingScheme.S1, sampling_ratio=0.1, snr_db=10.0, seed=1
    )
    return CampaignConfig(scenarios=[scenario], trials=trials)


def table2_row(trials: int = 10) -> CampaignConfig:
    """300 x 300, r = 5, Scheme 2, SR = 0.2, SNR = 10"""
    scenario = ScenarioSpec(
        m1=300, m2=300, r=5, scheme=SamplingScheme.S2, sampling_ratio=0.2, snr_db=10.0, seed=2
    )
    return CampaignConfig(scenarios=[scenario], trials=trials)


PRESETS: Dict[str, Callable[[], CampaignConfig]] = {
    "scheme1": lambda: scheme_table(SamplingScheme.S1),
    "scheme2": lambda: scheme_table(SamplingScheme.S2),
    "scheme3": lambda: scheme_table(SamplingScheme.S3),
    "scheme1-snr20": lambda: scheme_table(SamplingScheme.S1, snr_db=20.0),
    "scheme2-snr20": lambda: scheme_table(SamplingScheme.S2, snr_db=20.0),
    "scheme3-snr20": lambda: scheme_table(SamplingScheme.S3, snr_db=20.0),
    "large-noiseless": lambda: large_single_trial(None),
    "large-snr10": lambda: large_single_trial(10.0),
    "rank": rank_comparison,
    "table1-row": table1_row,
    "table2-row": table2_row,
}


def get_preset(name: str) -> CampaignConfig:
    if name not in PRESETS:
        raise KeyError(f"Unknown preset '{name}'. Available: {', '.join(sorted(PRESETS))}")
    return PRESETS[name]()
