"""Multiple-access, broadcast and relay channels with side information."""
from .bc import (
    BcAuxLaw,
    BcBounds,
    Observation1,
    assemble_joint,
    bc_eval_causal,
    bc_eval_evdm_noncausal,
    bc_eval_steinberg_shamai,
    bc_region_sampled,
    observation1_predicate,
    random_bc_aux,
)
from .mac import (
    MacAuxCode,
    mac_noncausal_inner_sum,
    mac_oracle_grid,
    mac_region_rx_knows,
    mac_strategy_channel,
    mac_sum_capacity_causal,
    mac_sum_objective,
    rx_knows_both,
)
from .region import RateRegion, RegionPoint, pentagon_region
from .relay import (
    DegradednessReport,
    RelayAchiever,
    direct_capacity,
    direct_channel,
    relay_check_degraded,
    relay_degraded_capacity,
    relay_objective,
    relay_oracle_grid,
)
