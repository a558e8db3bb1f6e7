"""Dynamic demand management for a multi-compartment parcel locker.

A discrete-event simulator, exact optimization engine, policy library and
reinforcement-learning training harness for the accept/reject and
allocation decisions of a parcel locker with uncertain pickup times.
"""

from .config import (
    ProblemConfig,
    desk_config,
    main_config,
    parse_setting,
    probe_config,
    setting_config,
    small_two_size_config,
)
from .domain import (
    Epoch,
    ExogenousInfo,
    PostDecisionState,
    PreDecisionState,
    RequestType,
    apply_allocation,
    apply_demand_control,
    apply_exogenous,
    classify_epoch,
    reward,
)
from .stochastic import (
    PickupLaw,
    ScenarioStream,
    build_scenario_stream,
    residual_pickup_distribution,
)

__version__ = "0.1.0"
