from ha_quotas.core.errors import (
    FlowNetworkError,
    GuardExceededError,
    HAQuotasError,
    InstanceError,
    MatchingError,
    ParseError,
    QuotaShapeError,
    X3CError,
)
from ha_quotas.core.instance import (
    UNMATCHED,
    Instance,
    Matching,
    ProjectRecord,
    assert_feasible,
    dominates,
    is_feasible,
    is_perfect,
    open_projects,
    popularity_margin,
    rank_of,
    rank_sum,
    unmatched_set,
    validate_instance,
)

__all__ = [
    "UNMATCHED",
    "FlowNetworkError",
    "GuardExceededError",
    "HAQuotasError",
    "Instance",
    "InstanceError",
    "Matching",
    "MatchingError",
    "ParseError",
    "ProjectRecord",
    "QuotaShapeError",
    "X3CError",
    "assert_feasible",
    "dominates",
    "is_feasible",
    "is_perfect",
    "open_projects",
    "popularity_margin",
    "rank_of",
    "rank_sum",
    "unmatched_set",
    "validate_instance",
]
