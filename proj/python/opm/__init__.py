from ._core import (
    BanditPosterior,
    ConditionalGaussianOPM,
    DomainError,
    GaussianPossibility,
    ModelMatrices,
    event_credibility,
    linear_transform,
    max_credible_reward,
    posterior_eval,
    predict,
    recover_joint,
    simulate,
    sum_independent,
    update,
    validate,
)

__all__ = [
    "BanditPosterior",
    "ConditionalGaussianOPM",
    "DomainError",
    "GaussianPossibility",
    "ModelMatrices",
    "event_credibility",
    "linear_transform",
    "max_credible_reward",
    "posterior_eval",
    "predict",
    "recover_joint",
    "simulate",
    "sum_independent",
    "update",
    "validate",
]
