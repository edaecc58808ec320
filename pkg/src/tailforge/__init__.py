"""Heavy-tailed claim analysis: extreme value estimators under truncation,
tempering and censoring, spliced global loss models, and excess-of-loss
premium computation."""

from .bivariate import (
    BivariateSample,
    PickandsCurve,
    bivariate_pure_premium,
    margin_transform,
    pickands_curve,
    pickands_estimate,
    reinsurer_payment,
)
from .censoring import (
    MeanExcessCurve,
    SurvivalCurve,
    censored_hill,
    censored_moment,
    censored_pareto_qq,
    censored_path,
    censored_quantile,
    kaplan_meier,
    mean_excess_km,
    worms_xi,
)
from .empirics import (
    CensoredSample,
    RelativeExcesses,
    TailPath,
    hill,
    hill_path,
    mean_excess_empirical,
    moment_estimator,
    pareto_qq,
    relative_excesses,
)
from .errors import ConvergenceError, DataError
from .premiums import LayerSpec, cte, layer_premium, me_stoploss, pure_premium, var
from .regression import (
    CovariateSample,
    KernelSpec,
    conditional_km,
    local_censored_qq,
    local_quantile,
    local_worms_xi,
)
from .splicing import (
    CompositeModel,
    GeneralizedParetoTail,
    MixedErlang,
    composite_density,
    composite_from_json,
    composite_quantile,
    composite_survival,
    composite_to_json,
    me_cdf,
    me_density,
    me_em_fit,
    splice_fit,
)
from .tempering import (
    TemperedFit,
    tempered_adaptive_k,
    tempered_loglik,
    tempered_mle,
    tempered_return_level,
    tempered_tail_prob,
    tempered_wls,
)
from .truncation import (
    TruncatedFit,
    fit_truncated,
    truncated_endpoint,
    truncated_odds,
    truncated_pareto_qq,
    truncated_path,
    truncated_quantile,
    truncated_xi,
    truncation_test,
)

__version__ = "0.1.0"
