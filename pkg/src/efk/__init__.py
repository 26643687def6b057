"""Country-product export network analytics.

Builds the binary competitive-export matrix from trade data, ranks
countries and products with the nonlinear fitness/complexity fixed point
and with eigenvector complexity indices, runs product-removal
counterfactuals, quantifies nestedness, and forecasts country
trajectories in the GDP-per-capita / fitness plane with the method of
analogues. One CLI (``efk``) orchestrates everything.
"""

from .counterfactual import (
    CounterfactualOutcome,
    RankingComparison,
    coalfish_experiment,
    compare_rankings,
    restrict_country,
)
from .dynamics import (
    AnalogueForecaster,
    BacktestReport,
    ForecastResult,
    RegimeMap,
    TrajectoryPoint,
    TrajectorySet,
    analogue_forecast,
    backtest,
    build_trajectories,
    regime_map,
)
from .eci import (
    EciEigen,
    EigenSolution,
    ReflectionsTrace,
    country_similarity_matrix,
    eci_eigen,
    eci_residual,
    method_of_reflections,
    product_similarity_matrix,
)
from .errors import (
    DegenerateSpectrum,
    DuplicateSample,
    EfkError,
    EmptyInput,
    EmptyMatrix,
    EntityMismatch,
    InsufficientAnalogues,
    InvalidParameter,
    LengthMismatch,
    MalformedRecord,
    NonConvergence,
    NonPositiveGdp,
    NotCurrentlyExported,
    UnknownEntity,
    ZeroDenominator,
)
from .fitness import FitnessComplexity, FitnessResult, fitness_fixed_point, fitness_step
from .ingest import (
    GdpSeries,
    TradeRecord,
    TradeTable,
    build_trade_table,
    parse_gdp_csv,
    parse_trade_csv,
    write_gdp_csv,
    write_trade_csv,
)
from .matrix import (
    BinaryCPMatrix,
    NestednessReport,
    RcaBinarizer,
    RcaTable,
    binarize,
    is_connected,
    nestedness,
    order_by_scores,
    rca,
)
from .ranking import RankingResult, dense_rank, read_ranking_csv
from .synth import SplitMixStream, SynthSpec, counter_uniform, drift_field, nested_matrix, splitmix64

__version__ = "0.1.0"
