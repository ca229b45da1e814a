"""wardlab: finite-horizon verdicts for statistical and half quasi-Cauchy sequence classes."""

from .catalogue import GOLDEN_MEAN
from .classifiers import (
    SEQUENCE_CLASSES,
    ClassReport,
    classify,
    half_stat_qc_verdict,
    slowly_oscillating_verdict,
    stat_downward_hqc_verdict,
    stat_qc_verdict,
    stat_upward_hqc_verdict,
)
from .compactness import (
    REALS,
    GeneratedSet,
    Interval,
    IntervalUnion,
    PointSet,
    ascending_witness,
    bounded,
    bounded_above,
    bounded_below,
    descending_witness,
    extract_stat_upward_hqc_subsequence,
    parse_set,
    stat_downward_compact,
    stat_upward_compact,
    witness_sequence,
)
from .continuity import (
    FunctionSequence,
    FunctionUnderTest,
    implication_lattice_report,
    interleave_continuity_check,
    preservation_verdict,
    three_sum_decomposition_check,
    uniform_continuity_witness_search,
    uniform_limit_preservation,
)
from .density import AnalysisConfig, IndexPredicate, Status, Verdict, counting_density, density_limit_verdict
from .errors import (
    CatalogueError,
    ConfigError,
    ContractError,
    DomainError,
    EvaluationError,
    ExtractionRefused,
    NoWitnessError,
    ParameterError,
    ParseError,
    PreconditionError,
    RangeError,
    UndecidableError,
    WardlabError,
)
from .methods import (
    LacunaryScheme,
    fibonacci_scheme,
    lacunary_statistical_verdict,
    ntheta_verdict,
    ordinary_limit,
    regularity_spotcheck,
    statistical_limit_estimate,
    statistical_limit_verdict,
)
from .sequences import IndexMap, Prefix, Sequence, forward_difference, materialize, reflect, subsequence

__version__ = "0.1.0"

__all__ = [
    "GOLDEN_MEAN",
    "SEQUENCE_CLASSES",
    "ClassReport",
    "classify",
    "half_stat_qc_verdict",
    "slowly_oscillating_verdict",
    "stat_downward_hqc_verdict",
    "stat_qc_verdict",
    "stat_upward_hqc_verdict",
    "REALS",
    "GeneratedSet",
    "Interval",
    "IntervalUnion",
    "PointSet",
    "ascending_witness",
    "bounded",
    "bounded_above",
    "bounded_below",
    "descending_witness",
    "extract_stat_upward_hqc_subsequence",
    "parse_set",
    "stat_downward_compact",
    "stat_upward_compact",
    "witness_sequence",
    "FunctionSequence",
    "FunctionUnderTest",
    "implication_lattice_report",
    "interleave_continuity_check",
    "preservation_verdict",
    "three_sum_decomposition_check",
    "uniform_continuity_witness_search",
    "uniform_limit_preservation",
    "AnalysisConfig",
    "IndexPredicate",
    "Status",
    "Verdict",
    "counting_density",
    "density_limit_verdict",
    "LacunaryScheme",
    "fibonacci_scheme",
    "lacunary_statistical_verdict",
    "ntheta_verdict",
    "ordinary_limit",
    "regularity_spotcheck",
    "statistical_limit_estimate",
    "statistical_limit_verdict",
    "IndexMap",
    "Prefix",
    "Sequence",
    "forward_difference",
    "materialize",
    "reflect",
    "subsequence",
    "CatalogueError",
    "ConfigError",
    "ContractError",
    "DomainError",
    "EvaluationError",
    "ExtractionRefused",
    "NoWitnessError",
    "ParameterError",
    "ParseError",
    "PreconditionError",
    "RangeError",
    "UndecidableError",
    "WardlabError",
]
