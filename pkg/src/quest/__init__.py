"""Code quality scoring and iterative improvement driven by chat models.

Ten quality dimensions, five yes/no/not-applicable statements each; verdicts
sum to dimension scores in [-5, 5], the overall score is their mean.  The
optimizer feeds assessments back to the model, validates each candidate and
keeps only strict improvements.  Recorded transcripts make every run
replayable bit for bit without network access.
"""

from .analysis import (
    CorrelationResult,
    DeltaSeries,
    RpiResult,
    RunSummary,
    correlation_report,
    delta_series,
    pearson,
    rpi,
    spearman,
    summarize_runs,
    trajectory,
)
from .catalog import (
    DIMENSION_NAMES,
    QualityDimension,
    StatementCatalog,
    default_catalog,
    load_statement_catalog,
)
from .errors import QuestError, ToolUnavailable, UnsupportedLanguage
from .evaluator import DimensionUnavailable, Evaluator, EvaluatorError
from .gateway import (
    ChatExchange,
    ChatRequest,
    LlmGateway,
    ModelParams,
    Transcript,
    TranscriptGap,
    canonical_digest,
)
from .models import (
    CodeAssessment,
    CodeUnit,
    DimensionAssessment,
    IterationOutcome,
    IterationStatus,
    OptimizationRun,
    OptimizerConfig,
    ValidationResult,
    Verdict,
    dimension_score,
    overall_score,
    verdict_value,
)
from .optimizer import OptimizationAborted, Optimizer, accept_candidate
from .proxies import ProxyReport, ProxySettings, proxy_report
from .validation import ValidationSettings, check_syntax, run_tests, validate_candidate

__version__ = "0.1.0"

__all__ = [
    "CorrelationResult",
    "DeltaSeries",
    "RpiResult",
    "RunSummary",
    "correlation_report",
    "delta_series",
    "pearson",
    "rpi",
    "spearman",
    "summarize_runs",
    "trajectory",
    "DIMENSION_NAMES",
    "QualityDimension",
    "StatementCatalog",
    "default_catalog",
    "load_statement_catalog",
    "QuestError",
    "ToolUnavailable",
    "UnsupportedLanguage",
    "DimensionUnavailable",
    "Evaluator",
    "EvaluatorError",
    "ChatExchange",
    "ChatRequest",
    "LlmGateway",
    "ModelParams",
    "Transcript",
    "TranscriptGap",
    "canonical_digest",
    "CodeAssessment",
    "CodeUnit",
    "DimensionAssessment",
    "IterationOutcome",
    "IterationStatus",
    "OptimizationRun",
    "OptimizerConfig",
    "ValidationResult",
    "Verdict",
    "dimension_score",
    "overall_score",
    "verdict_value",
    "OptimizationAborted",
    "Optimizer",
    "accept_candidate",
    "ProxyReport",
    "ProxySettings",
    "proxy_report",
    "ValidationSettings",
    "check_syntax",
    "run_tests",
    "validate_candidate",
    "__version__",
]
