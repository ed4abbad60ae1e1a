"""TSP prompting evaluation harness: exact solvers, prompt templates,
response validation and the LLM-vs-optimal metrics, backed by the C++ core."""

from ._core import (
    Instance,
    build_prompt,
    distance_matrix,
    euclidean,
    export_finetune,
    format_number,
    gap,
    generate_corpus,
    parse_order,
    randomness_score,
    run_eval,
    sample_random_costs,
    self_ensemble,
    solve,
    tour_cost,
    validate_order,
    validate_response,
    write_report,
)

__version__ = "0.1.0"

__all__ = [
    "Instance",
    "build_prompt",
    "distance_matrix",
    "euclidean",
    "export_finetune",
    "format_number",
    "gap",
    "generate_corpus",
    "parse_order",
    "randomness_score",
    "run_eval",
    "sample_random_costs",
    "self_ensemble",
    "solve",
    "tour_cost",
    "validate_order",
    "validate_response",
    "write_report",
]
