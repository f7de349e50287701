"""Property-graph extraction from relational tables with join-sharing optimization.

The heavy lifting lives in the compiled extension; this package re-exports its
surface: synthetic data generation, model parsing and validation, plan
inspection, and extraction in the four sharing modes (naive, js-oj-only,
js-mv-only, hybrid).
"""

from relgraph._core import (
    Database,
    GraphModel,
    ModelParseError,
    database_checksum,
    demo_model_text,
    extract,
    generate_synthetic,
    load_catalog,
    parse_model,
    plan,
    validate,
    workload_model_text,
    write_database_csvs,
)

__all__ = [
    "Database",
    "GraphModel",
    "ModelParseError",
    "database_checksum",
    "demo_model_text",
    "extract",
    "generate_synthetic",
    "load_catalog",
    "parse_model",
    "plan",
    "validate",
    "workload_model_text",
    "write_database_csvs",
]

__version__ = "0.1.0"
