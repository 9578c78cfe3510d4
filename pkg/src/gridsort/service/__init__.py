"""CLI and local HTTP service binding the engine modules together."""

from .api import create_app
from .pipeline import IndexResult, IndexStats, index_corpus, index_records
from .session import Session

__all__ = [
    "IndexResult",
    "IndexStats",
    "Session",
    "create_app",
    "index_corpus",
    "index_records",
]
