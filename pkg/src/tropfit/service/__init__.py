"""HTTP API wrapping the core library (FastAPI + pydantic models)."""

from .app import create_app

__all__ = ["create_app"]
