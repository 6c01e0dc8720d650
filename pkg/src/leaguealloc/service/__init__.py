"""FastAPI service exposing the allocation toolkit over HTTP."""

from .app import app

__all__ = ["app"]
