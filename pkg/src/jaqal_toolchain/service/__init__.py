"""HTTP service exposing the toolchain pipeline."""

from .app import app, create_app

__all__ = ["app", "create_app"]
