"""HTTP face of the decision engine."""

from .app import create_app, load_bundles, resolve_bind

__all__ = ["create_app", "load_bundles", "resolve_bind"]
