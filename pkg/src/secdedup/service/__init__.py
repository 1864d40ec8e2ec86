"""Annotation workbench service: sessions, named clusters, review tagging."""

from .app import create_app
from .store import SessionStore, ServiceError

__all__ = ["create_app", "SessionStore", "ServiceError"]
