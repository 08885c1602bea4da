"""
Runtime settings (tolerances, enumeration limits). Instance documents are
loaded through drsubmod.config.repository.
"""

from .settings import Settings, settings

__all__ = ["Settings", "settings"]
