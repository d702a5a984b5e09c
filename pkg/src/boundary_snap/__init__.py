"""Record API-boundary interaction snapshots from client tests and diff them
across library versions to surface behavioral breaking changes."""

__version__ = "0.1.0"
