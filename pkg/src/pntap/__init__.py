"""Short-interval prime number theorem toolkit for arithmetic progressions."""

from __future__ import annotations

__version__ = "0.1.0"
