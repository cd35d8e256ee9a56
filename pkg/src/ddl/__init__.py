"""Modal defeasible deontic logic with obligations, strong permissions and reparation chains."""

from __future__ import annotations

__version__ = "0.1.0"
