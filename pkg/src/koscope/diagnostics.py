"""Diagnostic records collected alongside pipeline results.

Warnings never abort a run; they are gathered here and end up in the report.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Optional

logger = logging.getLogger("koscope")

_LEVELS = {"info": logging.INFO, "warning": logging.WARNING, "error": logging.ERROR}


@dataclass(frozen=True)
class Diagnostic:
    level: str
    code: str
    message: str
    entry_id: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)


def emit(diagnostics: Optional[list], level: str, code: str, message: str,
         entry_id: Optional[str] = None) -> Diagnostic:
    """Log a diagnostic and append it to ``diagnostics`` when a list is given."""
    diag = Diagnostic(level, code, message, entry_id)
    logger.log(_LEVELS.get(level, logging.WARNING), "%s: %s", code, message)
    if diagnostics is not None:
        diagnostics.append(diag)
    return diag
