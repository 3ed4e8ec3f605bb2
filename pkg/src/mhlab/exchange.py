"""JSON exchange format for filtrations and martingales.

    {"probs": [...], "levels": [[[pt, ...], ...], ...],
     "martingales": {"name": [[...], ...]}}

Floats go through ``json`` (``repr``), i.e. the shortest decimal string that
round-trips to the same IEEE-754 double.
"""

from __future__ import annotations

import json

from .filtration import Filtration, Martingale

__all__ = ["filtration_to_dict", "filtration_from_dict", "dump_exchange", "load_exchange"]


def filtration_to_dict(filt: Filtration) -> dict:
    return {"probs": filt.probs.tolist(), "levels": filt.levels_as_lists()}


def filtration_from_dict(doc: dict) -> Filtration:
    return Filtration(doc["probs"], doc["levels"])


def dump_exchange(filt: Filtration, martingales: dict | None = None) -> str:
    doc = filtration_to_dict(filt)
    doc["martingales"] = {name: m.values.tolist() for name, m in (martingales or {}).items()}
    return json.dumps(doc)


def load_exchange(text_or_doc) -> tuple[Filtration, dict]:
    doc = json.loads(text_or_doc) if isinstance(text_or_doc, str) else text_or_doc
    filt = filtration_from_dict(doc)
    mgs = {
        name: Martingale.from_values(filt, vals)
        for name, vals in doc.get("martingales", {}).items()
    }
    return filt, mgs
