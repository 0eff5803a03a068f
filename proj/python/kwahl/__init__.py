"""Wahl chains, rational blow-down constructions and catalogue checks."""

import os as _os
from pathlib import Path as _Path

_bundled = _Path(__file__).with_name("data")
if "KWAHL_DATA" not in _os.environ and (_bundled / "a0.json").is_file():
    _os.environ["KWAHL_DATA"] = str(_bundled)

from ._kwahl import (  # noqa: E402
    ParseError,
    blow_down_compose,
    default_data_dir,
    discrepancies,
    fibonacci,
    geography,
    hj_eval,
    hj_expand,
    infer_record,
    is_wahl,
    length_bound,
    load_records,
    meridian_exponents,
    parse_record,
    same_wahl,
    verify,
    wahl_chains,
)

__all__ = [
    "ParseError",
    "blow_down_compose",
    "default_data_dir",
    "discrepancies",
    "fibonacci",
    "geography",
    "hj_eval",
    "hj_expand",
    "infer_record",
    "is_wahl",
    "length_bound",
    "load_records",
    "meridian_exponents",
    "parse_record",
    "same_wahl",
    "verify",
    "wahl_chains",
]
