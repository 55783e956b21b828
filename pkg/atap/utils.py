import io
import csv
import json
import dataclasses

import numpy as np
from typing import Any, Dict, List, Optional


class JSONEncoder(json.JSONEncoder):
    def default(self, o):
        if hasattr(o, "to_dict"):
            return o.to_dict()
        if dataclasses.is_dataclass(o):
            return dataclasses.asdict(o)
        if isinstance(o, complex):
            return {"re": o.real, "im": o.imag}
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, np.generic):
            return o.item()
        if isinstance(o, (set, frozenset)):
            return sorted(o)
        return super().default(o)


def parse_multi_columns(columns: str) -> list:
    if "|" in columns:
        return [c.strip() for c in columns.split("|") if c.strip()]
    else:
        return [c.strip() for c in columns.split(";") if c.strip()]


def parse_complex(text: str) -> complex:
    """``"RE"`` or ``"RE,IM"``."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) > 2 or not all(parts):
        raise ValueError(f"expected RE or RE,IM, got '{text}'")
    re_part = float(parts[0])
    im_part = float(parts[1]) if len(parts) == 2 else 0.0
    return complex(re_part, im_part)


def parse_range(text: str) -> List[int]:
    """``"A..B"`` as the integers A..B inclusive, without 0."""
    try:
        lo, hi = (int(v) for v in text.split(".."))
    except ValueError:
        raise ValueError(f"expected a range A..B, got '{text}'")
    return [k for k in range(lo, hi + 1) if k != 0]


def format_complex(value: Optional[complex], digits: int = 12) -> str:
    if value is None:
        return ""
    value = complex(value)
    if value.imag == 0:
        return f"{value.real:.{digits}g}"
    return f"{value.real:.{digits}g}{value.imag:+.{digits}g}j"


def format_laurent(coeffs: Optional[List[complex]], variable: str = "t") -> str:
    if not coeffs:
        return "0"
    terms = []
    for k, c in enumerate(coeffs):
        if abs(c) == 0:
            continue
        power = "" if k == 0 else (variable if k == 1 else f"{variable}^{k}")
        terms.append(f"({format_complex(c, 8)}){power}")
    return " + ".join(terms)


def record_to_row(record) -> Dict[str, Any]:
    row: Dict[str, Any] = {"m": record.m, "n": record.n}
    for name in ("s", "x", "y", "z"):
        value = getattr(record, name)
        row[f"{name}_re"], row[f"{name}_im"] = value.real, value.imag
    row["riley_residual"] = record.riley_residual
    row["rep_residual"] = record.rep_residual
    row["multiplicity"] = record.multiplicity
    for name in ("A", "B", "C", "quad_mid", "D1", "D2", "torsion_closed", "torsion_limit"):
        value = getattr(record, name)
        row[f"{name}_re"] = "" if value is None else value.real
        row[f"{name}_im"] = "" if value is None else value.imag
    row["delta"] = " ".join(format_complex(c) for c in record.delta or [])
    check = record.crosscheck
    row["crosscheck_pass"] = "" if check is None else check.passed
    row["crosscheck_discrepancy"] = "" if check is None else check.discrepancy
    row["crosscheck_unit_shift"] = "" if check is None else check.unit_shift
    row["crosscheck_sign"] = "" if check is None else check.sign
    row["flags"] = "|".join(record.flags)
    return row


def format_as_csv(records) -> str:
    rows = [record_to_row(record) for record in records]
    if not rows:
        return ""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def format_as_text(record) -> str:
    lines = [
        f"J({2 * record.m},{2 * record.n})  x={format_complex(record.x, 8)}  y={format_complex(record.y, 8)}  z={format_complex(record.z, 8)}"
    ]
    if record.quad_mid is not None:
        mn = record.m * record.n
        lines.append(
            f"  Delta(t) = (t - 1)({mn} t^2 - ({format_complex(record.quad_mid, 8)}) t + {mn}) / ({format_complex(record.D1, 8)})"
        )
    lines.append(f"  Delta(t) = {format_laurent(record.delta)}")
    if record.torsion_closed is not None:
        lines.append(f"  torsion (closed) = {format_complex(record.torsion_closed, 10)}")
    if record.torsion_limit is not None:
        lines.append(f"  torsion (limit)  = {format_complex(record.torsion_limit, 10)}")
    if record.crosscheck is not None:
        verdict = "pass" if record.crosscheck.passed else "FAIL"
        lines.append(
            f"  cross-check {verdict}: discrepancy {record.crosscheck.discrepancy:.3e}, unit {'-' if record.crosscheck.sign < 0 else ''}t^{record.crosscheck.unit_shift}"
        )
    if record.flags:
        lines.append(f"  flags: {', '.join(record.flags)}")
    return "\n".join(lines)


def format_as_json(document: dict) -> str:
    return json.dumps(document, cls=JSONEncoder, indent=2)
