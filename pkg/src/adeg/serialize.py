"""Deterministic JSON for witnesses, reports and certificates.

Rationals are written as strings (``"3/7"``), certified reals as their two
endpoints, and keys are sorted, so equal inputs give byte-identical files.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import tempfile
from fractions import Fraction
from typing import Any, Mapping, Optional, Sequence

from .core import Check, InputError, all_pass, point_from_string, point_to_string
from .duals import DualWitness, LevelWitness, Witness
from .intervals import CertifiedReal

FORMAT = "adeg-witness/1"


def parse_fraction(text) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational number: {text!r}") from exc


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, CertifiedReal):
        return {"lo": str(obj.lo), "hi": str(obj.hi), "approx": f"{float(obj.mid):.12g}"}
    if isinstance(obj, Check):
        out = {"name": obj.name, "passed": obj.passed, "detail": obj.detail}
        if obj.informative:
            out["informative"] = True
        return out
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in items]
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the same directory and rename over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# witnesses


def witness_to_dict(psi: Witness) -> dict:
    if isinstance(psi, LevelWitness):
        masses = sorted(([list(t), str(v)] for t, v in psi.masses.items()), key=lambda e: e[0])
        return {
            "format": FORMAT,
            "type": "level",
            "num_blocks": psi.num_blocks,
            "block_size": psi.block_size,
            "masses": masses,
        }
    entries = {point_to_string(x, psi.n): str(v) for x, v in sorted(psi.entries.items())}
    return {"format": FORMAT, "type": "explicit", "n": psi.n, "entries": entries}


def witness_from_dict(data: Mapping) -> Witness:
    try:
        if data.get("format") != FORMAT:
            raise InputError(f"unknown witness format {data.get('format')!r}")
        if data["type"] == "level":
            masses = {tuple(int(v) for v in t): parse_fraction(m) for t, m in data["masses"]}
            return LevelWitness(int(data["num_blocks"]), int(data["block_size"]), masses)
        if data["type"] == "explicit":
            n = int(data["n"])
            entries = {}
            for s, v in data["entries"].items():
                if len(s) != n:
                    raise InputError(f"point {s!r} has the wrong length")
                entries[point_from_string(s)] = parse_fraction(v)
            return DualWitness(n, entries)
        raise InputError(f"unknown witness type {data['type']!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed witness: {exc}") from exc


def dump_witness(psi: Witness) -> str:
    return dumps(witness_to_dict(psi))


def load_witness(text: str) -> Witness:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed witness JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("witness JSON must be an object")
    return witness_from_dict(data)


# ---------------------------------------------------------------------------
# certificates


def verdict(checks: Sequence[Check]) -> str:
    """``certified`` when every deciding check passed; ``informative-only`` when none decides."""
    deciding = [c for c in checks if not c.informative]
    if not deciding:
        return "informative-only"
    return "certified" if all_pass(checks) else "failed"


def certificate(
    claim: Mapping[str, Any],
    checks: Sequence[Check],
    parameters: Optional[Mapping[str, Any]] = None,
    witness_text: Optional[str] = None,
) -> dict:
    return {
        "claim": to_jsonable(claim),
        "checks": [to_jsonable(c) for c in checks],
        "parameters": to_jsonable(parameters or {}),
        "witness_sha256": digest(witness_text) if witness_text is not None else None,
        "verdict": verdict(checks),
    }
