"""Line-oriented certificate text.

Each line is ``path/to/key = <json value>``.  Values are integers, strings,
booleans, null or lists of those; floats are rejected so that the text is
byte-stable.  Nested dictionaries are flattened in insertion order.
"""

from __future__ import annotations

import hashlib
import json

FORMAT = "modmethod-certificate"
SCHEMA = 1
SEP = " = "


class CertificateParseError(ValueError):
    pass


def _check_value(value, key: str):
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return
    if isinstance(value, float):
        raise TypeError(f"{key}: floats are not allowed in certificates")
    if isinstance(value, (list, tuple)):
        for v in value:
            _check_value(v, key)
        return
    raise TypeError(f"{key}: unsupported value type {type(value).__name__}")


def flatten(tree: dict, prefix: str = "") -> list[tuple[str, object]]:
    out = []
    for k, v in tree.items():
        k = str(k)
        if not k or "/" in k or SEP.strip() in k or "\n" in k:
            raise ValueError(f"bad certificate key {k!r}")
        key = f"{prefix}/{k}" if prefix else k
        if isinstance(v, dict):
            out.extend(flatten(v, key))
        else:
            _check_value(v, key)
            out.append((key, v))
    return out


def unflatten(entries) -> dict:
    root: dict = {}
    for key, value in entries:
        node = root
        parts = key.split("/")
        for p in parts[:-1]:
            nxt = node.setdefault(p, {})
            if not isinstance(nxt, dict):
                raise CertificateParseError(f"{key}: '{p}' is both a value and a section")
            node = nxt
        if parts[-1] in node:
            raise CertificateParseError(f"duplicate key {key}")
        node[parts[-1]] = value
    return root


def _dump(value) -> str:
    if isinstance(value, tuple):
        value = list(value)
    return json.dumps(value, ensure_ascii=True, separators=(", ", ": "))


def serialize(entries) -> str:
    return "".join(f"{k}{SEP}{_dump(v)}\n" for k, v in entries)


def parse(text: str) -> list[tuple[str, object]]:
    entries = []
    seen = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        if SEP not in line:
            raise CertificateParseError(f"line {lineno}: expected 'key = value'")
        key, raw = line.split(SEP, 1)
        if key in seen:
            raise CertificateParseError(f"line {lineno}: duplicate key {key}")
        seen.add(key)
        try:
            value = json.loads(raw, parse_float=_reject_float)
        except (json.JSONDecodeError, CertificateParseError) as exc:
            raise CertificateParseError(f"line {lineno}: bad value for {key}: {exc}") from None
        entries.append((key, _tuplify(value)))
    if not entries or entries[0] != ("format", FORMAT):
        raise CertificateParseError("missing 'format' header line")
    return entries


def _reject_float(text):
    raise CertificateParseError(f"float {text} in certificate")


def _tuplify(v):
    if isinstance(v, list):
        return [_tuplify(x) for x in v]
    if isinstance(v, dict):
        raise CertificateParseError("objects are not allowed as values")
    return v


def _normal(v):
    if isinstance(v, (list, tuple)):
        return [_normal(x) for x in v]
    return v


def first_divergence(expected, actual) -> tuple[str, object, object] | None:
    """The first key where two entry lists differ, with both values."""
    exp = [(k, _normal(v)) for k, v in expected]
    act = [(k, _normal(v)) for k, v in actual]
    for (ke, ve), (ka, va) in zip(exp, act):
        if ke != ka:
            return (f"{ke} / {ka}", ke, ka)
        if ve != va:
            return (ke, ve, va)
    if len(exp) != len(act):
        longer = exp if len(exp) > len(act) else act
        k = longer[min(len(exp), len(act))][0]
        return (k, "present" if longer is exp else "missing", "missing" if longer is exp else "present")
    return None


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()
