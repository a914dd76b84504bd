"""Bundled datastore, local cache and remote client for newform data."""

from __future__ import annotations

import json
import logging
import os
import shutil
import tempfile
import threading
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from math import lcm
from pathlib import Path

from ..algebra import IntPoly, is_prime
from ..ellcurve import WeierstrassCurve
from .records import (
    NewformRecord,
    RationalNewformCurve,
    RecordParseError,
    ValidationFailed,
    check_record,
    parse_record,
    serialize_record,
)

log = logging.getLogger(__name__)

URL_ENV = "MODMETHOD_NEWFORM_URL"
CACHE_ENV = "MODMETHOD_CACHE_DIR"
DEFAULT_URL = "https://www.lmfdb.org"
QMAX = 50
INDEX = "index.txt"


class LevelNotAvailable(LookupError):
    pass


class RemoteSchemaMismatch(ValueError):
    pass


class RemoteUnavailable(ConnectionError):
    pass


class CacheCorrupt(ValueError):
    pass


@dataclass
class LevelData:
    level: int
    forms: list[NewformRecord]
    curves: list[RationalNewformCurve] = field(default_factory=list)
    source: str = "bundled"

    def form(self, label: str) -> NewformRecord:
        for f in self.forms:
            if f.label == label:
                return f
        raise KeyError(label)

    def curve_for(self, form_label: str) -> RationalNewformCurve | None:
        for c in self.curves:
            if c.form_label == form_label:
                return c
        return None


@dataclass
class IngestReport:
    level: int
    labels: list[str]
    degrees: dict[str, int]
    coverage: dict[str, int]
    curves: list[str]
    path: str


def _bundled_root():
    return resources.files("modmethod") / "data" / "newforms"


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "modmethod"


def default_endpoint() -> str:
    return os.environ.get(URL_ENV, DEFAULT_URL)


# ---------------------------------------------------------------------------
# level directories


def _label_key(label: str):
    parts = label.split(".")
    return [(0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts]


def read_level_dir(path, level: int, source: str) -> LevelData:
    path = Path(str(path)) if not hasattr(path, "iterdir") else path
    index = path / INDEX
    if not index.is_file():
        raise CacheCorrupt(f"{path} has no {INDEX}")
    count = None
    curve_specs = []
    for ln in index.read_text(encoding="utf-8").splitlines():
        key, _, val = ln.partition(":")
        val = val.strip()
        if key == "level" and int(val) != level:
            raise CacheCorrupt(f"{index} is for level {val}, not {level}")
        elif key == "count":
            count = int(val)
        elif key == "curve":
            form_label, name, ainvs = val.split()
            curve_specs.append((form_label, name, [int(a) for a in ainvs.split(",")]))
    forms = []
    for entry in path.iterdir():
        if not entry.name.endswith(".txt") or entry.name == INDEX:
            continue
        try:
            forms.append(parse_record(entry.read_text(encoding="utf-8")))
        except (RecordParseError, ValidationFailed) as exc:
            raise CacheCorrupt(f"{entry.name}: {exc}") from exc
    forms.sort(key=lambda f: _label_key(f.label))
    if count is None or count != len(forms):
        raise CacheCorrupt(f"{path}: index lists {count} forms, found {len(forms)}")
    curves = [
        RationalNewformCurve(name, WeierstrassCurve.from_ainvs(ainvs), form_label)
        for form_label, name, ainvs in curve_specs
    ]
    return LevelData(level, forms, curves, source)


def write_level_dir(root: Path, data: LevelData) -> Path:
    """Write a level directory under ``root``, replacing any previous copy atomically."""
    root.mkdir(parents=True, exist_ok=True)
    target = root / str(data.level)
    tmp = Path(tempfile.mkdtemp(prefix=f".{data.level}-", dir=root))
    try:
        for rec in data.forms:
            (tmp / f"{rec.label}.txt").write_text(serialize_record(rec), encoding="utf-8")
        index = [f"level: {data.level}", f"count: {len(data.forms)}"]
        for c in data.curves:
            index.append(f"curve: {c.form_label} {c.label} {','.join(map(str, c.curve.ainvs))}")
        (tmp / INDEX).write_text("\n".join(index) + "\n", encoding="utf-8")
        old = None
        if target.exists():
            old = root / f".{data.level}-old-{os.getpid()}-{threading.get_ident()}"
            os.replace(target, old)
        os.replace(tmp, target)
        if old is not None:
            shutil.rmtree(old, ignore_errors=True)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return target


def bundled_levels() -> list[int]:
    root = _bundled_root()
    return sorted(int(p.name) for p in root.iterdir() if p.name.isdigit())


def load_level_data(level: int, source: str = "bundled", cache_dir=None, endpoint=None) -> LevelData:
    if level < 1:
        raise ValueError("level must be positive")
    if source not in ("bundled", "remote"):
        raise ValueError(f"unknown newform source {source!r}")
    bundled = _bundled_root() / str(level)
    cache = Path(cache_dir) if cache_dir else default_cache_dir()
    cached = cache / str(level)
    if source == "bundled":
        if bundled.is_dir():
            return read_level_dir(bundled, level, "bundled")
        if cached.is_dir():
            return read_level_dir(cached, level, f"cache:{cached}")
        raise LevelNotAvailable(f"level {level} is not bundled and not cached")
    if cached.is_dir():
        return read_level_dir(cached, level, f"cache:{cached}")
    try:
        fetch_and_cache(level, endpoint, cache)
    except RemoteUnavailable as exc:
        if bundled.is_dir():
            log.warning("remote fetch for level %s failed (%s); serving bundled data", level, exc)
            return read_level_dir(bundled, level, "bundled")
        raise LevelNotAvailable(f"level {level}: remote unreachable and not bundled") from exc
    return read_level_dir(cached, level, f"cache:{cached}")


def load_level(level: int, source: str = "bundled", cache_dir=None, endpoint=None) -> list[NewformRecord]:
    """Every Galois class of weight-2 trivial-character newforms at ``level``."""
    return load_level_data(level, source, cache_dir, endpoint).forms


# ---------------------------------------------------------------------------
# remote client

_inflight: dict[tuple[str, int], threading.Lock] = {}
_inflight_guard = threading.Lock()


def _get_json(url: str, timeout: float = 30.0):
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            payload = resp.read()
    except (urllib.error.URLError, OSError) as exc:
        raise RemoteUnavailable(f"{url}: {exc}") from exc
    try:
        return json.loads(payload)
    except json.JSONDecodeError as exc:
        raise RemoteSchemaMismatch(f"{url}: response is not JSON") from exc


def _query(endpoint: str, table: str, params: dict) -> list[dict]:
    params = dict(params, _format="json")
    url = f"{endpoint.rstrip('/')}/api/{table}/?{urllib.parse.urlencode(params)}"
    rows = []
    while url:
        doc = _get_json(url)
        if not isinstance(doc, dict) or not isinstance(doc.get("data"), list):
            raise RemoteSchemaMismatch(f"{table}: expected an object with a 'data' list")
        rows.extend(doc["data"])
        nxt = doc.get("next")
        url = urllib.parse.urljoin(url, nxt) if nxt else None
    return rows


def _need(row: dict, key: str, table: str):
    if key not in row:
        raise RemoteSchemaMismatch(f"{table}: row {row.get('label', '?')} lacks '{key}'")
    return row[key]


def _record_from_hecke(label: str, level: int, row: dict) -> NewformRecord:
    poly = IntPoly(tuple(int(c) for c in _need(row, "field_poly", "mf_hecke_nf")))
    nums = _need(row, "hecke_ring_numerators", "mf_hecke_nf")
    dens = _need(row, "hecke_ring_denominators", "mf_hecke_nf")
    aps = _need(row, "ap", "mf_hecke_nf")
    d = poly.degree
    if len(nums) != d or len(dens) != d:
        raise RemoteSchemaMismatch(f"{label}: Hecke ring basis has the wrong size")
    basis = [[Fraction(int(c), int(den)) for c in num] + [Fraction(0)] * (d - len(num)) for num, den in zip(nums, dens)]
    primes = [q for q in range(2, 10**4) if is_prime(q)][: len(aps)]
    eig = {}
    for q, vec in zip(primes, aps):
        if q > QMAX:
            break
        if len(vec) != d:
            raise RemoteSchemaMismatch(f"{label}: a_{q} has length {len(vec)}")
        power = [sum(Fraction(int(v)) * basis[i][j] for i, v in enumerate(vec)) for j in range(d)]
        den = lcm(*(c.denominator for c in power)) if power else 1
        eig[q] = (tuple(int(c * den) for c in power), den)
    return NewformRecord(label, level, poly, eig)


def _record_from_traces(label: str, level: int, row: dict) -> NewformRecord:
    traces = _need(row, "traces", "mf_newforms")
    eig = {}
    for q in range(2, QMAX + 1):
        if is_prime(q):
            if q > len(traces):
                raise RemoteSchemaMismatch(f"{label}: traces stop before a_{q}")
            eig[q] = ((int(traces[q - 1]),), 1)
    return NewformRecord(label, level, IntPoly((0, 1)), eig)


def _remote_level(level: int, endpoint: str) -> LevelData:
    rows = _query(
        endpoint,
        "mf_newforms",
        {"level": level, "weight": 2, "char_order": 1, "_fields": "label,dim,traces"},
    )
    forms, curves = [], []
    for row in sorted(rows, key=lambda r: _label_key(str(r.get("label", "")))):
        label = str(_need(row, "label", "mf_newforms"))
        dim = int(_need(row, "dim", "mf_newforms"))
        if dim == 1:
            forms.append(_record_from_traces(label, level, row))
            iso = label.split(".")
            if len(iso) == 4:
                crows = _query(
                    endpoint,
                    "ec_curvedata",
                    {"lmfdb_iso": f"{iso[0]}.{iso[3]}", "_fields": "Clabel,ainvs,lmfdb_label"},
                )
                crows = sorted(crows, key=lambda r: str(r.get("Clabel", "")))
                optimal = [r for r in crows if str(r.get("Clabel", "")).endswith("1")] or crows
                if optimal:
                    r = optimal[0]
                    name = str(r.get("Clabel") or r.get("lmfdb_label"))
                    ainvs = [int(a) for a in _need(r, "ainvs", "ec_curvedata")]
                    curves.append(RationalNewformCurve(name, WeierstrassCurve.from_ainvs(ainvs), label))
        else:
            hrows = _query(
                endpoint,
                "mf_hecke_nf",
                {
                    "label": label,
                    "_fields": "label,field_poly,hecke_ring_numerators,hecke_ring_denominators,ap",
                },
            )
            if len(hrows) != 1:
                raise RemoteSchemaMismatch(f"{label}: expected one mf_hecke_nf row, got {len(hrows)}")
            forms.append(_record_from_hecke(label, level, hrows[0]))
    return LevelData(level, forms, curves, f"remote:{endpoint}")


def fetch_and_cache(level: int, endpoint: str | None = None, cache_dir=None) -> IngestReport:
    """Download, validate and atomically cache one level.

    Concurrent calls for the same (endpoint, level) wait on a single fetch.
    """
    endpoint = endpoint or default_endpoint()
    cache = Path(cache_dir) if cache_dir else default_cache_dir()
    key = (endpoint, level)
    with _inflight_guard:
        lock = _inflight.setdefault(key, threading.Lock())
    if not lock.acquire(blocking=False):
        # someone else is fetching this level; wait for them and serve their result
        with lock:
            pass
        target = cache / str(level)
        data = read_level_dir(target, level, f"cache:{target}")
    else:
        try:
            data = _remote_level(level, endpoint)
            for rec in data.forms:
                check_record(rec, QMAX)
            target = write_level_dir(cache, data)
        finally:
            lock.release()
    return IngestReport(
        level=level,
        labels=[f.label for f in data.forms],
        degrees={f.label: f.degree for f in data.forms},
        coverage={f.label: max(f.eigenvalues, default=0) for f in data.forms},
        curves=[c.label for c in data.curves],
        path=str(target),
    )
