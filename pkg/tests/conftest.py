import json
import threading
import urllib.parse
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from modmethod.algebra import is_prime
from modmethod.newforms import load_level_data


def _level_rows(level: int):
    """Bundled records re-encoded the way the public database serves them."""
    data = load_level_data(level, "bundled")
    newforms, hecke = [], {}
    for i, f in enumerate(data.forms):
        label = f"{level}.2.a.{chr(ord('a') + i)}"
        row = {"label": label, "dim": f.degree}
        if f.is_rational():
            traces = [0] * 60
            traces[0] = 1
            for q in f.eigenvalues:
                traces[q - 1] = f.rational_coefficient(q)
            row["traces"] = traces
        else:
            d = f.degree
            primes = [q for q in range(2, 51) if is_prime(q)]
            ap = []
            for q in primes:
                vec, den = f.eigenvalues[q]
                assert den == 1
                ap.append(list(vec))
            hecke[label] = {
                "label": label,
                "field_poly": list(f.field_poly.coeffs),
                "hecke_ring_numerators": [[1 if i == j else 0 for j in range(d)] for i in range(d)],
                "hecke_ring_denominators": [1] * d,
                "ap": ap,
            }
        newforms.append(row)
    return newforms, hecke


class FakeDatabase:
    def __init__(self, levels=(98,)):
        self.newforms = {}
        self.hecke = {}
        for level in levels:
            rows, hecke = _level_rows(level)
            self.newforms[level] = rows
            self.hecke.update(hecke)
        self.requests = []
        self.mutate = None  # optional callable(table, rows) -> rows
        self.delay = 0.0

    def handle(self, path: str, query: dict):
        import time

        self.requests.append((path, query))
        if self.delay:
            time.sleep(self.delay)
        table = path.strip("/").split("/")[-1]
        if table == "mf_newforms":
            rows = list(self.newforms.get(int(query["level"]), []))
            page = int(query.get("_offset", 0))
            doc = {"data": rows[page : page + 1]}
            if page + 1 < len(rows):
                q = dict(query, _offset=page + 1)
                doc["next"] = f"/api/mf_newforms/?{urllib.parse.urlencode(q)}"
        elif table == "mf_hecke_nf":
            doc = {"data": [self.hecke[query["label"]]] if query["label"] in self.hecke else []}
        elif table == "ec_curvedata":
            doc = {"data": []}
        else:
            return 404, {}
        if self.mutate:
            doc["data"] = self.mutate(table, doc["data"])
        return 200, doc


@pytest.fixture
def fake_db():
    db = FakeDatabase()

    class Handler(BaseHTTPRequestHandler):
        def do_GET(self):
            parsed = urllib.parse.urlparse(self.path)
            query = {k: v[0] for k, v in urllib.parse.parse_qs(parsed.query).items()}
            status, doc = db.handle(parsed.path, query)
            body = json.dumps(doc).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def log_message(self, *args):
            pass

    server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    db.url = f"http://127.0.0.1:{server.server_address[1]}"
    yield db
    server.shutdown()
    server.server_close()


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
