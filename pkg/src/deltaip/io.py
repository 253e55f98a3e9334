"""JSON instance files.

Integers beyond 2**53 in magnitude are written as decimal strings so that
readers with double-precision numbers do not lose digits; both forms are
accepted on input.  Floats and booleans are rejected.
"""

from __future__ import annotations

import json
from typing import Any

from .exactmat import ExactMatrix
from .ipcore import InstanceError, Problem1Instance, Problem2Instance
from .reduction import PokInstance
from .sgraph import SignedGraph

VERSION = 1
SAFE = 1 << 53


class SchemaError(ValueError):
    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path


def _enc(v: int):
    return str(v) if abs(v) > SAFE else v


def _encv(vec):
    return [_enc(int(v)) for v in vec]


def _encm(M: ExactMatrix):
    return [_encv(r) for r in M]


def _int(v: Any, path: str) -> int:
    if isinstance(v, bool) or isinstance(v, float):
        raise SchemaError(path, f"expected an integer, got {v!r}")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            return int(v)
        except ValueError:
            pass
    raise SchemaError(path, f"expected an integer, got {v!r}")


def _vec(doc: dict, key: str, length: int | None = None, path: str = "") -> list[int]:
    p = f"{path}{key}"
    if key not in doc:
        raise SchemaError(p, "missing")
    v = doc[key]
    if not isinstance(v, list):
        raise SchemaError(p, "expected a list")
    out = [_int(x, f"{p}[{i}]") for i, x in enumerate(v)]
    if length is not None and len(out) != length:
        raise SchemaError(p, f"expected length {length}, got {len(out)}")
    return out


def _mat(doc: dict, key: str, cols: int, rows: int | None = None) -> ExactMatrix:
    if key not in doc:
        raise SchemaError(key, "missing")
    v = doc[key]
    if not isinstance(v, list):
        raise SchemaError(key, "expected a list of rows")
    if rows is not None and len(v) != rows:
        raise SchemaError(key, f"expected {rows} rows, got {len(v)}")
    out = []
    for i, r in enumerate(v):
        if not isinstance(r, list):
            raise SchemaError(f"{key}[{i}]", "expected a list")
        if len(r) != cols:
            raise SchemaError(f"{key}[{i}]", f"expected {cols} entries, got {len(r)}")
        out.append([_int(x, f"{key}[{i}][{j}]") for j, x in enumerate(r)])
    return ExactMatrix(out, cols=cols)


def _count(doc, key) -> int:
    if key not in doc:
        raise SchemaError(key, "missing")
    v = _int(doc[key], key)
    if v < 0:
        raise SchemaError(key, "must be non-negative")
    return v


def to_dict(obj) -> dict:
    if isinstance(obj, Problem2Instance):
        return {"version": VERSION, "problem": "p2", "delta": obj.delta, "k": obj.k, "n": obj.n,
                "A": _encm(obj.A), "W": _encm(obj.W), "b": _encv(obj.b), "d": _encv(obj.d),
                "c": _encv(obj.c), "l": _encv(obj.l), "u": _encv(obj.u)}
    if isinstance(obj, Problem1Instance):
        return {"version": VERSION, "problem": "p1", "delta": obj.delta, "k": obj.k,
                "n1": obj.n1, "n2": obj.n2,
                "A": _encm(obj.A), "B": _encm(obj.B), "C": _encm(obj.C), "D": _encm(obj.D),
                "b": _encv(obj.b), "c": _encv(obj.c)}
    if isinstance(obj, PokInstance):
        return {"version": VERSION, "problem": "pok", "elements": obj.n,
                "covers": [list(p) for p in obj.covers], "profit": _encv(obj.profit),
                "weights": [_encv(w) for w in obj.weights], "budgets": _encv(obj.budgets)}
    if isinstance(obj, SignedGraph):
        return {"version": VERSION, "problem": "signed-graph", "n": obj.n,
                "edges": [list(e) for e in obj.edges]}
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def from_dict(doc: Any):
    if not isinstance(doc, dict):
        raise SchemaError("$", "expected a JSON object")
    if "version" not in doc:
        raise SchemaError("version", "missing")
    if _int(doc["version"], "version") != VERSION:
        raise SchemaError("version", f"unsupported version {doc['version']!r}")
    kind = doc.get("problem")
    try:
        if kind == "p2":
            n = _count(doc, "n")
            A = _mat(doc, "A", n)
            W = _mat(doc, "W", n)
            k = _count(doc, "k")
            if W.rows != k:
                raise SchemaError("W", f"expected {k} rows, got {W.rows}")
            return Problem2Instance(A, W, _vec(doc, "b", A.rows), _vec(doc, "d", k), _vec(doc, "c", n),
                                    _vec(doc, "l", n), _vec(doc, "u", n), _count(doc, "delta"))
        if kind == "p1":
            n1, n2 = _count(doc, "n1"), _count(doc, "n2")
            A = _mat(doc, "A", n1)
            B = _mat(doc, "B", n2, A.rows)
            C = _mat(doc, "C", n1)
            D = _mat(doc, "D", n2, C.rows)
            return Problem1Instance(A, B, C, D, _vec(doc, "b", A.rows + C.rows), _vec(doc, "c", n1 + n2),
                                    _count(doc, "delta"), _count(doc, "k"))
        if kind == "pok":
            n = _count(doc, "elements")
            covers = doc.get("covers")
            if not isinstance(covers, list):
                raise SchemaError("covers", "expected a list of pairs")
            pairs = []
            for i, p in enumerate(covers):
                if not isinstance(p, list) or len(p) != 2:
                    raise SchemaError(f"covers[{i}]", "expected a pair")
                pairs.append((_int(p[0], f"covers[{i}][0]"), _int(p[1], f"covers[{i}][1]")))
            ws = doc.get("weights")
            if not isinstance(ws, list):
                raise SchemaError("weights", "expected a list of vectors")
            weights = [_vec({"w": w}, "w", n, path=f"weights[{i}].") for i, w in enumerate(ws)]
            return PokInstance(n, tuple(pairs), tuple(_vec(doc, "profit", n)), tuple(map(tuple, weights)),
                               tuple(_vec(doc, "budgets", len(weights))))
        if kind == "signed-graph":
            n = _count(doc, "n")
            edges = doc.get("edges")
            if not isinstance(edges, list):
                raise SchemaError("edges", "expected a list")
            es = []
            for i, e in enumerate(edges):
                if not isinstance(e, list) or len(e) != 3:
                    raise SchemaError(f"edges[{i}]", "expected [u, v, sign]")
                es.append(tuple(_int(x, f"edges[{i}][{j}]") for j, x in enumerate(e)))
            return SignedGraph(n, tuple(es))
    except SchemaError:
        raise
    except (InstanceError, ValueError) as exc:
        raise SchemaError(str(kind), str(exc)) from None
    raise SchemaError("problem", f"unknown problem kind {kind!r}")


def dumps(obj) -> str:
    return json.dumps(to_dict(obj), indent=1, sort_keys=True)


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    return from_dict(doc)


def load(path: str):
    with open(path) as fh:
        return loads(fh.read())


def save(obj, path: str):
    with open(path, "w") as fh:
        fh.write(dumps(obj) + "\n")
