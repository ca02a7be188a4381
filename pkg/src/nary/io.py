"""JSON interchange format.

Every file is an object with ``kind``, ``dim`` and ``metadata``; tensors are
lists of ``{"args": [...], "value": {"k": "p/q"}}`` with 1-based indices and
canonical argument order. Serialization sorts keys and entries, so the same
object always produces the same bytes.
"""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path

from .core import BilinearForm, Covector, LinearMap, SkewPattern, StructureTensor, format_rational, parse_rational
from .ldendriform import NLDendriform, ne_pattern, nw_pattern
from .nlie import NLieAlgebra, NLieRep
from .nprelie import NPreLieAlgebra, NPreLieRep, l_pattern, r_pattern
from .report import ParseError, _jsonable

KINDS = (
    "n_lie",
    "n_pre_lie",
    "n_l_dendriform",
    "representation",
    "pre_representation",
    "bilinear_form",
    "linear_map",
    "covector",
)


# ---------------------------------------------------------------------------
# serialization

def _entries(t: StructureTensor) -> list:
    return [
        {"args": [i + 1 for i in key], "value": {str(k + 1): format_rational(c) for k, c in sorted(vec.items())}}
        for key, vec in t.items()
    ]


def _matrix(rows) -> list:
    return [[format_rational(x) for x in r] for r in rows]


def _basis(prefix: str, d: int) -> list[str]:
    return [f"{prefix}{i + 1}" for i in range(d)]


def to_dict(obj, metadata: dict | None = None) -> dict:
    meta = _jsonable(dict(getattr(obj, "metadata", {}) or {}) if metadata is None else metadata)
    if isinstance(obj, NLieAlgebra) or isinstance(obj, NPreLieAlgebra):
        t = obj.tensor
        return {"kind": obj.kind, "arity": t.arity, "dim": t.dim, "basis": _basis("e", t.dim),
                "entries": _entries(t), "metadata": meta}
    if isinstance(obj, NLDendriform):
        return {"kind": obj.kind, "arity": obj.arity, "dim": obj.dim, "basis": _basis("e", obj.dim),
                "nw": _entries(obj.nw), "ne": _entries(obj.ne), "metadata": meta}
    if isinstance(obj, NLieRep):
        return {"kind": obj.kind, "arity": obj.arity, "dim": obj.module_dim, "basis": _basis("v", obj.module_dim),
                "algebra": to_dict(obj.algebra, {}), "entries": _entries(obj.action), "metadata": meta}
    if isinstance(obj, NPreLieRep):
        return {"kind": obj.kind, "arity": obj.arity, "dim": obj.module_dim, "basis": _basis("v", obj.module_dim),
                "algebra": to_dict(obj.algebra, {}), "l": _entries(obj.l), "r": _entries(obj.r), "metadata": meta}
    if isinstance(obj, BilinearForm):
        return {"kind": "bilinear_form", "dim": obj.dim, "symmetry": obj.symmetry,
                "matrix": _matrix(obj.matrix), "metadata": meta}
    if isinstance(obj, LinearMap):
        return {"kind": "linear_map", "dim": obj.cols, "rows": obj.rows, "cols": obj.cols,
                "matrix": _matrix(obj.matrix), "metadata": meta}
    if isinstance(obj, Covector):
        return {"kind": "covector", "dim": obj.dim,
                "coefficients": [format_rational(x) for x in obj.coefficients], "metadata": meta}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, metadata: dict | None = None) -> str:
    return json.dumps(to_dict(obj, metadata), indent=2, sort_keys=True) + "\n"


def dump(obj, path, metadata: dict | None = None) -> None:
    Path(path).write_text(dumps(obj, metadata))


def digest(obj) -> str:
    """SHA-256 of the serialized structure without metadata."""
    return hashlib.sha256(dumps(obj, {}).encode()).hexdigest()


# ---------------------------------------------------------------------------
# parsing

def _need(data: dict, key: str, loc: str):
    if not isinstance(data, dict):
        raise ParseError("expected an object", loc)
    if key not in data:
        raise ParseError(f"missing field {key!r}", loc)
    return data[key]


def _int(value, loc: str, lo: int = 1) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < lo:
        raise ParseError(f"expected an integer >= {lo}", loc)
    return value


def _rational(text, loc: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as e:
        raise ParseError(str(e), loc) from None


def _tensor(raw, loc: str, dim: int, pattern: SkewPattern, slot_dims: tuple[int, ...]) -> StructureTensor:
    if not isinstance(raw, list):
        raise ParseError("expected a list of entries", loc)
    entries: dict = {}
    for k, item in enumerate(raw):
        here = f"{loc}[{k}]"
        args = _need(item, "args", here)
        if not isinstance(args, list) or len(args) != pattern.arity:
            raise ParseError(f"args must list {pattern.arity} indices", f"{here}.args")
        key = []
        for j, (a, sd) in enumerate(zip(args, slot_dims)):
            a = _int(a, f"{here}.args[{j}]")
            if a > sd:
                raise ParseError(f"index {a} outside 1..{sd}", f"{here}.args[{j}]")
            key.append(a - 1)
        key = tuple(key)
        if not pattern.is_canonical(key):
            blocks = ", ".join(f"{a + 1}..{b}" for a, b in pattern.ranges())
            raise ParseError(f"non-canonical args {args}; slots {blocks} must be strictly increasing", f"{here}.args")
        if key in entries:
            raise ParseError(f"duplicate args {args}", f"{here}.args")
        value = _need(item, "value", here)
        if not isinstance(value, dict) or not value:
            raise ParseError("value must be a non-empty map", f"{here}.value")
        vec = {}
        for out, c in value.items():
            vloc = f"{here}.value[{out!r}]"
            if not isinstance(out, str) or not out.isdigit() or out.startswith("0"):
                raise ParseError("output index must be a positive integer string", vloc)
            i = int(out)
            if i > dim:
                raise ParseError(f"output index {i} outside 1..{dim}", vloc)
            q = _rational(c, vloc)
            if not q:
                raise ParseError("zero coefficients must be omitted", vloc)
            vec[i - 1] = q
        entries[key] = vec
    return StructureTensor(dim, pattern, dict(sorted(entries.items())), slot_dims)


def _matrix_rows(raw, loc: str, rows: int, cols: int) -> list:
    if not isinstance(raw, list) or len(raw) != rows:
        raise ParseError(f"expected {rows} rows", loc)
    out = []
    for i, r in enumerate(raw):
        if not isinstance(r, list) or len(r) != cols:
            raise ParseError(f"expected {cols} entries", f"{loc}[{i}]")
        out.append([_rational(x, f"{loc}[{i}][{j}]") for j, x in enumerate(r)])
    return out


def from_dict(data, loc: str = "$"):
    kind = _need(data, "kind", loc)
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}", f"{loc}.kind")
    dim = _int(_need(data, "dim", loc), f"{loc}.dim")
    meta = data.get("metadata", {})
    if not isinstance(meta, dict):
        raise ParseError("metadata must be an object", f"{loc}.metadata")
    basis = data.get("basis")
    if basis is not None and (not isinstance(basis, list) or len(basis) != dim):
        raise ParseError(f"basis must list {dim} names", f"{loc}.basis")

    if kind in ("n_lie", "n_pre_lie", "n_l_dendriform"):
        n = _int(_need(data, "arity", loc), f"{loc}.arity", 2)
        slots = (dim,) * n
        try:
            if kind == "n_lie":
                obj = NLieAlgebra(_tensor(_need(data, "entries", loc), f"{loc}.entries", dim,
                                          SkewPattern.alternating(n), slots), metadata=meta)
            elif kind == "n_pre_lie":
                obj = NPreLieAlgebra(_tensor(_need(data, "entries", loc), f"{loc}.entries", dim,
                                             l_pattern(n), slots), metadata=meta)
            else:
                obj = NLDendriform(
                    _tensor(_need(data, "nw", loc), f"{loc}.nw", dim, nw_pattern(n), slots),
                    _tensor(_need(data, "ne", loc), f"{loc}.ne", dim, ne_pattern(n), slots),
                    metadata=meta,
                )
        except ParseError:
            raise
        except ValueError as e:
            raise ParseError(str(e), loc) from None
        return obj

    if kind in ("representation", "pre_representation"):
        n = _int(_need(data, "arity", loc), f"{loc}.arity", 2)
        alg = from_dict(_need(data, "algebra", loc), f"{loc}.algebra")
        want = NLieAlgebra if kind == "representation" else NPreLieAlgebra
        if not isinstance(alg, want) or alg.arity != n:
            raise ParseError(f"algebra must be an arity-{n} {want.kind}", f"{loc}.algebra")
        slots = (alg.dim,) * (n - 1) + (dim,)
        if kind == "representation":
            action = _tensor(_need(data, "entries", loc), f"{loc}.entries", dim, l_pattern(n), slots)
            return NLieRep(alg, dim, action, metadata=meta)
        l = _tensor(_need(data, "l", loc), f"{loc}.l", dim, l_pattern(n), slots)
        r = _tensor(_need(data, "r", loc), f"{loc}.r", dim, r_pattern(n), slots)
        return NPreLieRep(alg, dim, l, r, metadata=meta)

    if kind == "bilinear_form":
        sym = _need(data, "symmetry", loc)
        if sym not in ("symmetric", "skew-symmetric"):
            raise ParseError("symmetry must be symmetric or skew-symmetric", f"{loc}.symmetry")
        rows = _matrix_rows(_need(data, "matrix", loc), f"{loc}.matrix", dim, dim)
        try:
            return BilinearForm(dim, rows, sym)
        except ValueError as e:
            raise ParseError(str(e), f"{loc}.matrix") from None

    if kind == "linear_map":
        rows_n = _int(_need(data, "rows", loc), f"{loc}.rows")
        cols_n = _int(_need(data, "cols", loc), f"{loc}.cols")
        if cols_n != dim:
            raise ParseError("dim must equal cols", f"{loc}.dim")
        return LinearMap(rows_n, cols_n, _matrix_rows(_need(data, "matrix", loc), f"{loc}.matrix", rows_n, cols_n))

    coeffs = _need(data, "coefficients", loc)
    if not isinstance(coeffs, list) or len(coeffs) != dim:
        raise ParseError(f"expected {dim} coefficients", f"{loc}.coefficients")
    return Covector(dim, [_rational(c, f"{loc}.coefficients[{i}]") for i, c in enumerate(coeffs)])


def loads(text: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e.msg}", f"line {e.lineno} column {e.colno}") from None
    return from_dict(data)


def load(path):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ParseError(f"cannot read file: {e.strerror}", str(path)) from None
    return loads(text)


def resolve(ref: str, kind: str | None = None):
    """``catalog:NAME`` or a file path."""
    if ref.startswith("catalog:"):
        from . import catalog

        try:
            return catalog.get(ref[len("catalog:"):], kind)
        except (KeyError, ValueError) as e:
            raise ParseError(str(e).strip("'\""), ref) from None
    return load(ref)
