"""Violation reports and the tuple scanner shared by every identity checker."""
from __future__ import annotations

import json
import multiprocessing
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .core import ShapeError, SingularMatrixError, format_rational, vdense

__all__ = [
    "Violation",
    "Report",
    "scan",
    "ShapeError",
    "SingularMatrixError",
    "UnverifiedError",
    "PreconditionError",
    "ParseError",
    "SearchSpaceError",
]


class UnverifiedError(ValueError):
    """A construction received an input whose identities were never checked."""


class PreconditionError(ValueError):
    def __init__(self, message: str, report: "Report | None" = None):
        super().__init__(message)
        self.report = report


class ParseError(ValueError):
    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{location}: {message}")
        self.location = location


class SearchSpaceError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    identity: str
    args: tuple[int, ...]  # 1-based basis indices
    residual: tuple[Fraction, ...]
    detail: str = ""

    def to_dict(self) -> dict:
        out = {
            "identity": self.identity,
            "args": list(self.args),
            "residual": [format_rational(x) for x in self.residual],
        }
        if self.detail:
            out["detail"] = self.detail
        return out

    def __str__(self) -> str:
        res = ", ".join(format_rational(x) for x in self.residual)
        tail = f"  ({self.detail})" if self.detail else ""
        return f"{self.identity} at ({', '.join(map(str, self.args))}): residual [{res}]{tail}"


@dataclass
class Report:
    check: str
    violations: list[Violation] = field(default_factory=list)
    facts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        # truthiness means "passed", so `if report:` reads naturally
        return self.ok

    def families(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for v in self.violations:
            counts[v.identity] = counts.get(v.identity, 0) + 1
        return counts

    def filter(self, identity: str | None) -> "Report":
        if identity is None:
            return self
        return Report(self.check, [v for v in self.violations if v.identity == identity], dict(self.facts))

    def extend(self, other: "Report", prefix: str = "") -> "Report":
        for v in other.violations:
            self.violations.append(
                Violation(prefix + v.identity, v.args, v.residual, v.detail) if prefix else v
            )
        for k, val in other.facts.items():
            self.facts[prefix + k] = val
        return self

    def summary(self) -> str:
        if self.ok:
            return f"{self.check}: ok"
        fam = ", ".join(f"{k}={n}" for k, n in self.families().items())
        return f"{self.check}: {len(self.violations)} violation(s) [{fam}]"

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "ok": self.ok,
            "counts": self.families(),
            "violations": [v.to_dict() for v in self.violations],
            "facts": {k: _jsonable(v) for k, v in sorted(self.facts.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self, limit: int | None = 20) -> str:
        lines = [self.summary()]
        shown = self.violations if limit is None else self.violations[:limit]
        lines.extend("  " + str(v) for v in shown)
        if limit is not None and len(self.violations) > limit:
            lines.append(f"  ... {len(self.violations) - limit} more")
        for k, v in sorted(self.facts.items()):
            lines.append(f"  {k}: {_jsonable(v)}")
        return "\n".join(lines)


def _jsonable(v):
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, Report):
        return v.to_dict()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


# ---------------------------------------------------------------------------
# scanning

ResidualFn = Callable[[tuple[int, ...]], dict]

_TASK: ResidualFn | None = None


def _run_chunk(chunk: list[tuple[int, ...]]):
    out = []
    for idx in chunk:
        res = _TASK(idx)
        if res:
            out.append((idx, res))
    return out


def _fork_available() -> bool:
    return "fork" in multiprocessing.get_all_start_methods()


def scan(
    identity: str,
    fn: ResidualFn,
    tuples: Iterable[tuple[int, ...]],
    out_dim: int,
    *,
    limit: int | None = None,
    workers: int = 1,
    chunk_size: int = 256,
) -> list[Violation]:
    """Evaluate ``fn`` on each 0-based tuple; nonzero residuals become violations.

    With ``workers > 1`` the tuples are split into chunks evaluated in forked
    processes; results are merged back in input order, so output is identical
    to the serial run. ``limit`` stops after that many violations (serial only).
    """
    found: list[tuple[tuple[int, ...], dict]] = []
    if workers > 1 and limit is None and _fork_available():
        global _TASK
        items = list(tuples)
        chunks = [items[i:i + chunk_size] for i in range(0, len(items), chunk_size)]
        _TASK = fn
        try:
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(workers) as pool:
                for part in pool.map(_run_chunk, chunks):
                    found.extend(part)
        finally:
            _TASK = None
    else:
        for idx in tuples:
            res = fn(idx)
            if res:
                found.append((idx, res))
                if limit is not None and len(found) >= limit:
                    break
    return [
        Violation(identity, tuple(i + 1 for i in idx), vdense(res, out_dim))
        for idx, res in found
    ]


def scalar_residual(value) -> dict:
    """Wrap a scalar residual as a 1-dimensional sparse vector."""
    return {0: Fraction(value)} if value else {}


def flag(identity: str, detail: str, args: Sequence[int] = ()) -> Violation:
    """A violation that is a structural fact rather than a basis residual."""
    return Violation(identity, tuple(args), (), detail)
