"""n-Lie algebras: Filippov identity, representations, O-operators.

Objects carry a ``verified`` flag. Constructors never run identity checks
themselves; call :func:`verify` (or the individual ``check_*`` functions) and
pass verified values on. Constructions refuse unverified inputs unless
``force=True`` and always return unverified outputs.
"""
from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import singledispatch
from typing import Sequence

from .core import (
    LinearMap,
    SkewPattern,
    StructureTensor,
    ShapeError,
    canonical_tuples,
    grouped_tuples,
    invert,
    omit,
    vadd,
    vsub,
)
from .report import PreconditionError, Report, SearchSpaceError, UnverifiedError, scan


@dataclass(frozen=True)
class NLieAlgebra:
    bracket: StructureTensor
    verified: bool = field(default=False, compare=False)
    metadata: dict = field(default_factory=dict, compare=False, repr=False)

    kind = "n_lie"

    def __post_init__(self):
        t = self.bracket
        if t.arity < 2:
            raise ShapeError("an n-Lie bracket needs arity >= 2")
        if t.pattern != SkewPattern.alternating(t.arity) or set(t.slot_dims) != {t.dim}:
            raise ShapeError("an n-Lie bracket must be alternating in all slots of one space")

    @property
    def dim(self) -> int:
        return self.bracket.dim

    @property
    def arity(self) -> int:
        return self.bracket.arity

    @property
    def tensor(self) -> StructureTensor:
        return self.bracket

    def __call__(self, *args):
        return self.bracket(*args)

    @classmethod
    def from_entries(cls, dim: int, n: int, entries, **kw) -> "NLieAlgebra":
        return cls(StructureTensor.from_entries(dim, SkewPattern.alternating(n), entries, **kw))


@dataclass(frozen=True)
class NLieRep:
    """``action`` has slots ``(d,)*(n-1) + (m,)`` and output dimension ``m``."""

    algebra: NLieAlgebra
    module_dim: int
    action: StructureTensor
    verified: bool = field(default=False, compare=False)
    metadata: dict = field(default_factory=dict, compare=False, repr=False)

    kind = "representation"

    def __post_init__(self):
        n, d, m = self.algebra.arity, self.algebra.dim, self.module_dim
        a = self.action
        if a.dim != m or a.slot_dims != (d,) * (n - 1) + (m,):
            raise ShapeError("action tensor shape does not match algebra and module")
        if a.pattern != SkewPattern.leading(n, n - 1):
            raise ShapeError("action must be alternating in its n-1 algebra slots")

    @property
    def arity(self) -> int:
        return self.algebra.arity

    def __call__(self, *args):
        return self.action(*args)

    def matrix(self, idx: Sequence[int]) -> LinearMap:
        return LinearMap.from_columns(
            self.module_dim, [self.action(*idx, j) for j in range(self.module_dim)]
        )


def rep_tensor(algebra_dim: int, n: int, module_dim: int, fn) -> StructureTensor:
    return StructureTensor.build(
        module_dim, SkewPattern.leading(n, n - 1), fn, (algebra_dim,) * (n - 1) + (module_dim,)
    )


# ---------------------------------------------------------------------------
# lifecycle

@singledispatch
def verify(obj, **kw):
    """Run the full identity check; return a verified copy or raise."""
    raise TypeError(f"nothing to verify for {type(obj).__name__}")


def _verified(obj, report: Report):
    if not report.ok:
        raise PreconditionError(report.summary(), report)
    return dataclasses.replace(obj, verified=True)


def require_verified(*objs, force: bool = False) -> None:
    if force:
        return
    for o in objs:
        if not getattr(o, "verified", False):
            raise UnverifiedError(f"{type(o).__name__} is unverified; check it first or pass force=True")


# ---------------------------------------------------------------------------
# checks

def check_n_lie(A: NLieAlgebra, *, workers: int = 1) -> Report:
    n, d, br = A.arity, A.dim, A.bracket
    live = [X for X in grouped_tuples((d, n - 1)) if any(br.basis(X + (j,)) for j in range(d))]
    ys = list(grouped_tuples((d, n)))

    def residual(idx):
        X, Y = idx[: n - 1], idx[n - 1:]
        out = br(*X, br(*Y))
        for i in range(n):
            inner = br(*X, Y[i])
            if inner:
                vadd(out, br(*Y[:i], inner, *Y[i + 1:]), -1)
        return out

    tuples = (X + Y for X in live for Y in ys)
    return Report("n-lie", scan("filippov", residual, tuples, d, workers=workers))


def ad(A: NLieAlgebra, idx: Sequence[int]) -> LinearMap:
    """Matrix of ``y -> [x_1, ..., x_{n-1}, y]`` (0-based indices)."""
    idx = tuple(idx)
    if len(idx) != A.arity - 1:
        raise ShapeError(f"ad needs {A.arity - 1} indices")
    if any(not 0 <= i < A.dim for i in idx):
        raise ShapeError(f"index out of range in {idx}")
    return LinearMap.from_columns(A.dim, [A.bracket(*idx, j) for j in range(A.dim)])


def check_rep(rho: NLieRep, *, workers: int = 1) -> Report:
    A, n, d, m = rho.algebra, rho.arity, rho.algebra.dim, rho.module_dim
    br, act = A.bracket, rho.action

    def rep1(idx):
        x, y, u = idx[:n], idx[n:2 * n - 2], idx[-1]
        out = act(br(*x), *y, u)
        for i in range(n):
            inner = act(x[i], *y, u)
            if inner:
                vadd(out, act(*omit(x, i), inner), -((-1) ** (n - 1 - i)))
        return out

    def rep2(idx):
        x, y, u = idx[: n - 1], idx[n - 1: 2 * n - 2], idx[-1]
        out = vsub(act(*x, act(*y, u)), act(*y, act(*x, u)))
        for i in range(n - 1):
            inner = br(*x, y[i])
            if inner:
                vadd(out, act(*y[:i], inner, *y[i + 1:], u), -1)
        return out

    viol = scan("rep-1", rep1, grouped_tuples((d, n), (d, n - 2), (m, 1)), m, workers=workers)
    viol += scan("rep-2", rep2, grouped_tuples((d, n - 1), (d, n - 1), (m, 1)), m, workers=workers)
    return Report("representation", viol)


def check_o_operator_nlie(T: LinearMap, rho: NLieRep, *, limit: int | None = None) -> Report:
    A, n, m = rho.algebra, rho.arity, rho.module_dim
    if (T.rows, T.cols) != (A.dim, m):
        raise ShapeError(f"T must be {A.dim}x{m}")
    Tu = T.columns()

    def residual(u):
        ts = [Tu[k] for k in u]
        inner: dict = {}
        for i in range(n):
            vadd(inner, rho.action(*omit(ts, i), u[i]), (-1) ** (n - 1 - i))
        return vsub(A.bracket(*ts), T(inner))

    return Report("o-operator", scan("o-operator", residual, grouped_tuples((m, n)), A.dim, limit=limit))


def check_rota_baxter(A: NLieAlgebra, P: LinearMap, *, limit: int | None = None) -> Report:
    return check_o_operator_nlie(P, adjoint_rep(A, force=True), limit=limit)


def check_derivation(t, D: LinearMap) -> Report:
    """``D(t(x)) = sum_i t(..., D x_i, ...)`` on canonical tuples of any algebra tensor."""
    t = getattr(t, "tensor", t)
    if (D.rows, D.cols) != (t.dim, t.dim):
        raise ShapeError("derivation must be a square map on the algebra")
    cols = D.columns()

    def residual(idx):
        out = D(t(*idx))
        for i, k in enumerate(idx):
            if cols[k]:
                vadd(out, t(*idx[:i], cols[k], *idx[i + 1:]), -1)
        return out

    return Report("derivation", scan("derivation", residual, _canonical(t), t.dim))


def check_morphism(T: LinearMap, src, dst) -> Report:
    """``T(src(x_1..x_n)) = dst(T x_1, ..., T x_n)`` on canonical tuples of ``src``."""
    s, t = getattr(src, "tensor", src), getattr(dst, "tensor", dst)
    if s.arity != t.arity or (T.rows, T.cols) != (t.dim, s.dim):
        raise ShapeError("morphism shape mismatch")
    cols = T.columns()

    def residual(idx):
        return vsub(T(s(*idx)), t(*(cols[k] for k in idx)))

    return Report("morphism", scan("morphism", residual, _canonical(s), t.dim))


def _canonical(t: StructureTensor):
    return canonical_tuples(t.slot_dims, t.pattern.blocks)


# ---------------------------------------------------------------------------
# constructions

def zero_nlie(d: int, n: int) -> NLieAlgebra:
    return NLieAlgebra(StructureTensor.zero(d, SkewPattern.alternating(n)))


def adjoint_rep(A: NLieAlgebra, *, force: bool = False) -> NLieRep:
    require_verified(A, force=force)
    t = A.bracket
    return NLieRep(A, A.dim, rep_tensor(t.dim, t.arity, t.dim, t.basis))


def zero_rep(A: NLieAlgebra, m: int) -> NLieRep:
    n = A.arity
    return NLieRep(A, m, StructureTensor.zero(m, SkewPattern.leading(n, n - 1), (A.dim,) * (n - 1) + (m,)))


def semidirect_nlie(rho: NLieRep, *, force: bool = False) -> NLieAlgebra:
    """Bracket on ``A + V``: algebra indices first, module indices shifted by ``dim A``."""
    require_verified(rho, force=force)
    A, n, d, m = rho.algebra, rho.arity, rho.algebra.dim, rho.module_dim

    def value(idx):
        mods = [k for k, i in enumerate(idx) if i >= d]
        if not mods:
            return A.bracket(*idx)
        if len(mods) > 1:
            return {}
        k = mods[0]
        v = rho.action(*omit(idx, k), idx[k] - d)
        sign = (-1) ** (n - 1 - k)
        return {d + j: sign * c for j, c in v.items()}

    return NLieAlgebra(StructureTensor.build(d + m, SkewPattern.alternating(n), value))


def dual_rep(rho: NLieRep, *, force: bool = False) -> NLieRep:
    """``rho*(x) = -rho(x)^T`` on the dual module."""
    require_verified(rho, force=force)
    m = rho.module_dim

    def value(idx):
        xs, j = idx[:-1], idx[-1]
        out = {}
        for i in range(m):
            c = rho.action.basis(xs + (i,)).get(j)
            if c:
                out[i] = -c
        return out

    return NLieRep(rho.algebra, m, rep_tensor(rho.algebra.dim, rho.arity, m, value))


def coadjoint_rep(A: NLieAlgebra, *, force: bool = False) -> NLieRep:
    return dual_rep(adjoint_rep(A, force=force), force=True)


def o_to_nprelie(T: LinearMap, rho: NLieRep, *, force: bool = False):
    """Product ``{u_1..u_n} = rho(Tu_1, ..., Tu_{n-1}) u_n`` on the module.

    The check that ``T`` maps the resulting commutator bracket to the bracket
    of the algebra is stored as ``metadata["morphism"]``.
    """
    from .nprelie import NPreLieAlgebra, sub_adjacent_tensor

    if not force:
        report = check_o_operator_nlie(T, rho)
        if not report.ok:
            raise PreconditionError("map is not an O-operator", report)
    require_verified(rho.algebra, force=force)
    n, m = rho.arity, rho.module_dim
    Tu = T.columns()
    prod = StructureTensor.build(
        m, SkewPattern.leading(n, n - 1), lambda u: rho.action(*(Tu[k] for k in u[:-1]), u[-1])
    )
    morphism = check_morphism(T, sub_adjacent_tensor(prod), rho.algebra.bracket)
    return NPreLieAlgebra(prod, metadata={"morphism": morphism})


def compatible_from_invertible(T: LinearMap, rho: NLieRep, *, force: bool = False):
    """Product ``{x} = T rho(x_1..x_{n-1}) T^{-1} x_n`` on the algebra."""
    from .nprelie import NPreLieAlgebra

    if not force:
        report = check_o_operator_nlie(T, rho)
        if not report.ok:
            raise PreconditionError("map is not an O-operator", report)
    Ti = invert(T)
    n, d = rho.arity, rho.algebra.dim
    Ticols = Ti.columns()
    prod = StructureTensor.build(
        d, SkewPattern.leading(n, n - 1), lambda x: T(rho.action(*x[:-1], Ticols[x[-1]]))
    )
    return NPreLieAlgebra(prod)


def rb_search(
    A,
    entries: Sequence = (-1, 0, 1),
    support: Sequence[tuple[int, int]] | None = None,
    *,
    max_cells: int = 8,
    cap: int = 3 ** 12,
) -> list[LinearMap]:
    """All maps with values from ``entries`` on ``support`` (0-based cells) that are Rota-Baxter.

    ``A`` may be an n-Lie algebra (adjoint representation) or an n-pre-Lie
    algebra (adjoint pre-representation). Default support is the diagonal.
    """
    from .nprelie import NPreLieAlgebra, check_o_operator_nprelie, left_right_mult

    d = A.dim
    values = sorted({Fraction(e) for e in entries})
    cells = [(i, i) for i in range(d)] if support is None else list(dict.fromkeys(tuple(c) for c in support))
    for i, j in cells:
        if not (0 <= i < d and 0 <= j < d):
            raise ShapeError(f"support cell {(i + 1, j + 1)} outside {d}x{d}")
    if len(cells) > max_cells:
        raise SearchSpaceError(f"support has {len(cells)} cells, limit is {max_cells}")
    total = len(values) ** len(cells)
    if total > cap:
        raise SearchSpaceError(f"{total} candidates exceed the cap of {cap}")
    if isinstance(A, NPreLieAlgebra):
        rep = left_right_mult(A, force=True)
        test = lambda P: check_o_operator_nprelie(P, rep, limit=1).ok  # noqa: E731
    else:
        rep = adjoint_rep(A, force=True)
        test = lambda P: check_o_operator_nlie(P, rep, limit=1).ok  # noqa: E731
    found = []
    seen = set()
    for combo in itertools.product(values, repeat=len(cells)):
        rows = [[Fraction(0)] * d for _ in range(d)]
        for (i, j), c in zip(cells, combo):
            rows[i][j] = c
        P = LinearMap(d, d, rows)
        if P.matrix in seen:
            continue
        seen.add(P.matrix)
        if test(P):
            found.append(P)
    return found


# ---------------------------------------------------------------------------

@verify.register
def _(obj: NLieAlgebra, **kw):
    return _verified(obj, check_n_lie(obj, **kw))


@verify.register
def _(obj: NLieRep, **kw):
    require_verified(obj.algebra)
    return _verified(obj, check_rep(obj, **kw))
