"""n-pre-Lie algebras and their representations.

A product ``{x_1, ..., x_n}`` is alternating in the first ``n-1`` slots. A
representation is a pair ``(l, r)`` of module-valued tensors whose last slot
is the module: ``l`` is alternating in its ``n-1`` algebra slots, ``r`` only in
the first ``n-2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .core import (
    LinearMap,
    SkewPattern,
    StructureTensor,
    ShapeError,
    grouped_tuples,
    omit,
    vadd,
    vsub,
)
from .nlie import (
    NLieAlgebra,
    NLieRep,
    PreconditionError,
    _verified,
    check_o_operator_nlie,
    check_rep,
    require_verified,
    verify,
)
from .report import Report, scan


@dataclass(frozen=True)
class NPreLieAlgebra:
    product: StructureTensor
    verified: bool = field(default=False, compare=False)
    metadata: dict = field(default_factory=dict, compare=False, repr=False)

    kind = "n_pre_lie"

    def __post_init__(self):
        t = self.product
        if t.arity < 2:
            raise ShapeError("an n-pre-Lie product needs arity >= 2")
        if t.pattern != SkewPattern.leading(t.arity, t.arity - 1) or set(t.slot_dims) != {t.dim}:
            raise ShapeError("an n-pre-Lie product must be alternating in its first n-1 slots")

    @property
    def dim(self) -> int:
        return self.product.dim

    @property
    def arity(self) -> int:
        return self.product.arity

    @property
    def tensor(self) -> StructureTensor:
        return self.product

    def __call__(self, *args):
        return self.product(*args)

    @classmethod
    def from_entries(cls, dim: int, n: int, entries, **kw) -> "NPreLieAlgebra":
        return cls(StructureTensor.from_entries(dim, SkewPattern.leading(n, n - 1), entries, **kw))


def l_pattern(n: int) -> SkewPattern:
    return SkewPattern.leading(n, n - 1)


def r_pattern(n: int) -> SkewPattern:
    return SkewPattern.leading(n, n - 2)


@dataclass(frozen=True)
class NPreLieRep:
    algebra: NPreLieAlgebra
    module_dim: int
    l: StructureTensor
    r: StructureTensor
    verified: bool = field(default=False, compare=False)
    metadata: dict = field(default_factory=dict, compare=False, repr=False)

    kind = "pre_representation"

    def __post_init__(self):
        n, d, m = self.algebra.arity, self.algebra.dim, self.module_dim
        slots = (d,) * (n - 1) + (m,)
        for name, t, pat in (("l", self.l, l_pattern(n)), ("r", self.r, r_pattern(n))):
            if t.dim != m or t.slot_dims != slots:
                raise ShapeError(f"{name} tensor shape does not match algebra and module")
            if t.pattern != pat:
                raise ShapeError(f"{name} tensor has the wrong alternation pattern")

    @property
    def arity(self) -> int:
        return self.algebra.arity

    def l_matrix(self, idx: Sequence[int]) -> LinearMap:
        return LinearMap.from_columns(self.module_dim, [self.l(*idx, j) for j in range(self.module_dim)])

    def r_matrix(self, idx: Sequence[int]) -> LinearMap:
        return LinearMap.from_columns(self.module_dim, [self.r(*idx, j) for j in range(self.module_dim)])


def module_tensor(d: int, n: int, m: int, pattern: SkewPattern, fn) -> StructureTensor:
    return StructureTensor.build(m, pattern, fn, (d,) * (n - 1) + (m,))


# ---------------------------------------------------------------------------
# commutator

def sub_adjacent_tensor(prod: StructureTensor) -> StructureTensor:
    """``[x_1..x_n]^C = sum_i (-1)^(n-i) {x_1..^x_i..x_n, x_i}``."""
    n = prod.arity

    def value(idx):
        out: dict = {}
        for i in range(n):
            vadd(out, prod(*omit(idx, i), idx[i]), (-1) ** (n - 1 - i))
        return out

    return StructureTensor.build(prod.dim, SkewPattern.alternating(n), value)


def sub_adjacent(P: NPreLieAlgebra, *, force: bool = False) -> NLieAlgebra:
    require_verified(P, force=force)
    return NLieAlgebra(sub_adjacent_tensor(P.product))


def check_nprelie(P: NPreLieAlgebra, *, workers: int = 1) -> Report:
    n, d, pr = P.arity, P.dim, P.product
    C = sub_adjacent_tensor(pr)

    def id1(idx):
        x, y = idx[: n - 1], idx[n - 1:]
        out = pr(*x, pr(*y))
        for i in range(n - 1):
            inner = C(*x, y[i])
            if inner:
                vadd(out, pr(*y[:i], inner, *y[i + 1:]), -1)
        inner = pr(*x, y[-1])
        if inner:
            vadd(out, pr(*y[:-1], inner), -1)
        return out

    def id2(idx):
        x, y = idx[:n], idx[n:]
        out = pr(C(*x), *y)
        for i in range(n):
            inner = pr(x[i], *y)
            if inner:
                vadd(out, pr(*omit(x, i), inner), -((-1) ** (n - 1 - i)))
        return out

    viol = scan("npl-1", id1, grouped_tuples((d, n - 1), (d, n - 1), (d, 1)), d, workers=workers)
    viol += scan("npl-2", id2, grouped_tuples((d, n), (d, n - 2), (d, 1)), d, workers=workers)
    return Report("n-pre-lie", viol)


# ---------------------------------------------------------------------------
# representations

def left_right_mult(P: NPreLieAlgebra, *, force: bool = False) -> NPreLieRep:
    """The adjoint pre-representation ``(A, L, R)``."""
    require_verified(P, force=force)
    n, d, pr = P.arity, P.dim, P.product
    L = StructureTensor(d, l_pattern(n), dict(pr.entries))
    R = module_tensor(d, n, d, r_pattern(n), lambda idx: pr(idx[-1], *idx[:-1]))
    return NPreLieRep(P, d, L, R)


def left_rep(P: NPreLieAlgebra, *, force: bool = False) -> NLieRep:
    """``(A, L)`` as a representation of the sub-adjacent n-Lie algebra."""
    require_verified(P, force=force)
    C = sub_adjacent(P, force=True)
    if P.verified:
        C = verify(C)
    return NLieRep(C, P.dim, StructureTensor(P.dim, l_pattern(P.arity), dict(P.product.entries)))


def zero_pre_rep(P: NPreLieAlgebra, m: int) -> NPreLieRep:
    n, d = P.arity, P.dim
    slots = (d,) * (n - 1) + (m,)
    return NPreLieRep(P, m, StructureTensor.zero(m, l_pattern(n), slots), StructureTensor.zero(m, r_pattern(n), slots))


def _mu_apply(rho: NPreLieRep, xs: Sequence, u) -> dict:
    """``mu(x) u = l(x) u + sum_i (-1)^i r(x_1..^x_i..x_{n-1}, x_i) u`` with 1-based ``i``."""
    out = rho.l(*xs, u)
    for i in range(len(xs)):
        vadd(out, rho.r(*omit(xs, i), xs[i], u), (-1) ** (i + 1))
    return out


def mu(rho: NPreLieRep, idx: Sequence[int]) -> LinearMap:
    idx = tuple(idx)
    if len(idx) != rho.arity - 1 or any(not 0 <= i < rho.algebra.dim for i in idx):
        raise ShapeError(f"bad index tuple {idx}")
    return LinearMap.from_columns(rho.module_dim, [_mu_apply(rho, idx, j) for j in range(rho.module_dim)])


def check_pre_rep(rho: NPreLieRep, *, literal: bool = False, workers: int = 1) -> Report:
    """All conditions on ``(l, r)``.

    Families: ``l-rep-1``/``l-rep-2`` (``l`` represents the commutator algebra)
    and ``identity-1`` .. ``identity-4``.

    By default the conditions are the ones equivalent to the semidirect
    product being n-pre-Lie: the sum in identity 3 carries a factor
    ``(-1)^(n-1)``, and identity 2 is skipped for ``n = 2`` where it is not a
    consequence. ``literal=True`` checks the unsigned identity 3 and keeps
    identity 2 for every ``n``.
    """
    P, n, d, m = rho.algebra, rho.arity, rho.algebra.dim, rho.module_dim
    pr, l, r = P.product, rho.l, rho.r
    C = sub_adjacent_tensor(pr)
    s3 = 1 if literal else (-1) ** (n - 1)

    report = Report("pre-representation")
    lrep = NLieRep(NLieAlgebra(C), m, StructureTensor(m, l_pattern(n), dict(l.entries), l.slot_dims))
    report.extend(check_rep(lrep, workers=workers), prefix="l-")

    def id1(idx):
        x, y, u = idx[: n - 1], idx[n - 1: 2 * n - 2], idx[-1]
        out = vsub(l(*x, r(*y, u)), r(*y, _mu_apply(rho, x, u)))
        for i in range(n - 2):
            inner = C(*x, y[i])
            if inner:
                vadd(out, r(*y[:i], inner, *y[i + 1:], u), -1)
        inner = pr(*x, y[-1])
        if inner:
            vadd(out, r(*y[:-1], inner, u), -1)
        return out

    def id2(idx):
        x, y, u = idx[:n], idx[n: 2 * n - 2], idx[-1]
        out = r(C(*x), *y, u)
        for i in range(n):
            inner = r(x[i], *y, u)
            if inner:
                vadd(out, l(*omit(x, i), inner), -((-1) ** (n - 1 - i)))
        return out

    def id3(idx):
        x, y, u = idx[: n - 2], idx[n - 2: 2 * n - 2], idx[-1]
        out = vsub(r(*x, pr(*y), u), l(*y[:-1], r(*x, y[-1], u)))
        for i in range(n - 1):
            inner = _mu_apply(rho, x + (y[i],), u)
            if inner:
                vadd(out, r(*omit(y, i), inner), -s3 * (-1) ** i)
        return out

    def id4(idx):
        x, y, u = idx[: n - 1], idx[n - 1: 2 * n - 2], idx[-1]
        out = vsub(r(*y, _mu_apply(rho, x, u)), l(*x, r(*y, u)))
        for i in range(n - 1):
            inner = pr(x[i], *y)
            if inner:
                vadd(out, r(*omit(x, i), inner, u), -((-1) ** (i + 1)))
        return out

    # r(z_1..z_{n-1}) is alternating in z_1..z_{n-2}; the y-groups follow that.
    report.violations += scan("identity-1", id1, grouped_tuples((d, n - 1), (d, n - 2), (d, 1), (m, 1)), m, workers=workers)
    if n >= 3 or literal:
        report.violations += scan("identity-2", id2, grouped_tuples((d, n), (d, n - 3), (d, 1 if n >= 3 else 0), (m, 1)), m, workers=workers)
    report.violations += scan("identity-3", id3, grouped_tuples((d, n - 2), (d, n - 1), (d, 1), (m, 1)), m, workers=workers)
    report.violations += scan("identity-4", id4, grouped_tuples((d, n - 1), (d, n - 2), (d, 1), (m, 1)), m, workers=workers)
    return report


def rho_tilde(rho: NPreLieRep, *, force: bool = False) -> NLieRep:
    """``rho~ = mu`` as a representation of the sub-adjacent n-Lie algebra."""
    require_verified(rho, force=force)
    n, d, m = rho.arity, rho.algebra.dim, rho.module_dim
    action = module_tensor(d, n, m, l_pattern(n), lambda idx: _mu_apply(rho, idx[:-1], idx[-1]))
    C = sub_adjacent(rho.algebra, force=True)
    if rho.algebra.verified:
        C = verify(C)
    return NLieRep(C, m, action)


def semidirect_nprelie(rho: NPreLieRep, *, force: bool = False) -> NPreLieAlgebra:
    """Product on ``A + V`` with module indices shifted by ``dim A``."""
    require_verified(rho, force=force)
    P, n, d, m = rho.algebra, rho.arity, rho.algebra.dim, rho.module_dim

    def value(idx):
        mods = [k for k, i in enumerate(idx) if i >= d]
        if not mods:
            return P.product(*idx)
        if len(mods) > 1:
            return {}
        k = mods[0]
        u = idx[k] - d
        if k == n - 1:
            v = rho.l(*idx[:-1], u)
        else:
            v = {j: (-1) ** k * c for j, c in rho.r(*omit(idx, k), u).items()}
        return {d + j: c for j, c in v.items()}

    return NPreLieAlgebra(StructureTensor.build(d + m, l_pattern(n), value))


def dual_pre_rep(rho: NPreLieRep, *, force: bool = False) -> NPreLieRep:
    """``(rho~*, -r*)`` on the dual module, with ``M* = -M^T``."""
    require_verified(rho, force=force)
    n, d, m = rho.arity, rho.algebra.dim, rho.module_dim

    def l_val(idx):
        xs, j = idx[:-1], idx[-1]
        out = {}
        for i in range(m):
            c = _mu_apply(rho, xs, i).get(j)
            if c:
                out[i] = -c
        return out

    def r_val(idx):
        xs, j = idx[:-1], idx[-1]
        out = {}
        for i in range(m):
            c = rho.r.basis(xs + (i,)).get(j)
            if c:
                out[i] = c
        return out

    return NPreLieRep(
        rho.algebra, m, module_tensor(d, n, m, l_pattern(n), l_val), module_tensor(d, n, m, r_pattern(n), r_val)
    )


def dual_l_pre_rep(rho: NPreLieRep, *, force: bool = False) -> NPreLieRep:
    """``(l*, 0)``: the dual of ``l`` paired with a zero right action."""
    require_verified(rho, force=force)
    n, d, m = rho.arity, rho.algebra.dim, rho.module_dim

    def l_val(idx):
        xs, j = idx[:-1], idx[-1]
        out = {}
        for i in range(m):
            c = rho.l.basis(xs + (i,)).get(j)
            if c:
                out[i] = -c
        return out

    slots = (d,) * (n - 1) + (m,)
    return NPreLieRep(rho.algebra, m, module_tensor(d, n, m, l_pattern(n), l_val), StructureTensor.zero(m, r_pattern(n), slots))


def check_o_operator_nprelie(T: LinearMap, rho: NPreLieRep, *, limit: int | None = None) -> Report:
    P, n, m = rho.algebra, rho.arity, rho.module_dim
    if (T.rows, T.cols) != (P.dim, m):
        raise ShapeError(f"T must be {P.dim}x{m}")
    Tu = T.columns()

    def residual(u):
        ts = [Tu[k] for k in u]
        inner = rho.l(*ts[:-1], u[-1])
        for i in range(n - 1):
            vadd(inner, rho.r(*omit(ts, i), u[i]), (-1) ** i)
        return vsub(P.product(*ts), T(inner))

    tuples = grouped_tuples((m, n - 1), (m, 1))
    return Report("o-operator", scan("o-operator", residual, tuples, P.dim, limit=limit))


def check_rota_baxter_nprelie(P: NPreLieAlgebra, RB: LinearMap, *, limit: int | None = None) -> Report:
    return check_o_operator_nprelie(RB, left_right_mult(P, force=True), limit=limit)


def commuting_rb_nprelie(A: NLieAlgebra, P1: LinearMap, P2: LinearMap, *, force: bool = False):
    """Product ``[P1 x_1, ..., P1 x_{n-1}, x_n]`` and the Rota-Baxter report of ``P2`` on it."""
    from .nlie import adjoint_rep, o_to_nprelie

    require_verified(A, force=force)
    ad_rep = adjoint_rep(A, force=True)
    problems = Report("preconditions")
    problems.extend(check_o_operator_nlie(P1, ad_rep), prefix="P1-")
    problems.extend(check_o_operator_nlie(P2, ad_rep), prefix="P2-")
    if not problems.ok:
        raise PreconditionError("Rota-Baxter precondition failed: " + ", ".join(problems.families()), problems)
    if not P1.commutes_with(P2):
        raise PreconditionError("P1 and P2 do not commute")
    P = o_to_nprelie(P1, ad_rep, force=True)
    return P, check_rota_baxter_nprelie(P, P2)


# ---------------------------------------------------------------------------

@verify.register
def _(obj: NPreLieAlgebra, **kw):
    return _verified(obj, check_nprelie(obj, **kw))


@verify.register
def _(obj: NPreLieRep, **kw):
    require_verified(obj.algebra)
    return _verified(obj, check_pre_rep(obj, **kw))
