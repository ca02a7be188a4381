"""n-L-dendriform algebras and the constructions that produce them.

Two products on one space: ``nw`` alternating in its first n-1 slots and
``ne`` alternating in slots 2..n-1 (first and last slots free). Their
horizontal and vertical combinations are n-pre-Lie products sharing one
alternating sum, the associated n-Lie bracket.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import (
    BilinearForm,
    LinearMap,
    ShapeError,
    SkewPattern,
    StructureTensor,
    grouped_tuples,
    invert,
    nullspace,
    omit,
    vadd,
    vsub,
)
from .nlie import (
    NLieAlgebra,
    NLieRep,
    _verified,
    adjoint_rep,
    check_morphism,
    check_o_operator_nlie,
    check_rep,
    require_verified,
    verify,
)
from .nprelie import (
    NPreLieAlgebra,
    NPreLieRep,
    check_nprelie,
    check_o_operator_nprelie,
    check_pre_rep,
    check_rota_baxter_nprelie,
    l_pattern,
    left_right_mult,
    r_pattern,
    sub_adjacent_tensor,
)
from .report import PreconditionError, Report, flag, scalar_residual, scan


def nw_pattern(n: int) -> SkewPattern:
    return SkewPattern.leading(n, n - 1)


def ne_pattern(n: int) -> SkewPattern:
    return SkewPattern(n, ((1, n - 1),))


@dataclass(frozen=True)
class NLDendriform:
    nw: StructureTensor
    ne: StructureTensor
    verified: bool = field(default=False, compare=False)
    metadata: dict = field(default_factory=dict, compare=False, repr=False)

    kind = "n_l_dendriform"

    def __post_init__(self):
        a, b = self.nw, self.ne
        if a.dim != b.dim or a.arity != b.arity:
            raise ShapeError("nw and ne must share dimension and arity")
        n = a.arity
        if n < 2:
            raise ShapeError("arity must be at least 2")
        if a.pattern != nw_pattern(n) or b.pattern != ne_pattern(n):
            raise ShapeError("nw must alternate in slots 1..n-1 and ne in slots 2..n-1")
        if set(a.slot_dims) | set(b.slot_dims) != {a.dim}:
            raise ShapeError("both products must act on one space")

    @property
    def dim(self) -> int:
        return self.nw.dim

    @property
    def arity(self) -> int:
        return self.nw.arity

    @classmethod
    def from_entries(cls, dim: int, n: int, nw, ne, **kw) -> "NLDendriform":
        return cls(
            StructureTensor.from_entries(dim, nw_pattern(n), nw, **kw),
            StructureTensor.from_entries(dim, ne_pattern(n), ne, **kw),
        )


def zero_ldend(d: int, n: int) -> NLDendriform:
    return NLDendriform(StructureTensor.zero(d, nw_pattern(n)), StructureTensor.zero(d, ne_pattern(n)))


# ---------------------------------------------------------------------------
# associated products

def horizontal_tensor(L: NLDendriform) -> StructureTensor:
    n, nw, ne = L.arity, L.nw, L.ne

    def value(x):
        out = nw(*x)
        for i in range(n - 1):
            vadd(out, ne(x[i], *omit(x, i)), (-1) ** i)
        return out

    return StructureTensor.build(L.dim, nw_pattern(n), value)


def vertical_tensor(L: NLDendriform) -> StructureTensor:
    n, nw, ne = L.arity, L.nw, L.ne

    def value(x):
        out = nw(*x)
        head = x[:-1]
        for i in range(n - 1):
            vadd(out, ne(x[-1], *omit(head, i), head[i]), (-1) ** (i + 1))
        return out

    return StructureTensor.build(L.dim, nw_pattern(n), value)


def assoc_prelie(L: NLDendriform, mode: str = "horizontal", *, force: bool = False) -> NPreLieAlgebra:
    require_verified(L, force=force)
    if mode == "horizontal":
        return NPreLieAlgebra(horizontal_tensor(L))
    if mode == "vertical":
        return NPreLieAlgebra(vertical_tensor(L))
    raise ValueError(f"mode must be horizontal or vertical, not {mode!r}")


def assoc_nlie(L: NLDendriform, *, force: bool = False) -> NLieAlgebra:
    require_verified(L, force=force)
    return NLieAlgebra(sub_adjacent_tensor(horizontal_tensor(L)))


# ---------------------------------------------------------------------------
# checks

def check_ldend(L: NLDendriform, *, literal: bool = False, workers: int = 1) -> Report:
    """The six defining identities, one family each.

    Identity 5 carries a factor ``(-1)^(n-1)`` on its right-hand sum, which
    is what the semidirect-product argument produces and what every
    O-operator construction satisfies. For n = 2 identity 4 is not a
    consequence of the structure and is skipped. ``literal=True`` drops the
    factor and keeps identity 4 at every arity.
    """
    n, d, nw, ne = L.arity, L.dim, L.nw, L.ne
    h = horizontal_tensor(L)
    v = vertical_tensor(L)
    C = sub_adjacent_tensor(h)
    s5 = 1 if literal else (-1) ** (n - 1)

    def id1(idx):
        xs, ys = idx[:n - 1], idx[n - 1:]
        out = nw(*xs, nw(*ys))
        vadd(out, nw(*ys[:-1], nw(*xs, ys[-1])), -1)
        for i in range(n - 1):
            args = list(ys)
            args[i] = C(*xs, ys[i])
            vadd(out, nw(*args), -1)
        return out

    def id2(idx):
        xs, ys = idx[:n], idx[n:]
        out = nw(C(*xs), *ys)
        for i in range(n):
            vadd(out, nw(*omit(xs, i), nw(xs[i], *ys)), -((-1) ** (n - 1 - i)))
        return out

    def id3(idx):
        xs, ys = idx[:n - 1], idx[n - 1:]
        yn, ym = ys[-1], ys[:-1]  # y_n and y_1..y_{n-1}
        out = nw(*xs, ne(yn, *ym))
        vadd(out, ne(yn, *ym[:-1], h(*xs, ym[-1])), -1)
        vadd(out, ne(v(*xs, yn), *ym), -1)
        for i in range(n - 2):
            args = list(ym)
            args[i] = C(*xs, ym[i])
            vadd(out, ne(yn, *args), -1)
        return out

    def id4(idx):
        xs, y_last, ys = idx[:n], idx[n], idx[n + 1:]
        out = ne(y_last, C(*xs), *ys)
        for i in range(n):
            vadd(out, nw(*omit(xs, i), ne(y_last, xs[i], *ys)), -((-1) ** (n - 1 - i)))
        return out

    def id5(idx):
        x_last, xs, ys = idx[0], idx[1:n - 1], idx[n - 1:]
        out = ne(x_last, *xs, h(*ys))
        vadd(out, nw(*ys[:-1], ne(x_last, *xs, ys[-1])), -1)
        for i in range(n - 1):
            vadd(out, ne(v(*xs, ys[i], x_last), *omit(ys, i)), -s5 * (-1) ** i)
        return out

    def id6(idx):
        xs, ys = idx[:n - 1], idx[n - 1:]
        yn, ym = ys[-1], ys[:-1]
        out = ne(v(*xs, yn), *ym)
        vadd(out, nw(*xs, ne(yn, *ym)), -1)
        for i in range(n - 1):
            vadd(out, ne(yn, *omit(xs, i), h(xs[i], *ym)), -((-1) ** (i + 1)))
        return out

    # y_1..y_{n-2} alternate in identities 3 and 6; y_{n-1}, y_n are free
    y_split = ((d, n - 2), (d, 1), (d, 1))
    groups = {
        "identity-1": ((d, n - 1), (d, n - 1), (d, 1)),
        "identity-2": ((d, n), (d, n - 2), (d, 1)),
        "identity-3": ((d, n - 1),) + y_split,
        "identity-4": ((d, n), (d, 1), (d, n - 3), (d, 1 if n >= 3 else 0)),
        "identity-5": ((d, 1), (d, n - 2), (d, n - 1), (d, 1)),
        "identity-6": ((d, n - 1),) + y_split,
    }
    fns = {"identity-1": id1, "identity-2": id2, "identity-3": id3,
           "identity-4": id4, "identity-5": id5, "identity-6": id6}
    viol = []
    if n == 2 and not literal:
        del fns["identity-4"]
    for name, fn in fns.items():
        viol += scan(name, fn, grouped_tuples(*groups[name]), d, workers=workers)
    return Report("n-l-dendriform", viol)


def check_crochet(L: NLDendriform) -> Report:
    """Alternating sums of the horizontal and vertical products agree."""
    ch = sub_adjacent_tensor(horizontal_tensor(L))
    cv = sub_adjacent_tensor(vertical_tensor(L))
    tuples = grouped_tuples((L.dim, L.arity))
    return Report("crochet", scan("crochet", lambda t: vsub(ch(*t), cv(*t)), tuples, L.dim))


# ---------------------------------------------------------------------------
# representations

def ldend_reps(L: NLDendriform, *, force: bool = False) -> dict:
    """The left/right multiplication representations and their reports.

    Keys: ``horizontal`` = (L_nw, R_ne) on the horizontal product,
    ``vertical`` = (L_nw, -L_ne) on the vertical product, ``left`` = L_nw and
    ``rho`` = the vertical product, both on the associated n-Lie algebra.
    ``reports`` maps each key to its check. L_ne as a right action needs
    alternation in slots 1..n-2; for n >= 4 the ``ne`` pattern does not give
    that, so ``vertical`` is absent and its report carries a ``pattern`` flag.
    """
    require_verified(L, force=force)
    n, d = L.arity, L.dim
    slots = (d,) * n
    h = NPreLieAlgebra(horizontal_tensor(L), verified=True)
    v = NPreLieAlgebra(vertical_tensor(L), verified=True)
    C = NLieAlgebra(sub_adjacent_tensor(h.product), verified=True)
    l_nw = StructureTensor(d, l_pattern(n), dict(L.nw.entries), slots)
    r_ne = StructureTensor.build(d, r_pattern(n), lambda x: L.ne(x[-1], *x[:-1]), slots)
    out: dict = {"reports": {}}
    out["horizontal"] = NPreLieRep(h, d, l_nw, r_ne)
    out["reports"]["horizontal"] = check_pre_rep(out["horizontal"])
    if n <= 3:
        minus_l_ne = StructureTensor.build(d, r_pattern(n), lambda x: {i: -c for i, c in L.ne(*x).items()}, slots)
        out["vertical"] = NPreLieRep(v, d, l_nw, minus_l_ne)
        out["reports"]["vertical"] = check_pre_rep(out["vertical"])
    else:
        out["reports"]["vertical"] = Report(
            "pre-representation", [flag("pattern", "L_ne is not alternating in slots 1..n-2 for n >= 4")]
        )
    out["left"] = NLieRep(C, d, l_nw)
    out["reports"]["left"] = check_rep(out["left"])
    out["rho"] = NLieRep(C, d, StructureTensor(d, l_pattern(n), dict(v.product.entries), slots))
    out["reports"]["rho"] = check_rep(out["rho"])
    return out


# ---------------------------------------------------------------------------
# constructions

def _o_ldend_tensors(T: LinearMap, rho: NPreLieRep) -> NLDendriform:
    n, m = rho.arity, rho.module_dim
    Tu = T.columns()
    nw = StructureTensor.build(m, nw_pattern(n), lambda u: rho.l(*(Tu[k] for k in u[:-1]), u[-1]))
    ne = StructureTensor.build(m, ne_pattern(n), lambda u: rho.r(*(Tu[k] for k in u[1:]), u[0]))
    return NLDendriform(nw, ne)


def o_to_ldend(T: LinearMap, rho: NPreLieRep, *, force: bool = False) -> NLDendriform:
    """``nw(u) = l(Tu_1..Tu_{n-1}) u_n``, ``ne(u) = r(Tu_2..Tu_n) u_1``.

    ``metadata["morphism"]`` checks that ``T`` carries the horizontal product
    on ``V`` to the product on ``A``; ``metadata["vertical_morphism"]`` records
    the same test for the vertical product (it need not hold). With ``T``
    injective, ``metadata["image_basis"]`` lists ``T e_j``, the basis in which
    the induced structure on ``T(V)`` has the same constants.
    """
    require_verified(rho, force=force)
    if not force:
        rep = check_o_operator_nprelie(T, rho)
        if not rep.ok:
            raise PreconditionError("T is not an O-operator", rep)
    L = _o_ldend_tensors(T, rho)
    A = rho.algebra
    L.metadata["morphism"] = check_morphism(T, horizontal_tensor(L), A.product)
    L.metadata["vertical_morphism"] = check_morphism(T, vertical_tensor(L), A.product).ok
    if T.is_injective():
        L.metadata["image_basis"] = T.columns()
    return L


def rb_to_ldend(P: NPreLieAlgebra, RB: LinearMap, *, force: bool = False) -> NLDendriform:
    """``nw = {Px_1..Px_{n-1}, x_n}``, ``ne = {x_1, Px_2..Px_n}``."""
    require_verified(P, force=force)
    if not force:
        rep = check_rota_baxter_nprelie(P, RB)
        if not rep.ok:
            raise PreconditionError("not a Rota-Baxter operator of weight 0", rep)
    n, cols = P.arity, RB.columns()
    nw = StructureTensor.build(P.dim, nw_pattern(n), lambda x: P(*(cols[k] for k in x[:-1]), x[-1]))
    ne = StructureTensor.build(P.dim, ne_pattern(n), lambda x: P(x[0], *(cols[k] for k in x[1:])))
    return NLDendriform(nw, ne)


def compatible_ldend(T: LinearMap, rho: NPreLieRep, *, force: bool = False) -> NLDendriform:
    """Compatible structure on ``A`` from an invertible O-operator ``T: V -> A``."""
    require_verified(rho, force=force)
    if not force:
        rep = check_o_operator_nprelie(T, rho)
        if not rep.ok:
            raise PreconditionError("T is not an O-operator", rep)
    Ti = invert(T)
    n, d = rho.arity, T.rows
    nw = StructureTensor.build(d, nw_pattern(n), lambda x: T(rho.l(*x[:-1], Ti.column(x[-1]))))
    ne = StructureTensor.build(d, ne_pattern(n), lambda x: T(rho.r(*x[1:], Ti.column(x[0]))))
    return NLDendriform(nw, ne)


def commuting_rb_to_ldend(A: NLieAlgebra, P1: LinearMap, P2: LinearMap, *, force: bool = False) -> NLDendriform:
    require_verified(A, force=force)
    if not force:
        ad_rep = adjoint_rep(A, force=True)
        problems = Report("preconditions")
        problems.extend(check_o_operator_nlie(P1, ad_rep), prefix="P1-")
        problems.extend(check_o_operator_nlie(P2, ad_rep), prefix="P2-")
        if not problems.ok:
            raise PreconditionError("Rota-Baxter precondition failed: " + ", ".join(problems.families()), problems)
        if not P1.commutes_with(P2):
            raise PreconditionError("P1 and P2 do not commute")
    n = A.arity
    Q = (P1 @ P2).columns()
    c1, c2 = P1.columns(), P2.columns()
    nw = StructureTensor.build(A.dim, nw_pattern(n), lambda x: A(*(Q[k] for k in x[:-1]), x[-1]))
    ne = StructureTensor.build(
        A.dim, ne_pattern(n), lambda x: A(c1[x[0]], *(Q[k] for k in x[1:-1]), c2[x[-1]])
    )
    return NLDendriform(nw, ne)


# ---------------------------------------------------------------------------
# pseudo-Hessian forms

def check_pseudo_hessian(P: NPreLieAlgebra, B: BilinearForm, *, workers: int = 1) -> Report:
    """Closedness residuals; nondegeneracy is the separate ``nondegenerate`` family."""
    if B.skew:
        raise ValueError("a pseudo-Hessian form must be declared symmetric")
    if B.dim != P.dim:
        raise ShapeError("form and algebra dimensions differ")
    n, d = P.arity, P.dim
    C = sub_adjacent_tensor(P.product)

    def residual(idx):
        xs, w = idx[:-1], idx[-1]
        total = B(P(*xs), w) + B(xs[-1], C(*xs[:-1], w))
        head = xs[:-1]
        for i in range(n - 1):
            total -= (-1) ** i * B(head[i], P(w, *omit(head, i), xs[-1]))
        return scalar_residual(total)

    viol = scan("closed", residual, grouped_tuples((d, n - 1), (d, 1), (d, 1)), 1, workers=workers)
    r = B.rank()
    if r < d:
        viol.append(flag("nondegenerate", f"rank {r} < {d}"))
    return Report("pseudo-hessian", viol)


def pseudo_hessian_solutions(P: NPreLieAlgebra) -> tuple[list[BilinearForm], dict]:
    """A basis of all closed symmetric forms, by exact linear algebra.

    Unknowns are ``B[i][j]`` for ``i <= j``. The certificate records the
    number of unknowns, the rank of the closedness system and the dimension
    of the solution space, so an empty answer is justified.
    """
    n, d = P.arity, P.dim
    pairs = [(i, j) for i in range(d) for j in range(i, d)]
    where = {p: k for k, p in enumerate(pairs)}
    C = sub_adjacent_tensor(P.product)

    def coef(row, x, y, c):
        # c * B(x, y) for sparse x, y
        for i, a in x.items():
            for j, b in y.items():
                k = where[(min(i, j), max(i, j))]
                row[k] = row.get(k, 0) + c * a * b

    rows = []
    for idx in grouped_tuples((d, n - 1), (d, 1), (d, 1)):
        xs, w = idx[:-1], idx[-1]
        row: dict = {}
        coef(row, P(*xs), {w: Fraction(1)}, 1)
        coef(row, {xs[-1]: Fraction(1)}, C(*xs[:-1], w), 1)
        head = xs[:-1]
        for i in range(n - 1):
            coef(row, {head[i]: Fraction(1)}, P(w, *omit(head, i), xs[-1]), -((-1) ** i))
        if any(row.values()):
            rows.append([row.get(k, Fraction(0)) for k in range(len(pairs))])
    basis = nullspace(rows, len(pairs)) if rows else [
        [Fraction(int(k == j)) for k in range(len(pairs))] for j in range(len(pairs))
    ]
    forms = []
    for vec in basis:
        m = [[Fraction(0)] * d for _ in range(d)]
        for (i, j), x in zip(pairs, vec):
            m[i][j] = m[j][i] = x
        forms.append(BilinearForm(d, m, "symmetric"))
    cert = {
        "unknowns": len(pairs),
        "rank": len(pairs) - len(basis),
        "solution_dim": len(basis),
    }
    return forms, cert


def nondegenerate_combinations(forms: list[BilinearForm], coefficients=(-1, 0, 1, 2)) -> list[BilinearForm]:
    """All nondegenerate ``sum c_k forms[k]`` with ``c_k`` from ``coefficients``, deduplicated."""
    import itertools

    if not forms:
        return []
    d = forms[0].dim
    seen, out = set(), []
    for cs in itertools.product(coefficients, repeat=len(forms)):
        if not any(cs):
            continue
        m = tuple(
            tuple(sum((c * f.matrix[i][j] for c, f in zip(cs, forms)), Fraction(0)) for j in range(d))
            for i in range(d)
        )
        if m in seen:
            continue
        seen.add(m)
        B = BilinearForm(d, m, "symmetric")
        if B.is_nondegenerate():
            out.append(B)
    return out


def hessian_to_ldend(P: NPreLieAlgebra, B: BilinearForm, *, force: bool = False):
    """Compatible dendriform structure from a pseudo-Hessian form.

    Returns ``(L, derived, report)``. ``derived`` is the product
    ``B({x}', w) = -B(x_n, [x.., w]^C) + sum_i (-1)^i B(x_n, {w, x..^x_i.., x_i})``.
    ``report`` holds ``compatible`` (horizontal product of ``L`` equals ``P``)
    and the n-pre-Lie check of ``derived`` under ``derived-``.
    """
    require_verified(P, force=force)
    if not force:
        rep = check_pseudo_hessian(P, B)
        if not rep.ok:
            raise PreconditionError("B is not a pseudo-Hessian structure", rep)
    n, d = P.arity, P.dim
    C = sub_adjacent_tensor(P.product)
    inv_t = invert(B.as_map().T)

    def solve(fn):
        def value(x):
            f = {}
            for w in range(d):
                c = fn(x, w)
                if c:
                    f[w] = c
            return inv_t(f)
        return value

    nw = StructureTensor.build(d, nw_pattern(n), solve(lambda x, w: -B(x[-1], C(*x[:-1], w))))
    ne = StructureTensor.build(d, ne_pattern(n), solve(lambda x, w: B(x[0], P(w, *x[1:]))))

    def derived_fn(x, w):
        total = -B(x[-1], C(*x[:-1], w))
        head = x[:-1]
        for i in range(n - 1):
            total += (-1) ** (i + 1) * B(x[-1], P(w, *omit(head, i), head[i]))
        return total

    derived = NPreLieAlgebra(StructureTensor.build(d, nw_pattern(n), solve(derived_fn)))
    L = NLDendriform(nw, ne)
    report = Report("hessian-to-ldend")
    h = horizontal_tensor(L)
    report.violations += scan(
        "compatible", lambda t: vsub(h(*t), P(*t)), grouped_tuples((d, n - 1), (d, 1)), d
    )
    report.extend(check_nprelie(derived), prefix="derived-")
    return L, derived, report


# ---------------------------------------------------------------------------

@verify.register
def _(obj: NLDendriform, literal: bool = False, **kw):
    report = check_ldend(obj, literal=literal, **kw)
    report.extend(check_crochet(obj))
    return _verified(obj, report)
