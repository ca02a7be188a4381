"""Bilinear forms on n-ary algebras.

Matrix conventions: a form ``F`` stores ``F(e_i, e_j)`` at ``[i][j]``. A linear
map ``D`` acts on columns, so ``F(Dx, y)`` has matrix ``D^T F``.

On ``V + V*`` the basis is ``e_1..e_d, e*_1..e*_d`` and the canonical skew form
is ``w(x + f, y + g) = f(y) - g(x)``, i.e. the matrix ``[[0, -I], [I, 0]]``.
"""
from __future__ import annotations

import dataclasses

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .core import (
    BilinearForm,
    LinearMap,
    ShapeError,
    SkewPattern,
    StructureTensor,
    canonical_tuples,
    grouped_tuples,
    invert,
    omit,
    vadd,
)
from .nlie import (
    NLieAlgebra,
    check_derivation,
    coadjoint_rep,
    dual_rep,
    require_verified,
    semidirect_nlie,
    verify,
    _verified,
)
from .nprelie import (
    NPreLieAlgebra,
    dual_l_pre_rep,
    left_rep,
    left_right_mult,
    semidirect_nprelie,
    sub_adjacent,
    sub_adjacent_tensor,
)
from .report import PreconditionError, Report, flag, scalar_residual, scan


@dataclass(frozen=True)
class SymplecticNLie:
    algebra: NLieAlgebra
    omega: BilinearForm
    verified: bool = field(default=False, compare=False)
    metadata: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.omega.skew:
            raise ValueError("a symplectic form must be declared skew-symmetric")
        if self.omega.dim != self.algebra.dim:
            raise ShapeError("form and algebra dimensions differ")


@dataclass(frozen=True)
class MetricNLie:
    algebra: NLieAlgebra
    B: BilinearForm
    verified: bool = field(default=False, compare=False)
    metadata: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.B.skew:
            raise ValueError("a metric must be declared symmetric")
        if self.B.dim != self.algebra.dim:
            raise ShapeError("form and algebra dimensions differ")


@dataclass(frozen=True)
class PhaseSpace:
    """``total`` lives on ``h + h*``; the first ``base.dim`` basis vectors span ``h``."""

    total: SymplecticNLie
    base: NLieAlgebra
    metadata: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def half(self) -> int:
        return self.base.dim


def canonical_form(d: int) -> BilinearForm:
    rows = [[Fraction(0)] * (2 * d) for _ in range(2 * d)]
    for i in range(d):
        rows[i][d + i] = Fraction(-1)
        rows[d + i][i] = Fraction(1)
    return BilinearForm(2 * d, rows, "skew-symmetric")


def hyperbolic_form(d: int) -> BilinearForm:
    rows = [[Fraction(0)] * (2 * d) for _ in range(2 * d)]
    for i in range(d):
        rows[i][d + i] = rows[d + i][i] = Fraction(1)
    return BilinearForm(2 * d, rows, "symmetric")


def _nondegeneracy(form: BilinearForm) -> list:
    r = form.rank()
    if r == form.dim:
        return []
    return [flag("nondegenerate", f"rank {r} < {form.dim}")]


def _expect(form: BilinearForm, skew: bool, what: str, A) -> None:
    if form.skew != skew:
        raise ValueError(f"{what} needs a {'skew-symmetric' if skew else 'symmetric'} form")
    if form.dim != A.dim:
        raise ShapeError("form and algebra dimensions differ")


# ---------------------------------------------------------------------------
# checks

def check_symplectic(A: NLieAlgebra, omega: BilinearForm, *, workers: int = 1) -> Report:
    _expect(omega, True, "check_symplectic", A)
    n, d = A.arity, A.dim

    def residual(idx):
        xs, y = idx[:-1], idx[-1]
        total = omega(A(*xs), y)
        for k in range(n):
            total += (-1) ** (n - 1 - k) * omega(xs[k], A(*omit(xs, k), y))
        return scalar_residual(total)

    viol = scan("symplectic", residual, grouped_tuples((d, n), (d, 1)), 1, workers=workers)
    return Report("symplectic", viol + _nondegeneracy(omega))


def check_metric(A: NLieAlgebra, B: BilinearForm, *, workers: int = 1) -> Report:
    _expect(B, False, "check_metric", A)
    n, d = A.arity, A.dim

    def residual(idx):
        xs, a, b = idx[:-2], idx[-2], idx[-1]
        return scalar_residual(B(A(*xs, a), b) + B(A(*xs, b), a))

    # symmetric in the last two slots, so a <= b suffices
    tuples = (t for t in grouped_tuples((d, n - 1), (d, 1), (d, 1)) if t[-2] <= t[-1])
    viol = scan("metric", residual, tuples, 1, workers=workers)
    return Report("metric", viol + _nondegeneracy(B))


def check_quadratic(P: NPreLieAlgebra, B: BilinearForm, *, workers: int = 1) -> Report:
    """``B({x_1..x_n}, y) + B(x_n, [x_1..x_{n-1}, y]^C)`` over basis tuples."""
    _expect(B, True, "check_quadratic", P)
    n, d = P.arity, P.dim
    C = sub_adjacent_tensor(P.product)

    def residual(idx):
        xs, y = idx[:-1], idx[-1]
        return scalar_residual(B(P(*xs), y) + B(xs[-1], C(*xs[:-1], y)))

    viol = scan("quadratic", residual, grouped_tuples((d, n - 1), (d, 1), (d, 1)), 1, workers=workers)
    return Report("quadratic", viol + _nondegeneracy(B))


def check_b_skew(B: BilinearForm, D: LinearMap) -> Report:
    """``B(Dx, y) + B(x, Dy) = 0`` on basis pairs."""
    if (D.rows, D.cols) != (B.dim, B.dim):
        raise ShapeError("D and B dimensions differ")
    M = D.T @ B.as_map() + B.as_map() @ D
    viol = [
        scan_one("b-skew", (i, j), M.matrix[i][j])
        for i in range(B.dim) for j in range(B.dim) if M.matrix[i][j]
    ]
    return Report("b-skew", viol)


def scan_one(identity: str, idx, value):
    return scan(identity, lambda _: scalar_residual(value), [tuple(idx)], 1)[0]


# ---------------------------------------------------------------------------
# metric <-> symplectic via derivations

def _derivation_report(A: NLieAlgebra, B: BilinearForm, D: LinearMap) -> Report:
    report = Report("derivation-preconditions")
    if not D.is_invertible():
        report.violations.append(flag("invertible", f"rank {D.rank()} < {D.rows}"))
    report.extend(check_b_skew(B, D))
    report.extend(check_derivation(A, D))
    return report


def metric_symplectic_to_derivation(M: MetricNLie, omega: BilinearForm, *, force: bool = False) -> LinearMap:
    """The ``D`` with ``B(Dx, y) = w(x, y)``, i.e. ``D^T B = W``."""
    require_verified(M, force=force)
    if not force:
        rep = check_symplectic(M.algebra, omega)
        if not rep.ok:
            raise PreconditionError("w is not a symplectic structure", rep)
    # B symmetric, W skew: D = (W B^-1)^T = -B^-1 W
    D = -(invert(M.B.as_map()) @ omega.as_map())
    if not force:
        rep = _derivation_report(M.algebra, M.B, D)
        if not rep.ok:
            raise PreconditionError("recovered map is not an invertible B-skew derivation", rep)
    return D


def derivation_to_symplectic(M: MetricNLie, D: LinearMap, *, force: bool = False) -> BilinearForm:
    """``w(x, y) = B(Dx, y)``; each failed precondition is named."""
    require_verified(M, force=force)
    if not force:
        rep = _derivation_report(M.algebra, M.B, D)
        if not rep.ok:
            raise PreconditionError("D fails: " + ", ".join(rep.families()), rep)
    return BilinearForm(M.B.dim, (D.T @ M.B.as_map()).matrix, "skew-symmetric")


# ---------------------------------------------------------------------------
# compatible products

def symplectic_to_nprelie(S: SymplecticNLie, *, force: bool = False) -> NPreLieAlgebra:
    """Solve ``w({x_1..x_n}, y) = -w(x_n, [x_1..x_{n-1}, y])`` for every basis ``y``."""
    require_verified(S, force=force)
    A, w = S.algebra, S.omega
    n, d = A.arity, A.dim
    inv_t = invert(w.as_map().T)

    def value(idx):
        xs, last = idx[:-1], idx[-1]
        f = {}
        for j in range(d):
            c = -w(last, A(*xs, j))
            if c:
                f[j] = c
        return inv_t(f)

    return NPreLieAlgebra(StructureTensor.build(d, SkewPattern.leading(n, n - 1), value))


# ---------------------------------------------------------------------------
# phase spaces

def phase_space(P: NPreLieAlgebra, *, force: bool = False) -> PhaseSpace:
    """``A^c`` semidirect with the dual of left multiplication, with the canonical form."""
    require_verified(P, force=force)
    total = semidirect_nlie(dual_rep(left_rep(P, force=True), force=True), force=True)
    base = sub_adjacent(P, force=True)
    return PhaseSpace(SymplecticNLie(total, canonical_form(P.dim)), base, {"source": P})


def symplectic_double(P: NPreLieAlgebra, steps: int = 2, *, force: bool = False) -> list[PhaseSpace]:
    """Phase spaces ``A_(2), A_(3), ...``; each step feeds ``A + A*`` with the product twisted by ``(L*, 0)``."""
    require_verified(P, force=force)
    out = []
    cur = P
    for _ in range(steps):
        out.append(phase_space(cur, force=True))
        cur = semidirect_nprelie(dual_l_pre_rep(left_right_mult(cur, force=True), force=True), force=True)
    return out


def _lands_in(v: dict, lo: int, hi: int) -> dict:
    """The part of ``v`` outside ``[lo, hi)``."""
    return {i: c for i, c in v.items() if not lo <= i < hi}


def check_phase_space(ps: PhaseSpace, *, require_perfect: bool = False, workers: int = 1) -> Report:
    """Phase-space axioms, each as its own family.

    The perfectness conditions go to ``perfect-h`` / ``perfect-h*``. They
    count as violations only with ``require_perfect``; ``facts["perfect"]``
    always records the outcome.
    """
    A, w, d = ps.total.algebra, ps.total.omega, ps.half
    n, D = A.arity, 2 * d
    report = Report("phase-space")
    if A.dim != D:
        raise ShapeError("total space must have twice the base dimension")
    if w != canonical_form(d):
        report.violations.append(flag("canonical-form", "form differs from the canonical pairing"))
    report.extend(check_symplectic(A, w, workers=workers))
    h = list(canonical_tuples((d,) * n, [(0, n)]))
    hstar = [tuple(d + i for i in t) for t in h]
    report.violations += scan("h-closed", lambda t: _lands_in(A(*t), 0, d), h, D)
    report.violations += scan("h*-closed", lambda t: _lands_in(A(*t), d, D), hstar, D)
    base = ps.base
    if base.dim != d or base.arity != n:
        report.violations.append(flag("restriction", "base algebra shape differs"))
    else:
        report.violations += scan("restriction", lambda t: _diff(A(*t), base(*t)), h, D)
    mixed_h = [x + (d + a,) for x in canonical_tuples((d,) * (n - 1), [(0, n - 1)]) for a in range(d)]
    mixed_s = [tuple(d + a for a in al) + (x,) for al in canonical_tuples((d,) * (n - 1), [(0, n - 1)]) for x in range(d)]
    perfect = scan("perfect-h", lambda t: _lands_in(A(*t), d, D), mixed_h, D)
    perfect += scan("perfect-h*", lambda t: _lands_in(A(*t), 0, d), mixed_s, D)
    report.facts["perfect"] = not perfect
    if require_perfect:
        report.violations += perfect
    else:
        report.facts["perfect_failures"] = len(perfect)
    return report


def _diff(a: dict, b: dict) -> dict:
    out = dict(a)
    vadd(out, b, -1)
    return out


# ---------------------------------------------------------------------------
# Manin triples

def manin_closed_forms(P: NPreLieAlgebra, d: int) -> dict[str, StructureTensor]:
    """Mixed products predicted from the two halves alone.

    Keys ``manin1``..``manin4`` map an index tuple (in the full space) to the
    predicted value of ``{x.., a}``, ``{a, x..}``, ``{a.., x}``, ``{x, a..}``.
    Returned as plain callables over full-space indices.
    """
    n = P.arity

    def on_a(*idx):
        return {i: c for i, c in P(*idx).items() if i < d}

    def on_s(*idx):
        return {i - d: c for i, c in P(*(d + k for k in idx)).items() if i >= d}

    def m_apply(prod, xs, b):
        # (L(xs) + sum_i (-1)^i R(xs without x_i, x_i)) e_b, 1-based i
        out = prod(*xs, b)
        for i in range(len(xs)):
            vadd(out, prod(b, *omit(xs, i), xs[i]), (-1) ** (i + 1))
        return out

    def manin1(xs, a):
        return {d + b: -c for b in range(d) if (c := m_apply(on_a, xs, b).get(a))}

    def manin2(a, xs):
        return {d + b: c for b in range(d) if (c := on_a(b, *xs).get(a))}

    def manin3(als, x):
        return {b: -c for b in range(d) if (c := m_apply(on_s, als, b).get(x))}

    def manin4(x, als):
        return {b: c for b in range(d) if (c := on_s(b, *als).get(x))}

    return {"manin1": manin1, "manin2": manin2, "manin3": manin3, "manin4": manin4}


def check_manin_triple(P: NPreLieAlgebra, B: BilinearForm, *, workers: int = 1) -> Report:
    if P.dim % 2:
        raise ShapeError("a Manin triple needs an even-dimensional algebra")
    d, n, D = P.dim // 2, P.arity, P.dim
    report = Report("manin-triple")
    if B != canonical_form(d):
        report.violations.append(flag("canonical-form", "form differs from the canonical pairing"))
    report.extend(check_quadratic(P, B, workers=workers))
    for i in range(D):
        for j in range(D):
            if (i < d) == (j < d) and B.matrix[i][j]:
                report.violations.append(scan_one("isotropy", (i, j), B.matrix[i][j]))

    sub_a = list(grouped_tuples((d, n - 1), (d, 1)))
    report.violations += scan("subalgebra-A", lambda t: _lands_in(P(*t), 0, d), sub_a, D)
    sub_s = [tuple(d + i for i in t) for t in sub_a]
    report.violations += scan("subalgebra-A*", lambda t: _lands_in(P(*t), d, D), sub_s, D)

    xs_list = list(canonical_tuples((d,) * (n - 1), [(0, n - 1)] if n > 2 else []))
    t1 = [xs + (d + a,) for xs in xs_list for a in range(d)]
    t2 = [(d + a,) + xs for a in range(d) for xs in xs_list]
    t3 = [tuple(d + i for i in xs) + (x,) for xs in xs_list for x in range(d)]
    t4 = [(x,) + tuple(d + i for i in xs) for x in range(d) for xs in xs_list]
    report.violations += scan("condmanin-1", lambda t: _lands_in(P(*t), d, D), t1, D)
    report.violations += scan("condmanin-2", lambda t: _lands_in(P(*t), d, D), t2, D)
    report.violations += scan("condmanin-3", lambda t: _lands_in(P(*t), 0, d), t3, D)
    report.violations += scan("condmanin-4", lambda t: _lands_in(P(*t), 0, d), t4, D)

    forms = manin_closed_forms(P, d)
    report.violations += scan("manin1", lambda t: _diff(P(*t), forms["manin1"](t[:-1], t[-1] - d)), t1, D)
    report.violations += scan("manin2", lambda t: _diff(P(*t), forms["manin2"](t[0] - d, t[1:])), t2, D)
    report.violations += scan(
        "manin3", lambda t: _diff(P(*t), forms["manin3"](tuple(i - d for i in t[:-1]), t[-1])), t3, D
    )
    report.violations += scan(
        "manin4", lambda t: _diff(P(*t), forms["manin4"](t[0], tuple(i - d for i in t[1:]))), t4, D
    )
    return report


# ---------------------------------------------------------------------------
# the A_m example

class AmConstruction(NamedTuple):
    nilpotent: NLieAlgebra
    metric: MetricNLie
    derivation: LinearMap
    omega: BilinearForm

    @property
    def algebra(self) -> NLieAlgebra:
        return self.metric.algebra


def truncated_current(A: NLieAlgebra, m: int) -> tuple[NLieAlgebra, LinearMap]:
    """``A (x) t K[t] / t^m K[t]`` and its grading derivation.

    Basis vector ``e_i (x) t^p`` sits at index ``(p-1)*dim A + i``.
    """
    d, n = A.dim, A.arity
    size = d * (m - 1)

    def value(idx):
        ps = [i // d + 1 for i in idx]
        total = sum(ps)
        if total >= m:
            return {}
        off = (total - 1) * d
        return {off + j: c for j, c in A(*(i % d for i in idx)).items()}

    bracket = StructureTensor.build(size, SkewPattern.alternating(n), value)
    grading = LinearMap.diag([i // d + 1 for i in range(size)])
    return NLieAlgebra(bracket), grading


def build_a_m(A: NLieAlgebra, m: int, *, force: bool = False) -> AmConstruction:
    if m < 2:
        raise ValueError("m must be at least 2")
    require_verified(A, force=force)
    Am, D = truncated_current(A, m)
    total = semidirect_nlie(coadjoint_rep(Am, force=True), force=True)
    size = Am.dim
    B = hyperbolic_form(size)
    Dt = D.block_diag(-D.T)
    omega = BilinearForm(2 * size, (Dt.T @ B.as_map()).matrix, "skew-symmetric")
    return AmConstruction(Am, MetricNLie(total, B), Dt, omega)


# ---------------------------------------------------------------------------

def _with_algebra(obj, **kw):
    """Verify the underlying algebra too when it has not been checked yet."""
    if obj.algebra.verified:
        return obj
    return dataclasses.replace(obj, algebra=verify(obj.algebra, **kw))


@verify.register
def _(obj: SymplecticNLie, **kw):
    obj = _with_algebra(obj, **kw)
    return _verified(obj, check_symplectic(obj.algebra, obj.omega, **kw))


@verify.register
def _(obj: MetricNLie, **kw):
    obj = _with_algebra(obj, **kw)
    return _verified(obj, check_metric(obj.algebra, obj.B, **kw))
