"""Raising arity by one with a trace form.

For an n-ary product ``phi`` and a covector ``tau`` killing every product,
``phi_tau(x_1..x_{n+1}) = sum_{k<=n} (-1)^(k+1) tau(x_k) phi(x_1..^x_k..x_n, x_{n+1})``
is an (n+1)-ary product of the same kind.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import Covector, LinearMap, SkewPattern, StructureTensor, ShapeError, canonical_tuples, omit, vadd
from .nlie import NLieAlgebra, PreconditionError, check_derivation, require_verified
from .nprelie import NPreLieAlgebra, NPreLieRep, l_pattern, module_tensor, r_pattern
from .report import Report, scalar_residual, scan


@dataclass(frozen=True)
class TraceForm:
    tau: Covector

    @property
    def dim(self) -> int:
        return self.tau.dim

    def __call__(self, v):
        return self.tau(v)


def _as_covector(tau) -> Covector:
    return tau.tau if isinstance(tau, TraceForm) else tau


def check_trace(P, tau) -> Report:
    """Canonical tuples whose product has a nonzero ``tau`` value."""
    t = getattr(P, "tensor", P)
    tau = _as_covector(tau)
    if tau.dim != t.dim:
        raise ShapeError("trace and algebra dimensions differ")
    tuples = canonical_tuples(t.slot_dims, t.pattern.blocks)
    return Report("trace", scan("trace", lambda idx: scalar_residual(tau(t(*idx))), tuples, 1))


def induce_tensor(t: StructureTensor, tau: Covector, *, full: bool = False) -> StructureTensor:
    """``phi_tau`` from the raw tensor.

    With ``full=False`` the sum runs over the first ``n`` slots and the result
    is alternating there; with ``full=True`` it runs over all ``n+1`` slots, the
    form used for fully alternating brackets.
    """
    n = t.arity
    pattern = SkewPattern.alternating(n + 1) if full else SkewPattern.leading(n + 1, n)
    span = n + 1 if full else n
    tv = tau.coefficients

    def value(idx):
        out: dict = {}
        for k in range(span):
            if tv[idx[k]]:
                vadd(out, t(*omit(idx, k)), (-1) ** k * tv[idx[k]])
        return out

    return StructureTensor.build(t.dim, pattern, value)


def induce(P: NPreLieAlgebra, tau, *, force: bool = False) -> NPreLieAlgebra:
    tau = _as_covector(tau)
    require_verified(P, force=force)
    if not force:
        report = check_trace(P, tau)
        if not report.ok:
            raise PreconditionError("covector is not a trace of the product", report)
    return NPreLieAlgebra(induce_tensor(P.product, tau))


def induce_nlie(A: NLieAlgebra, tau, *, force: bool = False) -> NLieAlgebra:
    """The fully alternating induction ``sum_{k<=n+1} (-1)^(k+1) tau(x_k) [..^x_k..]``."""
    tau = _as_covector(tau)
    require_verified(A, force=force)
    if not force:
        report = check_trace(A, tau)
        if not report.ok:
            raise PreconditionError("covector is not a trace of the bracket", report)
    return NLieAlgebra(induce_tensor(A.bracket, tau, full=True))


def induce_rep(rho: NPreLieRep, tau, *, force: bool = False) -> NPreLieRep:
    """``(l_tau, r_tau)`` for the induced (n+1)-pre-Lie algebra."""
    tau = _as_covector(tau)
    require_verified(rho, force=force)
    P = induce(rho.algebra, tau, force=force)
    n, d, m = rho.arity, rho.algebra.dim, rho.module_dim
    tv = tau.coefficients

    def l_val(idx):
        xs, u = idx[:-1], idx[-1]
        out: dict = {}
        for k in range(n):
            if tv[xs[k]]:
                vadd(out, rho.l(*omit(xs, k), u), (-1) ** k * tv[xs[k]])
        return out

    def r_val(idx):
        xs, u = idx[:-1], idx[-1]
        out: dict = {}
        for k in range(n - 1):
            if tv[xs[k]]:
                vadd(out, rho.r(*omit(xs, k), u), (-1) ** (k + 1) * tv[xs[k]])
        return out

    return NPreLieRep(P, m, module_tensor(d, n + 1, m, l_pattern(n + 1), l_val),
                      module_tensor(d, n + 1, m, r_pattern(n + 1), r_val))


def derivation_induced_criterion(P: NPreLieAlgebra, tau, D: LinearMap) -> Report:
    """Decide whether ``D`` stays a derivation after inducing with ``tau``.

    ``vanishing`` lists canonical tuples where the product induced by
    ``tau o D`` is nonzero; it is empty exactly when ``D`` is a derivation of
    the induced algebra. ``tau-D-trace`` checks that ``tau o D`` is a trace.
    The direct derivation check on the induced algebra is recorded in the
    facts together with whether both answers agree.
    """
    tau = _as_covector(tau)
    base = check_derivation(P, D)
    if not base.ok:
        raise PreconditionError("D is not a derivation of the product", base)
    tau_d = tau.compose(D)
    report = Report("derivation-criterion")
    report.extend(check_trace(P, tau_d), prefix="tau-D-")
    induced_d = induce_tensor(P.product, tau_d)
    report.violations += scan(
        "vanishing",
        lambda idx: induced_d.basis(idx),
        canonical_tuples(induced_d.slot_dims, induced_d.pattern.blocks),
        P.dim,
    )
    direct = check_derivation(induce_tensor(P.product, tau), D).ok
    vanishing = not any(v.identity == "vanishing" for v in report.violations)
    report.facts["direct_derivation"] = direct
    report.facts["agree"] = direct == vanishing
    return report
