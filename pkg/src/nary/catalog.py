"""Built-in reference objects, addressable by stable names.

Names: ``S2``, ``S3``, ``S4`` (Levi-Civita n-Lie algebras on dimension n+1),
``PL`` (a 3-dimensional pre-Lie algebra), ``T1`` / ``T1(a)`` (a trace on PL),
``P3`` / ``P3(a)`` (the 3-pre-Lie algebra induced from PL by ``T1(a)``),
``Z(d,n)`` (zero n-ary structure on dimension d) and ``A_m(S3,m)``.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .core import Covector, SkewPattern, StructureTensor, parse_rational
from .nlie import NLieAlgebra, zero_nlie
from .nprelie import NPreLieAlgebra

NAMES = ("S2", "S3", "S4", "PL", "T1", "T1(a)", "P3", "P3(a)", "Z(d,n)", "A_m(S3,m)")


def levi_civita(n: int) -> NLieAlgebra:
    """``[e_i1, ..., e_in] = eps(i1..in, k) e_k`` on dimension ``n+1``, ``k`` the missing index."""
    entries = {}
    for k in range(n + 1):
        idx = tuple(i for i in range(n + 1) if i != k)
        # moving k from the end to position k takes n-k transpositions
        entries[idx] = {k: Fraction((-1) ** (n - k))}
    return NLieAlgebra(StructureTensor.from_entries(n + 1, SkewPattern.alternating(n), entries))


def pl() -> NPreLieAlgebra:
    """``e3 o e2 = e2``, ``e3 o e3 = -e3``."""
    return NPreLieAlgebra.from_entries(3, 2, {(2, 1): {1: 1}, (2, 2): {2: -1}})


def t1(a=1) -> Covector:
    return Covector(3, [Fraction(a), 0, 0])


def p3(a=1) -> NPreLieAlgebra:
    """``{e1, e3, e2} = a e2``, ``{e1, e3, e3} = -a e3``."""
    a = Fraction(a)
    if not a:
        return NPreLieAlgebra.from_entries(3, 3, {})
    return NPreLieAlgebra.from_entries(3, 3, {(0, 2, 1): {1: a}, (0, 2, 2): {2: -a}})


def zero(d: int, n: int, kind: str = "n_lie"):
    if kind == "n_lie":
        return zero_nlie(d, n)
    if kind == "n_pre_lie":
        return NPreLieAlgebra(StructureTensor.zero(d, SkewPattern.leading(n, n - 1)))
    if kind == "n_l_dendriform":
        from .ldendriform import zero_ldend

        return zero_ldend(d, n)
    raise ValueError(f"Z(d,n) has no {kind} form")


_Z = re.compile(r"^Z\((\d+),(\d+)\)$")
_ARG = re.compile(r"^(T1|P3)\((.+)\)$")
_AM = re.compile(r"^A_m\((\w+),(\d+)\)$")


def get(name: str, kind: str | None = None):
    """Resolve a catalog name to a fresh (unverified) object."""
    name = name.replace(" ", "")
    fixed = {"S2": lambda: levi_civita(2), "S3": lambda: levi_civita(3), "S4": lambda: levi_civita(4),
             "PL": pl, "T1": t1, "P3": p3}
    if name in fixed:
        return fixed[name]()
    m = _Z.match(name)
    if m:
        d, n = int(m.group(1)), int(m.group(2))
        if d < 1 or n < 2:
            raise KeyError(f"Z(d,n) needs d >= 1 and n >= 2, got {name}")
        return zero(d, n, kind or "n_lie")
    m = _ARG.match(name)
    if m:
        a = parse_rational(m.group(2))
        return t1(a) if m.group(1) == "T1" else p3(a)
    m = _AM.match(name)
    if m:
        from .geometry import build_a_m
        from .nlie import verify

        base = verify(get(m.group(1)))
        return build_a_m(base, int(m.group(2))).algebra
    raise KeyError(f"unknown catalog name {name!r}; known: {', '.join(NAMES)}")
