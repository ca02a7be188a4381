"""Brute-force reference evaluators, independent of the package internals.

Tables are expanded over every permutation of each alternating block with
sympy's permutation signature; identities are transcribed term by term with
1-based sums rewritten 0-based. Nothing here imports ``nary``.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

from sympy.combinatorics import Permutation


def _add(acc, vec, c=1):
    for k, x in vec.items():
        acc[k] = acc.get(k, 0) + c * x
        if acc[k] == 0:
            del acc[k]
    return acc


def clean(v):
    return {k: Fraction(x) for k, x in v.items() if x}


class Dense:
    """Multilinear map stored on every basis tuple."""

    def __init__(self, entries, blocks, arity):
        self.arity = arity
        self.table = {}
        for key, vec in entries.items():
            per_block = []
            for a, b in blocks:
                per_block.append([(p, Permutation(list(p)).signature()) for p in itertools.permutations(range(b - a))])
            for choice in itertools.product(*per_block):
                new = list(key)
                sign = 1
                for (a, b), (p, s) in zip(blocks, choice):
                    new[a:b] = [key[a + j] for j in p]
                    sign *= s
                self.table[tuple(new)] = {k: sign * Fraction(x) for k, x in vec.items()}

    def __call__(self, *args):
        assert len(args) == self.arity
        supports = [[(a, 1)] if isinstance(a, int) else list(a.items()) for a in args]
        out = {}
        for combo in itertools.product(*supports):
            vec = self.table.get(tuple(c[0] for c in combo))
            if vec:
                coef = 1
                for c in combo:
                    coef *= c[1]
                _add(out, vec, coef)
        return out


def dense(t):
    """Expand a package tensor from its raw canonical entries only."""
    return Dense(dict(t.entries), list(t.pattern.blocks), t.arity)


def omit(seq, i):
    return tuple(seq[:i]) + tuple(seq[i + 1:])


def commutator(pr, n):
    """``[x_1..x_n]^C = sum_i (-1)^(n-i) {x_1..^x_i..x_n, x_i}``."""

    def C(*xs):
        out = {}
        for i in range(n):
            _add(out, pr(*omit(xs, i), xs[i]), (-1) ** (n - 1 - i))
        return out

    return C


# ---------------------------------------------------------------------------
# identities, each returning lhs - rhs

def filippov(br, xs, ys):
    out = dict(br(*xs, br(*ys)))
    for i in range(len(ys)):
        args = list(ys)
        args[i] = br(*xs, ys[i])
        _add(out, br(*args), -1)
    return out


def npl1(pr, n, xs, ys):
    C = commutator(pr, n)
    out = dict(pr(*xs, pr(*ys)))
    for i in range(n - 1):
        args = list(ys)
        args[i] = C(*xs, ys[i])
        _add(out, pr(*args), -1)
    _add(out, pr(*ys[:-1], pr(*xs, ys[-1])), -1)
    return out


def npl2(pr, n, xs, ys):
    C = commutator(pr, n)
    out = dict(pr(C(*xs), *ys))
    for i in range(n):
        _add(out, pr(*omit(xs, i), pr(xs[i], *ys)), -((-1) ** (n - 1 - i)))
    return out


def symp(br, B, xs, y):
    """``B([x], y) + sum_i (-1)^(n-i) B(x_i, [x_1..^x_i..x_n, y])`` as a scalar."""
    n = len(xs)

    def form(u, v):
        u = {u: 1} if isinstance(u, int) else u
        v = {v: 1} if isinstance(v, int) else v
        return sum(a * B[i][j] * b for i, a in u.items() for j, b in v.items())

    total = form(br(*xs), y)
    for i in range(n):
        total += (-1) ** (n - 1 - i) * form(xs[i], br(*omit(xs, i), y))
    return Fraction(total)


def pre_rep_identities(pr, l, r, n):
    """The four printed conditions on ``(l, r)``; ``l``, ``r`` take module vector last."""
    C = commutator(pr, n)

    def mu(xs, u):
        out = dict(l(*xs, u))
        for i in range(n - 1):
            _add(out, r(*omit(xs, i), xs[i], u), (-1) ** (i + 1))
        return out

    def id1(xs, ys, u):
        out = dict(l(*xs, r(*ys, u)))
        _add(out, r(*ys, mu(xs, u)), -1)
        for i in range(n - 2):
            args = list(ys)
            args[i] = C(*xs, ys[i])
            _add(out, r(*args, u), -1)
        _add(out, r(*ys[:-1], pr(*xs, ys[-1]), u), -1)
        return out

    def id2(xs, ys, u):
        out = dict(r(C(*xs), *ys, u))
        for i in range(n):
            _add(out, l(*omit(xs, i), r(xs[i], *ys, u)), -((-1) ** (n - 1 - i)))
        return out

    def id3(xs, ys, u):
        out = dict(r(*xs, pr(*ys), u))
        _add(out, l(*ys[:-1], r(*xs, ys[-1], u)), -1)
        for i in range(n - 1):
            _add(out, r(*omit(ys, i), mu(tuple(xs) + (ys[i],), u)), -((-1) ** i))
        return out

    def id4(xs, ys, u):
        out = dict(r(*ys, mu(xs, u)))
        _add(out, l(*xs, r(*ys, u)), -1)
        for i in range(n - 1):
            _add(out, r(*omit(xs, i), pr(xs[i], *ys), u), -((-1) ** (i + 1)))
        return out

    return {"identity-1": id1, "identity-2": id2, "identity-3": id3, "identity-4": id4}


def ldend_products(nw, ne, n):
    def h(*xs):
        out = dict(nw(*xs))
        for i in range(n - 1):
            _add(out, ne(xs[i], *omit(xs[:-1], i), xs[-1]), (-1) ** i)
        return out

    def v(*xs):
        out = dict(nw(*xs))
        for i in range(n - 1):
            _add(out, ne(xs[-1], *omit(xs[:-1], i), xs[i]), (-1) ** (i + 1))
        return out

    return h, v


def ldend_identities(nw, ne, n):
    """The six printed identities with arguments in the order ``(x..., y...)``."""
    h, v = ldend_products(nw, ne, n)
    C = commutator(h, n)

    def id1(xs, ys):
        out = dict(nw(*xs, nw(*ys)))
        _add(out, nw(*ys[:-1], nw(*xs, ys[-1])), -1)
        for i in range(n - 1):
            args = list(ys)
            args[i] = C(*xs, ys[i])
            _add(out, nw(*args), -1)
        return out

    def id2(xs, ys):
        out = dict(nw(C(*xs), *ys))
        for i in range(n):
            _add(out, nw(*omit(xs, i), nw(xs[i], *ys)), -((-1) ** (n - 1 - i)))
        return out

    def id3(xs, ys):  # ys = y_1..y_n
        yn, ym = ys[-1], ys[:-1]
        out = dict(nw(*xs, ne(yn, *ym)))
        _add(out, ne(yn, *ym[:-1], h(*xs, ym[-1])), -1)
        _add(out, ne(v(*xs, yn), *ym), -1)
        for i in range(n - 2):
            args = list(ym)
            args[i] = C(*xs, ym[i])
            _add(out, ne(yn, *args), -1)
        return out

    def id4(xs, ys):  # ys = y_1..y_{n-1}
        out = dict(ne(ys[-1], C(*xs), *ys[:-1]))
        for i in range(n):
            _add(out, nw(*omit(xs, i), ne(ys[-1], xs[i], *ys[:-1])), -((-1) ** (n - 1 - i)))
        return out

    def id5(xs, ys):  # xs = x_1..x_{n-1}, ys = y_1..y_n
        xl, xm = xs[-1], xs[:-1]
        out = dict(ne(xl, *xm, h(*ys)))
        _add(out, nw(*ys[:-1], ne(xl, *xm, ys[-1])), -1)
        for i in range(n - 1):
            _add(out, ne(v(*xm, ys[i], xl), *omit(ys, i)), -((-1) ** i))
        return out

    def id6(xs, ys):
        yn, ym = ys[-1], ys[:-1]
        out = dict(ne(v(*xs, yn), *ym))
        _add(out, nw(*xs, ne(yn, *ym)), -1)
        for i in range(n - 1):
            _add(out, ne(yn, *omit(xs, i), h(xs[i], *ym)), -((-1) ** (i + 1)))
        return out

    return {"identity-1": id1, "identity-2": id2, "identity-3": id3,
            "identity-4": id4, "identity-5": id5, "identity-6": id6}


def ldend_split(name, idx, n):
    """Map a reported tuple (0-based) to the ``(x, y)`` argument lists of the printed identity."""
    idx = tuple(idx)
    if name in ("identity-1", "identity-3", "identity-6"):
        return idx[:n - 1], idx[n - 1:]
    if name == "identity-2":
        return idx[:n], idx[n:]
    if name == "identity-4":
        xs, y_last, rest = idx[:n], idx[n], idx[n + 1:]
        return xs, rest + (y_last,)
    if name == "identity-5":
        return idx[1:n - 1] + (idx[0],), idx[n - 1:]
    raise KeyError(name)


def canonical_set(bad, blocks):
    """Reduce 0-based tuples to their sorted-within-block representatives, 1-based."""
    out = set()
    for idx in bad:
        idx = list(idx)
        for a, b in blocks:
            idx[a:b] = sorted(idx[a:b])
        out.add(tuple(i + 1 for i in idx))
    return out
