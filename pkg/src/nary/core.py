"""Exact rational tensors, linear maps and bilinear forms.

Everything here works over :class:`fractions.Fraction`. Vectors are sparse
``dict[int, Fraction]`` keyed by 0-based basis index; zero coefficients are
never stored. Structure tensors store one value per canonical multi-index,
where every alternating block of slots is listed in strictly increasing order.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

Rational = Fraction
Vec = dict  # dict[int, Fraction]
Arg = Union[int, Mapping[int, Fraction]]

ZERO = Fraction(0)
ONE = Fraction(1)


class ShapeError(ValueError):
    pass


class SingularMatrixError(ArithmeticError):
    def __init__(self, rank: int, size: int):
        super().__init__(f"matrix is singular (rank {rank} < {size})")
        self.rank = rank
        self.size = size


# ---------------------------------------------------------------------------
# scalars

_RATIONAL_RE = re.compile(r"^(-?)(0|[1-9][0-9]*)(?:/([1-9][0-9]*))?$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"`` in lowest terms; anything else is rejected."""
    if not isinstance(text, str):
        raise ValueError(f"rational must be a string, got {text!r}")
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ValueError(f"malformed rational {text!r}")
    sign, num, den = m.groups()
    if sign and num == "0":
        raise ValueError(f"non-canonical rational {text!r} (negative zero)")
    value = Fraction(int(sign + num), int(den) if den else 1)
    if den is not None and (den == "1" or value.denominator != int(den)):
        raise ValueError(f"non-canonical rational {text!r} (not in lowest terms)")
    return value


def format_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"exact rational expected, got {type(x).__name__}")


# ---------------------------------------------------------------------------
# permutations

def _sort_sign(seq: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the sorting permutation and the sorted tuple; sign 0 on repeats."""
    if len(set(seq)) != len(seq):
        return 0, tuple(seq)
    inversions = 0
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                inversions += 1
    return (-1 if inversions & 1 else 1), tuple(sorted(seq))


def perm_sign(permutation: Sequence[int]) -> Fraction:
    """Signature of a permutation of ``1..k`` given in one-line notation."""
    perm = tuple(permutation)
    if sorted(perm) != list(range(1, len(perm) + 1)):
        raise ValueError(f"{perm!r} is not a permutation of 1..{len(perm)}")
    sign, _ = _sort_sign(perm)
    return Fraction(sign)


# ---------------------------------------------------------------------------
# sparse vectors

def unit(i: int) -> Vec:
    return {i: ONE}


def vadd(acc: Vec, v: Mapping[int, Fraction], c=1) -> Vec:
    """``acc += c*v`` in place, dropping cancelled entries."""
    if not c:
        return acc
    for k, x in v.items():
        y = acc.get(k, 0) + c * x
        if y:
            acc[k] = y
        else:
            acc.pop(k, None)
    return acc


def vlin(*terms) -> Vec:
    """Linear combination from ``(coefficient, vector)`` pairs."""
    out: Vec = {}
    for c, v in terms:
        vadd(out, v, c)
    return out


def vsub(a: Mapping[int, Fraction], b: Mapping[int, Fraction]) -> Vec:
    return vadd(dict(a), b, -1)


def vshift(v: Mapping[int, Fraction], offset: int) -> Vec:
    return {k + offset: x for k, x in v.items()}


def vdense(v: Mapping[int, Fraction], dim: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(v.get(i, 0)) for i in range(dim))


def vsparse(values: Iterable) -> Vec:
    return {i: as_fraction(x) for i, x in enumerate(values) if x}


# ---------------------------------------------------------------------------
# skew patterns

@dataclass(frozen=True)
class SkewPattern:
    """Which argument slots of a multilinear map are alternating.

    ``blocks`` holds disjoint half-open 0-based slot ranges ``(start, stop)``.
    """

    arity: int
    blocks: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError("arity must be non-negative")
        blocks = tuple(tuple(b) for b in self.blocks if b[1] - b[0] >= 2)
        used: set[int] = set()
        for start, stop in blocks:
            if not 0 <= start < stop <= self.arity:
                raise ValueError(f"block {(start, stop)} outside arity {self.arity}")
            span = set(range(start, stop))
            if used & span:
                raise ValueError("alternating blocks overlap")
            used |= span
        object.__setattr__(self, "blocks", tuple(sorted(blocks)))

    @classmethod
    def from_ranges(cls, arity: int, ranges: Iterable[tuple[int, int]]) -> "SkewPattern":
        """Build from 1-based inclusive slot ranges, as written in the file format."""
        return cls(arity, tuple((a - 1, b) for a, b in ranges))

    def ranges(self) -> list[tuple[int, int]]:
        return [(a + 1, b) for a, b in self.blocks]

    @classmethod
    def alternating(cls, n: int) -> "SkewPattern":
        return cls(n, ((0, n),))

    @classmethod
    def leading(cls, n: int, k: int) -> "SkewPattern":
        """Alternating in the first ``k`` of ``n`` slots."""
        return cls(n, ((0, k),))

    def canonical(self, idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
        sign = 1
        out = list(idx)
        for start, stop in self.blocks:
            s, block = _sort_sign(idx[start:stop])
            if not s:
                return 0, tuple(idx)
            sign *= s
            out[start:stop] = block
        return sign, tuple(out)

    def is_canonical(self, idx: Sequence[int]) -> bool:
        return all(
            all(idx[i] < idx[i + 1] for i in range(start, stop - 1))
            for start, stop in self.blocks
        )


def canonical_tuples(slot_dims: Sequence[int], blocks: Iterable[tuple[int, int]] = ()) -> Iterator[tuple[int, ...]]:
    """Lexicographic enumeration of index tuples canonical for ``blocks``."""
    block_at = {start: stop for start, stop in blocks if stop - start >= 1}
    segments = []
    pos = 0
    while pos < len(slot_dims):
        stop = block_at.get(pos, pos + 1)
        dims = set(slot_dims[pos:stop])
        if len(dims) != 1:
            raise ShapeError("an alternating block must span slots of equal dimension")
        width = stop - pos
        if width == 1:
            segments.append([(i,) for i in range(slot_dims[pos])])
        else:
            segments.append(list(itertools.combinations(range(slot_dims[pos]), width)))
        pos = stop
    for parts in itertools.product(*segments):
        yield tuple(itertools.chain.from_iterable(parts))


# ---------------------------------------------------------------------------
# structure tensors

@dataclass(frozen=True)
class StructureTensor:
    """A multilinear map given by its values on canonical basis tuples.

    ``dim`` is the output dimension; ``slot_dims`` gives the input dimension of
    every slot (default: ``dim`` for all of them, the algebra case).
    """

    dim: int
    pattern: SkewPattern
    entries: Mapping[tuple[int, ...], Mapping[int, Fraction]]
    slot_dims: tuple[int, ...] = None
    _lookup_cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.slot_dims is None:
            object.__setattr__(self, "slot_dims", (self.dim,) * self.pattern.arity)
        else:
            object.__setattr__(self, "slot_dims", tuple(self.slot_dims))
        if len(self.slot_dims) != self.pattern.arity:
            raise ShapeError("slot_dims length differs from the pattern arity")
        for start, stop in self.pattern.blocks:
            if len(set(self.slot_dims[start:stop])) != 1:
                raise ShapeError("an alternating block must span slots of equal dimension")

    # construction -------------------------------------------------------
    @classmethod
    def from_entries(
        cls,
        dim: int,
        pattern: SkewPattern,
        entries: Mapping[Sequence[int], Mapping[int, object]],
        slot_dims: Sequence[int] | None = None,
        *,
        normalize: bool = False,
    ) -> "StructureTensor":
        """Validate and store entries (0-based).

        Non-canonical keys raise unless ``normalize`` is set, in which case
        they are sorted with the permutation sign applied.
        """
        slot_dims = tuple(slot_dims) if slot_dims is not None else (dim,) * pattern.arity
        stored: dict[tuple[int, ...], Vec] = {}
        for key, value in entries.items():
            key = tuple(key)
            if len(key) != pattern.arity:
                raise ShapeError(f"index {key} has wrong length for arity {pattern.arity}")
            for k, d in zip(key, slot_dims):
                if not 0 <= k < d:
                    raise ShapeError(f"index {key} out of range")
            sign, canon = pattern.canonical(key)
            if canon != key or not sign:
                if not normalize:
                    raise ValueError(f"non-canonical index {key} for pattern {pattern.ranges()}")
                if not sign:
                    continue
            vec = stored.setdefault(canon, {})
            for i, c in value.items():
                if not 0 <= i < dim:
                    raise ShapeError(f"output index {i} out of range")
                vadd(vec, {i: as_fraction(c)}, sign)
        return cls(dim, pattern, {k: v for k, v in sorted(stored.items()) if v}, slot_dims)

    @classmethod
    def build(
        cls,
        dim: int,
        pattern: SkewPattern,
        fn: Callable[[tuple[int, ...]], Mapping[int, Fraction]],
        slot_dims: Sequence[int] | None = None,
    ) -> "StructureTensor":
        """Tabulate ``fn`` on every canonical basis tuple."""
        slot_dims = tuple(slot_dims) if slot_dims is not None else (dim,) * pattern.arity
        entries = {}
        for idx in canonical_tuples(slot_dims, pattern.blocks):
            v = {k: Fraction(x) for k, x in fn(idx).items() if x}
            if v:
                entries[idx] = v
        return cls(dim, pattern, entries, slot_dims)

    @classmethod
    def zero(cls, dim: int, pattern: SkewPattern, slot_dims=None) -> "StructureTensor":
        return cls(dim, pattern, {}, slot_dims)

    # evaluation ---------------------------------------------------------
    @property
    def arity(self) -> int:
        return self.pattern.arity

    def is_zero(self) -> bool:
        return not self.entries

    def _lookup(self, idx: tuple[int, ...]):
        hit = self._lookup_cache.get(idx)
        if hit is None:
            sign, canon = self.pattern.canonical(idx)
            vec = self.entries.get(canon) if sign else None
            hit = (sign, vec) if vec else (0, None)
            self._lookup_cache[idx] = hit
        return hit

    def basis(self, idx: Sequence[int]) -> Vec:
        """Value on a basis tuple (any order), as a fresh sparse vector."""
        sign, vec = self._lookup(tuple(idx))
        if not sign:
            return {}
        return {k: sign * x for k, x in vec.items()}

    def __call__(self, *args: Arg) -> Vec:
        """Multilinear evaluation; each argument is a basis index or sparse vector."""
        if len(args) != self.arity:
            raise ShapeError(f"expected {self.arity} arguments, got {len(args)}")
        supports = []
        for a in args:
            if isinstance(a, int):
                supports.append(((a, 1),))
            elif not a:
                return {}
            else:
                supports.append(tuple(a.items()))
        out: Vec = {}
        for combo in itertools.product(*supports):
            sign, vec = self._lookup(tuple(c[0] for c in combo))
            if not sign:
                continue
            coef = sign
            for c in combo:
                coef *= c[1]
            vadd(out, vec, coef)
        return out

    def with_entry(self, idx: Sequence[int], value: Mapping[int, object]) -> "StructureTensor":
        """Copy with the value at one canonical tuple replaced."""
        idx = tuple(idx)
        if not self.pattern.is_canonical(idx):
            raise ValueError(f"non-canonical index {idx}")
        entries = dict(self.entries)
        vec = {k: as_fraction(c) for k, c in value.items() if c}
        if vec:
            entries[idx] = vec
        else:
            entries.pop(idx, None)
        return StructureTensor(self.dim, self.pattern, dict(sorted(entries.items())), self.slot_dims)

    def items(self):
        return sorted(self.entries.items())

    def __eq__(self, other):
        if not isinstance(other, StructureTensor):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.pattern == other.pattern
            and self.slot_dims == other.slot_dims
            and dict(self.entries) == dict(other.entries)
        )

    __hash__ = None


def tensor_eval(t: StructureTensor, args: Sequence[Sequence]) -> list[Fraction]:
    """Evaluate ``t`` on dense coordinate vectors; returns a dense vector."""
    if len(args) != t.arity:
        raise ShapeError(f"expected {t.arity} arguments, got {len(args)}")
    sparse = []
    for a, d in zip(args, t.slot_dims):
        if len(a) != d:
            raise ShapeError(f"argument of length {len(a)} where {d} expected")
        sparse.append(vsparse(a))
    return list(vdense(t(*sparse), t.dim))


# ---------------------------------------------------------------------------
# exact linear algebra

def _fraction_rows(rows) -> list[list[Fraction]]:
    return [[as_fraction(x) for x in r] for r in rows]


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = _fraction_rows(rows)
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def matrix_rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1]) if rows else 0


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of ``{x : rows @ x = 0}``, one vector per free column."""
    if not rows:
        return [[ONE if j == i else ZERO for j in range(ncols)] for i in range(ncols)]
    m, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [ZERO] * ncols
        x[f] = ONE
        for row, p in zip(m, pivots):
            x[p] = -row[f]
        basis.append(x)
    return basis


@dataclass(frozen=True)
class LinearMap:
    """``rows x cols`` matrix acting on column vectors: column ``j`` is the image of ``e_j``."""

    rows: int
    cols: int
    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        m = tuple(tuple(as_fraction(x) for x in r) for r in self.matrix)
        if len(m) != self.rows or any(len(r) != self.cols for r in m):
            raise ShapeError(f"matrix is not {self.rows}x{self.cols}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "LinearMap":
        rows = [list(r) for r in rows]
        return cls(len(rows), len(rows[0]) if rows else 0, rows)

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Mapping[int, Fraction]]) -> "LinearMap":
        m = [[ZERO] * len(columns) for _ in range(rows)]
        for j, col in enumerate(columns):
            for i, x in col.items():
                m[i][j] = as_fraction(x)
        return cls(rows, len(columns), m)

    @classmethod
    def identity(cls, n: int) -> "LinearMap":
        return cls(n, n, [[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int | None = None) -> "LinearMap":
        cols = rows if cols is None else cols
        return cls(rows, cols, [[ZERO] * cols for _ in range(rows)])

    @classmethod
    def diag(cls, values: Sequence) -> "LinearMap":
        n = len(values)
        return cls(n, n, [[as_fraction(values[i]) if i == j else ZERO for j in range(n)] for i in range(n)])

    def __call__(self, v: Arg) -> Vec:
        if isinstance(v, int):
            return self.column(v)
        out: Vec = {}
        for j, x in v.items():
            for i in range(self.rows):
                c = self.matrix[i][j]
                if c:
                    out[i] = out.get(i, 0) + c * x
        return {i: x for i, x in out.items() if x}

    def column(self, j: int) -> Vec:
        return {i: self.matrix[i][j] for i in range(self.rows) if self.matrix[i][j]}

    def columns(self) -> list[Vec]:
        return [self.column(j) for j in range(self.cols)]

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        if self.cols != other.rows:
            raise ShapeError("inner dimensions differ")
        cols_o = list(zip(*other.matrix)) if other.rows else [()] * other.cols
        return LinearMap(
            self.rows,
            other.cols,
            [[sum((a * b for a, b in zip(row, col)), ZERO) for col in cols_o] for row in self.matrix],
        )

    def __add__(self, other: "LinearMap") -> "LinearMap":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError("shape mismatch")
        return LinearMap(self.rows, self.cols, [[a + b for a, b in zip(r, s)] for r, s in zip(self.matrix, other.matrix)])

    def __neg__(self) -> "LinearMap":
        return self.scale(-1)

    def __sub__(self, other: "LinearMap") -> "LinearMap":
        return self + (-other)

    def scale(self, c) -> "LinearMap":
        c = as_fraction(c)
        return LinearMap(self.rows, self.cols, [[c * x for x in r] for r in self.matrix])

    @property
    def T(self) -> "LinearMap":
        return LinearMap(self.cols, self.rows, list(zip(*self.matrix)) if self.rows else [[]] * self.cols)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.matrix)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def rank(self) -> int:
        return matrix_rank(self.matrix)

    def is_injective(self) -> bool:
        return self.rank() == self.cols

    def is_invertible(self) -> bool:
        return self.is_square() and self.rank() == self.rows

    def commutes_with(self, other: "LinearMap") -> bool:
        return self @ other == other @ self

    def block_diag(self, other: "LinearMap") -> "LinearMap":
        m = [list(r) + [ZERO] * other.cols for r in self.matrix]
        m += [[ZERO] * self.cols + list(r) for r in other.matrix]
        return LinearMap(self.rows + other.rows, self.cols + other.cols, m)


def invert(m: LinearMap) -> LinearMap:
    """Exact inverse; raises :class:`SingularMatrixError` carrying the rank."""
    if not m.is_square():
        raise ShapeError(f"cannot invert a {m.rows}x{m.cols} map")
    n = m.rows
    aug = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(m.matrix)]
    red, pivots = rref(aug, n)
    if len(pivots) < n:
        raise SingularMatrixError(len(pivots), n)
    return LinearMap(n, n, [r[n:] for r in red])


@dataclass(frozen=True)
class BilinearForm:
    """``B(e_i, e_j) = matrix[i][j]`` with a declared symmetry."""

    dim: int
    matrix: tuple[tuple[Fraction, ...], ...]
    symmetry: str = "symmetric"

    def __post_init__(self):
        if self.symmetry not in ("symmetric", "skew-symmetric"):
            raise ValueError(f"unknown symmetry {self.symmetry!r}")
        m = tuple(tuple(as_fraction(x) for x in r) for r in self.matrix)
        if len(m) != self.dim or any(len(r) != self.dim for r in m):
            raise ShapeError(f"form matrix is not {self.dim}x{self.dim}")
        s = 1 if self.symmetry == "symmetric" else -1
        for i in range(self.dim):
            for j in range(self.dim):
                if m[i][j] != s * m[j][i]:
                    raise ValueError(f"matrix is not {self.symmetry} at ({i + 1},{j + 1})")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_rows(cls, rows, symmetry="symmetric") -> "BilinearForm":
        return cls(len(rows), rows, symmetry)

    def __call__(self, x: Arg, y: Arg) -> Fraction:
        x = unit(x) if isinstance(x, int) else x
        y = unit(y) if isinstance(y, int) else y
        total = ZERO
        for i, a in x.items():
            row = self.matrix[i]
            for j, b in y.items():
                if row[j]:
                    total += a * row[j] * b
        return total

    @property
    def skew(self) -> bool:
        return self.symmetry == "skew-symmetric"

    def as_map(self) -> LinearMap:
        return LinearMap(self.dim, self.dim, self.matrix)

    def rank(self) -> int:
        return matrix_rank(self.matrix)

    def is_nondegenerate(self) -> bool:
        return self.rank() == self.dim

    def solve_left(self, f: Mapping[int, Fraction]) -> Vec:
        """The unique ``v`` with ``B(v, e_j) = f[j]`` for all ``j``."""
        return invert(self.as_map().T)(f)


@dataclass(frozen=True)
class Covector:
    dim: int
    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        c = tuple(as_fraction(x) for x in self.coefficients)
        if len(c) != self.dim:
            raise ShapeError("covector length differs from dim")
        object.__setattr__(self, "coefficients", c)

    def __call__(self, v: Arg) -> Fraction:
        if isinstance(v, int):
            return self.coefficients[v]
        return sum((self.coefficients[i] * x for i, x in v.items()), ZERO)

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def compose(self, m: LinearMap) -> "Covector":
        """``self o m``."""
        return Covector(m.cols, [self(m.column(j)) for j in range(m.cols)])


def grouped_tuples(*groups: tuple[int, int]) -> Iterator[tuple[int, ...]]:
    """Tuples built from ``(dim, width)`` groups.

    A group of width ``w >= 2`` contributes ``w`` strictly increasing indices,
    width 1 a single free index, width 0 nothing.
    """
    slot_dims: list[int] = []
    blocks = []
    for dim, width in groups:
        if width >= 2:
            blocks.append((len(slot_dims), len(slot_dims) + width))
        slot_dims.extend([dim] * max(width, 0))
    return canonical_tuples(slot_dims, blocks)


def omit(seq: Sequence, i: int) -> tuple:
    """``seq`` without position ``i`` (0-based)."""
    return tuple(seq[:i]) + tuple(seq[i + 1:])
