"""Dyadic lattice geometry on Q0 = [0, 1)^n and step-function containers.

Cells of a level-L grid are addressed two ways:

* ``flat`` index, row-major with the first coordinate fastest
  (``i1 + i2 * 2**L + i3 * 2**(2L)``). This is the order of the text format.
* ``morton`` index, the bit-interleaving of the coordinates (first
  coordinate in the lowest bit of every n-bit group). Every dyadic cube of
  level k is then a contiguous block of ``2**(n*(L-k))`` cells, and its
  Morton index at level k is the cell's Morton index shifted right by
  ``n*(L-k)``. All tree computations run in Morton order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_LEVEL = {1: 14, 2: 7, 3: 4}


class GridFormatError(ValueError):
    """Malformed grid-function or set text."""


@dataclass(frozen=True)
class GridSpec:
    n: int
    L: int

    def __post_init__(self):
        if self.n not in MAX_LEVEL:
            raise ValueError(f"dimension n must be 1, 2 or 3, got {self.n}")
        if not 0 <= self.L <= MAX_LEVEL[self.n]:
            raise ValueError(
                f"level L must be in [0, {MAX_LEVEL[self.n]}] for n={self.n}, got {self.L}"
            )

    @property
    def cells(self) -> int:
        return 1 << (self.n * self.L)

    @property
    def side(self) -> float:
        return 2.0 ** -self.L

    @property
    def fanout(self) -> int:
        return 1 << self.n

    def morton_to_flat(self) -> np.ndarray:
        return _morton_tables(self.n, self.L)[0]

    def flat_to_morton(self) -> np.ndarray:
        return _morton_tables(self.n, self.L)[1]


@dataclass(frozen=True)
class ContentParams:
    """Exponent of the Hausdorff content. ``n`` is optional; when given the
    constraint ``beta <= n`` is checked immediately, otherwise it is checked
    against the grid at every use."""

    beta: float
    n: int | None = None

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be positive and finite, got {self.beta}")
        if self.n is not None and self.beta > self.n:
            raise ValueError(f"beta must satisfy beta <= n = {self.n}, got {self.beta}")

    def check(self, spec: GridSpec) -> None:
        if self.beta > spec.n:
            raise ValueError(f"beta must satisfy beta <= n = {spec.n}, got {self.beta}")


def side_powers(L: int, beta: float) -> list[float]:
    """``l(Q)**beta`` for a cube of each level 0..L, computed as 2**(-k*beta).

    Every module uses this table so that tree costs agree bit for bit.
    """
    return [2.0 ** (-k * beta) for k in range(L + 1)]


def child_sum(a: np.ndarray, fanout: int) -> np.ndarray:
    """Sum consecutive groups of ``fanout`` entries, left to right."""
    blocks = a.reshape(-1, fanout)
    s = blocks[:, 0].copy()
    for c in range(1, fanout):
        s = s + blocks[:, c]
    return s


@lru_cache(maxsize=None)
def _morton_tables(n: int, L: int) -> tuple[np.ndarray, np.ndarray]:
    m = np.arange(1 << (n * L), dtype=np.int64)
    flat = np.zeros_like(m)
    for j in range(n):
        coord = np.zeros_like(m)
        for b in range(L):
            coord |= ((m >> (b * n + j)) & 1) << b
        flat += coord << (j * L)
    inverse = np.empty_like(flat)
    inverse[flat] = m
    flat.setflags(write=False)
    inverse.setflags(write=False)
    return flat, inverse


def interleave(index: tuple[int, ...], level: int) -> int:
    n = len(index)
    m = 0
    for b in range(level):
        for j, i in enumerate(index):
            m |= ((i >> b) & 1) << (b * n + j)
    return m


def deinterleave(m: int, n: int, level: int) -> tuple[int, ...]:
    index = [0] * n
    for b in range(level):
        for j in range(n):
            index[j] |= ((m >> (b * n + j)) & 1) << b
    return tuple(index)


@dataclass(frozen=True, order=True)
class DyadicCube:
    """The half-open box prod_j [i_j 2^-k, (i_j + 1) 2^-k)."""

    level: int
    index: tuple[int, ...]

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("cube level must be non-negative")
        object.__setattr__(self, "index", tuple(int(i) for i in self.index))
        for i in self.index:
            if not 0 <= i < (1 << self.level):
                raise ValueError(f"index {self.index} out of range at level {self.level}")

    @property
    def n(self) -> int:
        return len(self.index)

    @property
    def side(self) -> float:
        return 2.0 ** -self.level

    @property
    def morton(self) -> int:
        return interleave(self.index, self.level)

    @classmethod
    def from_morton(cls, m: int, n: int, level: int) -> DyadicCube:
        return cls(level, deinterleave(m, n, level))

    @classmethod
    def root(cls, n: int) -> DyadicCube:
        return cls(0, (0,) * n)

    def bounds(self) -> list[tuple[float, float]]:
        h = self.side
        return [(i * h, (i + 1) * h) for i in self.index]

    def contains(self, other: DyadicCube) -> bool:
        if other.level < self.level or other.n != self.n:
            return False
        shift = other.level - self.level
        return all((o >> shift) == i for o, i in zip(other.index, self.index))

    def parent(self) -> DyadicCube:
        if self.level == 0:
            raise ValueError("root cube has no parent")
        return DyadicCube(self.level - 1, tuple(i >> 1 for i in self.index))

    def __str__(self):
        return " ".join(str(v) for v in (self.level, *self.index))


def children(cube: DyadicCube, spec: GridSpec) -> list[DyadicCube]:
    """The 2^n sub-cubes of ``cube`` one level down, in Morton order."""
    if cube.level >= spec.L:
        raise ValueError("no children below resolution")
    base = cube.morton << cube.n
    return [DyadicCube.from_morton(base + c, cube.n, cube.level + 1) for c in range(1 << cube.n)]


def cell_cube(cell: int, spec: GridSpec) -> DyadicCube:
    if not 0 <= cell < spec.cells:
        raise IndexError(f"cell index {cell} out of range [0, {spec.cells})")
    mask = (1 << spec.L) - 1
    return DyadicCube(spec.L, tuple((cell >> (j * spec.L)) & mask for j in range(spec.n)))


def ancestors(cell: int, spec: GridSpec) -> list[DyadicCube]:
    """The L + 1 dyadic cubes containing a cell, from the cell up to Q0."""
    cube = cell_cube(cell, spec)
    chain = [cube]
    while cube.level > 0:
        cube = cube.parent()
        chain.append(cube)
    return chain


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Non-negative step function, constant on the level-L cells."""

    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if v.size != self.spec.cells:
            raise ValueError(f"expected {self.spec.cells} values, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        if np.any(v < 0):
            raise ValueError("grid function values must be non-negative")
        object.__setattr__(self, "values", _readonly(v))

    @classmethod
    def constant(cls, spec: GridSpec, c: float):
        return cls(spec, np.full(spec.cells, float(c)))

    @classmethod
    def from_morton(cls, spec: GridSpec, values_morton: np.ndarray):
        v = np.empty(spec.cells)
        v[spec.morton_to_flat()] = values_morton
        return cls(spec, v)

    def morton(self) -> np.ndarray:
        return self.values[self.spec.morton_to_flat()]

    def is_zero(self) -> bool:
        return not np.any(self.values > 0)

    def __eq__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.values, other.values)

    __hash__ = None


class Weight(GridFunction):
    """Strictly positive grid function."""

    def __post_init__(self):
        super().__post_init__()
        if self.values.size and not np.all(self.values > 0):
            raise ValueError("weight must be strictly positive on every cell")

    @classmethod
    def of(cls, f: GridFunction) -> Weight:
        return f if isinstance(f, Weight) else cls(f.spec, f.values)


@dataclass(frozen=True, eq=False)
class DyadicSet:
    """Union of level-L cells, stored as a boolean mask in flat order."""

    spec: GridSpec
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.mask).reshape(-1)
        if m.size != self.spec.cells:
            raise ValueError(f"expected {self.spec.cells} membership flags, got {m.size}")
        object.__setattr__(self, "mask", _readonly(m.astype(bool)))

    @classmethod
    def empty(cls, spec: GridSpec):
        return cls(spec, np.zeros(spec.cells, dtype=bool))

    @classmethod
    def full(cls, spec: GridSpec):
        return cls(spec, np.ones(spec.cells, dtype=bool))

    @classmethod
    def from_cells(cls, spec: GridSpec, cells):
        m = np.zeros(spec.cells, dtype=bool)
        m[list(cells)] = True
        return cls(spec, m)

    @classmethod
    def from_cube(cls, spec: GridSpec, cube: DyadicCube):
        size = 1 << (spec.n * (spec.L - cube.level))
        m = np.zeros(spec.cells, dtype=bool)
        m[cube.morton * size:(cube.morton + 1) * size] = True
        return cls.from_morton(spec, m)

    @classmethod
    def from_morton(cls, spec: GridSpec, mask_morton: np.ndarray):
        m = np.empty(spec.cells, dtype=bool)
        m[spec.morton_to_flat()] = mask_morton
        return cls(spec, m)

    def morton(self) -> np.ndarray:
        return self.mask[self.spec.morton_to_flat()]

    def cells(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def is_empty(self) -> bool:
        return not self.mask.any()

    def indicator(self, c: float = 1.0) -> GridFunction:
        return GridFunction(self.spec, np.where(self.mask, float(c), 0.0))

    def __or__(self, other: DyadicSet) -> DyadicSet:
        return DyadicSet(self.spec, self.mask | other.mask)

    def __and__(self, other: DyadicSet) -> DyadicSet:
        return DyadicSet(self.spec, self.mask & other.mask)

    def __le__(self, other: DyadicSet) -> bool:
        return bool(np.all(~self.mask | other.mask))

    def __eq__(self, other):
        if not isinstance(other, DyadicSet):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.mask, other.mask)

    __hash__ = None


# -- text format -------------------------------------------------------------

def format_number(x: float) -> str:
    return format(float(x), ".17g")


def parse_grid_function(text: str) -> GridFunction:
    """Read ``"n L"`` followed by exactly 2^(nL) non-negative decimals."""
    lines = text.splitlines()
    header_no = next((i for i, ln in enumerate(lines) if ln.strip()), None)
    if header_no is None:
        raise GridFormatError("line 1: missing header 'n L'")
    header = lines[header_no].split()
    if len(header) != 2:
        raise GridFormatError(f"line {header_no + 1}: header must be 'n L', got {lines[header_no]!r}")
    try:
        spec = GridSpec(int(header[0]), int(header[1]))
    except ValueError as exc:
        raise GridFormatError(f"line {header_no + 1}: {exc}") from None

    values = []
    for line_no in range(header_no + 1, len(lines)):
        for offset, tok in enumerate(lines[line_no].split()):
            where = f"line {line_no + 1}, value {offset + 1}"
            try:
                x = float(tok)
            except ValueError:
                raise GridFormatError(f"{where}: not a number: {tok!r}") from None
            if not math.isfinite(x):
                raise GridFormatError(f"{where}: non-finite value {tok!r}")
            if x < 0:
                raise GridFormatError(f"{where}: negative value {tok!r}")
            values.append(x)
    if len(values) != spec.cells:
        raise GridFormatError(f"expected {spec.cells} values, got {len(values)}")
    return GridFunction(spec, np.array(values))


def serialize_grid_function(f: GridFunction) -> str:
    spec = f.spec
    row = 1 << spec.L
    body = [
        " ".join(format_number(x) for x in f.values[i:i + row])
        for i in range(0, spec.cells, row)
    ]
    return "\n".join([f"{spec.n} {spec.L}", *body]) + "\n"


def parse_dyadic_set(text: str) -> DyadicSet:
    f = parse_grid_function(text)
    bad = np.flatnonzero((f.values != 0) & (f.values != 1))
    if bad.size:
        raise GridFormatError(f"set values must be 0 or 1; cell {bad[0]} has {f.values[bad[0]]!r}")
    return DyadicSet(f.spec, f.values == 1)


def serialize_dyadic_set(E: DyadicSet) -> str:
    return serialize_grid_function(E.indicator())


# -- deterministic generators ------------------------------------------------

def random_set(spec: GridSpec, density: float, seed) -> DyadicSet:
    """Each cell is a member independently with probability ``density``.

    Draws one uniform [0, 1) variate per cell, in flat order, from
    ``numpy.random.default_rng(seed)`` (PCG64).
    """
    if not 0 <= density <= 1:
        raise ValueError(f"density must lie in [0, 1], got {density}")
    u = np.random.default_rng(seed).random(spec.cells)
    return DyadicSet(spec, u < density)


def random_function(spec: GridSpec, seed, sigma: float = 1.0) -> GridFunction:
    """IID log-normal(0, sigma) cell values from ``default_rng(seed)``.

    Strictly positive, so the result is also usable as a weight.
    """
    v = np.random.default_rng(seed).lognormal(0.0, sigma, spec.cells)
    return GridFunction(spec, v)
