"""Lattice geometry and canonical bond tables.

A :class:`BondTable` lists every hopping bond of a lattice in a fixed order.
That order is the gene layout of a chromosome: gene ``b`` is the hopping
magnitude on ``table.bonds[b]``.

Bonds are sorted by ``(shell, i, j)`` so that all NN bonds come before all
NNN bonds. An NN-only chromosome is therefore a prefix of the NN+NNN
chromosome of the same lattice.

The triangular lattice is embedded on a square grid with one extra diagonal
per plaquette, ``(r, c) -- (r+1, c+1)``. Its second coordination ring is
reached by the steps ``(1, -1)``, ``(1, 2)`` and ``(2, 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import NamedTuple

import numpy as np


class LatticeKind(str, Enum):
    CHAIN = "chain"
    SQUARE = "square"
    TRIANGULAR = "triangular"


class Boundary(str, Enum):
    OPEN = "open"
    PERIODIC = "periodic"


class Shells(str, Enum):
    NN = "nn"
    NN_PLUS_NNN = "nnn"


class Shell(str, Enum):
    NN = "nn"
    NNN = "nnn"


# (d_row, d_col) steps; only "forward" halves, the reverse bonds are implied.
_STEPS = {
    LatticeKind.CHAIN: {Shell.NN: [(0, 1)], Shell.NNN: [(0, 2)]},
    LatticeKind.SQUARE: {Shell.NN: [(0, 1), (1, 0)], Shell.NNN: [(1, 1), (1, -1)]},
    LatticeKind.TRIANGULAR: {
        Shell.NN: [(0, 1), (1, 0), (1, 1)],
        Shell.NNN: [(1, -1), (1, 2), (2, 1)],
    },
}


@dataclass(frozen=True)
class LatticeSpec:
    """Geometry of a lattice.

    Parameters
    ----------
    kind : LatticeKind or str
        ``"chain"``, ``"square"`` or ``"triangular"``.
    extent : tuple of int
        ``(N,)`` for a chain, ``(rows, cols)`` for the 2D lattices.
    boundary : Boundary or str
        ``"open"`` or ``"periodic"`` (torus in 2D).
    shells : Shells or str
        ``"nn"`` or ``"nnn"`` (nearest plus next-nearest neighbors).
    """

    kind: LatticeKind
    extent: tuple[int, ...]
    boundary: Boundary = Boundary.OPEN
    shells: Shells = Shells.NN

    def __post_init__(self):
        object.__setattr__(self, "kind", LatticeKind(self.kind))
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        object.__setattr__(self, "shells", Shells(self.shells))
        extent = tuple(int(e) for e in np.atleast_1d(self.extent))
        object.__setattr__(self, "extent", extent)

        if self.kind is LatticeKind.CHAIN:
            if len(extent) != 1:
                raise ValueError(f"chain extent must be (N,), got {extent}")
            if extent[0] < 2:
                raise ValueError(f"chain needs at least 2 sites, got {extent[0]}")
            if self.boundary is Boundary.PERIODIC and extent[0] < 3:
                raise ValueError("periodic chain needs at least 3 sites")
        else:
            if len(extent) != 2:
                raise ValueError(f"{self.kind.value} extent must be (rows, cols), got {extent}")
            if min(extent) < 2:
                raise ValueError(f"2D extents must be >= 2 in each direction, got {extent}")

    @classmethod
    def chain(cls, n, boundary="open", shells="nn"):
        return cls(LatticeKind.CHAIN, (n,), boundary, shells)

    @classmethod
    def square(cls, rows, cols, boundary="open", shells="nn"):
        return cls(LatticeKind.SQUARE, (rows, cols), boundary, shells)

    @classmethod
    def triangular(cls, rows, cols, boundary="open", shells="nn"):
        return cls(LatticeKind.TRIANGULAR, (rows, cols), boundary, shells)

    @property
    def grid(self) -> tuple[int, int]:
        """``(rows, cols)``; a chain is a single row."""
        if self.kind is LatticeKind.CHAIN:
            return 1, self.extent[0]
        return self.extent[0], self.extent[1]

    @property
    def n_sites(self) -> int:
        rows, cols = self.grid
        return rows * cols

    @property
    def periodic(self) -> bool:
        return self.boundary is Boundary.PERIODIC

    def with_shells(self, shells) -> "LatticeSpec":
        return LatticeSpec(self.kind, self.extent, self.boundary, shells)


class Bond(NamedTuple):
    i: int
    j: int
    shell: Shell


@dataclass(frozen=True)
class BondTable:
    spec: LatticeSpec
    bonds: tuple[Bond, ...]
    n_sites: int

    def __len__(self):
        return len(self.bonds)

    @property
    def n_genes(self) -> int:
        return len(self.bonds)

    @cached_property
    def i_index(self) -> np.ndarray:
        return np.array([b.i for b in self.bonds], dtype=np.intp)

    @cached_property
    def j_index(self) -> np.ndarray:
        return np.array([b.j for b in self.bonds], dtype=np.intp)

    @cached_property
    def nn_mask(self) -> np.ndarray:
        return np.array([b.shell is Shell.NN for b in self.bonds], dtype=bool)

    @property
    def n_nn(self) -> int:
        return int(self.nn_mask.sum())

    @property
    def nn_bonds(self) -> tuple[Bond, ...]:
        return tuple(b for b in self.bonds if b.shell is Shell.NN)

    def degrees(self, shell: Shell | str | None = None) -> np.ndarray:
        """Number of bonds touching each site, optionally for one shell."""
        deg = np.zeros(self.n_sites, dtype=int)
        for b in self.bonds:
            if shell is None or b.shell is Shell(shell):
                deg[b.i] += 1
                deg[b.j] += 1
        return deg


def site_index(row: int, col: int, spec: LatticeSpec) -> int:
    """Row-major site index of grid cell ``(row, col)``."""
    rows, cols = spec.grid
    if not (0 <= row < rows and 0 <= col < cols):
        raise IndexError(f"cell ({row}, {col}) outside {rows}x{cols} grid")
    return row * cols + col


def site_coords(site: int, spec: LatticeSpec) -> tuple[int, int]:
    rows, cols = spec.grid
    if not 0 <= site < rows * cols:
        raise IndexError(f"site {site} outside lattice of {rows * cols} sites")
    return divmod(site, cols)


def build_bond_table(spec: LatticeSpec) -> BondTable:
    """Enumerate all bonds of ``spec`` in canonical ``(shell, i, j)`` order.

    Raises
    ------
    ValueError
        If the lattice is too small for its boundary condition, i.e. some
        step wraps onto a site itself or two steps give the same site pair.
    """
    rows, cols = spec.grid
    shells = [Shell.NN] if spec.shells is Shells.NN else [Shell.NN, Shell.NNN]

    seen: dict[tuple[int, int], Shell] = {}
    bonds: list[Bond] = []
    for shell in shells:
        for dr, dc in _STEPS[spec.kind][shell]:
            for r in range(rows):
                for c in range(cols):
                    r2, c2 = r + dr, c + dc
                    if spec.periodic:
                        r2 %= rows
                        c2 %= cols
                    elif not (0 <= r2 < rows and 0 <= c2 < cols):
                        continue
                    a = r * cols + c
                    b = r2 * cols + c2
                    if a == b:
                        raise ValueError(
                            f"{spec.kind.value} {rows}x{cols} is too small for "
                            f"periodic step {(dr, dc)}: site bonds to itself"
                        )
                    pair = (min(a, b), max(a, b))
                    if pair in seen:
                        raise ValueError(
                            f"{spec.kind.value} extent {spec.extent} with "
                            f"{spec.boundary.value} boundary gives duplicate bond "
                            f"{pair} ({seen[pair].value} and {shell.value})"
                        )
                    seen[pair] = shell
                    bonds.append(Bond(pair[0], pair[1], shell))

    order = {Shell.NN: 0, Shell.NNN: 1}
    bonds.sort(key=lambda b: (order[b.shell], b.i, b.j))
    return BondTable(spec=spec, bonds=tuple(bonds), n_sites=spec.n_sites)


def chain_bond_order(table: BondTable) -> np.ndarray:
    """Gene indices of a chain's NN bonds in spatial order.

    Entry ``s`` is the gene of bond ``(s, s+1)``; on a ring the last entry is
    the wraparound bond ``(N-1, 0)``. Canonical gene order differs from this
    on rings, where ``(0, N-1)`` sorts second.
    """
    if table.spec.kind is not LatticeKind.CHAIN:
        raise ValueError("spatial bond order is only defined for chains")
    pos = {(b.i, b.j): k for k, b in enumerate(table.bonds) if b.shell is Shell.NN}
    n = table.n_sites
    n_links = n if table.spec.periodic else n - 1
    order = []
    for s in range(n_links):
        a, b = s, (s + 1) % n
        order.append(pos[(min(a, b), max(a, b))])
    return np.array(order, dtype=np.intp)


def lattice_from_params(lattice="chain", size=None, rows=None, cols=None,
                        boundary="open", shells="nn") -> LatticeSpec:
    """Build a :class:`LatticeSpec` from flat, CLI-style parameters."""
    kind = LatticeKind(lattice)
    if kind is LatticeKind.CHAIN:
        if size is None:
            raise ValueError("chain lattice needs a size")
        return LatticeSpec(kind, (size,), boundary, shells)
    if rows is None and cols is None and size is not None:
        rows = cols = size
    if rows is None or cols is None:
        raise ValueError(f"{kind.value} lattice needs rows and cols")
    return LatticeSpec(kind, (rows, cols), boundary, shells)
