"""Periodic 2D square lattice: sites, directed links, plaquettes and loops.

Sites are numbered ``site = nx + Lx * ny``.  Every site owns two links, one
in +x and one in +y, numbered ``link = 2 * site + direction``.  Plaquettes
share the index of their lower-left site.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterator, Sequence

DEFAULT_LINK_BUDGET = 128


class Direction(IntEnum):
    X = 0
    Y = 1

    @classmethod
    def parse(cls, value) -> "Direction":
        if isinstance(value, Direction):
            return value
        if isinstance(value, str):
            return cls[value.strip().upper()]
        return cls(int(value))


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class Path:
    """Ordered sequence of ``(link, orientation)`` steps, orientation in {+1, -1}.

    Orientation +1 traverses a link from its origin to its target.
    """

    steps: tuple[tuple[int, int], ...]
    start: int
    end: int

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.steps)

    @property
    def closed(self) -> bool:
        return self.start == self.end

    def to_list(self) -> list[list[int]]:
        return [[link, sign] for link, sign in self.steps]


@dataclass(frozen=True)
class Lattice:
    Lx: int
    Ly: int
    link_budget: int = field(default=DEFAULT_LINK_BUDGET, compare=False)

    def __post_init__(self):
        if int(self.Lx) != self.Lx or int(self.Ly) != self.Ly:
            raise LatticeError("lattice extents must be integers")
        if self.Lx < 1 or self.Ly < 1:
            raise LatticeError(f"lattice extents must be positive, got {self.Lx}x{self.Ly}")
        if 2 * self.Lx * self.Ly > self.link_budget:
            raise LatticeError(
                f"{self.Lx}x{self.Ly} lattice has {2 * self.Lx * self.Ly} links, "
                f"above the link budget of {self.link_budget}"
            )

    # -- counts ---------------------------------------------------------------

    @property
    def n_sites(self) -> int:
        return self.Lx * self.Ly

    @property
    def n_links(self) -> int:
        return 2 * self.Lx * self.Ly

    @property
    def n_plaquettes(self) -> int:
        return self.Lx * self.Ly

    @property
    def degenerate(self) -> bool:
        """True when some link wraps onto its own origin (Lx == 1 or Ly == 1)."""
        return self.Lx == 1 or self.Ly == 1

    @property
    def boundary(self) -> str:
        return "periodic"

    # -- index maps -----------------------------------------------------------

    def site(self, nx: int, ny: int) -> int:
        return (nx % self.Lx) + self.Lx * (ny % self.Ly)

    def site_coords(self, site: int) -> tuple[int, int]:
        self._check_site(site)
        return site % self.Lx, site // self.Lx

    def shift(self, site: int, direction: Direction, amount: int = 1) -> int:
        nx, ny = self.site_coords(site)
        if direction == Direction.X:
            return self.site(nx + amount, ny)
        return self.site(nx, ny + amount)

    def link(self, site: int, direction) -> int:
        self._check_site(site)
        return 2 * site + int(Direction.parse(direction))

    def link_at(self, nx: int, ny: int, direction) -> int:
        return self.link(self.site(nx, ny), direction)

    def decode_link(self, link: int) -> tuple[tuple[int, int], Direction]:
        self._check_link(link)
        return self.site_coords(link // 2), Direction(link % 2)

    def link_origin(self, link: int) -> int:
        self._check_link(link)
        return link // 2

    def link_target(self, link: int) -> int:
        self._check_link(link)
        return self.shift(link // 2, Direction(link % 2))

    def link_endpoints(self, link: int) -> tuple[int, int]:
        return self.link_origin(link), self.link_target(link)

    def links_at_site(self, site: int) -> tuple[list[int], list[int]]:
        """Outgoing and incoming links of ``site``."""
        self._check_site(site)
        outgoing = [self.link(site, Direction.X), self.link(site, Direction.Y)]
        incoming = [
            self.link(self.shift(site, Direction.X, -1), Direction.X),
            self.link(self.shift(site, Direction.Y, -1), Direction.Y),
        ]
        return outgoing, incoming

    # -- plaquettes and loops --------------------------------------------------

    def plaquette_links(self, p: int) -> list[tuple[int, int]]:
        """Counterclockwise links of plaquette ``p`` with orientations (+, +, -, -)."""
        self._check_site(p)
        right = self.shift(p, Direction.X)
        up = self.shift(p, Direction.Y)
        return [
            (self.link(p, Direction.X), +1),
            (self.link(right, Direction.Y), +1),
            (self.link(up, Direction.X), -1),
            (self.link(p, Direction.Y), -1),
        ]

    def plaquettes_of_link(self, link: int) -> list[int]:
        return [p for p in range(self.n_plaquettes) if any(l == link for l, _ in self.plaquette_links(p))]

    def winding_cut(self, direction, position: int = 0) -> list[int]:
        """Links whose flux sums to the winding number in ``direction``.

        For x: the x-links leaving column ``position``; for y: the y-links
        leaving row ``position``.
        """
        direction = Direction.parse(direction)
        if direction == Direction.X:
            return [self.link_at(position, ny, Direction.X) for ny in range(self.Ly)]
        return [self.link_at(nx, position, Direction.Y) for nx in range(self.Lx)]

    def path(self, steps: Sequence[tuple[int, int]]) -> Path:
        """Validate a chain of ``(link, orientation)`` steps and return a Path."""
        if not steps:
            raise LatticeError("a path needs at least one step")
        norm = []
        position = None
        start = None
        for link, sign in steps:
            link, sign = int(link), int(sign)
            if sign not in (1, -1):
                raise LatticeError(f"orientation must be +1 or -1, got {sign}")
            a, b = self.link_endpoints(link)
            tail, head = (a, b) if sign == 1 else (b, a)
            if position is None:
                start = tail
            elif tail != position:
                raise LatticeError(f"step {(link, sign)} does not start where the previous step ended")
            position = head
            norm.append((link, sign))
        return Path(tuple(norm), start, position)

    def rectangular_loop(self, corner: int, w: int, h: int) -> Path:
        """Closed counterclockwise boundary of a ``w`` x ``h`` rectangle."""
        if not (1 <= w <= self.Lx and 1 <= h <= self.Ly):
            raise LatticeError(f"loop size {w}x{h} outside 1..{self.Lx} x 1..{self.Ly}")
        cx, cy = self.site_coords(corner)
        steps = [(self.link_at(cx + k, cy, Direction.X), +1) for k in range(w)]
        steps += [(self.link_at(cx + w, cy + k, Direction.Y), +1) for k in range(h)]
        steps += [(self.link_at(cx + w - 1 - k, cy + h, Direction.X), -1) for k in range(w)]
        steps += [(self.link_at(cx, cy + h - 1 - k, Direction.Y), -1) for k in range(h)]
        return self.path(steps)

    def wrapping_loop(self, direction, offset: int = 0) -> Path:
        """Straight non-contractible loop: a full row (x) or column (y) of links."""
        direction = Direction.parse(direction)
        if direction == Direction.X:
            steps = [(self.link_at(k, offset, Direction.X), +1) for k in range(self.Lx)]
        else:
            steps = [(self.link_at(offset, k, Direction.Y), +1) for k in range(self.Ly)]
        return self.path(steps)

    def straight_path(self, start: int, direction, length: int) -> Path:
        """Open straight path of ``length`` links (negative length walks backwards)."""
        direction = Direction.parse(direction)
        if length == 0:
            raise LatticeError("path length must be nonzero")
        steps = []
        site = start
        for _ in range(abs(length)):
            if length > 0:
                steps.append((self.link(site, direction), +1))
                site = self.shift(site, direction)
            else:
                site = self.shift(site, direction, -1)
                steps.append((self.link(site, direction), -1))
        return self.path(steps)

    # -- misc -----------------------------------------------------------------

    def to_dict(self) -> dict:
        return {"Lx": self.Lx, "Ly": self.Ly, "boundary": "periodic"}

    def _check_site(self, site: int) -> None:
        if not 0 <= site < self.n_sites:
            raise LatticeError(f"site {site} out of range for {self.Lx}x{self.Ly}")

    def _check_link(self, link: int) -> None:
        if not 0 <= link < self.n_links:
            raise LatticeError(f"link {link} out of range for {self.Lx}x{self.Ly}")


def build_lattice(Lx: int, Ly: int, link_budget: int = DEFAULT_LINK_BUDGET, boundary: str = "periodic") -> Lattice:
    """Periodic Lx x Ly lattice; any other boundary condition is rejected."""
    if str(boundary).lower() != "periodic":
        raise LatticeError(f"only periodic boundaries are supported, got {boundary!r}")
    return Lattice(Lx, Ly, link_budget)
