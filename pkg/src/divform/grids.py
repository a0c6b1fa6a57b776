"""Discrete domains, boundary conditions, grid functions and weighted norms.

Grids are uniform tensor grids on an interval (dim 1) or a rectangle (dim 2).
Nodes carry quadrature weights (full cell volume at interior nodes, half at
boundary nodes) so that sums over nodes approximate integrals over the domain
to second order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

FACES_1D = ("left", "right")
FACES_2D = ("left", "right", "bottom", "top")


@dataclass(frozen=True)
class Grid:
    """Uniform tensor grid on [0, extents[0]] (x [0, extents[1]] in 2D)."""

    dim: int
    extents: tuple[float, ...]
    nodes_per_axis: tuple[int, ...]

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if len(self.extents) != self.dim or len(self.nodes_per_axis) != self.dim:
            raise ValueError("extents/nodes_per_axis length must equal dim")
        if any(n < 3 for n in self.nodes_per_axis):
            raise ValueError("need at least 3 nodes per axis")
        if any(e <= 0 for e in self.extents):
            raise ValueError("extents must be positive")

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(e / (n - 1) for e, n in zip(self.extents, self.nodes_per_axis))

    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.nodes_per_axis))

    @property
    def n_cells(self) -> int:
        return int(np.prod([n - 1 for n in self.nodes_per_axis]))

    def node_coords(self) -> np.ndarray:
        """(n_nodes, dim) array of node positions, x fastest."""
        axes = [np.linspace(0.0, e, n) for e, n in zip(self.extents, self.nodes_per_axis)]
        if self.dim == 1:
            return axes[0][:, None]
        X, Y = np.meshgrid(axes[0], axes[1], indexing="xy")
        return np.column_stack([X.ravel(), Y.ravel()])

    def cell_centers(self) -> np.ndarray:
        axes = [
            (np.arange(n - 1) + 0.5) * h
            for n, h in zip(self.nodes_per_axis, self.spacing)
        ]
        if self.dim == 1:
            return axes[0][:, None]
        X, Y = np.meshgrid(axes[0], axes[1], indexing="xy")
        return np.column_stack([X.ravel(), Y.ravel()])

    def node_weights(self) -> np.ndarray:
        """Quadrature weight per node: cell volume, halved on boundary faces."""
        per_axis = []
        for n, h in zip(self.nodes_per_axis, self.spacing):
            w = np.full(n, h)
            w[0] = w[-1] = h / 2
            per_axis.append(w)
        if self.dim == 1:
            return per_axis[0]
        return np.outer(per_axis[1], per_axis[0]).ravel()


def interval(extent: float = 1.0, nodes: int = 65) -> Grid:
    return Grid(1, (float(extent),), (int(nodes),))


def rectangle(extents: tuple[float, float] = (1.0, 1.0), nodes: tuple[int, int] = (17, 17)) -> Grid:
    return Grid(2, (float(extents[0]), float(extents[1])), (int(nodes[0]), int(nodes[1])))


@dataclass(frozen=True)
class BoundaryCondition:
    """Dirichlet, Neumann, or mixed (Dirichlet on a set of boundary faces).

    ``dirichlet_faces`` names the faces where functions vanish.  Dirichlet is
    the same as mixed with every face; Neumann the same as mixed with none.
    """

    kind: str
    dirichlet_faces: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.kind not in ("dirichlet", "neumann", "mixed"):
            raise ValueError(f"unknown boundary condition kind {self.kind!r}")
        if self.kind == "mixed" and not self.dirichlet_faces:
            raise ValueError("mixed boundary condition requires a non-empty Dirichlet face set")

    def faces_for(self, grid: Grid) -> frozenset[str]:
        all_faces = FACES_1D if grid.dim == 1 else FACES_2D
        if self.kind == "dirichlet":
            return frozenset(all_faces)
        if self.kind == "neumann":
            return frozenset()
        unknown = self.dirichlet_faces - set(all_faces)
        if unknown:
            raise ValueError(f"faces {sorted(unknown)} not valid for dim {grid.dim}")
        return self.dirichlet_faces

    def dirichlet_mask(self, grid: Grid) -> np.ndarray:
        """Boolean per node, True where the function is pinned to zero."""
        faces = self.faces_for(grid)
        mask = np.zeros(grid.n_nodes, dtype=bool)
        if grid.dim == 1:
            n = grid.nodes_per_axis[0]
            if "left" in faces:
                mask[0] = True
            if "right" in faces:
                mask[n - 1] = True
            return mask
        nx, ny = grid.nodes_per_axis
        idx = np.arange(grid.n_nodes)
        i, j = idx % nx, idx // nx
        if "left" in faces:
            mask |= i == 0
        if "right" in faces:
            mask |= i == nx - 1
        if "bottom" in faces:
            mask |= j == 0
        if "top" in faces:
            mask |= j == ny - 1
        return mask


def dirichlet() -> BoundaryCondition:
    return BoundaryCondition("dirichlet")


def neumann() -> BoundaryCondition:
    return BoundaryCondition("neumann")


def mixed(faces) -> BoundaryCondition:
    return BoundaryCondition("mixed", frozenset(faces))


@dataclass(frozen=True)
class GridFunction:
    """Complex nodal values on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"value count {v.shape} does not match grid nodes ({self.grid.n_nodes},)"
            )
        object.__setattr__(self, "values", v)


def lp_norm(f: GridFunction, p: float) -> float:
    """Weighted L^p norm; p = inf gives the max of |f|.

    Uses the grid's node weights, so the p = 2 case is the quadrature
    approximation of the integral norm.
    """
    if p < 1:
        raise ValueError(f"p must lie in [1, inf], got {p}")
    a = np.abs(f.values)
    if np.isinf(p):
        return float(a.max())
    w = f.grid.node_weights()
    return float((w @ a**p) ** (1.0 / p))


def weighted_norm(values: np.ndarray, weights: np.ndarray, p: float = 2.0) -> float:
    """L^p norm of a raw vector against explicit node weights."""
    a = np.abs(values)
    if np.isinf(p):
        return float(a.max()) if a.size else 0.0
    return float((weights @ a**p) ** (1.0 / p))


def _bandlimited_values(grid: Grid, rng: np.random.Generator, n_modes: int) -> np.ndarray:
    """Sine series with seeded coefficients; same continuum function at any resolution."""
    coords = grid.node_coords()
    if grid.dim == 1:
        x = coords[:, 0] / grid.extents[0]
        c = rng.standard_normal(n_modes) + 1j * rng.standard_normal(n_modes)
        out = np.zeros(grid.n_nodes, dtype=complex)
        for k in range(n_modes):
            out += c[k] * np.sin((k + 1) * np.pi * x)
        return out
    x = coords[:, 0] / grid.extents[0]
    y = coords[:, 1] / grid.extents[1]
    m = max(2, int(np.sqrt(n_modes)))
    c = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    out = np.zeros(grid.n_nodes, dtype=complex)
    for kx in range(m):
        for ky in range(m):
            out += c[kx, ky] * np.sin((kx + 1) * np.pi * x) * np.sin((ky + 1) * np.pi * y)
    return out


def _smooth_values(grid: Grid, values: np.ndarray, passes: int = 4) -> np.ndarray:
    """Fixed number of neighbor-averaging passes."""
    if grid.dim == 1:
        v = values.copy()
        for _ in range(passes):
            v[1:-1] = 0.25 * v[:-2] + 0.5 * v[1:-1] + 0.25 * v[2:]
        return v
    nx, ny = grid.nodes_per_axis
    v = values.reshape(ny, nx).copy()
    for _ in range(passes):
        inner = (
            0.5 * v[1:-1, 1:-1]
            + 0.125 * (v[:-2, 1:-1] + v[2:, 1:-1] + v[1:-1, :-2] + v[1:-1, 2:])
        )
        v[1:-1, 1:-1] = inner
    return v.ravel()


def random_test_function(
    grid: Grid,
    seed: int,
    smoothness: str = "rough",
    n_modes: int = 16,
) -> GridFunction:
    """Reproducible pseudo-random complex grid function.

    ``rough`` draws iid complex normals per node; ``smooth`` applies a fixed
    number of neighbor-averaging passes to the rough field; ``bandlimited``
    keeps the lowest ``n_modes`` sine modes (coefficients drawn from the seed,
    so two grids of different resolution sample the same continuum function).
    """
    rng = np.random.default_rng(seed)
    if smoothness == "bandlimited":
        return GridFunction(grid, _bandlimited_values(grid, rng, n_modes))
    vals = rng.standard_normal(grid.n_nodes) + 1j * rng.standard_normal(grid.n_nodes)
    if smoothness == "rough":
        return GridFunction(grid, vals)
    if smoothness == "smooth":
        return GridFunction(grid, _smooth_values(grid, vals))
    raise ValueError(f"unknown smoothness {smoothness!r}")


def discrete_gradient_norm(f: GridFunction) -> float:
    """l2 norm of forward differences; used to compare roughness of fields."""
    if f.grid.dim == 1:
        h = f.grid.spacing[0]
        return float(np.linalg.norm(np.diff(f.values) / h))
    nx, ny = f.grid.nodes_per_axis
    hx, hy = f.grid.spacing
    v = f.values.reshape(ny, nx)
    gx = np.diff(v, axis=1) / hx
    gy = np.diff(v, axis=0) / hy
    return float(np.sqrt(np.linalg.norm(gx) ** 2 + np.linalg.norm(gy) ** 2))


def to_csv(f: GridFunction, path) -> None:
    """Write node coordinates and re/im parts as CSV."""
    coords = f.grid.node_coords()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["x"] if f.grid.dim == 1 else ["x", "y"]
        writer.writerow(header + ["re", "im"])
        for row, val in zip(coords, f.values):
            writer.writerow([f"{c:.17g}" for c in row] + [f"{val.real:.17g}", f"{val.imag:.17g}"])
