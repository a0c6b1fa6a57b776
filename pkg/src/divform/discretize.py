"""Assembly of the discrete divergence-form operator L = -div(A grad).

The operator is built from the sesquilinear form a(u, v) = <A grad u, grad v>
sampled per cell: in 1D the cell gradient is the plain difference quotient, in
2D the gradient of the bilinear interpolant is evaluated at the four Gauss
points of each cell (a single cell-centered gradient sample admits a spurious
checkerboard null vector under Neumann conditions, the Gauss points do not).
With G the sampled-gradient map, W the sample weights and \\hat A the per-cell
coefficient action, the stiffness matrix is K = G* W \\hat A G and the
generator is L = M^{-1} K with M the diagonal of node weights.  By
construction, <L u, u>_M equals the discrete form exactly, so accretivity is
inherited from per-cell ellipticity.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.sparse as sparse

from divform import ellipticity
from divform.ellipticity import NotEllipticError
from divform.grids import BoundaryCondition, Grid, GridFunction

_GAUSS = 1.0 / np.sqrt(3.0)


@dataclass(frozen=True)
class MatrixField:
    """A d x d complex coefficient matrix per grid cell."""

    grid: Grid
    per_cell: np.ndarray
    generator_tag: str = "custom"

    def __post_init__(self):
        a = np.asarray(self.per_cell, dtype=complex)
        d = self.grid.dim
        if a.shape != (self.grid.n_cells, d, d):
            raise ValueError(
                f"per_cell shape {a.shape} does not match ({self.grid.n_cells}, {d}, {d})"
            )
        object.__setattr__(self, "per_cell", a)

    def adjoint(self) -> "MatrixField":
        return MatrixField(self.grid, self.per_cell.conj().transpose(0, 2, 1),
                           generator_tag=self.generator_tag)


def constant_field(grid: Grid, A) -> MatrixField:
    A = np.asarray(A, dtype=complex)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    return MatrixField(grid, np.broadcast_to(A, (grid.n_cells, *A.shape)).copy(),
                       generator_tag="constant")


def rotated_real_field(grid: Grid, B, theta: float) -> MatrixField:
    """exp(i theta) times a real elliptic matrix (or per-cell real field)."""
    B = np.asarray(B, dtype=float)
    if B.ndim == 2:
        cells = np.broadcast_to(B, (grid.n_cells, *B.shape)).copy()
    else:
        cells = B.copy()
    return MatrixField(grid, np.exp(1j * theta) * cells, generator_tag="rotated_real")


def checkerboard_field(grid: Grid, A1, A2) -> MatrixField:
    """Cells alternate between A1 and A2 by cell-index parity."""
    A1 = np.atleast_2d(np.asarray(A1, dtype=complex))
    A2 = np.atleast_2d(np.asarray(A2, dtype=complex))
    cells = np.empty((grid.n_cells, *A1.shape), dtype=complex)
    if grid.dim == 1:
        parity = np.arange(grid.n_cells) % 2
    else:
        ncx = grid.nodes_per_axis[0] - 1
        idx = np.arange(grid.n_cells)
        parity = (idx % ncx + idx // ncx) % 2
    cells[parity == 0] = A1
    cells[parity == 1] = A2
    return MatrixField(grid, cells, generator_tag="checkerboard")


def _random_elliptic_matrix(rng: np.random.Generator, d: int,
                            phase_max: float, mag_range: tuple[float, float]) -> np.ndarray:
    if d == 1:
        r = rng.uniform(*mag_range)
        phi = rng.uniform(-phase_max, phase_max)
        return np.array([[r * np.exp(1j * phi)]])
    # shifted random matrix; keep a healthy ellipticity margin
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    G *= 0.35
    H = 0.5 * (G + G.conj().T)
    lam = np.linalg.eigvalsh(H)[0]
    A = G + (abs(lam) + rng.uniform(*mag_range)) * np.eye(d)
    return A / ellipticity.capital_lambda_of(A) * rng.uniform(*mag_range)


def random_checkerboard_field(grid: Grid, seed: int, phase_max: float = 0.5,
                              mag_range: tuple[float, float] = (0.5, 2.0)) -> MatrixField:
    """Checkerboard of two random elliptic matrices; complex, non-rotation.

    Alternating-cell fields homogenize toward constant coefficients, which
    keeps the eigenvector conditioning of the assembled operator small; that
    is what makes them the workhorse of the random suites.
    """
    rng = np.random.default_rng(seed)
    d = grid.dim
    A1 = _random_elliptic_matrix(rng, d, phase_max, mag_range)
    A2 = _random_elliptic_matrix(rng, d, phase_max, mag_range)
    f = checkerboard_field(grid, A1, A2)
    return MatrixField(grid, f.per_cell, generator_tag="custom")


def random_real_field(grid: Grid, seed: int,
                      mag_range: tuple[float, float] = (0.5, 2.0)) -> MatrixField:
    """Checkerboard of two random real symmetric positive matrices."""
    rng = np.random.default_rng(seed)
    d = grid.dim
    mats = []
    for _ in range(2):
        if d == 1:
            mats.append(np.array([[rng.uniform(*mag_range)]], dtype=complex))
        else:
            Q = np.linalg.qr(rng.standard_normal((d, d)))[0]
            mats.append((Q @ np.diag(rng.uniform(*mag_range, d)) @ Q.T).astype(complex))
    f = checkerboard_field(grid, mats[0], mats[1])
    return MatrixField(grid, f.per_cell, generator_tag="custom")


def random_elliptic_pair(grid: Grid, seed: int) -> tuple[MatrixField, MatrixField]:
    """(complex field A, real field B), both elliptic, deterministic in seed."""
    return random_checkerboard_field(grid, seed), random_real_field(grid, seed + 10_000)


def field_lambda(field: MatrixField) -> float:
    return min(ellipticity.lambda_of(A) for A in field.per_cell)


def field_capital_lambda(field: MatrixField) -> float:
    return max(ellipticity.capital_lambda_of(A) for A in field.per_cell)


def field_delta_p(field: MatrixField, p: float) -> float:
    """essinf over the domain realized as the minimum over grid cells."""
    return min(ellipticity.delta_p(A, p) for A in field.per_cell)


def field_p_range(field: MatrixField, tol: float = 1e-8) -> tuple[float, float]:
    lo, hi = 1.0, np.inf
    for A in field.per_cell:
        a, b = ellipticity.p_ellipticity_range(A, tol)
        lo, hi = max(lo, a), min(hi, b)
    return (lo, hi)


@dataclass(frozen=True)
class DiscreteOperator:
    """Dense realization of -div(A grad) on the non-Dirichlet nodes.

    ``matrix`` acts on nodal values at the kept nodes; ``node_weights`` holds
    the L^2 quadrature weights of those nodes, which define the inner product
    in which the operator is accretive and the assembled adjoint relation
    holds.
    """

    matrix: np.ndarray
    grid: Grid
    bc: BoundaryCondition
    field: MatrixField
    kept: np.ndarray
    node_weights: np.ndarray
    kernel_dim: int
    grad_ops: tuple = dc_field(repr=False, default=())
    sample_weights: np.ndarray = dc_field(repr=False, default=None)
    sample_mats: np.ndarray = dc_field(repr=False, default=None)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def weighted_inner(self, a: np.ndarray, b: np.ndarray) -> complex:
        return complex(np.sum(a * b.conj() * self.node_weights))

    def weighted_norm(self, a: np.ndarray) -> float:
        return float(np.sqrt(np.sum(np.abs(a) ** 2 * self.node_weights)))

    def sampled_gradient(self, u: np.ndarray) -> np.ndarray:
        """(n_samples, dim) gradient samples of the nodal vector u."""
        return np.stack([G @ u for G in self.grad_ops], axis=1)

    def form_value(self, u: np.ndarray, v: np.ndarray | None = None) -> complex:
        """Discrete sesquilinear form <A grad u, grad v> (v defaults to u)."""
        gu = self.sampled_gradient(u)
        gv = gu if v is None else self.sampled_gradient(v)
        Agu = np.einsum("sab,sb->sa", self.sample_mats, gu)
        return complex(np.sum(self.sample_weights[:, None] * Agu * gv.conj()))

    def gradient_energy(self, u: np.ndarray) -> float:
        gu = self.sampled_gradient(u)
        return float(np.sum(self.sample_weights[:, None] * np.abs(gu) ** 2).real)

    def adjoint_matrix(self) -> np.ndarray:
        """Adjoint with respect to the weighted inner product."""
        m = self.node_weights
        return (self.matrix.conj().T * m[None, :]) / m[:, None]

    def restrict(self, f: GridFunction) -> np.ndarray:
        return f.values[self.kept]

    def extend(self, vec: np.ndarray) -> GridFunction:
        full = np.zeros(self.grid.n_nodes, dtype=complex)
        full[self.kept] = vec
        return GridFunction(self.grid, full)


def _gradient_samples_1d(grid: Grid):
    n = grid.nodes_per_axis[0]
    h = grid.spacing[0]
    rows = np.repeat(np.arange(n - 1), 2)
    cols = np.empty(2 * (n - 1), dtype=int)
    cols[0::2] = np.arange(n - 1)
    cols[1::2] = np.arange(1, n)
    data = np.tile(np.array([-1.0, 1.0]) / h, n - 1)
    Gx = sparse.csr_matrix((data, (rows, cols)), shape=(n - 1, n))
    weights = np.full(n - 1, h)
    return (Gx,), weights, np.arange(n - 1)


def _gradient_samples_2d(grid: Grid):
    nx, ny = grid.nodes_per_axis
    hx, hy = grid.spacing
    ncx, ncy = nx - 1, ny - 1
    n_cells = ncx * ncy
    qpts = [(-_GAUSS, -_GAUSS), (_GAUSS, -_GAUSS), (-_GAUSS, _GAUSS), (_GAUSS, _GAUSS)]
    n_samp = 4 * n_cells

    cell_idx = np.arange(n_cells)
    ci, cj = cell_idx % ncx, cell_idx // ncx
    corners = np.column_stack([
        cj * nx + ci,
        cj * nx + ci + 1,
        (cj + 1) * nx + ci,
        (cj + 1) * nx + ci + 1,
    ])

    rows, cols, dx_data, dy_data = [], [], [], []
    for q, (xq, yq) in enumerate(qpts):
        dx = np.array([-(1 - yq), (1 - yq), -(1 + yq), (1 + yq)]) / 4.0 * (2.0 / hx)
        dy = np.array([-(1 - xq), -(1 + xq), (1 - xq), (1 + xq)]) / 4.0 * (2.0 / hy)
        samp = 4 * cell_idx + q
        for corner in range(4):
            rows.append(samp)
            cols.append(corners[:, corner])
            dx_data.append(np.full(n_cells, dx[corner]))
            dy_data.append(np.full(n_cells, dy[corner]))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    Gx = sparse.csr_matrix((np.concatenate(dx_data), (rows, cols)), shape=(n_samp, nx * ny))
    Gy = sparse.csr_matrix((np.concatenate(dy_data), (rows, cols)), shape=(n_samp, nx * ny))
    weights = np.full(n_samp, hx * hy / 4.0)
    sample_cells = np.arange(n_samp) // 4
    return (Gx, Gy), weights, sample_cells


def assemble(field: MatrixField, bc: BoundaryCondition) -> DiscreteOperator:
    """Assemble the generator of the semigroup for the given field and bc."""
    grid = field.grid
    lam = field_lambda(field)
    if lam <= 0:
        raise NotEllipticError(f"field is not elliptic: lambda = {lam:.3g}")

    if grid.dim == 1:
        grad_ops, samp_w, samp_cell = _gradient_samples_1d(grid)
    else:
        grad_ops, samp_w, samp_cell = _gradient_samples_2d(grid)
    samp_mats = field.per_cell[samp_cell]

    d = grid.dim
    n_nodes = grid.n_nodes
    K = np.zeros((n_nodes, n_nodes), dtype=complex)
    for a in range(d):
        for b in range(d):
            coeff = samp_w * samp_mats[:, a, b]
            K += (grad_ops[a].conj().T.multiply(coeff[None, :]) @ grad_ops[b]).toarray()

    mask = bc.dirichlet_mask(grid)
    kept = np.flatnonzero(~mask)
    K = K[np.ix_(kept, kept)]
    m = grid.node_weights()[kept]
    L = K / m[:, None]

    kernel_dim = 0 if mask.any() else 1
    grad_kept = tuple(G[:, kept].tocsr() for G in grad_ops)
    return DiscreteOperator(
        matrix=L,
        grid=grid,
        bc=bc,
        field=field,
        kept=kept,
        node_weights=m,
        kernel_dim=kernel_dim,
        grad_ops=grad_kept,
        sample_weights=samp_w,
        sample_mats=samp_mats,
    )


@dataclass(frozen=True)
class KernelProjection:
    operator: DiscreteOperator
    projector: np.ndarray


def kernel_projection(op: DiscreteOperator) -> KernelProjection:
    """Projection onto the discrete null space.

    Pure Neumann on a connected grid has the constants as kernel; the
    projector is then the weighted mean.  Any Dirichlet part kills the
    kernel and the projector is zero.
    """
    n = op.n
    if op.kernel_dim == 0:
        return KernelProjection(op, np.zeros((n, n), dtype=complex))
    w = op.node_weights
    P = np.tile(w / w.sum(), (n, 1)).astype(complex)
    return KernelProjection(op, P)


def remove_kernel_component(op: DiscreteOperator, f: np.ndarray) -> np.ndarray:
    if op.kernel_dim == 0:
        return f
    w = op.node_weights
    return f - (w @ f) / w.sum()


def export_matrix(op: DiscreteOperator, path, fmt: str = "csv") -> None:
    """Dump the dense operator matrix for cross-checking in external tools."""
    if fmt == "npy":
        np.save(path, op.matrix)
        return
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    n = op.n
    with open(path, "w") as fh:
        fh.write("row,col,re,im\n")
        for i in range(n):
            for j in range(n):
                z = op.matrix[i, j]
                fh.write(f"{i},{j},{z.real:.17g},{z.imag:.17g}\n")
