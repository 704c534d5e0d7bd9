"""Uniform tensor-product grids on intervals and rectangles.

Second-order central differences, nodal trapezoid quadrature (cell measures
halve at the boundary) and one-sided second-order boundary derivatives are
kept mutually consistent so that discrete Green identities hold to rounding.
Node ordering is lexicographic by axis for bit-reproducible output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse

from .errors import (
    BoundaryViolation,
    InvalidDomain,
    InvalidGeometry,
    ShapeMismatch,
    TooCoarse,
)

_BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class Domain:
    """Convex axis-aligned domain: an interval (1-D) or a rectangle (2-D)."""

    kind: str
    bounds: tuple[tuple[float, float], ...]

    def __post_init__(self):
        expected = {"interval": 1, "rectangle": 2}
        if self.kind not in expected:
            raise InvalidDomain(f"unknown domain kind {self.kind!r}")
        if len(self.bounds) != expected[self.kind]:
            raise InvalidDomain(
                f"{self.kind} needs {expected[self.kind]} axis bounds, "
                f"got {len(self.bounds)}"
            )
        for lo, hi in self.bounds:
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise InvalidDomain(f"degenerate bounds ({lo}, {hi})")

    @property
    def dim(self) -> int:
        return len(self.bounds)

    @property
    def measure(self) -> float:
        out = 1.0
        for lo, hi in self.bounds:
            out *= hi - lo
        return out


def interval(lo: float, hi: float) -> Domain:
    return Domain("interval", ((float(lo), float(hi)),))


def rectangle(xb: tuple[float, float], yb: tuple[float, float]) -> Domain:
    return Domain("rectangle", (tuple(map(float, xb)), tuple(map(float, yb))))


@dataclass(eq=False)
class Grid:
    """Uniform grid over a Domain with homogeneous Dirichlet structure.

    Attributes
    ----------
    nodes : (N, dim) array, lexicographic by axis (first axis most significant)
    interior_idx, boundary_idx : index arrays partitioning the nodes
    outward_normals : (n_boundary, dim) unit vectors aligned with boundary_idx;
        corner normals are the normalized average of the meeting edge normals
    cell_measure : (N,) trapezoid quadrature weights, summing to the domain
        measure
    surface_measure : (n_boundary,) boundary quadrature weights; corners carry
        zero surface weight (their normal is ill-defined, measure zero in the
        continuum)
    """

    domain: Domain
    points_per_axis: tuple[int, ...]
    h: tuple[float, ...]
    nodes: np.ndarray
    interior_idx: np.ndarray
    boundary_idx: np.ndarray
    is_boundary: np.ndarray
    outward_normals: np.ndarray
    cell_measure: np.ndarray
    surface_measure: np.ndarray

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points_per_axis

    @cached_property
    def laplacian(self) -> sparse.csr_matrix:
        """Full-size discrete Laplacian; boundary rows are zero."""
        mats = []
        for a, (n, ha) in enumerate(zip(self.points_per_axis, self.h)):
            d2 = sparse.diags(
                [1.0, -2.0, 1.0], [-1, 0, 1], shape=(n, n), format="csr"
            ) / (ha * ha)
            eyes = [sparse.identity(m, format="csr") for m in self.points_per_axis]
            eyes[a] = d2
            term = eyes[0]
            for m in eyes[1:]:
                term = sparse.kron(term, m, format="csr")
            mats.append(term)
        full = mats[0]
        for m in mats[1:]:
            full = full + m
        mask = sparse.diags((~self.is_boundary).astype(float))
        return (mask @ full).tocsr()

    @cached_property
    def dirichlet_operator(self) -> sparse.csc_matrix:
        """SPD matrix of -laplacian restricted to interior nodes."""
        ii = self.interior_idx
        return (-self.laplacian[ii][:, ii]).tocsc()

    @cached_property
    def dirichlet_factor(self):
        """Cached sparse LU of the interior -laplacian (immutable, shareable)."""
        from scipy.sparse.linalg import splu

        return splu(self.dirichlet_operator)


def build_grid(domain: Domain, points_per_axis) -> Grid:
    """Build a uniform grid; raises TooCoarse below 3 points per axis."""
    pts = tuple(int(p) for p in np.atleast_1d(points_per_axis))
    if len(pts) != domain.dim:
        raise InvalidDomain(
            f"points_per_axis has {len(pts)} entries for a {domain.dim}-D domain"
        )
    if any(p < 3 for p in pts):
        raise TooCoarse(f"need >= 3 points per axis, got {pts}")

    axes = [
        np.linspace(lo, hi, n) for (lo, hi), n in zip(domain.bounds, pts)
    ]
    h = tuple((hi - lo) / (n - 1) for (lo, hi), n in zip(domain.bounds, pts))
    mesh = np.meshgrid(*axes, indexing="ij")
    nodes = np.stack([m.ravel(order="C") for m in mesh], axis=1)

    # boundary = any axis index at its extreme
    idx_grids = np.meshgrid(*[np.arange(n) for n in pts], indexing="ij")
    on_edge = [
        (g == 0) | (g == n - 1) for g, n in zip(idx_grids, pts)
    ]
    is_boundary = np.zeros(pts, dtype=bool)
    for e in on_edge:
        is_boundary |= e
    edge_count = sum(e.astype(int) for e in on_edge)
    is_boundary_flat = is_boundary.ravel(order="C")
    boundary_idx = np.flatnonzero(is_boundary_flat)
    interior_idx = np.flatnonzero(~is_boundary_flat)

    # outward normals: +-e_a on faces, normalized sum at corners
    normals_full = np.zeros(pts + (len(pts),))
    for a, (g, n) in enumerate(zip(idx_grids, pts)):
        normals_full[..., a] = np.where(g == 0, -1.0, 0.0) + np.where(
            g == n - 1, 1.0, 0.0
        )
    normals_flat = normals_full.reshape(-1, len(pts), order="C")[boundary_idx]
    lengths = np.linalg.norm(normals_flat, axis=1)
    normals_flat = normals_flat / lengths[:, None]

    # trapezoid cell measures, tensor product of per-axis weights
    axis_w = []
    for n, ha in zip(pts, h):
        w = np.full(n, ha)
        w[0] = w[-1] = ha / 2
        axis_w.append(w)
    cell = axis_w[0]
    for w in axis_w[1:]:
        cell = np.multiply.outer(cell, w)
    cell_measure = cell.ravel(order="C")

    # surface weights: counting measure in 1-D; per-edge trapezoid in 2-D
    # with zero weight at corners (edge_count >= 2)
    ec_flat = edge_count.ravel(order="C")[boundary_idx]
    if domain.dim == 1:
        surface = np.ones(boundary_idx.size)
    else:
        surface = np.zeros(boundary_idx.size)
        bnodes_multi = np.stack(
            [g.ravel(order="C")[boundary_idx] for g in idx_grids], axis=1
        )
        for a in range(domain.dim):
            # nodes on a face normal to axis a (not corners): tangential
            # axis is the other one; interior-of-edge nodes get full h
            on_face = (bnodes_multi[:, a] == 0) | (
                bnodes_multi[:, a] == pts[a] - 1
            )
            tang = 1 - a
            t_idx = bnodes_multi[:, tang]
            w = np.where(
                (t_idx == 0) | (t_idx == pts[tang] - 1),
                h[tang] / 2,
                h[tang],
            )
            surface += np.where(on_face & (ec_flat == 1), w, 0.0)
        surface[ec_flat >= 2] = 0.0

    return Grid(
        domain=domain,
        points_per_axis=pts,
        h=h,
        nodes=nodes,
        interior_idx=interior_idx,
        boundary_idx=boundary_idx,
        is_boundary=is_boundary_flat,
        outward_normals=normals_flat,
        cell_measure=cell_measure,
        surface_measure=surface,
    )


@dataclass(frozen=True)
class ObservationBall:
    """Open ball B_r(x0) inside the domain, with m = sup over the domain
    of the squared distance to the center."""

    center: tuple[float, ...]
    radius: float
    m: float = field(init=False)

    def __post_init__(self):
        if self.radius <= 0:
            raise InvalidGeometry("radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "m", float("nan"))

    def fitted_to(self, domain: Domain) -> "ObservationBall":
        """Validate containment against a domain and fill in m."""
        if len(self.center) != domain.dim:
            raise InvalidGeometry("center dimension mismatch")
        m = 0.0
        for c, (lo, hi) in zip(self.center, domain.bounds):
            if not (lo < c - self.radius and c + self.radius < hi):
                raise InvalidGeometry("observation ball not inside domain")
            m += max(c - lo, hi - c) ** 2
        out = ObservationBall(self.center, self.radius)
        object.__setattr__(out, "m", m)
        if out.m < self.radius**2:
            raise InvalidGeometry("m < r^2 is impossible for a contained ball")
        return out


def observation_ball(domain: Domain, center, radius: float) -> ObservationBall:
    return ObservationBall(tuple(center), float(radius)).fitted_to(domain)


def _check_field(grid: Grid, fld) -> np.ndarray:
    fld = np.asarray(fld, dtype=float)
    if fld.shape != (grid.n_nodes,):
        raise ShapeMismatch(
            f"field has shape {fld.shape}, grid has {grid.n_nodes} nodes"
        )
    return fld


def _check_dirichlet(grid: Grid, fld: np.ndarray, scale: float | None = None):
    bvals = np.abs(fld[grid.boundary_idx])
    tol = _BOUNDARY_TOL * (scale if scale is not None else max(1.0, np.max(np.abs(fld), initial=0.0)))
    if bvals.size and bvals.max() > tol:
        raise BoundaryViolation(
            f"field is nonzero on the boundary (max {bvals.max():.3e})"
        )


def apply_laplacian(grid: Grid, fld) -> np.ndarray:
    """Central-difference Laplacian of a Dirichlet field; zero on the boundary."""
    fld = _check_field(grid, fld)
    _check_dirichlet(grid, fld)
    return grid.laplacian @ fld


def weighted_inner_product(grid: Grid, f, g, w=None) -> float:
    """Trapezoid quadrature of f*g*w over the domain (w omitted means 1)."""
    f = _check_field(grid, f)
    g = _check_field(grid, g)
    prod = f * g
    if w is not None:
        prod = prod * _check_field(grid, w)
    return float(np.dot(prod, grid.cell_measure))


def apply_gradient(grid: Grid, fld) -> np.ndarray:
    """Nodal gradient, (N, dim): central interior, one-sided second order
    at the two ends of each axis line."""
    fld = _check_field(grid, fld)
    shape = grid.shape
    u = fld.reshape(shape, order="C")
    out = np.empty(shape + (grid.dim,))
    for a, ha in enumerate(grid.h):
        um = np.moveaxis(u, a, 0)
        g = np.empty_like(um)
        g[1:-1] = (um[2:] - um[:-2]) / (2 * ha)
        g[0] = (-3 * um[0] + 4 * um[1] - um[2]) / (2 * ha)
        g[-1] = (3 * um[-1] - 4 * um[-2] + um[-3]) / (2 * ha)
        out[..., a] = np.moveaxis(g, 0, a)
    return out.reshape(grid.n_nodes, grid.dim, order="C")


def boundary_flux(grid: Grid, fld) -> np.ndarray:
    """Outward normal derivative at boundary nodes (aligned with
    boundary_idx), one-sided second-order stencils."""
    fld = _check_field(grid, fld)
    _check_dirichlet(grid, fld)
    grad = apply_gradient(grid, fld)[grid.boundary_idx]
    return np.einsum("ij,ij->i", grad, grid.outward_normals)


def dirichlet_solve(grid: Grid, rhs) -> np.ndarray:
    """Solve -laplacian v = rhs with homogeneous Dirichlet data.

    Only interior values of rhs enter; the solution vanishes on the boundary.
    """
    rhs = _check_field(grid, rhs)
    v = np.zeros(grid.n_nodes)
    v[grid.interior_idx] = grid.dirichlet_factor.solve(rhs[grid.interior_idx])
    return v


def dirichlet_eigenvalue(grid: Grid, k) -> float:
    """Discrete Dirichlet eigenvalue of -laplacian for per-axis mode
    numbers k: sum over axes of (2/h^2)(1 - cos(k*pi*h/L))."""
    k = np.atleast_1d(k)
    out = 0.0
    for ka, (lo, hi), ha in zip(k, grid.domain.bounds, grid.h):
        L = hi - lo
        out += (2.0 / ha**2) * (1.0 - np.cos(ka * np.pi * ha / L))
    return float(out)


def dirichlet_eigenvalue_extremes(grid: Grid) -> tuple[float, float]:
    """(smallest, largest) eigenvalue of the interior -laplacian."""
    lo = dirichlet_eigenvalue(grid, [1] * grid.dim)
    hi = dirichlet_eigenvalue(grid, [n - 2 for n in grid.points_per_axis])
    return lo, hi
