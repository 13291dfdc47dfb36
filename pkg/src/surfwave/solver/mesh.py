"""Layered phantom geometry and structured quadrilateral meshing.

Coordinates: x to the right, y upward, y = 0 on the sponge top surface.
From the bottom up the layers are absorber band, sponge, gel pocket (may be
absent) and standoff pad; pad and gel are centred on the sponge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..dispersion import VoigtMaterial
from ..errors import MeshingError
from .materials import (
    STANDOFF_PAD,
    ElasticMaterial,
    SectionProperties,
    SpongeSpec,
    elastic_section,
    voigt_section,
)

PAD, GEL, SPONGE, ABSORBER = 0, 1, 2, 3
REGION_NAMES = ("pad", "gel", "sponge", "absorber")

#: Default gel-thickness levels [m]: base, level 1, 2, 3.
GEL_LEVELS = (0.0, 0.002, 0.007, 0.012)

_TOL = 1e-9


@dataclass(frozen=True)
class PhantomGeometry:
    pad_length: float = 0.09
    pad_height: float = 0.015
    sponge_length: float = 0.12
    sponge_height: float = 0.02
    gel_thickness: float = 0.0
    element_size: float = 0.001
    absorber_width: float = 0.01
    #: width of the clamped segment at the centre of the pad top surface
    clamp_width: float = 0.01
    #: lateral extent of the gel pocket; None means the pad length
    gel_length: Optional[float] = None

    def cells(self, length: float, name: str) -> int:
        """Number of elements spanning ``length``; raises if not commensurate."""
        n = round(length / self.element_size)
        if abs(n * self.element_size - length) > _TOL:
            raise MeshingError(
                f"{name} = {length!r} m is not a multiple of element_size {self.element_size!r} m"
            )
        return n

    def validate(self):
        positive = ("pad_length", "pad_height", "sponge_length", "sponge_height", "element_size", "absorber_width")
        for name in positive:
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise MeshingError(f"{name} must be > 0, got {v!r}")
        if not self.gel_thickness >= 0:
            raise MeshingError(f"gel_thickness must be >= 0, got {self.gel_thickness!r}")
        if self.pad_length > self.sponge_length + _TOL:
            raise MeshingError("pad must not be longer than the sponge")


@dataclass(frozen=True, eq=False)
class PhantomModel:
    """Immutable meshed phantom.

    ``dashpots`` rows are ``(node, c_x, c_y)`` viscous boundary coefficients
    [N s/m per unit thickness]. ``surface_nodes`` run left to right along
    y = 0.
    """

    nodes: np.ndarray
    elements: np.ndarray
    element_region: np.ndarray
    sections: dict
    element_mass_damping: np.ndarray
    element_size: float
    driven_nodes: np.ndarray
    fixed_nodes: np.ndarray
    dashpots: np.ndarray
    surface_nodes: np.ndarray
    geometry: Optional[PhantomGeometry] = None
    extent: tuple = field(default=(0.0, 0.0))

    def __post_init__(self):
        for name in ("nodes", "elements", "element_region", "element_mass_damping",
                     "driven_nodes", "fixed_nodes", "dashpots", "surface_nodes"):
            getattr(self, name).setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_elements(self) -> int:
        return self.elements.shape[0]

    def region_counts(self) -> dict:
        return {
            REGION_NAMES[r]: int(np.count_nonzero(self.element_region == r))
            for r in sorted(self.sections)
        }

    def node_at_surface(self, x: float) -> int:
        xs = self.nodes[self.surface_nodes, 0]
        i = int(np.argmin(np.abs(xs - x)))
        if abs(xs[i] - x) > _TOL:
            raise MeshingError(f"no surface node at x = {x!r} m")
        return int(self.surface_nodes[i])

    def summary(self, dt: Optional[float] = None) -> str:
        lines = ["phantom model summary"]
        lines.append(f"  nodes: {self.n_nodes}")
        lines.append(f"  elements: {self.n_elements}")
        for name, n in self.region_counts().items():
            lines.append(f"    {name}: {n}")
        lines.append(f"  element size: {self.element_size:g} m")
        if dt is not None:
            lines.append(f"  time step: {dt:.6g} s")
        lines.append(f"  driven nodes: {self.driven_nodes.size}")
        lines.append(f"  fixed nodes: {self.fixed_nodes.size}")
        lines.append(f"  absorbing nodes: {self.dashpots.shape[0]}")
        lines.append(f"  surface nodes: {self.surface_nodes.size}")
        return "\n".join(lines) + "\n"


def _grid_mesh(cell_region, h, x0, y0):
    """Mesh the active cells (region >= 0) of a ``(ny, nx)`` grid.

    Returns node coordinates, CCW connectivity, per-element region and the
    map from grid node ``(j, i)`` to node id (-1 where unused).
    """
    ny, nx = cell_region.shape
    jj, ii = np.nonzero(cell_region >= 0)  # row-major: bottom row first
    used = np.zeros((ny + 1, nx + 1), dtype=bool)
    for dj, di in ((0, 0), (0, 1), (1, 1), (1, 0)):
        used[jj + dj, ii + di] = True
    node_id = -np.ones((ny + 1, nx + 1), dtype=np.int64)
    nj, ni = np.nonzero(used)
    node_id[nj, ni] = np.arange(nj.size)
    nodes = np.column_stack([x0 + ni * h, y0 + nj * h])
    elements = np.column_stack([
        node_id[jj, ii],
        node_id[jj, ii + 1],
        node_id[jj + 1, ii + 1],
        node_id[jj + 1, ii],
    ])
    return nodes, elements, cell_region[jj, ii].astype(np.int64), node_id


def _absorber_damping(model_regions, elem_centres_y, y_interface, width, section, reflection=1e-3):
    # quadratic mass-damping ramp: round-trip attenuation of a shear wave is ln(1/R)
    alpha_max = 3.0 * section.s_speed * math.log(1.0 / reflection) / width
    d = np.clip((y_interface - elem_centres_y) / width, 0.0, 1.0)
    return np.where(model_regions == ABSORBER, alpha_max * d**2, 0.0)


def _dashpots(nodes, node_id, side_rows, bottom_row, h, section):
    """Lysmer dashpots on the bottom edge and on side edges over ``side_rows``."""
    ny1, nx1 = node_id.shape
    cp = section.rho * section.p_speed
    cs = section.rho * section.s_speed
    coeff = {}

    def add(n, cx, cy):
        ox, oy = coeff.get(n, (0.0, 0.0))
        coeff[n] = (ox + cx, oy + cy)

    # tributary length h per edge segment, split between its end nodes
    for i in range(nx1 - 1):
        a, b = node_id[bottom_row, i], node_id[bottom_row, i + 1]
        if a >= 0 and b >= 0:
            for n in (a, b):
                add(int(n), 0.5 * h * cs, 0.5 * h * cp)
    for col in (0, nx1 - 1):
        for j in side_rows:
            a, b = node_id[j, col], node_id[j + 1, col]
            if a >= 0 and b >= 0:
                for n in (a, b):
                    add(int(n), 0.5 * h * cp, 0.5 * h * cs)
    keys = sorted(coeff)
    return np.array([[k, *coeff[k]] for k in keys], dtype=float).reshape(-1, 3)


def build_model(
    geometry: PhantomGeometry = PhantomGeometry(),
    pad: ElasticMaterial = STANDOFF_PAD,
    gel: Optional[VoigtMaterial] = None,
    sponge: SpongeSpec = SpongeSpec(),
    contact_width: float = 0.003,
) -> PhantomModel:
    """Mesh the layered phantom.

    The excitation segment of width ``contact_width`` sits at the left end
    of the pad top surface. The centre of the pad top is clamped over
    ``geometry.clamp_width``; the absorber band under the sponge carries
    dashpots on its bottom and side edges.
    """
    from ..dispersion import GEL as _DEFAULT_GEL

    gel = _DEFAULT_GEL if gel is None else gel
    g = geometry
    g.validate()
    h = g.element_size
    nx = g.cells(g.sponge_length, "sponge_length")
    n_pad = g.cells(g.pad_length, "pad_length")
    n_pad_h = g.cells(g.pad_height, "pad_height")
    n_sp_h = g.cells(g.sponge_height, "sponge_height")
    n_ab = g.cells(g.absorber_width, "absorber_width")
    n_gel = g.cells(g.gel_thickness, "gel_thickness") if g.gel_thickness > 0 else 0
    gel_len = g.pad_length if g.gel_length is None else g.gel_length
    n_gel_l = g.cells(gel_len, "gel_length") if n_gel else 0
    pad_off = g.cells((g.sponge_length - g.pad_length) / 2.0, "pad offset")
    gel_off = g.cells((g.sponge_length - gel_len) / 2.0, "gel offset") if n_gel else 0

    ny = n_ab + n_sp_h + max(n_gel, 0) + n_pad_h
    cells = -np.ones((ny, nx), dtype=np.int64)
    cells[:n_ab, :] = ABSORBER
    cells[n_ab:n_ab + n_sp_h, :] = SPONGE
    if n_gel:
        cells[n_ab + n_sp_h:n_ab + n_sp_h + n_gel, gel_off:gel_off + n_gel_l] = GEL
    top0 = n_ab + n_sp_h + n_gel
    cells[top0:, pad_off:pad_off + n_pad] = PAD
    if n_gel and (gel_off > pad_off or gel_off + n_gel_l < pad_off + n_pad):
        raise MeshingError("gel pocket narrower than the pad leaves the pad unsupported")

    y0 = -(g.sponge_height + g.absorber_width)
    nodes, elements, region, node_id = _grid_mesh(cells, h, 0.0, y0)

    sponge_sec = voigt_section(sponge.solver_material)
    sections = {
        PAD: elastic_section(pad),
        GEL: voigt_section(gel),
        SPONGE: sponge_sec,
        ABSORBER: sponge_sec,
    }
    if not n_gel:
        del sections[GEL]

    yc = nodes[elements, 1].mean(axis=1)
    damping = _absorber_damping(region, yc, -g.sponge_height, g.absorber_width, sponge_sec)

    top_row = ny
    top_nodes = node_id[top_row, pad_off:pad_off + n_pad + 1]
    n_contact = g.cells(contact_width, "contact_width")
    driven = top_nodes[: n_contact + 1]
    xc = g.sponge_length / 2.0
    xs = nodes[top_nodes, 0]
    fixed = top_nodes[np.abs(xs - xc) <= g.clamp_width / 2.0 + _TOL]
    if np.intersect1d(driven, fixed).size:
        raise MeshingError("driven and clamped segments overlap")

    dash = _dashpots(nodes, node_id, range(0, n_ab), 0, h, sponge_sec)
    surface = node_id[n_ab + n_sp_h, :]

    return PhantomModel(
        nodes=nodes,
        elements=elements,
        element_region=region,
        sections=sections,
        element_mass_damping=damping,
        element_size=h,
        driven_nodes=np.asarray(driven, dtype=np.int64),
        fixed_nodes=np.asarray(fixed, dtype=np.int64),
        dashpots=dash,
        surface_nodes=np.asarray(surface, dtype=np.int64),
        geometry=g,
        extent=(g.sponge_length, ny * h),
    )


def build_block(
    material: VoigtMaterial,
    length: float = 0.12,
    height: float = 0.02,
    absorber_width: float = 0.01,
    element_size: float = 0.001,
    source_x: float = 0.0,
    contact_width: float = 0.003,
    absorbing_sides: bool = True,
) -> PhantomModel:
    """Homogeneous Voigt block with a free top surface.

    Emulates a half-space: absorber band underneath, and (optionally)
    dashpots over the full height of both side edges. The driven segment
    starts at ``source_x`` on the top surface.
    """
    g = PhantomGeometry(
        pad_length=length, sponge_length=length, sponge_height=height,
        absorber_width=absorber_width, element_size=element_size,
    )
    h = element_size
    nx = g.cells(length, "length")
    n_sp = g.cells(height, "height")
    n_ab = g.cells(absorber_width, "absorber_width")
    cells = -np.ones((n_ab + n_sp, nx), dtype=np.int64)
    cells[:n_ab, :] = ABSORBER
    cells[n_ab:, :] = SPONGE
    nodes, elements, region, node_id = _grid_mesh(cells, h, 0.0, -(height + absorber_width))
    sec = voigt_section(material)
    yc = nodes[elements, 1].mean(axis=1)
    damping = _absorber_damping(region, yc, -height, absorber_width, sec)
    side_rows = range(0, n_ab + n_sp) if absorbing_sides else range(0, n_ab)
    dash = _dashpots(nodes, node_id, side_rows, 0, h, sec)
    surface = node_id[n_ab + n_sp, :]
    i0 = g.cells(source_x, "source_x") if source_x > 0 else 0
    n_contact = g.cells(contact_width, "contact_width")
    driven = surface[i0:i0 + n_contact + 1]
    return PhantomModel(
        nodes=nodes,
        elements=elements,
        element_region=region,
        sections={SPONGE: sec, ABSORBER: sec},
        element_mass_damping=damping,
        element_size=h,
        driven_nodes=np.asarray(driven, dtype=np.int64),
        fixed_nodes=np.zeros(0, dtype=np.int64),
        dashpots=dash,
        surface_nodes=np.asarray(surface, dtype=np.int64),
        geometry=None,
        extent=(length, (n_ab + n_sp) * h),
    )
