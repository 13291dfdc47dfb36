"""Bilinear quadrilateral (Q4) plane stress element matrices.

Selective reduced integration: the deviatoric part is integrated with 2x2
Gauss points, the in-plane volumetric part with a single centre point
(mean dilatation). The split keeps full rank without hourglass modes.

Node order is counter-clockwise from the bottom-left corner, dofs
interleaved as (ux0, uy0, ux1, uy1, ...).
"""

import numpy as np

_XI = np.array([-1.0, 1.0, 1.0, -1.0])
_ETA = np.array([-1.0, -1.0, 1.0, 1.0])

# Voigt-notation (exx, eyy, gxy) operators; mu * DEV + K2 * VOL is plane stress D
DEV = np.array([[1.0, -1.0, 0.0], [-1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
VOL = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 0.0]])


def strain_matrix(xi, eta, a, b):
    """B matrix (3x8) of an ``a`` x ``b`` rectangle at natural coordinates."""
    dndxi = 0.25 * _XI * (1.0 + _ETA * eta)
    dndeta = 0.25 * _ETA * (1.0 + _XI * xi)
    dndx = dndxi * 2.0 / a
    dndy = dndeta * 2.0 / b
    B = np.zeros((3, 8))
    B[0, 0::2] = dndx
    B[1, 1::2] = dndy
    B[2, 0::2] = dndy
    B[2, 1::2] = dndx
    return B


def rectangle_matrices(a, b):
    """Return ``(k_dev, k_vol)`` for unit shear and unit bulk modulus.

    Element stiffness is ``shear * k_dev + bulk * k_vol``; the Voigt
    viscous damping matrix is ``viscosity * k_dev``. Unit thickness.
    """
    g = 1.0 / np.sqrt(3.0)
    det = 0.25 * a * b
    k_dev = np.zeros((8, 8))
    for xi in (-g, g):
        for eta in (-g, g):
            B = strain_matrix(xi, eta, a, b)
            k_dev += B.T @ DEV @ B * det
    Bc = strain_matrix(0.0, 0.0, a, b)
    k_vol = Bc.T @ VOL @ Bc * (a * b)
    return k_dev, k_vol


def lumped_mass(rho, a, b):
    """Row-sum lumped nodal mass, equal at all four nodes."""
    return rho * a * b / 4.0
