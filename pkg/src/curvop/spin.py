"""Curvilinear Pauli matrices and reduced Rashba/Dresselhaus tensors.

The Jacobian of the offset embedding ``R = r + q3 en`` at ``q3 = 0`` has
columns ``(r_u, r_v, en)``.  Pauli matrices transform with the rows of its
inverse, the tensors with the Jacobian itself.
"""
from dataclasses import dataclass

import numpy as np

from .errors import SingularJacobian
from .geometry import Geometry

SIGMA = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

# sign pattern of the Cartesian tensors: S_xy = S_yz = S_zx = +1, transposes -1
PATTERN = np.array([
    [0.0, 1.0, -1.0],
    [-1.0, 0.0, 1.0],
    [1.0, -1.0, 0.0],
])


def rashba_cartesian(alpha_R, hbar=1.0):
    return PATTERN * (alpha_R / hbar)


def dresselhaus_cartesian(beta_D, hbar=1.0):
    return PATTERN * (beta_D / hbar ** 3)


def _checked_inverse(J, geo=None):
    det = np.linalg.det(J)
    scale = np.prod(np.linalg.norm(J, axis=-2), axis=-1)
    bad = ~(np.abs(det) > 1e-14 * scale)
    if np.any(bad):
        where = ""
        if geo is not None:
            k = int(np.flatnonzero(bad.ravel())[0])
            where = f" at (u, v) = ({geo.u[k]:.12g}, {geo.v[k]:.12g})"
        raise SingularJacobian("embedding Jacobian is singular" + where)
    return np.linalg.inv(J)


def sigma_from_jacobian(J):
    """``sigma^i = sum_s (J^-1)^i_s sigma^s`` for a stack of Jacobians (N, 3, 3)."""
    Jinv = _checked_inverse(J)
    return np.einsum("nis,sab->niab", Jinv, SIGMA)


def rashba_from_jacobian(J, alpha_R, hbar=1.0):
    """``S_ij = J_si J_tj S_st`` for every point."""
    return np.einsum("nsi,st,ntj->nij", J, rashba_cartesian(alpha_R, hbar), J)


def dresselhaus_from_jacobian(J, beta_D, hbar=1.0):
    """``S_iijj = J_si^2 J_tj^2 S_sstt`` stored as a 3x3 array over (i, j)."""
    J2 = J * J
    return np.einsum("nsi,st,ntj->nij", J2, dresselhaus_cartesian(beta_D, hbar), J2)


@dataclass
class ReducedTensors:
    """Reduced spin data at one chart point.

    ``sigma[i]`` is the i-th curvilinear Pauli matrix, ``rashba[i, j]`` the
    reduced Rashba component and ``dresselhaus[i, j]`` the component
    ``S_iijj`` (indices 0, 1 tangential, 2 normal).
    """

    sigma: np.ndarray
    rashba: np.ndarray
    dresselhaus: np.ndarray


def _jacobian(sdef, u, v, overrides):
    geo = Geometry(sdef, np.array([float(u)]), np.array([float(v)]), overrides)
    J = geo.jacobian
    _checked_inverse(J, geo)
    return J


def pauli_ccs(sdef, u, v, overrides=None):
    """The three reduced Pauli matrices at ``(u, v)``, shape (3, 2, 2)."""
    return sigma_from_jacobian(_jacobian(sdef, u, v, overrides))[0]


def rashba_tensor_ccs(sdef, u, v, alpha_R, hbar=1.0, overrides=None):
    return rashba_from_jacobian(_jacobian(sdef, u, v, overrides), alpha_R, hbar)[0]


def dresselhaus_tensor_ccs(sdef, u, v, beta_D, hbar=1.0, overrides=None):
    return dresselhaus_from_jacobian(_jacobian(sdef, u, v, overrides), beta_D, hbar)[0]


def reduced_tensors(sdef, u, v, alpha_R=1.0, beta_D=1.0, hbar=1.0, overrides=None):
    J = _jacobian(sdef, u, v, overrides)
    return ReducedTensors(
        sigma=sigma_from_jacobian(J)[0],
        rashba=rashba_from_jacobian(J, alpha_R, hbar)[0],
        dresselhaus=dresselhaus_from_jacobian(J, beta_D, hbar)[0],
    )
