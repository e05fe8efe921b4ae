"""Independent reference implementations used to cross-check the package.

Everything here deliberately avoids the package's FFT/vectorized code paths:
plain python loops over explicit mode dictionaries, and quadrature sums over
collocation samples.
"""

import numpy as np


def field_to_modes(field, tol=0.0):
    """Dict {(k1,k2,k3): vec3 complex} from a SpectralField, skipping zeros."""
    modes = field.grid.modes
    out = {}
    c = field.coeffs
    for i1, k1 in enumerate(modes):
        for i2, k2 in enumerate(modes):
            for i3, k3 in enumerate(modes):
                vec = c[:, i1, i2, i3]
                if np.max(np.abs(vec)) > tol:
                    out[(int(k1), int(k2), int(k3))] = vec.copy()
    return out


def naive_weighted_trilinear(a_modes, b_modes, c_modes, m, r, tau, s):
    """i (2pi)^3 sum_{j+k+l=0} (a_j . k)(b_k . c_l) |l_m|^2r e^{2 tau |l_m|^{1/s}}.

    Pure-python triple loop over the mode dictionaries; the weight follows
    the 0^0 = 1 convention.
    """
    total = 0.0 + 0.0j
    for j, aj in a_modes.items():
        for k, bk in b_modes.items():
            l = (-j[0] - k[0], -j[1] - k[1], -j[2] - k[2])
            cl = c_modes.get(l)
            if cl is None:
                continue
            lm = abs(l[m - 1])
            if lm == 0:
                w = 1.0 if r == 0.0 else 0.0
            else:
                w = lm ** (2.0 * r) * np.exp(2.0 * tau * lm ** (1.0 / s))
            ajk = aj[0] * k[0] + aj[1] * k[1] + aj[2] * k[2]
            bc = bk[0] * cl[0] + bk[1] * cl[1] + bk[2] * cl[2]
            total += ajk * bc * w
    return 1j * (2.0 * np.pi) ** 3 * total


def quadrature_inner(fphys, gphys, n):
    """(2pi/n)^3 sum over collocation points of f . g."""
    return float((2.0 * np.pi / n) ** 3 * np.sum(fphys * gphys))


def naive_sobolev_sq(modes_dict, r):
    """(2pi)^3 sum (1+|k|^2)^r |v_k|^2 from a mode dictionary."""
    total = 0.0
    for k, vec in modes_dict.items():
        k2 = k[0] ** 2 + k[1] ** 2 + k[2] ** 2
        total += (1.0 + k2) ** r * float(np.sum(np.abs(vec) ** 2))
    return (2.0 * np.pi) ** 3 * total
