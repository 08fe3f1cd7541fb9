"""Numpy implementations of the hot loops (fallback for ``_kernels``)."""
import numpy as np

_BLOCK = 256


def _roots(t):
    t = np.asarray(t, dtype=float)
    inside = (t > 0.0) & (t < 1.0)
    return np.where(inside, np.sqrt(np.where(inside, t * (1.0 - t), 0.0)), 0.0)


def density_grid_max(m00, m01, m10, m11, corr, t, s, out_max, out_arg):
    root = _roots(t)
    for start in range(0, s.shape[0], _BLOCK):
        sj = s[start:start + _BLOCK]
        p0 = (1.0 - sj) * m00 + sj * m01
        p1 = (1.0 - sj) * m10 + sj * m11
        kap = corr * _roots(sj)
        vals = p0[:, None] + (p1 - p0)[:, None] * t[None, :] + kap[:, None] * root[None, :]
        arg = np.argmax(vals, axis=1)
        out_arg[start:start + _BLOCK] = arg
        out_max[start:start + _BLOCK] = vals[np.arange(sj.shape[0]), arg]


def statevector_payoffs(gamma, xi0, xi1, u0, u1, a00, a01, a10, a11, x1, y1, out1, out2):
    c, s = np.cos(0.5 * gamma), np.sin(0.5 * gamma)
    al0 = np.sqrt(1.0 - x1) * np.exp(1j * xi0)
    al1 = np.sqrt(x1) * np.exp(1j * xi1)
    be0 = np.sqrt(1.0 - y1) * np.exp(1j * u0)
    be1 = np.sqrt(y1) * np.exp(1j * u1)
    p00 = c * al0 * be0 + 1j * s * al1 * be1
    p01 = -c * al0 * be1.conj() + 1j * s * al1 * be0.conj()
    p10 = -c * al1.conj() * be0 + 1j * s * al0.conj() * be1
    p11 = c * al1.conj() * be1.conj() + 1j * s * al0.conj() * be0.conj()
    w00 = np.abs(c * p00 - 1j * s * p11) ** 2
    w11 = np.abs(c * p11 - 1j * s * p00) ** 2
    w01 = np.abs(c * p01 + 1j * s * p10) ** 2
    w10 = np.abs(c * p10 + 1j * s * p01) ** 2
    out1[:] = a00 * w00 + a01 * w01 + a10 * w10 + a11 * w11
    out2[:] = a00 * w00 + a10 * w01 + a01 * w10 + a11 * w11
