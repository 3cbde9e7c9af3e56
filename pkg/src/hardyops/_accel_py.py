"""Pure-numpy versions of the compiled inner loops in ``_accel.pyx``."""
import numpy as np


def horner(coeffs, z):
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    if coeffs.size == 0:
        return np.zeros_like(z)
    acc = np.full(z.shape, coeffs[-1], dtype=np.complex128)
    for c in coeffs[-2::-1]:
        acc *= z
        acc += c
    return acc


def power_means(x, max_power):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros(max_power + 1)
    if x.size == 0:
        return out
    p = np.ones_like(x)
    for j in range(max_power + 1):
        out[j] = p.mean()
        p *= x
    return out
