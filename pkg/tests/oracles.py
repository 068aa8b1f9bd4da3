"""Test-only oracles, independent of the numerical differentiation path.

`jacobian_oracle` differentiates expression trees symbolically in forward
mode: each node evaluates to (value, grad_z, grad_zbar) where the
gradients are n-vectors of partial derivatives with respect to z_k and
conj(z_k), treating them as independent variables. The conjugation rule
swaps and conjugates the gradient pair; re/im/abs2/norm2 expand through
it. This never touches finite differences, so it anchors the numerical
engine.
"""

import cmath

import numpy as np

from wigner.dsl import BinOp, Literal, MatApply, Neg, TransformSpec, Var


def _forward(node, z, row, mats):
    n = len(z)
    zero = np.zeros(n, dtype=complex)
    if isinstance(node, Literal):
        return node.value, zero.copy(), zero.copy()
    if isinstance(node, Var):
        g = zero.copy()
        g[node.index - 1] = 1.0
        return complex(z[node.index - 1]), g, zero.copy()
    if isinstance(node, Neg):
        v, g, h = _forward(node.operand, z, row, mats)
        return -v, -g, -h
    if isinstance(node, MatApply):
        m = mats[node.name]
        return complex((m @ z)[row]), m[row, :].astype(complex), zero.copy()
    if isinstance(node, BinOp):
        v1, g1, h1 = _forward(node.left, z, row, mats)
        v2, g2, h2 = _forward(node.right, z, row, mats)
        if node.op == "+":
            return v1 + v2, g1 + g2, h1 + h2
        if node.op == "-":
            return v1 - v2, g1 - g2, h1 - h2
        if node.op == "*":
            return v1 * v2, v1 * g2 + v2 * g1, v1 * h2 + v2 * h1
        q = v1 / v2
        return q, (g1 - q * g2) / v2, (h1 - q * h2) / v2
    func = node.func
    if func == "norm2":
        return complex(np.vdot(z, z).real), np.conj(z).astype(complex), z.astype(complex)
    v, g, h = _forward(node.args[0], z, row, mats)
    if func == "conj":
        return v.conjugate(), np.conj(h), np.conj(g)
    if func == "re":
        return complex(v.real), (g + np.conj(h)) / 2.0, (h + np.conj(g)) / 2.0
    if func == "im":
        return (
            complex(v.imag),
            (g - np.conj(h)) / 2.0j,
            (h - np.conj(g)) / 2.0j,
        )
    if func == "abs2":
        vbar = v.conjugate()
        return (
            complex(v.real * v.real + v.imag * v.imag),
            vbar * g + v * np.conj(h),
            vbar * h + v * np.conj(g),
        )
    if func == "exp":
        e = cmath.exp(v)
        return e, e * g, e * h
    if func == "sin":
        return cmath.sin(v), cmath.cos(v) * g, cmath.cos(v) * h
    if func == "cos":
        return cmath.cos(v), -cmath.sin(v) * g, -cmath.sin(v) * h
    # expi
    e = cmath.exp(1j * v)
    return e, 1j * e * g, 1j * e * h


def jacobian_oracle(spec: TransformSpec, z, constants=None):
    """Exact (d_z, d_zbar) of a parsed spec at z; row k differentiates T_k."""
    z = np.asarray(z, dtype=complex)
    mats = {
        name: np.asarray((constants or {})[name], dtype=complex)
        for name in spec.matrix_names
    }
    n = spec.dimension
    d_z = np.empty((n, n), dtype=complex)
    d_zbar = np.empty((n, n), dtype=complex)
    for k, tree in enumerate(spec.outputs):
        _, g, h = _forward(tree, z, k, mats)
        d_z[k, :] = g
        d_zbar[k, :] = h
    return d_z, d_zbar


def directional_derivative(transform, z, delta, t=1e-6):
    """Central-difference derivative of s -> T(z + s*delta) at s = 0."""
    return (transform(z + t * delta) - transform(z - t * delta)) / (2.0 * t)
