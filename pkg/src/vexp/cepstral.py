"""Matrix-polynomial algebra and cepstral <-> Wold conversions.

A VEXP(q) process is parameterized by a symmetric matrix ``omega0`` (the
matrix logarithm of the innovation covariance) and q unconstrained square
matrices ``omega1 .. omegaq``.  The causal moving-average (Wold) filter of
the process is the matrix exponential of the cepstral polynomial
``omega(z) = sum_k omega_k z^k``, so stability and invertibility hold for
every real parameter value.  This module implements the exponential/log
machinery that moves between the two representations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CepstralModel",
    "MatrixPolynomial",
    "InvalidWoldError",
    "DEFAULT_TRUNCATION",
    "matrix_exp",
    "poly_mul_trunc",
    "wold_from_cepstral",
    "cepstral_from_wold",
    "innovation_covariance",
    "param_dim",
    "param_names",
    "to_params",
    "model_from_params",
]

# Truncation used when expanding the Wold filter for plotting/forecasting.
# Likelihood code uses max(DEFAULT_TRUNCATION, q + 25); see likelihood.py.
DEFAULT_TRUNCATION = 15


class InvalidWoldError(ValueError):
    """Raised when a matrix polynomial is not a valid Wold filter."""


def _check_square(a, name):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


@dataclass(frozen=True)
class CepstralModel:
    """A VEXP(q) parameterization: symmetric omega0 plus q free matrices.

    ``omega0`` is symmetrized exactly at construction (inputs asymmetric
    beyond rounding are rejected); the ``omegas`` are unconstrained.
    """

    omega0: np.ndarray
    omegas: tuple = ()

    def __post_init__(self):
        w0 = _check_square(self.omega0, "omega0")
        asym = np.max(np.abs(w0 - w0.T)) if w0.size else 0.0
        scale = max(1.0, float(np.max(np.abs(w0))) if w0.size else 1.0)
        if asym > 1e-8 * scale:
            raise ValueError("omega0 must be symmetric")
        w0 = (w0 + w0.T) / 2.0
        w0.flags.writeable = False
        ws = []
        for k, w in enumerate(self.omegas, start=1):
            w = _check_square(w, f"omega{k}")
            if w.shape != w0.shape:
                raise ValueError(
                    f"omega{k} has shape {w.shape}, expected {w0.shape}"
                )
            w = w.copy()
            w.flags.writeable = False
            ws.append(w)
        object.__setattr__(self, "omega0", w0)
        object.__setattr__(self, "omegas", tuple(ws))

    @property
    def m(self):
        return self.omega0.shape[0]

    @property
    def q(self):
        return len(self.omegas)

    def omega_stack(self):
        """The omega1..omegaq coefficients as a (q, m, m) array."""
        if self.q == 0:
            return np.zeros((0, self.m, self.m))
        return np.array(self.omegas)

    def negated(self):
        """Model with every parameter sign-flipped (the inverse spectrum)."""
        return CepstralModel(-self.omega0, tuple(-w for w in self.omegas))


@dataclass(frozen=True)
class MatrixPolynomial:
    """Finite sequence of square coefficient matrices C0..CM in powers of z."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 3 or c.shape[1] != c.shape[2]:
            raise ValueError(
                f"coeffs must have shape (n, m, m), got {c.shape}"
            )
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients contain non-finite entries")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def m(self):
        return self.coeffs.shape[1]

    @property
    def truncation(self):
        return self.coeffs.shape[0] - 1

    def __getitem__(self, k):
        return self.coeffs[k]


# ---------------------------------------------------------------------------
# matrix exponential

def _matrix_exp_batch(a):
    """exp() of a stack of square matrices by scaling-and-squaring.

    The whole stack shares one scaling exponent (taken from the largest
    1-norm) so the Taylor loop and the squarings stay fully batched.
    """
    a = np.asarray(a)
    n = a.shape[-1]
    eye = np.broadcast_to(np.eye(n, dtype=a.dtype), a.shape).copy()
    norm = float(np.max(np.sum(np.abs(a), axis=-2))) if a.size else 0.0
    if norm == 0.0:
        return eye
    s = max(0, int(np.ceil(np.log2(norm))) + 1)
    x = a / (2.0 ** s)
    total = eye.copy()
    term = eye.copy()
    for k in range(1, 64):
        term = term @ x / k
        total += term
        if np.max(np.abs(term)) <= 1e-17 * max(1.0, np.max(np.abs(total))):
            break
    for _ in range(s):
        total = total @ total
    return total


def matrix_exp(a):
    """Matrix exponential, accurate to ~1e-14 relative for moderate norms.

    Accepts real or complex square input; scaling-and-squaring on a
    truncated Taylor core keeps the series argument below norm 1/2.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix_exp requires a square matrix, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix_exp requires finite entries")
    dtype = complex if np.iscomplexobj(a) else float
    return _matrix_exp_batch(a.astype(dtype)[None])[0]


# ---------------------------------------------------------------------------
# polynomial arithmetic

def _poly_mul_stack(p, r, trunc):
    """Convolution of coefficient stacks, truncated at degree ``trunc``.

    Order matters: entry k of the result is sum_j p[j] @ r[k-j].  The loop
    runs over the shorter factor so products stay batched.
    """
    m = p.shape[1]
    out = np.zeros((trunc + 1, m, m), dtype=np.promote_types(p.dtype, r.dtype))
    if len(p) <= len(r):
        for j in range(min(len(p), trunc + 1)):
            hi = min(trunc + 1 - j, len(r))
            if hi > 0:
                out[j:j + hi] += p[j] @ r[:hi]
    else:
        for k in range(min(len(r), trunc + 1)):
            hi = min(trunc + 1 - k, len(p))
            if hi > 0:
                out[k:k + hi] += p[:hi] @ r[k]
    return out


def poly_mul_trunc(p, r, trunc):
    """Product of two matrix polynomials, truncated at degree ``trunc``."""
    if p.m != r.m:
        raise ValueError(f"dimension mismatch: {p.m} vs {r.m}")
    if trunc < 0:
        raise ValueError("truncation must be non-negative")
    return MatrixPolynomial(_poly_mul_stack(p.coeffs, r.coeffs, trunc))


# ---------------------------------------------------------------------------
# cepstral <-> Wold

def _wold_stack(omegas, m, trunc):
    """Coefficients of exp(omega(z)) through degree ``trunc`` as an array.

    Uses the power chain of upsilon(z) = omega(z)/z: the degree-k Wold
    coefficient is sum_{l=1..k} [upsilon(z)^l]_{k-l} / l!.  Each power is
    built from the previous one via a sliding-window batched matmul (one
    gemm call per chain step), so cost is linear in the truncation for
    fixed q.
    """
    psi = np.zeros((trunc + 1, m, m))
    psi[0] = np.eye(m)
    q = len(omegas)
    if q == 0 or trunc == 0 or not np.any(omegas):
        return psi
    ups = np.asarray(omegas, dtype=float)  # upsilon_i = omega_{i+1}
    n_pow = trunc  # power-chain coefficients cover degrees 0..trunc-1
    ups_rev = np.ascontiguousarray(ups[::-1]).reshape(q * m, m)
    pad = np.zeros((n_pow + q - 1, m, m))  # q-1 zero blocks in front
    head = min(q, n_pow)
    pad[q - 1:q - 1 + head] = ups[:head]
    factorial = 1.0
    for ell in range(1, trunc + 1):
        factorial *= ell
        block = pad[q - 1:q - 1 + (trunc + 1 - ell)]
        psi[ell:ell + len(block)] += block / factorial
        if ell < trunc:
            if np.max(np.abs(pad)) / (factorial * (ell + 1)) < 1e-300:
                break
            s0, s1, s2 = pad.strides
            win = np.lib.stride_tricks.as_strided(
                pad, (n_pow, q, m, m), (s0, s0, s1, s2)
            )
            # win[k, i] = power[k - (q-1-i)]; pairing with the reversed
            # coefficient stack gives sum_j power[k-j] @ upsilon_j.
            flat = np.ascontiguousarray(win.transpose(0, 2, 1, 3))
            pad[q - 1:] = flat.reshape(n_pow, m, q * m) @ ups_rev
    return psi


def wold_from_cepstral(model, trunc=DEFAULT_TRUNCATION):
    """Wold coefficients psi_0..psi_trunc of the model, with psi_0 = I."""
    if trunc < 1:
        raise ValueError("truncation must be >= 1")
    stack = _wold_stack(model.omega_stack(), model.m, trunc)
    return MatrixPolynomial(stack)


def _cepstral_stack(psi, q):
    """Inverse of :func:`_wold_stack`: log-series coefficients 1..q."""
    m = psi.shape[1]
    omegas = np.zeros((q, m, m))
    if q == 0:
        return omegas
    xi = psi[1:]  # xi(z) = (psi(z) - I)/z
    power = xi[:q].copy()
    for ell in range(1, q + 1):
        coef = -((-1.0) ** ell) / ell
        block = power[: q + 1 - ell]
        omegas[ell - 1:ell - 1 + len(block)] += coef * block
        if ell < q:
            power = _poly_mul_stack(power, xi, q - 1)
    return omegas


def cepstral_from_wold(psi, q):
    """Recover omega_1..omega_q from a Wold polynomial with psi_0 = I.

    The degree-k log coefficient depends only on psi_1..psi_k, so the
    result is exact whenever ``psi.truncation >= q``.
    """
    if q < 0:
        raise ValueError("order q must be non-negative")
    if psi.truncation < q:
        raise ValueError(
            f"need Wold coefficients through degree {q}, have {psi.truncation}"
        )
    lead = psi.coeffs[0]
    if not np.allclose(lead, np.eye(psi.m), atol=1e-10):
        raise InvalidWoldError("leading Wold coefficient must be the identity")
    stack = _cepstral_stack(psi.coeffs, q)
    return [stack[k] for k in range(q)]


def innovation_covariance(model):
    """Innovation covariance exp(omega0): symmetric positive definite."""
    sig = matrix_exp(model.omega0)
    return (sig + sig.T) / 2.0


# ---------------------------------------------------------------------------
# flat parameter vector

def _lower_tri_indices(m):
    """Lower-triangle (row, col) pairs ordered by column."""
    return [(i, j) for j in range(m) for i in range(j, m)]


def param_dim(m, q):
    return m * (m + 1) // 2 + q * m * m


def param_names(m, q):
    """Labels matching the flat layout, 1-based like omega1(2,1)."""
    names = [f"omega0({i + 1},{j + 1})" for i, j in _lower_tri_indices(m)]
    for k in range(1, q + 1):
        names += [
            f"omega{k}({i + 1},{j + 1})"
            for j in range(m)
            for i in range(m)
        ]
    return names


def to_params(model):
    """Flatten to [omega0 lower-triangle by column] ++ vec(omega_k) (column-major)."""
    m = model.m
    head = np.array([model.omega0[i, j] for i, j in _lower_tri_indices(m)])
    tails = [w.reshape(m * m, order="F") for w in model.omegas]
    return np.concatenate([head] + tails) if tails else head


def model_from_params(theta, m, q):
    """Inverse of :func:`to_params`; bit-exact round trip."""
    theta = np.asarray(theta, dtype=float)
    expected = param_dim(m, q)
    if theta.shape != (expected,):
        raise ValueError(
            f"parameter vector has length {theta.size}, expected {expected}"
        )
    w0 = np.zeros((m, m))
    for val, (i, j) in zip(theta, _lower_tri_indices(m)):
        w0[i, j] = val
        w0[j, i] = val
    base = m * (m + 1) // 2
    omegas = [
        theta[base + k * m * m: base + (k + 1) * m * m].reshape(m, m, order="F")
        for k in range(q)
    ]
    return CepstralModel(w0, tuple(omegas))
