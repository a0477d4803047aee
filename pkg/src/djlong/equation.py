"""Nonlinearity of the profile equation, its primitive, and pointwise residuals.

The profile equation on an interval is ``-w'' - beta^2 w = g(phi, w)`` with

    g(phi, w) = c1 w|w|^(2/beta) + c2 sin(phi) |w|^(1+3/beta),
    G(phi, w) = c1 beta/(2 beta+2) |w|^(2+2/beta) + c2 beta/(2 beta+3) sin(phi) w|w|^(1+3/beta),

so that ``dG/dw = g``. The same formulas cover the singular range, where for
positive ``w`` they read ``c1 w^(-s) + c2 sin(phi) w^(-s')``.
"""

from __future__ import annotations

import numpy as np

from .params import ProfileParams


def _pow(a: np.ndarray, e: float) -> np.ndarray:
    """``a**e`` for ``a >= 0`` with the convention ``0**e = 0`` for ``e > 0``."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.power(a, e)
    return np.where(a == 0, 0.0 if e > 0 else (1.0 if e == 0 else np.inf), out)


def nonlinearity(phi, w, params: ProfileParams, modified: bool = False) -> np.ndarray:
    """``g(phi, w)``; ``modified`` replaces ``w`` by its positive part."""
    phi = np.asarray(phi, dtype=float)
    w = np.asarray(w, dtype=float)
    if modified:
        w = np.maximum(w, 0.0)
    beta = params.beta
    aw = np.abs(w)
    out = np.zeros(np.broadcast(phi, w).shape)
    if params.c1:
        out = out + params.c1 * np.sign(w) * _pow(aw, 1.0 + 2.0 / beta)
    if params.c2:
        out = out + params.c2 * np.sin(phi) * _pow(aw, 1.0 + 3.0 / beta)
    return out


def nonlinearity_derivative(phi, w, params: ProfileParams, modified: bool = False) -> np.ndarray:
    """``dg/dw``, with the value 0 taken at ``w = 0`` (and for ``w < 0`` when ``modified``)."""
    phi = np.asarray(phi, dtype=float)
    w = np.asarray(w, dtype=float)
    beta = params.beta
    aw = np.abs(w)
    out = np.zeros(np.broadcast(phi, w).shape)
    if params.c1:
        out = out + params.c1 * (1.0 + 2.0 / beta) * _pow(aw, 2.0 / beta)
    if params.c2:
        out = out + params.c2 * (1.0 + 3.0 / beta) * np.sin(phi) * np.sign(w) * _pow(aw, 3.0 / beta)
    out = np.where(aw > 0, out, 0.0)
    if modified:
        out = np.where(w > 0, out, 0.0)
    return out


def primitive(phi, w, params: ProfileParams, modified: bool = False) -> np.ndarray:
    """``G(phi, w)`` with ``G(phi, 0) = 0``."""
    phi = np.asarray(phi, dtype=float)
    w = np.asarray(w, dtype=float)
    if modified:
        w = np.maximum(w, 0.0)
    beta = params.beta
    aw = np.abs(w)
    out = np.zeros(np.broadcast(phi, w).shape)
    if params.c1:
        out = out + params.c1 * beta / (2.0 * beta + 2.0) * _pow(aw, 2.0 + 2.0 / beta)
    if params.c2:
        out = out + params.c2 * beta / (2.0 * beta + 3.0) * np.sin(phi) * w * _pow(aw, 1.0 + 3.0 / beta)
    return out


def relative_sum(*terms: np.ndarray) -> np.ndarray:
    """``|sum of terms| / (1 + sum of |terms|)``: a residual insensitive to the size of each term."""
    total = sum(terms)
    scale = 1.0 + sum(np.abs(t) for t in terms)
    return np.abs(total) / scale


def ode_residual(phi, w, d2w, params: ProfileParams) -> np.ndarray:
    """Pointwise relative residual of ``-w'' - beta^2 w - g(phi, w)``."""
    w = np.asarray(w, dtype=float)
    return relative_sum(-np.asarray(d2w, dtype=float), -params.beta ** 2 * w, -nonlinearity(phi, w, params))
