"""Parametric constructors and closed-form expected values for the two
sharpness families: a 3x3 rank-one-perturbation family (exact on the inner
region and, with tuned weights, on the outer region) and a 4x4 family with
an explicit Riccati solution (exact on the intermediate region)."""
from __future__ import annotations

import math

import numpy as np

from .bounds import RADICAND_GUARD, sin_arctan
from .errors import DomainError
from .model import BlockOperator, make_block_operator


def rank_one_build(gamma: float, a: float, b1: float, b2: float) -> BlockOperator:
    """3x3 family: A0 = [a], A1 = diag(-gamma, gamma), B = [b1 b2].

    The single unperturbed eigenvalue a sits in the gap (-gamma, gamma),
    so d = gamma - a and D = 2 gamma.
    """
    if not 0.0 <= a < gamma:
        raise DomainError(f"need 0 <= a < gamma, got a={a}, gamma={gamma}")
    if b1 < 0.0 or b2 < 0.0:
        raise DomainError("b1 and b2 must be non-negative")
    return make_block_operator(
        np.array([[a]]), np.diag([-gamma, gamma]), np.array([[b1, b2]])
    )


def rank_one_inner_expected(d: float, v: float) -> float:
    """Exact projection distance for the b1 = 0 configuration:
    sin(arctan(2v / (d + sqrt(d^2 + 4v^2)))).

    The inner expression is the norm of the angular operator; it coincides
    with the bound branch M1 on the inner region, which is what makes this
    family a sharpness witness there.
    """
    if d <= 0.0 or v < 0.0:
        raise DomainError(f"need d > 0 and v >= 0, got d={d}, v={v}")
    x_norm = 2.0 * v / (d + math.sqrt(d * d + 4.0 * v * v))
    return sin_arctan(x_norm)


def rank_one_outer_params(gamma: float, a: float, b: float) -> tuple:
    """Weights (z0, t, b1, b2) making the 3x3 family attain equality on the
    outer bound region for total perturbation norm b.

    Requires sqrt(gamma^2 - a^2) <= b < sqrt(2 gamma (gamma - a)). The
    returned z0 is the single in-gap eigenvalue of the tuned instance.
    """
    if not 0.0 <= a < gamma:
        raise DomainError(f"need 0 <= a < gamma, got a={a}, gamma={gamma}")
    b_lo = math.sqrt(gamma * gamma - a * a)
    b_hi = math.sqrt(2.0 * gamma * (gamma - a))
    if not b_lo * (1.0 - RADICAND_GUARD) <= b < b_hi:
        raise DomainError(f"b = {b} is outside [{b_lo}, {b_hi})")
    if a == 0.0:
        z0 = 0.0
    else:
        h = (2.0 * gamma * gamma - b * b) / (2.0 * a)
        z0 = h - math.sqrt(max(h * h - gamma * gamma, 0.0))
    t = (b * b * (gamma - z0) + (gamma * gamma - z0 * z0) * (a - z0)) / (
        2.0 * gamma * b * b
    )
    if not -RADICAND_GUARD <= t < 1.0:
        raise DomainError(f"weight t = {t} escaped [0, 1)")
    t = max(t, 0.0)
    b1 = math.sqrt(1.0 - t) * b
    b2 = math.sqrt(t) * b
    return z0, t, b1, b2


def circulant_build(gamma: float, a: float, b1: float, b2: float) -> BlockOperator:
    """4x4 family: A0 = diag(-a, a), A1 = diag(-gamma, gamma) and a
    symmetric circulant coupling B = [[b1, b2], [b2, b1]].

    Here d = gamma - a, D = 2 gamma and ||B|| = b1 + b2.
    """
    if not 0.0 <= a < gamma:
        raise DomainError(f"need 0 <= a < gamma, got a={a}, gamma={gamma}")
    if b1 < 0.0 or b2 < 0.0:
        raise DomainError("b1 and b2 must be non-negative")
    return make_block_operator(
        np.diag([-a, a]), np.diag([-gamma, gamma]), np.array([[b1, b2], [b2, b1]])
    )


def circulant_kappas(gamma: float, a: float, b1: float, b2: float) -> tuple:
    """Closed-form entries (kappa1, kappa2) of the explicit Riccati solution
    X = [[k1, k2], [-k2, -k1]] of the 4x4 family; ||X|| = k1 + k2."""
    if not 0.0 <= a < gamma:
        raise DomainError(f"need 0 <= a < gamma, got a={a}, gamma={gamma}")
    if b1 < 0.0 or b2 < 0.0:
        raise DomainError("b1 and b2 must be non-negative")
    if b1 + b2 >= math.sqrt(2.0 * gamma * (gamma - a)):
        raise DomainError(
            f"||B|| = {b1 + b2} is not below sqrt(2 gamma (gamma - a))"
        )
    r_minus = math.sqrt((gamma - a) ** 2 + 4.0 * b1 * b1)
    r_plus = math.sqrt((gamma + a) ** 2 + 4.0 * b2 * b2)
    den = (gamma + a) * r_minus + (gamma - a) * r_plus
    return 2.0 * b1 * r_plus / den, 2.0 * b2 * r_minus / den


def circulant_kappa_matrix(gamma: float, a: float, b1: float, b2: float) -> np.ndarray:
    """The explicit solution matrix built from circulant_kappas."""
    k1, k2 = circulant_kappas(gamma, a, b1, b2)
    return np.array([[k1, k2], [-k2, -k1]])


def circulant_case_params(gamma: float, a: float, b: float) -> tuple:
    """Weights (beta, b1, b2) making the 4x4 family attain equality on the
    intermediate bound region for total perturbation norm b.

    Requires sqrt(2 (gamma - a) a) / 2 < b < sqrt(gamma^2 - a^2); both
    returned weights are positive (b2 > 0 by the lower inequality).
    """
    if not 0.0 <= a < gamma:
        raise DomainError(f"need 0 <= a < gamma, got a={a}, gamma={gamma}")
    b_lo = 0.5 * math.sqrt(2.0 * (gamma - a) * a)
    b_hi = math.sqrt(gamma * gamma - a * a)
    if not b_lo < b < b_hi:
        raise DomainError(f"b = {b} is outside ({b_lo}, {b_hi})")
    if a == 0.0:
        beta = 0.0
    else:
        beta = (
            math.sqrt(gamma * gamma * b * b + a * a * (gamma * gamma - a * a - b * b))
            - gamma * b
        ) / a
    return beta, (b + beta) / 2.0, (b - beta) / 2.0
