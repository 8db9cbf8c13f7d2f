"""Eavesdropper attack models on the two relay links.

A two-mode attack injects a pair of thermal ancillas, one per link, whose
joint CM carries correlation parameters g (q sector) and g' (p sector).
Setting g = g' = 0 recovers the independent entangling-cloner (one-mode)
attack. The squeezed one-mode variant allows quadrature-asymmetric thermal
noise on each ancilla separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import UnphysicalStateError, ValidationError
from .gaussian import (
    DEFAULT_TOL,
    CovarianceMatrix,
    Separability,
    is_physical,
    min_symplectic_eigenvalue,
    ppt_separability,
)

# |g| and |g'| below this threshold classify as a one-mode attack; exact zeros
# are intended, the threshold only absorbs round-trip noise.
ONE_MODE_TOL = 1e-12


@dataclass(frozen=True)
class TwoModeAttack:
    """Correlated two-mode Gaussian attack (omega_a, omega_b, g, g')."""

    omega_a: float
    omega_b: float
    g: float = 0.0
    g_prime: float = 0.0

    def __post_init__(self):
        for name in ("omega_a", "omega_b", "g", "g_prime"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError(f"attack parameter {name} must be finite")

    @property
    def is_one_mode(self) -> bool:
        return abs(self.g) <= ONE_MODE_TOL and abs(self.g_prime) <= ONE_MODE_TOL


@dataclass(frozen=True)
class SqueezedOneModeAttack:
    """One-mode attack with quadrature-asymmetric thermal noise per ancilla.

    Each ancilla's variances must respect the uncertainty product
    omega_q * omega_p >= 1.
    """

    omega_a_q: float
    omega_a_p: float
    omega_b_q: float
    omega_b_p: float

    def __post_init__(self):
        for name in ("omega_a_q", "omega_a_p", "omega_b_q", "omega_b_p"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValidationError(f"variance {name} must be positive and finite")
        if self.omega_a_q * self.omega_a_p < 1.0:
            raise ValidationError("ancilla A violates the uncertainty product omega_q*omega_p >= 1")
        if self.omega_b_q * self.omega_b_p < 1.0:
            raise ValidationError("ancilla B violates the uncertainty product omega_q*omega_p >= 1")


@dataclass(frozen=True)
class NoiseAggregates:
    """The combinations (x, x') through which an attack enters the shared CM."""

    x: float
    x_prime: float


class AttackClass(Enum):
    ONE_MODE = "one_mode"
    SEPARABLE_TWO_MODE = "separable_two_mode"
    ENTANGLED_TWO_MODE = "entangled_two_mode"
    UNPHYSICAL = "unphysical"


def _attack_matrix(attack: TwoModeAttack) -> np.ndarray:
    g_block = np.diag([attack.g, attack.g_prime])
    eye = np.eye(2)
    return np.block([[attack.omega_a * eye, g_block], [g_block, attack.omega_b * eye]])


def attack_cm(attack: TwoModeAttack, tol: float = DEFAULT_TOL) -> CovarianceMatrix:
    """Ancilla-pair CM [[omega_a I, G], [G, omega_b I]], G = diag(g, g').

    Raises :class:`UnphysicalStateError` (reporting the violating symplectic
    eigenvalue) when the parameters are not allowed by quantum mechanics.
    """
    cm = CovarianceMatrix(_attack_matrix(attack))
    if not is_physical(cm, tol):
        nu = min_symplectic_eigenvalue(cm)
        raise UnphysicalStateError(
            f"attack {attack} is unphysical: min symplectic eigenvalue {nu:.6g} < 1",
            min_eigenvalue=nu,
        )
    return cm


def noise_aggregates(attack: TwoModeAttack) -> NoiseAggregates:
    """x = (omega_a + omega_b)/2 - g, x' = (omega_a + omega_b)/2 + g'.

    The attack is assumed physical; this is pure arithmetic either way.
    """
    mean = 0.5 * (attack.omega_a + attack.omega_b)
    return NoiseAggregates(x=mean - attack.g, x_prime=mean + attack.g_prime)


def squeezed_aggregates(attack: SqueezedOneModeAttack) -> NoiseAggregates:
    """x = (omega_a_q + omega_b_q)/2, x' = (omega_a_p + omega_b_p)/2."""
    return NoiseAggregates(
        x=0.5 * (attack.omega_a_q + attack.omega_b_q),
        x_prime=0.5 * (attack.omega_a_p + attack.omega_b_p),
    )


def classify_attack(
    attack: TwoModeAttack,
    tol: float = ONE_MODE_TOL,
    physical_tol: float = DEFAULT_TOL,
) -> AttackClass:
    """Place an attack in one of the four regions of the (omega, g) plane.

    `tol` is the one-mode threshold on |g|, |g'|; `physical_tol` gates the
    physicality and PPT tests.
    """
    cm = CovarianceMatrix(_attack_matrix(attack))
    if not is_physical(cm, physical_tol):
        return AttackClass.UNPHYSICAL
    if abs(attack.g) <= tol and abs(attack.g_prime) <= tol:
        return AttackClass.ONE_MODE
    if ppt_separability(cm, physical_tol) is Separability.ENTANGLED:
        return AttackClass.ENTANGLED_TWO_MODE
    return AttackClass.SEPARABLE_TWO_MODE


@dataclass(frozen=True)
class Interval:
    """Open-closed interval (lower, upper]; empty when upper <= lower."""

    lower: float
    upper: float

    @property
    def is_empty(self) -> bool:
        return self.upper <= self.lower

    @property
    def midpoint(self) -> float:
        if self.is_empty:
            raise ValidationError("empty interval has no midpoint")
        return 0.5 * (self.lower + self.upper)

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lower + tol < value <= self.upper + tol


def entangled_band(omega: float) -> Interval:
    """The g interval (omega-1, sqrt(omega^2-1)] of entangled symmetric attacks.

    For the family omega_a = omega_b = omega, g' = -g: below the band the
    ancillas are separable, above it the CM is unphysical. Empty at omega = 1.
    """
    if omega < 1.0:
        raise ValidationError(f"thermal variance must be >= 1, got {omega}")
    return Interval(lower=omega - 1.0, upper=float(np.sqrt(omega * omega - 1.0)))
