"""Asymptotic secret-key rate from a shared two-mode conditional CM.

The rate only needs the reconstructed CM: Eve is credited with the full
purification of the shared state, so her accessible information is bounded
by entropies of that CM alone. Both parties heterodyne. The rate is the
Devetak-Winter difference R = xi * I - chi, reported raw (it may be
negative; callers clamp for presentation if they want).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import UnphysicalStateError, ValidationError
from .gaussian import (
    DEFAULT_TOL,
    ConditionalCM,
    heterodyne_condition,
    is_physical,
    min_symplectic_eigenvalue,
    von_neumann_entropy,
)


class Direction(Enum):
    """Which party's heterodyne outcomes serve as the reconciliation reference."""

    DIRECT_ON_BOB = "direct_on_bob"
    REVERSE_ON_ALICE = "reverse_on_alice"


class Detection(Enum):
    HETERODYNE = "heterodyne"


@dataclass(frozen=True)
class RateConfig:
    reconciliation_efficiency: float = 1.0
    direction: Direction = Direction.DIRECT_ON_BOB
    detection: Detection = Detection.HETERODYNE

    def __post_init__(self):
        xi = self.reconciliation_efficiency
        if not (np.isfinite(xi) and 0.0 < xi <= 1.0):
            raise ValidationError(f"reconciliation efficiency must lie in (0, 1], got {xi}")


@dataclass(frozen=True)
class RateResult:
    mutual_information: float
    holevo_bound: float
    rate: float


def _require_shared_cm(cm: ConditionalCM) -> None:
    if cm.n_modes != 2:
        raise ValidationError("rate computation requires a two-mode conditional CM")
    if not is_physical(cm, DEFAULT_TOL):
        raise UnphysicalStateError(
            "rate computation requires a physical CM",
            min_eigenvalue=min_symplectic_eigenvalue(cm),
        )


def mutual_information(cm: ConditionalCM, config: RateConfig = RateConfig()) -> float:
    """Shannon mutual information of the two heterodyne outcomes, in bits.

    Heterodyne smears each party's block by one vacuum unit; the CMs handled
    here carry no q-p cross terms, so the information is the sum of the q and
    p sector contributions.
    """
    _require_shared_cm(cm)
    m = cm.entries
    total = 0.0
    for k in (0, 1):  # q sector, p sector
        va = m[k, k] + 1.0
        vb = m[k + 2, k + 2] + 1.0
        c = m[k, k + 2]
        det = va * vb - c * c
        total += 0.5 * np.log2(va * vb / det)
    return float(total)


def holevo_bound(cm: ConditionalCM, config: RateConfig = RateConfig()) -> float:
    """Eve's Holevo information on the reference party's outcomes, in bits.

    chi = S(rho_ab) - S(other mode | reference heterodyne). With Eve holding
    the purification, S(E) = S(rho_ab) and the post-measurement global state
    stays pure, so the conditioned eavesdropper entropy equals the remaining
    mode's. Tiny negative results (within tol of 0) clamp to 0.
    """
    _require_shared_cm(cm)
    measured = 1 if config.direction is Direction.DIRECT_ON_BOB else 0
    conditional = heterodyne_condition(cm, measured)
    chi = von_neumann_entropy(cm) - von_neumann_entropy(conditional)
    if -DEFAULT_TOL <= chi < 0.0:
        chi = 0.0
    return float(chi)


def key_rate(cm: ConditionalCM, config: RateConfig = RateConfig()) -> RateResult:
    """R = xi * I - chi; negative rates are reported, not clamped."""
    i = mutual_information(cm, config)
    chi = holevo_bound(cm, config)
    return RateResult(
        mutual_information=i,
        holevo_bound=chi,
        rate=config.reconciliation_efficiency * i - chi,
    )
