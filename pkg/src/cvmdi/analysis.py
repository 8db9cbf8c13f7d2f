"""Reachability analysis: which shared CMs can one-mode attacks produce?

One-mode attacks confine the noise aggregate to x >= 1, and the shared CM's
top-left entry is strictly increasing in x. Any attack achieving x < 1
therefore produces a conditional CM no one-mode attack can match, and the
symmetric entangled family (omega, omega, g, -g) with g in the entangled
band realizes x = omega - g < 1. This module turns that argument into
executable checks and region scans.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .attacks import (
    AttackClass,
    SqueezedOneModeAttack,
    TwoModeAttack,
    classify_attack,
    entangled_band,
    noise_aggregates,
    squeezed_aggregates,
)
from .errors import ValidationError
from .gaussian import ConditionalCM
from .protocol import ProtocolParams, conditional_cm_analytic, v11_from_x

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def one_mode_x_infimum() -> float:
    """Infimum of the noise aggregate x over one-mode attacks (at omega_a = omega_b = 1)."""
    return 1.0


def counterexample_attack(omega: float) -> TwoModeAttack:
    """Symmetric entangled attack at the midpoint of the entangled band.

    Returns (omega, omega, g, -g) with g = midpoint of (omega-1,
    sqrt(omega^2-1)], so x = omega - g < 1: a physical, entangled attack
    whose shared CM no one-mode attack can reproduce.
    """
    if omega <= 1.0:
        raise ValidationError(f"entangled band is empty for omega <= 1, got {omega}")
    g = entangled_band(omega).midpoint
    return TwoModeAttack(omega_a=omega, omega_b=omega, g=g, g_prime=-g)


@dataclass(frozen=True)
class SearchSpec:
    """Controls for the one-mode reachability search.

    omega_max bounds the thermal-noise search box [1, omega_max]^2; None
    derives it as 10x the noise scale implied by the target. The search is
    effectively one-dimensional in x = (omega_a + omega_b)/2: a coarse grid
    brackets the minimum, golden-section refines it to refine_tol.
    """

    omega_max: float | None = None
    coarse_steps: int = 128
    refine_tol: float = 1e-12
    match_tol: float = 1e-9

    def __post_init__(self):
        if self.omega_max is not None and not (np.isfinite(self.omega_max) and self.omega_max > 1.0):
            raise ValidationError(f"omega_max must exceed 1, got {self.omega_max}")
        if self.coarse_steps < 2:
            raise ValidationError("coarse_steps must be at least 2")
        if not 0.0 < self.refine_tol:
            raise ValidationError("refine_tol must be positive")
        if not 0.0 < self.match_tol:
            raise ValidationError("match_tol must be positive")


@dataclass(frozen=True)
class ReachabilityReport:
    """Outcome of the best one-mode approximation to a target conditional CM."""

    target_v11: float
    best_one_mode_v11: float
    gap: float
    best_one_mode_params: tuple[float, float]
    matched: bool
    cm_distance: float


def _default_omega_max(target_v11: float, params: ProtocolParams) -> float:
    """10x the noise scale of the target, inverted from the top-left entry."""
    mu, tau = params.mu, params.tau_a
    scale = 1.0
    if 0.0 < tau < 1.0 and mu > 1.0 and target_v11 < mu:
        theta = (mu * mu - 1.0) * tau / (mu - target_v11)
        x_target = (0.5 * theta - tau * mu) / (1.0 - tau)
        if np.isfinite(x_target):
            scale = max(scale, x_target)
    return 10.0 * max(scale, 1.0)


def one_mode_simulation_search(
    target: ConditionalCM,
    params: ProtocolParams,
    spec: SearchSpec = SearchSpec(),
) -> ReachabilityReport:
    """Best one-mode attack reproducing the target CM's top-left entry.

    Minimizes |v11(x) - target_v11| over one-mode attacks. v11 is monotone
    in x and one-mode attacks have x >= 1, so targets generated with x < 1
    are provably unmatchable: the best candidate sits at the x = 1 boundary
    and the report comes back matched=False with a positive gap. The report
    also carries the full-CM entrywise distance of the best candidate, since
    matching the single entry is necessary but not sufficient.
    """
    if not params.symmetric:
        raise ValidationError("reachability search requires the symmetric configuration")
    if target.n_modes != 2:
        raise ValidationError("target must be a two-mode conditional CM")

    mu, tau = params.mu, params.tau_a
    target_v11 = float(target.entries[0, 0])
    x_max = spec.omega_max if spec.omega_max is not None else _default_omega_max(target_v11, params)

    def objective(x: float) -> float:
        return abs(v11_from_x(mu, tau, x) - target_v11)

    # Monotonicity makes boundary cases exact; golden-section only runs when
    # the target value is interior to [v11(1), v11(x_max)].
    lo_val = v11_from_x(mu, tau, 1.0)
    hi_val = v11_from_x(mu, tau, x_max)
    if target_v11 <= lo_val:
        best_x = 1.0
    elif target_v11 >= hi_val:
        best_x = x_max
    else:
        grid = np.linspace(1.0, x_max, spec.coarse_steps)
        k = int(np.argmin([objective(x) for x in grid]))
        a = grid[max(k - 1, 0)]
        b = grid[min(k + 1, len(grid) - 1)]
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
        while b - a > spec.refine_tol:
            if objective(c) < objective(d):
                b, d = d, c
                c = b - _GOLDEN * (b - a)
            else:
                a, c = c, d
                d = a + _GOLDEN * (b - a)
        best_x = 0.5 * (a + b)

    best_v11 = v11_from_x(mu, tau, best_x)
    gap = best_v11 - target_v11
    best = TwoModeAttack(omega_a=best_x, omega_b=best_x)
    best_cm = conditional_cm_analytic(params, best)
    return ReachabilityReport(
        target_v11=target_v11,
        best_one_mode_v11=best_v11,
        gap=gap,
        best_one_mode_params=(best_x, best_x),
        matched=abs(gap) <= spec.match_tol,
        cm_distance=float(np.abs(best_cm.entries - target.entries).max()),
    )


@dataclass(frozen=True)
class SqueezedExclusionReport:
    """Result of the squeezed one-mode exclusion sweep."""

    n_samples: int
    n_violations: int
    min_product: float
    boundary_min_product: float

    @property
    def passed(self) -> bool:
        return self.n_violations == 0 and self.boundary_min_product >= 1.0 - 1e-12


def squeezed_exclusion_check(n_samples: int, seed: int) -> SqueezedExclusionReport:
    """Sample squeezed one-mode attacks; none may reach x < 1 and x' < 1 together.

    Variances are drawn log-uniformly with an uncertainty-respecting excess
    factor, so every sample is a valid squeezed thermal pair. Also sweeps the
    symmetric minimum-uncertainty boundary omega_q * omega_p = 1, where the
    product x * x' attains its infimum of exactly 1.
    """
    if n_samples < 1:
        raise ValidationError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    # omega_q log-uniform in [0.05, 20]; omega_p = excess / omega_q, excess >= 1.
    log_range = np.log(20.0) - np.log(0.05)
    wq = np.exp(np.log(0.05) + log_range * rng.random((n_samples, 2)))
    excess = np.exp(np.log(20.0) * rng.random((n_samples, 2)))
    wp = excess / wq
    x = 0.5 * (wq[:, 0] + wq[:, 1])
    x_prime = 0.5 * (wp[:, 0] + wp[:, 1])
    violations = int(np.count_nonzero((x < 1.0) & (x_prime < 1.0)))

    # Tie a subsample back through the attack API to keep the fast path honest.
    for i in range(min(n_samples, 64)):
        agg = squeezed_aggregates(
            SqueezedOneModeAttack(wq[i, 0], wp[i, 0], wq[i, 1], wp[i, 1])
        )
        if not (np.isclose(agg.x, x[i]) and np.isclose(agg.x_prime, x_prime[i])):
            raise ValidationError("vectorized aggregates disagree with squeezed_aggregates")

    boundary_wq = np.exp(np.linspace(np.log(0.05), np.log(20.0), 201))
    boundary_product = (boundary_wq) * (1.0 / boundary_wq)  # x * x' for the symmetric choice
    return SqueezedExclusionReport(
        n_samples=n_samples,
        n_violations=violations,
        min_product=float((x * x_prime).min()),
        boundary_min_product=float(boundary_product.min()),
    )


class Region(Enum):
    ONE_MODE_AXIS = "one_mode_axis"
    SEPARABLE = "separable"
    ENTANGLED = "entangled"
    PROHIBITED = "prohibited"


_REGION_OF_CLASS = {
    AttackClass.ONE_MODE: Region.ONE_MODE_AXIS,
    AttackClass.SEPARABLE_TWO_MODE: Region.SEPARABLE,
    AttackClass.ENTANGLED_TWO_MODE: Region.ENTANGLED,
    AttackClass.UNPHYSICAL: Region.PROHIBITED,
}


@dataclass(frozen=True)
class RegionPoint:
    omega: float
    g: float
    region: Region


def region_scan(
    omega_range: tuple[float, float],
    g_range: tuple[float, float],
    steps: int | tuple[int, int],
) -> list[RegionPoint]:
    """Classify the symmetric family (omega, omega, g, -g) over a grid.

    Grid endpoints are inclusive; rows vary omega, columns vary g. The
    classification flips track the analytic curves g = omega - 1 and
    g = sqrt(omega^2 - 1) to within one grid cell.
    """
    n_omega, n_g = (steps, steps) if isinstance(steps, int) else steps
    if n_omega < 2 or n_g < 2:
        raise ValidationError("each grid axis needs at least 2 steps")
    for (lo, hi), name in ((omega_range, "omega"), (g_range, "g")):
        if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
            raise ValidationError(f"invalid {name} range ({lo}, {hi})")
    if omega_range[0] < 1.0:
        raise ValidationError("omega range must start at or above 1")

    points = []
    for omega in np.linspace(omega_range[0], omega_range[1], n_omega):
        for g in np.linspace(g_range[0], g_range[1], n_g):
            cls = classify_attack(TwoModeAttack(omega_a=omega, omega_b=omega, g=g, g_prime=-g))
            points.append(RegionPoint(omega=float(omega), g=float(g), region=_REGION_OF_CLASS[cls]))
    return points
