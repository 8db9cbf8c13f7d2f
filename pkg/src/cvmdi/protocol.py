"""The CV-MDI-QKD state pipeline and the shared post-relay covariance matrix.

Both endpoints hold the entanglement-based picture of Gaussian coherent-state
modulation: a two-mode squeezed vacuum of variance mu, one half kept, the
other sent through a lossy link into an untrusted relay. The relay mixes the
two incoming modes on a balanced beamsplitter and Bell-detects them by
homodyning q on the difference port and p on the sum port. Conditioned on the
announced outcome, the retained modes a (Alice) and b (Bob) share a two-mode
CM that this module produces two independent ways:

* :func:`conditional_cm_analytic` - closed form, symmetric links only;
* :func:`conditional_cm_numeric` - explicit 6-mode phase-space pipeline,
  any transmissivity pair.

The two agree entrywise to better than 1e-9 in the symmetric configuration,
which is the consistency anchor for everything downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attacks import TwoModeAttack, attack_cm, noise_aggregates
from .errors import InternalConsistencyError, ValidationError
from .gaussian import (
    DEFAULT_TOL,
    ConditionalCM,
    CovarianceMatrix,
    apply_symplectic,
    beamsplitter_symplectic,
    homodyne_condition,
    is_physical,
    tmsv_cm,
)

# Mode ordering of the 6-mode intermediate state, fixed so tests can address
# blocks: (a, A, E1, b, B, E2) = (kept a, sent A, ancilla on link A,
#                                 kept b, sent B, ancilla on link B).
MODE_A_KEPT, MODE_A_SENT, MODE_E1, MODE_B_KEPT, MODE_B_SENT, MODE_E2 = range(6)


@dataclass(frozen=True)
class ProtocolParams:
    """Source variance mu and the two link transmissivities."""

    mu: float
    tau_a: float
    tau_b: float

    def __post_init__(self):
        if not (np.isfinite(self.mu) and self.mu >= 1.0):
            raise ValidationError(f"modulation variance mu must be >= 1, got {self.mu}")
        for name in ("tau_a", "tau_b"):
            t = getattr(self, name)
            if not (np.isfinite(t) and 0.0 <= t <= 1.0):
                raise ValidationError(f"transmissivity {name} must lie in [0, 1], got {t}")

    @property
    def symmetric(self) -> bool:
        return self.tau_a == self.tau_b


@dataclass(frozen=True)
class ThetaParams:
    """Relay Bell-quadrature variances: theta = Var(q-), theta' = Var(p+), each doubled."""

    theta: float
    theta_prime: float


def theta_params(params: ProtocolParams, attack: TwoModeAttack) -> ThetaParams:
    """theta = 2[tau mu + (1-tau) x], theta' = 2[tau mu + (1-tau) x']."""
    if not params.symmetric:
        raise ValidationError("theta parameters are defined for the symmetric configuration")
    agg = noise_aggregates(attack)
    tau = params.tau_a
    return ThetaParams(
        theta=2.0 * (tau * params.mu + (1.0 - tau) * agg.x),
        theta_prime=2.0 * (tau * params.mu + (1.0 - tau) * agg.x_prime),
    )


def v11_from_x(mu: float, tau: float, x: float) -> float:
    """Top-left conditional variance mu - (mu^2-1) tau / (2[tau mu + (1-tau) x]).

    Strictly increasing in x for mu > 1 and 0 < tau < 1, which is what makes
    the noise aggregate x directly observable from the shared CM.
    """
    return mu - (mu * mu - 1.0) * tau / (2.0 * (tau * mu + (1.0 - tau) * x))


def v11(params: ProtocolParams, attack: TwoModeAttack) -> float:
    """Top-left entry of the shared conditional CM, symmetric configuration."""
    if not params.symmetric:
        raise ValidationError("v11 closed form requires tau_a == tau_b")
    return v11_from_x(params.mu, params.tau_a, noise_aggregates(attack).x)


def conditional_cm_analytic(params: ProtocolParams, attack: TwoModeAttack) -> ConditionalCM:
    """Closed-form shared CM for identical links (tau_a == tau_b).

    mu*I4 minus (mu^2-1)*tau times the rank-two coupling matrix with 1/theta
    in the q sector (off-diagonal -1/theta) and 1/theta' in the p sector
    (off-diagonal +1/theta').
    """
    if not params.symmetric:
        raise ValidationError("analytic form requires tau_a == tau_b; use conditional_cm_numeric")
    attack_cm(attack)  # physicality gate
    th = theta_params(params, attack)
    tau = params.tau_a
    iq, ip = 1.0 / th.theta, 1.0 / th.theta_prime
    coupling = np.array(
        [
            [iq, 0.0, -iq, 0.0],
            [0.0, ip, 0.0, ip],
            [-iq, 0.0, iq, 0.0],
            [0.0, ip, 0.0, ip],
        ]
    )
    v = params.mu * np.eye(4) - (params.mu**2 - 1.0) * tau * coupling
    return CovarianceMatrix(v)


def conditional_cm_numeric(params: ProtocolParams, attack: TwoModeAttack) -> ConditionalCM:
    """Shared CM from the explicit 6-mode pipeline; supports tau_a != tau_b.

    Steps: assemble TMSV(mu) on (a, A) and (b, B) with the attack CM on
    (E1, E2); mix A with E1 at tau_a and B with E2 at tau_b; combine A and B
    on a balanced beamsplitter; homodyne q on the difference port and p on
    the sum port; trace out the ancillas. Gaussian conditioning carries no
    dependence on the measurement outcome values, so none appear.
    """
    sigma_e = attack_cm(attack)  # validates physicality of the attack

    full = np.zeros((12, 12))
    pair = tmsv_cm(params.mu).entries

    def put(block: np.ndarray, i: int, j: int) -> None:
        full[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = block

    for (m1, m2), src in (((MODE_A_KEPT, MODE_A_SENT), pair), ((MODE_B_KEPT, MODE_B_SENT), pair)):
        put(src[0:2, 0:2], m1, m1)
        put(src[2:4, 2:4], m2, m2)
        put(src[0:2, 2:4], m1, m2)
        put(src[2:4, 0:2], m2, m1)
    put(sigma_e.entries[0:2, 0:2], MODE_E1, MODE_E1)
    put(sigma_e.entries[2:4, 2:4], MODE_E2, MODE_E2)
    put(sigma_e.entries[0:2, 2:4], MODE_E1, MODE_E2)
    put(sigma_e.entries[2:4, 0:2], MODE_E2, MODE_E1)

    state = CovarianceMatrix(full)
    if not is_physical(state, DEFAULT_TOL):
        raise InternalConsistencyError("initial 6-mode covariance matrix is unphysical")

    state = apply_symplectic(state, beamsplitter_symplectic(params.tau_a), (MODE_A_SENT, MODE_E1))
    state = apply_symplectic(state, beamsplitter_symplectic(params.tau_b), (MODE_B_SENT, MODE_E2))
    # Balanced relay splitter: A slot becomes the sum port (A+B)/sqrt(2),
    # B slot the difference port (B-A)/sqrt(2).
    state = apply_symplectic(state, beamsplitter_symplectic(0.5), (MODE_A_SENT, MODE_B_SENT))
    if not is_physical(state, DEFAULT_TOL):
        raise InternalConsistencyError("post-beamsplitter covariance matrix is unphysical")

    # Bell detection: q on the difference port, p on the sum port. Measure the
    # higher-indexed mode first so the sum port keeps its index.
    state = homodyne_condition(state, MODE_B_SENT, "q")
    state = homodyne_condition(state, MODE_A_SENT, "p")

    # Remaining order: (a, E1, b, E2); keep Alice's and Bob's retained modes.
    shared = state.submatrix((0, 2))
    if not is_physical(shared, DEFAULT_TOL):
        raise InternalConsistencyError("conditional covariance matrix is unphysical")
    return shared
