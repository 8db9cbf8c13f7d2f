"""Monte Carlo protocol runs in phase space and moment-based reconstruction.

Every state in the pipeline is Gaussian, so the Wigner function is an
honest probability density and each trial can be sampled exactly: there is
no truncation, discretization, or approximate dynamics anywhere.

Conventions, fixed once so the estimators invert cleanly:

* modulation amplitudes alpha, beta have Var(Re) = Var(Im) = (mu - 1)/2,
  and the prepared mean quadratures are sqrt(2) * (Re, Im);
* the relay announces gamma = (q_minus + i * p_plus) / sqrt(2), with
  q_minus = (qB' - qA')/sqrt(2) measured on the difference port and
  p_plus = (pA' + pB')/sqrt(2) on the sum port;
* detection is ideal homodyne (no electronic noise, unit efficiency).

Reconstruction maps the records to the equivalent entanglement-based
heterodyne outcomes, y = sqrt(2)/kappa * (Re, -Im) with
kappa = sqrt((mu-1)/(mu+1)), whose covariance conditioned on gamma is the
shared conditional CM plus one vacuum unit per quadrature.

Randomness comes from counter-based Philox streams: trial block i (blocks of
65536 trials) draws from Philox(key=seed).jumped(i), so datasets are
bit-reproducible and blocks can be generated on independent workers in any
order.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .attacks import TwoModeAttack, attack_cm
from .errors import DegenerateDataError, ValidationError
from .gaussian import ConditionalCM, CovarianceMatrix
from .protocol import ProtocolParams

_BLOCK = 1 << 16
_MIN_VARIANCE = 1e-12

CSV_COLUMNS = ("alpha_re", "alpha_im", "beta_re", "beta_im", "gamma_re", "gamma_im")
_SCHEMA = "cvmdi.trials v1"


@dataclass(frozen=True)
class TrialRecord:
    """One protocol use: modulation amplitudes and the relay announcement."""

    alpha: complex
    beta: complex
    gamma: complex


@dataclass(frozen=True)
class TrialDataset:
    """Columnar record of simulated protocol runs.

    The three complex arrays share one length n; (params, attack, n, seed)
    fully determine the contents.
    """

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    params: ProtocolParams
    attack: TwoModeAttack
    seed: int

    def __post_init__(self):
        if not (len(self.alpha) == len(self.beta) == len(self.gamma)):
            raise ValidationError("record columns must have equal length")

    @property
    def n(self) -> int:
        return len(self.alpha)

    def record(self, i: int) -> TrialRecord:
        return TrialRecord(alpha=complex(self.alpha[i]), beta=complex(self.beta[i]), gamma=complex(self.gamma[i]))


def _sector_sqrt(omega_1: float, omega_2: float, g: float) -> np.ndarray:
    """Symmetric square root of [[omega_1, g], [g, omega_2]], clamped to PSD."""
    sector = np.array([[omega_1, g], [g, omega_2]])
    vals, vecs = np.linalg.eigh(sector)
    return vecs @ np.diag(np.sqrt(np.maximum(vals, 0.0))) @ vecs.T


def simulate_runs(params: ProtocolParams, attack: TwoModeAttack, n: int, seed: int) -> TrialDataset:
    """Sample n protocol uses exactly from the joint Gaussian phase-space model."""
    if n < 1:
        raise ValidationError(f"need at least one trial, got {n}")
    attack_cm(attack)  # reject unphysical attacks up front

    mod_std = np.sqrt(max(params.mu - 1.0, 0.0) / 2.0)
    sqrt_q = _sector_sqrt(attack.omega_a, attack.omega_b, attack.g)
    sqrt_p = _sector_sqrt(attack.omega_a, attack.omega_b, attack.g_prime)
    ta, ra = np.sqrt(params.tau_a), np.sqrt(1.0 - params.tau_a)
    tb, rb = np.sqrt(params.tau_b), np.sqrt(1.0 - params.tau_b)

    alpha = np.empty(n, dtype=complex)
    beta = np.empty(n, dtype=complex)
    gamma = np.empty(n, dtype=complex)

    for block in range(0, n, _BLOCK):
        m = min(_BLOCK, n - block)
        rng = np.random.Generator(np.random.Philox(key=seed).jumped(block // _BLOCK))
        # Column layout: 0-3 modulation, 4-7 signal vacuum, 8-11 ancillas.
        z = rng.standard_normal((_BLOCK, 12))[:m]

        a_re, a_im = mod_std * z[:, 0], mod_std * z[:, 1]
        b_re, b_im = mod_std * z[:, 2], mod_std * z[:, 3]
        q_e = z[:, 8:10] @ sqrt_q.T
        p_e = z[:, 10:12] @ sqrt_p.T

        q_a = ta * (np.sqrt(2.0) * a_re + z[:, 4]) + ra * q_e[:, 0]
        p_a = ta * (np.sqrt(2.0) * a_im + z[:, 5]) + ra * p_e[:, 0]
        q_b = tb * (np.sqrt(2.0) * b_re + z[:, 6]) + rb * q_e[:, 1]
        p_b = tb * (np.sqrt(2.0) * b_im + z[:, 7]) + rb * p_e[:, 1]

        q_minus = (q_b - q_a) / np.sqrt(2.0)
        p_plus = (p_a + p_b) / np.sqrt(2.0)

        sl = slice(block, block + m)
        alpha[sl] = a_re + 1j * a_im
        beta[sl] = b_re + 1j * b_im
        gamma[sl] = (q_minus + 1j * p_plus) / np.sqrt(2.0)

    return TrialDataset(alpha=alpha, beta=beta, gamma=gamma, params=params, attack=attack, seed=seed)


def _fit(design: np.ndarray, response: np.ndarray) -> np.ndarray:
    coeff, *_ = np.linalg.lstsq(design, response, rcond=None)
    return coeff


def estimate_transmissivities(data: TrialDataset) -> tuple[float, float]:
    """Least-squares estimate of the two link transmissivities.

    Under the announcement convention, E[Re gamma] = -sqrt(tau_a/2) Re alpha
    + sqrt(tau_b/2) Re beta and E[Im gamma] = +sqrt(tau_a/2) Im alpha
    + sqrt(tau_b/2) Im beta, so each transmissivity is recovered as twice
    the squared coefficient, averaged over the two sectors. Consistent as
    n grows; raises when the modulation carries no variance.
    """
    for arr, name in ((data.alpha.real, "Re alpha"), (data.beta.real, "Re beta")):
        if float(np.var(arr)) < _MIN_VARIANCE:
            raise DegenerateDataError(f"design matrix degenerate: {name} has no variance")

    design_q = np.column_stack([data.alpha.real, data.beta.real])
    design_p = np.column_stack([data.alpha.imag, data.beta.imag])
    coeff_q = _fit(design_q, data.gamma.real)
    coeff_p = _fit(design_p, data.gamma.imag)
    tau_a = float(coeff_q[0] ** 2 + coeff_p[0] ** 2)
    tau_b = float(coeff_q[1] ** 2 + coeff_p[1] ** 2)
    return tau_a, tau_b


def _eb_outcomes(data: TrialDataset) -> np.ndarray:
    """Map records to entanglement-based heterodyne outcomes (y_qa, y_pa, y_qb, y_pb)."""
    mu = data.params.mu
    if mu <= 1.0 + 1e-12:
        raise DegenerateDataError("mu = 1 data carries no modulation to reconstruct from")
    kappa = np.sqrt((mu - 1.0) / (mu + 1.0))
    s = np.sqrt(2.0) / kappa
    return np.column_stack(
        [
            s * data.alpha.real,
            -s * data.alpha.imag,
            s * data.beta.real,
            -s * data.beta.imag,
        ]
    )


def _residual_covariance(data: TrialDataset) -> np.ndarray:
    """Covariance of the EB outcomes conditioned on the relay announcement."""
    y = _eb_outcomes(data)
    if data.n < 16:
        raise DegenerateDataError(f"need at least 16 trials for reconstruction, got {data.n}")
    design = np.column_stack([data.gamma.real, data.gamma.imag, np.ones(data.n)])
    residual = y - design @ _fit(design, y)
    dof = data.n - design.shape[1]
    return (residual.T @ residual) / dof


def reconstruct_conditional_cm(data: TrialDataset) -> ConditionalCM:
    """Empirical estimate of the shared conditional CM from the records.

    Residual covariance of the EB heterodyne outcomes given the announcement,
    minus the heterodyne vacuum unit. Converges entrywise to the analytic CM
    at the usual 1/sqrt(n) rate; the estimate itself is not physicality-gated.
    """
    estimate_transmissivities(data)  # verifies the data supports regression
    smeared = _residual_covariance(data)
    v = smeared - np.eye(4)
    return CovarianceMatrix(0.5 * (v + v.T))


def entrywise_standard_errors(smeared_cov: np.ndarray, n: int) -> np.ndarray:
    """Asymptotic standard error of each empirical covariance entry.

    For Gaussian samples with covariance S, Var(S_ij_hat) ~ (S_ii S_jj +
    S_ij^2)/n; `smeared_cov` is the covariance of the conditioned heterodyne
    outcomes (shared CM plus identity).
    """
    s = np.asarray(smeared_cov, dtype=float)
    diag = np.diag(s)
    return np.sqrt((np.outer(diag, diag) + s * s) / n)


def reconstruction_standard_errors(data: TrialDataset) -> np.ndarray:
    """Standard errors matching :func:`reconstruct_conditional_cm` entrywise."""
    return entrywise_standard_errors(_residual_covariance(data), data.n)


def _sidecar_path(csv_path: str | Path) -> Path:
    p = Path(csv_path)
    return p.with_suffix(".json") if p.suffix == ".csv" else Path(str(p) + ".json")


def save_dataset(data: TrialDataset, csv_path: str | Path) -> None:
    """Write the records as columnar CSV plus a JSON sidecar with the inputs."""
    csv_path = Path(csv_path)
    tmp = csv_path.with_name(csv_path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        fh.write(f"# schema: {_SCHEMA}\n")
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        cols = np.column_stack(
            [data.alpha.real, data.alpha.imag, data.beta.real, data.beta.imag, data.gamma.real, data.gamma.imag]
        )
        for row in cols:
            writer.writerow([f"{v:.17g}" for v in row])
    os.replace(tmp, csv_path)

    sidecar = {
        "schema": _SCHEMA,
        "n": data.n,
        "seed": data.seed,
        "params": {"mu": data.params.mu, "tau_a": data.params.tau_a, "tau_b": data.params.tau_b},
        "attack": {
            "omega_a": data.attack.omega_a,
            "omega_b": data.attack.omega_b,
            "g": data.attack.g,
            "g_prime": data.attack.g_prime,
        },
    }
    side = _sidecar_path(csv_path)
    tmp = side.with_name(side.name + ".tmp")
    tmp.write_text(json.dumps(sidecar, indent=2) + "\n")
    os.replace(tmp, side)


def load_dataset(csv_path: str | Path) -> TrialDataset:
    """Read a dataset written by :func:`save_dataset`."""
    csv_path = Path(csv_path)
    meta = json.loads(_sidecar_path(csv_path).read_text())
    if meta.get("schema") != _SCHEMA:
        raise ValidationError(f"unexpected sidecar schema {meta.get('schema')!r}")

    with open(csv_path) as fh:
        rows = [line for line in fh if not line.startswith("#")]
    header = rows[0].strip().split(",")
    if tuple(header) != CSV_COLUMNS:
        raise ValidationError(f"unexpected CSV columns {header}")
    table = np.loadtxt(rows[1:], delimiter=",", ndmin=2)
    if table.shape[0] != meta["n"]:
        raise ValidationError(f"CSV row count {table.shape[0]} disagrees with sidecar n={meta['n']}")

    return TrialDataset(
        alpha=table[:, 0] + 1j * table[:, 1],
        beta=table[:, 2] + 1j * table[:, 3],
        gamma=table[:, 4] + 1j * table[:, 5],
        params=ProtocolParams(**meta["params"]),
        attack=TwoModeAttack(**meta["attack"]),
        seed=int(meta["seed"]),
    )
