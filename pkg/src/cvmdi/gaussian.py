"""Symplectic and Gaussian-state linear algebra on covariance matrices.

Conventions used throughout the package:

* shot-noise units: the vacuum quadrature variance is 1, so a covariance
  matrix (CM) is physical iff every symplectic eigenvalue is >= 1;
* quadrature ordering (q1, p1, q2, p2, ...), which keeps the 2x2 block
  structure of two-mode states literal;
* all entropies are in bits (log base 2).

Everything here is a pure function of its inputs; values are safe to share
across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import UnphysicalStateError, ValidationError

# Default numeric tolerance for symmetry and physicality tests. The matrices
# handled here are at most 12x12, so double precision leaves a wide margin.
DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Real symmetric 2N x 2N quadrature second-moment matrix.

    The constructor validates shape and symmetry (to a scale-aware
    tolerance), symmetrizes, and stores a read-only array. Physicality is a
    separate, explicit test (:func:`is_physical`), not a construction
    invariant: estimated and partially transposed matrices may legitimately
    violate it.
    """

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"covariance matrix must be square, got shape {m.shape}")
        if m.shape[0] % 2 != 0 or m.shape[0] == 0:
            raise ValidationError(f"covariance matrix dimension must be even and positive, got {m.shape[0]}")
        if not np.all(np.isfinite(m)):
            raise ValidationError("covariance matrix entries must be finite")
        scale = max(1.0, float(np.abs(m).max()))
        asym = float(np.abs(m - m.T).max())
        if asym > DEFAULT_TOL * scale:
            raise ValidationError(f"covariance matrix is not symmetric (max asymmetry {asym:.3e})")
        m = 0.5 * (m + m.T)
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def n_modes(self) -> int:
        return self.entries.shape[0] // 2

    def block(self, i: int, j: int) -> np.ndarray:
        """2x2 block coupling mode i to mode j (0-based)."""
        return self.entries[2 * i : 2 * i + 2, 2 * j : 2 * j + 2].copy()

    def submatrix(self, modes: tuple[int, ...]) -> "CovarianceMatrix":
        """Reduced CM of the listed modes (partial trace over the rest)."""
        for m in modes:
            if not 0 <= m < self.n_modes:
                raise ValidationError(f"mode index {m} out of range for {self.n_modes} modes")
        idx = [k for m in modes for k in (2 * m, 2 * m + 1)]
        return CovarianceMatrix(self.entries[np.ix_(idx, idx)])


# A two-mode CovarianceMatrix describing the state Alice and Bob share after
# the relay measurement; same representation, used as a documentation alias.
ConditionalCM = CovarianceMatrix


class Separability(Enum):
    SEPARABLE = "separable"
    ENTANGLED = "entangled"


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form, one [[0,1],[-1,0]] block per mode."""
    if n_modes < 1:
        raise ValidationError("n_modes must be positive")
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(cm: CovarianceMatrix) -> np.ndarray:
    """Williamson spectrum of a positive-definite CM, descending.

    Computed as the absolute values of the ordinary eigenvalues of
    i*Omega*sigma, which come in +/- pairs; each returned value is the mean
    of one pair. Invariant under symplectic conjugation of the input.
    """
    m = cm.entries
    if np.linalg.eigvalsh(m).min() <= 0.0:
        raise ValidationError("covariance matrix must be positive-definite")
    vals = np.abs(np.linalg.eigvals(1j * symplectic_form(cm.n_modes) @ m))
    vals = np.sort(vals)[::-1]
    return 0.5 * (vals[0::2] + vals[1::2])


def is_physical(cm: CovarianceMatrix, tol: float = DEFAULT_TOL) -> bool:
    """True iff the minimum symplectic eigenvalue is >= 1 - tol.

    Equivalent to sigma + i*Omega >= 0. A matrix that is not even positive
    definite is reported unphysical rather than rejected.
    """
    if np.linalg.eigvalsh(cm.entries).min() <= 0.0:
        return False
    return float(symplectic_eigenvalues(cm).min()) >= 1.0 - tol


def min_symplectic_eigenvalue(cm: CovarianceMatrix) -> float:
    """Smallest Williamson eigenvalue; NaN when the CM is not positive-definite."""
    if np.linalg.eigvalsh(cm.entries).min() <= 0.0:
        return float("nan")
    return float(symplectic_eigenvalues(cm).min())


def ppt_separability(cm: CovarianceMatrix, tol: float = DEFAULT_TOL) -> Separability:
    """Partial-transpose test for a two-mode Gaussian state.

    Negates the p quadrature of mode 2 and checks physicality of the result;
    failure is necessary and sufficient for entanglement at two modes.
    Boundary cases (transposed CM physical to within tol) count as separable.
    """
    if cm.n_modes != 2:
        raise ValidationError("PPT test requires exactly 2 modes")
    if not is_physical(cm, tol):
        raise UnphysicalStateError(
            "PPT test requires a physical covariance matrix",
            min_eigenvalue=min_symplectic_eigenvalue(cm),
        )
    t = np.diag([1.0, 1.0, 1.0, -1.0])
    transposed = CovarianceMatrix(t @ cm.entries @ t)
    if is_physical(transposed, tol):
        return Separability.SEPARABLE
    return Separability.ENTANGLED


def homodyne_condition(cm: CovarianceMatrix, mode: int, quadrature: str, tol: float = DEFAULT_TOL) -> CovarianceMatrix:
    """Conditional CM of the remaining modes after homodyning one quadrature.

    Schur-complement update against the measured quadrature's variance; the
    measured mode is removed. When that variance is below tol the 1x1 block
    is pseudo-inverted (correction term dropped). The result is independent
    of the measurement outcome value, so none is taken.
    """
    if not 0 <= mode < cm.n_modes:
        raise ValidationError(f"mode index {mode} out of range for {cm.n_modes} modes")
    if quadrature not in ("q", "p"):
        raise ValidationError(f"quadrature must be 'q' or 'p', got {quadrature!r}")
    if cm.n_modes < 2:
        raise ValidationError("conditioning requires at least two modes")
    measured = 2 * mode + (0 if quadrature == "q" else 1)
    keep = [k for k in range(2 * cm.n_modes) if k not in (2 * mode, 2 * mode + 1)]
    m = cm.entries
    a = m[np.ix_(keep, keep)]
    variance = m[measured, measured]
    if variance > tol:
        r = m[keep, measured]
        a = a - np.outer(r, r) / variance
    return CovarianceMatrix(a)


def heterodyne_condition(cm: CovarianceMatrix, mode: int) -> CovarianceMatrix:
    """Conditional CM of the remaining modes after heterodyning one mode.

    Schur complement against (block + identity); the added identity is the
    vacuum unit the heterodyne splitter injects, so no pseudo-inverse is
    ever needed.
    """
    if not 0 <= mode < cm.n_modes:
        raise ValidationError(f"mode index {mode} out of range for {cm.n_modes} modes")
    if cm.n_modes < 2:
        raise ValidationError("conditioning requires at least two modes")
    cols = [2 * mode, 2 * mode + 1]
    keep = [k for k in range(2 * cm.n_modes) if k not in cols]
    m = cm.entries
    a = m[np.ix_(keep, keep)]
    b = m[np.ix_(cols, cols)] + np.eye(2)
    c = m[np.ix_(keep, cols)]
    return CovarianceMatrix(a - c @ np.linalg.inv(b) @ c.T)


def beamsplitter_symplectic(tau: float) -> np.ndarray:
    """4x4 symplectic matrix of a beamsplitter with transmissivity tau.

    Mode 1 output is sqrt(tau)*m1 + sqrt(1-tau)*m2; satisfies S Omega S^T = Omega.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValidationError(f"transmissivity must lie in [0, 1], got {tau}")
    t = np.sqrt(tau)
    r = np.sqrt(1.0 - tau)
    eye = np.eye(2)
    return np.block([[t * eye, r * eye], [-r * eye, t * eye]])


def apply_symplectic(cm: CovarianceMatrix, s: np.ndarray, modes: tuple[int, ...] | None = None) -> CovarianceMatrix:
    """Conjugate the CM by a symplectic matrix acting on the given modes.

    `s` is 2k x 2k with its slots matching the order of `modes`; identity is
    applied elsewhere. With modes=None, s must act on the full system.
    """
    s = np.asarray(s, dtype=float)
    if modes is None:
        modes = tuple(range(cm.n_modes))
    if s.shape != (2 * len(modes), 2 * len(modes)):
        raise ValidationError(f"symplectic shape {s.shape} does not match {len(modes)} modes")
    if len(set(modes)) != len(modes):
        raise ValidationError("modes must be distinct")
    for m in modes:
        if not 0 <= m < cm.n_modes:
            raise ValidationError(f"mode index {m} out of range for {cm.n_modes} modes")
    full = np.eye(2 * cm.n_modes)
    idx = [k for m in modes for k in (2 * m, 2 * m + 1)]
    full[np.ix_(idx, idx)] = s
    return CovarianceMatrix(full @ cm.entries @ full.T)


def tmsv_cm(mu: float) -> CovarianceMatrix:
    """Two-mode squeezed vacuum CM [[mu I, c Z], [c Z, mu I]], c = sqrt(mu^2-1)."""
    if mu < 1.0:
        raise ValidationError(f"TMSV variance must be >= 1, got {mu}")
    c = np.sqrt(mu * mu - 1.0)
    z = np.diag([1.0, -1.0])
    eye = np.eye(2)
    return CovarianceMatrix(np.block([[mu * eye, c * z], [c * z, mu * eye]]))


def entropy_g(nu: float, tol: float = DEFAULT_TOL) -> float:
    """Bosonic entropy of one symplectic eigenvalue, in bits.

    g(nu) = ((nu+1)/2) log2((nu+1)/2) - ((nu-1)/2) log2((nu-1)/2); values in
    [1-tol, 1] clamp to 1 where g vanishes.
    """
    if nu < 1.0 - tol:
        raise ValidationError(f"symplectic eigenvalue must be >= 1 - tol, got {nu}")
    if nu <= 1.0:
        return 0.0
    up = 0.5 * (nu + 1.0)
    dn = 0.5 * (nu - 1.0)
    return float(up * np.log2(up) - dn * np.log2(dn))


def von_neumann_entropy(cm: CovarianceMatrix, tol: float = DEFAULT_TOL) -> float:
    """Entropy of the Gaussian state with this CM: sum of g over the spectrum."""
    if not is_physical(cm, tol):
        raise UnphysicalStateError(
            "entropy requires a physical covariance matrix",
            min_eigenvalue=min_symplectic_eigenvalue(cm),
        )
    return float(sum(entropy_g(float(nu), tol) for nu in symplectic_eigenvalues(cm)))
