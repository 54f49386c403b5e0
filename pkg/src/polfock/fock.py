"""Truncated Fock spaces of a cavity mode and displaced-ladder overlaps.

A polarized Fock state of diabat alpha is |n_alpha> = D(-lam_alpha)|n> with
lam_alpha = chi * mu_alpha / omega_c (hbar = 1) and D(x) = exp(x (a^+ - a)).
Two ladders displaced by lam relative to each other overlap as
<m_I|n_C> = <m| D(lam_I - lam_C) |n>.

Sign convention: a positive displacement lam = chi (mu_I - mu_C) / omega_c
means the ionic ladder sits at more negative photon coordinate q than the
covalent one.
"""

from dataclasses import dataclass

import numpy as np

from .errors import TruncationError

LAMBDA_LIMIT = 10.0


@dataclass(frozen=True)
class FockSpace:
    omega_c: float
    n_max: int

    def __post_init__(self):
        if self.n_max < 2:
            raise ValueError("n_max must be at least 2")
        if not self.omega_c > 0:
            raise ValueError("omega_c must be positive")


@dataclass(frozen=True)
class Displacement:
    """Dimensionless relative displacement chi * delta_mu / omega_c."""

    lam: float

    @classmethod
    def from_dipoles(cls, chi, delta_mu, omega_c):
        return cls(chi * delta_mu / omega_c)


def ladder_matrices(space: FockSpace):
    """Return (b_dagger, b, number) as n_max x n_max real matrices."""
    n = space.n_max
    b_dag = np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=-1)
    b = b_dag.T.copy()
    number = np.diag(np.arange(n, dtype=float))
    return b_dag, b, number


def quadrature_matrix(n_max):
    """Matrix of (a^+ + a) in a truncated Fock basis."""
    off = np.sqrt(np.arange(1, n_max, dtype=float))
    return np.diag(off, 1) + np.diag(off, -1)


def _check_lambda(lam, limit):
    lam = np.asarray(lam, dtype=float)
    if not np.all(np.isfinite(lam)):
        raise TruncationError("displacement is not finite")
    if np.any(np.abs(lam) > limit):
        raise TruncationError(
            f"|lambda| = {np.max(np.abs(lam)):.3g} exceeds the sanity limit "
            f"{limit}; the truncated overlap matrix would be unreliable")
    return lam


def displacement_overlaps(lam, n_rows, n_cols=None, limit=LAMBDA_LIMIT):
    """Overlaps <m|D(lam)|n> for m < n_rows, n < n_cols.

    ``lam`` may be an array; the result then has shape lam.shape + (n_rows, n_cols).
    Entries are exact matrix elements of the untruncated displacement operator.
    Each lower diagonal g_n = S[n+k, n] obeys the normalized Laguerre recurrence

        g_{n+1} = ((2n + k + 1 - lam^2) g_n - sqrt(n (n+k)) g_{n-1})
                  / sqrt((n+1) (n+k+1))

    seeded by g_0 = S[k, 0] = lam S[k-1, 0] / sqrt(k), S[0, 0] = exp(-lam^2/2).
    The upper triangle follows from S[n, n+k] = (-1)^k S[n+k, n]. Iterating
    along diagonals stays stable where the plain (m, n) ladder recurrence
    loses unitarity at a few dozen states.
    """
    n_cols = n_rows if n_cols is None else n_cols
    lam = _check_lambda(lam, limit)
    shape = lam.shape
    lam = lam.reshape(-1, 1)
    x = lam ** 2
    N = max(n_rows, n_cols)
    k = np.arange(N, dtype=float)

    seed = np.empty((lam.shape[0], N))
    seed[:, 0] = np.exp(-0.5 * x[:, 0])
    for j in range(1, N):
        seed[:, j] = lam[:, 0] * seed[:, j - 1] / np.sqrt(j)

    # low[:, n, k] = S[n + k, n]; only n + k < N is meaningful
    low = np.zeros((lam.shape[0], N, N))
    prev = np.zeros_like(seed)
    cur = seed
    low[:, 0, :] = cur
    for n in range(N - 1):
        nxt = ((2 * n + k + 1 - x) * cur - np.sqrt(n * (n + k)) * prev) \
            / np.sqrt((n + 1) * (n + k + 1))
        prev, cur = cur, nxt
        low[:, n + 1, :] = cur

    S = np.zeros((lam.shape[0], N, N))
    sign = 1.0
    for kk in range(N):
        idx = np.arange(N - kk)
        diag = low[:, idx, kk]
        S[:, idx + kk, idx] = diag
        if kk:
            S[:, idx, idx + kk] = sign * diag
        sign = -sign
    return S[:, :n_rows, :n_cols].reshape(shape + (n_rows, n_cols))


def overlap_matrix(space: FockSpace, d, limit=LAMBDA_LIMIT):
    """S[m, n] = <m| D(lam) |n> on the truncated space (S(0) = I exactly)."""
    lam = d.lam if isinstance(d, Displacement) else float(d)
    if lam == 0.0:
        return np.eye(space.n_max)
    return displacement_overlaps(lam, space.n_max, limit=limit)


def pfs_derivative_coupling(space: FockSpace, dmu_dR, chi, omega_c=None):
    """<m_alpha| d/dR |n_alpha> = -(chi dmu/dR / omega_c) <m| b^+ - b |n>.

    Exactly antisymmetric. ``omega_c`` defaults to the space's frequency.
    """
    omega_c = space.omega_c if omega_c is None else omega_c
    b_dag, b, _ = ladder_matrices(space)
    return -(chi * dmu_dR / omega_c) * (b_dag - b)
