"""Slow, independent reference computations used to validate the fast paths.

Nothing here calls into the recurrence in :mod:`polfock.fock` or the
split-operator propagator; overlaps come from explicit Hermite-function
quadrature and propagation from a full eigendecomposition.
"""

import numpy as np
from numpy.polynomial.hermite import hermgauss

from .errors import OracleError

MAX_DENSE_DIM = 4096


def _hermite_functions(n_max, x):
    """Normalized oscillator eigenfunctions without the Gaussian factor.

    Returns h[n](x) = H_n(x) / sqrt(2^n n! sqrt(pi)) for n <= n_max.
    """
    h = np.zeros((n_max + 1,) + np.shape(x))
    h[0] = np.pi ** -0.25
    if n_max > 0:
        h[1] = np.sqrt(2.0) * x * h[0]
    for n in range(1, n_max):
        h[n + 1] = np.sqrt(2.0 / (n + 1)) * x * h[n] - np.sqrt(n / (n + 1)) * h[n - 1]
    return h


def _gh_overlap(m, n, shift, n_nodes):
    # psi_m(x) psi_n(x - s) = h_m(x) h_n(x - s) exp(-(x - s/2)^2 - s^2/4)
    y, w = hermgauss(n_nodes)
    x = y + 0.5 * shift
    hm = _hermite_functions(m, x)[m]
    hn = _hermite_functions(n, x - shift)[n]
    return np.exp(-0.25 * shift ** 2) * np.sum(w * hm * hn)


def fc_overlap_quadrature(omega_c, lam, m, n, tol=1e-12):
    """<m| D(lam) |n> from Gauss-Hermite quadrature of displaced eigenfunctions.

    In the photon coordinate q the two oscillators of frequency ``omega_c``
    are centred a distance sqrt(2 / omega_c) * lam apart; in the scaled
    coordinate x = sqrt(omega_c) q that is sqrt(2) * lam, and the integrand
    is a polynomial times a Gaussian, so a rule with more than (m + n) / 2
    nodes is exact up to roundoff.
    """
    if m > 40 or n > 40 or abs(lam) > 5:
        raise OracleError("quadrature oracle supports m, n <= 40 and |lam| <= 5")
    q_shift = np.sqrt(2.0 / omega_c) * lam
    shift = np.sqrt(omega_c) * q_shift
    k = (m + n) // 2 + 16
    a = _gh_overlap(m, n, shift, k)
    b = _gh_overlap(m, n, shift, k + 20)
    if abs(a - b) > tol:
        raise OracleError(f"quadrature not converged for (m, n, lam)=({m}, {n}, {lam})")
    return float(b)


def fourier_kinetic_matrix(n_points, dR, mass):
    """Dense kinetic-energy matrix from Fourier-spectral differentiation."""
    k = 2.0 * np.pi * np.fft.fftfreq(n_points, d=dR)
    F = np.fft.fft(np.eye(n_points), axis=0)
    T = np.conj(F.T) @ (0.5 * k[:, None] ** 2 / mass * F) / n_points
    return T.real if np.allclose(T.imag, 0.0, atol=1e-12) else T


def dense_hamiltonian(potential, dR, mass):
    """Full grid Hamiltonian from per-point channel potentials.

    ``potential`` has shape (n_points, n_channels, n_channels); the returned
    matrix is ordered grid-point-major: index = point * n_channels + channel.
    """
    n_points, n_ch, _ = potential.shape
    dim = n_points * n_ch
    if dim > MAX_DENSE_DIM:
        raise OracleError(f"dense propagation refused for dimension {dim}")
    H = np.kron(fourier_kinetic_matrix(n_points, dR, mass), np.eye(n_ch))
    for i in range(n_points):
        H[i * n_ch:(i + 1) * n_ch, i * n_ch:(i + 1) * n_ch] += potential[i]
    return H


def dense_exact_propagator(H_total, psi0, t):
    """psi(t) = exp(-i H t) psi0 by full eigendecomposition (hbar = 1)."""
    H_total = np.asarray(H_total)
    if H_total.shape[0] > MAX_DENSE_DIM:
        raise OracleError(f"dense propagation refused for dimension {H_total.shape[0]}")
    shape = np.shape(psi0)
    vec = np.asarray(psi0, dtype=complex).reshape(-1)
    if t == 0:
        return vec.reshape(shape).copy()
    E, U = np.linalg.eigh(H_total)
    out = U @ (np.exp(-1j * E * t) * (U.conj().T @ vec))
    return out.reshape(shape)


def finite_difference_dc(model, space, chi, omega_c, R, dR, state="ionic"):
    """<m_alpha(R)| d/dR |n_alpha(R)> by centred differences of quadrature overlaps.

    <m_alpha(R)|n_alpha(R')> = <m| D(lam(R) - lam(R')) |n> with
    lam = chi mu_alpha / omega_c.
    """
    mu = model.mu_ionic if state == "ionic" else model.mu_covalent

    def lam(r):
        return chi * float(mu(np.asarray(r))) / omega_c

    n = space.n_max
    plus = lam(R) - lam(R + 0.5 * dR)
    minus = lam(R) - lam(R - 0.5 * dR)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = (fc_overlap_quadrature(omega_c, plus, i, j)
                         - fc_overlap_quadrature(omega_c, minus, i, j)) / dR
    return out


def richardson_dc(model, space, chi, omega_c, R, dR=1e-3, state="ionic"):
    """Second-order Richardson extrapolation of :func:`finite_difference_dc`."""
    coarse = finite_difference_dc(model, space, chi, omega_c, R, dR, state)
    fine = finite_difference_dc(model, space, chi, omega_c, R, 0.5 * dR, state)
    return (4.0 * fine - coarse) / 3.0
