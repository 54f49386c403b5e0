"""Physical constants and unit conversions (Hartree atomic units internally)."""

HARTREE_EV = 27.211386245988
AMU_ME = 1822.888486209  # unified atomic mass unit in electron masses

MASS_LI7 = 7.0160034366  # u
MASS_F19 = 18.998403163  # u


def ev_to_hartree(value):
    return value / HARTREE_EV


def hartree_to_ev(value):
    return value * HARTREE_EV


def reduced_mass(m1_u, m2_u):
    """Reduced mass in electron masses from two masses in u."""
    return m1_u * m2_u / (m1_u + m2_u) * AMU_ME


LIF_REDUCED_MASS = reduced_mass(MASS_LI7, MASS_F19)
