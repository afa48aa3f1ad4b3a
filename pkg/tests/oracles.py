"""Reference values computed independently of the package and frozen here.

``test_oracles.py`` recomputes each one with mpmath or scipy quadrature so
the frozen numbers cannot drift silently.
"""

import math

GAMMA_1_5 = 0.886226925452758013649083741671        # Gamma(1.5) by quadrature of t^0.5 e^-t
ML_HALF_MINUS_ONE = 0.427583576155807004410750344491  # E_0.5(-1), 30-digit series
TWO_OVER_SQRT_PI = 1.1283791670955126                # J^0.5 1 at x = 1, weighted quadrature
CAPUTO_HALF_X_SQUARED = 1.50450555612735009852821187083  # Gamma(3)/Gamma(2.5)
XI_DIFFERENTIAL = 0.702695916600477270899032977773   # (3 pi / 16)^(2/3)
FAMILY_DEFECT = 0.242152241642754560247075161451     # |1/Gamma(1.5) - Gamma(1.5)|
TWO_E = 5.43656365691809047072057494271


def power_rule_integral(p: float, beta: float, x):
    """J_0^beta x^p = Gamma(p+1)/Gamma(p+1+beta) x^(p+beta)."""
    return math.gamma(p + 1) / math.gamma(p + 1 + beta) * x ** (p + beta)


def power_rule_caputo(p: float, alpha: float, x):
    """D_*0^alpha x^p for non-integer p or p >= ceil(alpha)."""
    return math.gamma(p + 1) / math.gamma(p + 1 - alpha) * x ** (p - alpha)


def mittag_leffler_mp(alpha: float, z: float, dps: int = 30) -> float:
    import mpmath as mp

    with mp.workdps(dps):
        return float(mp.nsum(lambda k: mp.mpf(z) ** k / mp.gamma(alpha * k + 1), [0, mp.inf]))


def rl_integral_quad(f, beta: float, x: float, a: float = 0.0) -> float:
    """J_a^beta f(x) with scipy's algebraic-weight quadrature (kernel handled exactly)."""
    from scipy import integrate

    value, _ = integrate.quad(f, a, x, weight="alg", wvar=(0.0, beta - 1.0))
    return value / math.gamma(beta)
