"""Gaussian lower bound on the secret key rate for one channel instance.

The non-Gaussian post-channel state is replaced by the Gaussian state with
the same covariance matrix, which lower-bounds the key under collective
attacks.  Bob homodynes, reconciliation is reverse with efficiency f, and
Eve holds the (E, F) pair, so

    rate_raw = f * I(A:B2) - [S(EF) - S(EF | x_B2)]

with all entropies evaluated from symplectic eigenvalues.  The per-pulse
rate multiplies by the tap success probability; rate_normalized leaves that
factor out, modelling a quantum memory that serves tapped states on demand.
Negative values are reported as-is; averaging layers decide what to do with
them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .fock_states import SchemeConfig, build_state
from .moments import CovarianceSummary, covariance_summary

LOG2 = math.log(2.0)

_NU_CLAMP = 1e-7
_DISC_TOL = 1e-6


class NumericalDomainError(RuntimeError):
    """A covariance quantity left its physical domain (beyond tolerance)."""


@dataclass(frozen=True)
class TwoModeCov:
    """Two-mode covariance matrix with x/p-diagonal blocks.

    Layout [[A, C], [C^T, B]] with A = diag(ax, ap), B = diag(bx, bp),
    C = diag(cx, cp).  Homodyne conditioning breaks the x/p symmetry, hence
    the separate entries; symmetric() covers the plain case.
    """

    ax: float
    ap: float
    bx: float
    bp: float
    cx: float
    cp: float

    @classmethod
    def symmetric(cls, v_x: float, v_y: float, c: float, sign: int = -1) -> "TwoModeCov":
        """sign=-1: correlations of sigma type diag(c, -c); sign=+1: c * identity."""
        return cls(v_x, v_x, v_y, v_y, c, sign * c)


def symplectic_eigenvalues(m: TwoModeCov) -> tuple[float, float]:
    """(nu_plus, nu_minus) from the block invariants.

    nu^2 = (Delta +- sqrt(Delta^2 - 4 det M)) / 2 with
    Delta = det A + det B + 2 det C.  Values within 1e-7 below 1 are clamped
    to 1 (truncation guard); a discriminant below -1e-6 raises.
    """
    delta = m.ax * m.ap + m.bx * m.bp + 2.0 * m.cx * m.cp
    det_m = (m.ax * m.bx - m.cx * m.cx) * (m.ap * m.bp - m.cp * m.cp)
    disc = delta * delta - 4.0 * det_m
    if disc < -_DISC_TOL:
        raise NumericalDomainError(
            f"non-physical covariance matrix: Delta^2 - 4 det M = {disc:.3e}"
        )
    root = math.sqrt(max(disc, 0.0))
    nus = []
    for sq in ((delta + root) / 2.0, (delta - root) / 2.0):
        nu = math.sqrt(max(sq, 0.0))
        if 1.0 - _NU_CLAMP <= nu < 1.0:
            nu = 1.0
        nus.append(nu)
    return nus[0], nus[1]


def von_neumann_g(v: float) -> float:
    """Entropy of a thermal mode with symplectic eigenvalue v, in bits.

    g(v) = ((v+1)/2) log2((v+1)/2) - ((v-1)/2) log2((v-1)/2), with g(1) = 0.
    """
    if v < 1.0 - _NU_CLAMP:
        raise ValueError(f"symplectic eigenvalue {v} below 1")
    if v <= 1.0:
        return 0.0
    up = (v + 1.0) / 2.0
    dn = (v - 1.0) / 2.0
    return up * math.log2(up) - dn * math.log2(dn)


def mutual_information(v_a: float, v_b2: float, c_ab2: float) -> float:
    """I(A:B2) = 0.5 log2(V_B2 / V_B2|A) with V_B2|A = V_B2 - C^2/V_A."""
    if v_a <= 0.0 or v_b2 <= 0.0:
        raise ValueError("variances must be positive")
    if c_ab2 * c_ab2 > v_a * v_b2:
        raise ValueError("covariance exceeds the Cauchy-Schwarz bound")
    cond = v_b2 - c_ab2 * c_ab2 / v_a
    if cond <= 0.0:
        raise NumericalDomainError(f"conditional variance {cond:.3e} <= 0")
    return 0.5 * math.log2(v_b2 / cond)


def eve_cov(s: CovarianceSummary) -> TwoModeCov:
    """Eve's unconditional (E, F) covariance matrix."""
    return TwoModeCov.symmetric(s.v_e, s.v_f, s.c_ef, sign=-1)


def alice_bob_cov(s: CovarianceSummary) -> TwoModeCov:
    """The (A, B2) covariance matrix (used for cross-validation)."""
    return TwoModeCov.symmetric(s.v_a, s.v_b2, s.c_ab2, sign=-1)


def conditional_cov_ef_given_b2(s: CovarianceSummary) -> TwoModeCov:
    """Eve's (E, F) covariance after Bob's x homodyne.

    Only x entries are updated: the E-B2 correlation block is of identity
    type and the F-B2 block of sigma type, so the rank-one measurement kernel
    subtracts c_eb2^2/v_b2, c_fb2^2/v_b2 and the cross term c_eb2*c_fb2/v_b2
    from the x quadratures and leaves p untouched.
    """
    if s.v_b2 <= 0.0:
        raise ValueError("v_b2 must be positive")
    inv = 1.0 / s.v_b2
    return TwoModeCov(
        ax=s.v_e - s.c_eb2 * s.c_eb2 * inv,
        ap=s.v_e,
        bx=s.v_f - s.c_fb2 * s.c_fb2 * inv,
        bp=s.v_f,
        cx=s.c_ef - s.c_eb2 * s.c_fb2 * inv,
        cp=-s.c_ef,
    )


def holevo_bound(s: CovarianceSummary) -> float:
    """chi(B2:EF) = g-sum of M_EF minus g-sum of M_EF|B2."""
    nu_p, nu_m = symplectic_eigenvalues(eve_cov(s))
    nuc_p, nuc_m = symplectic_eigenvalues(conditional_cov_ef_given_b2(s))
    return (
        von_neumann_g(nu_p) + von_neumann_g(nu_m)
        - von_neumann_g(nuc_p) - von_neumann_g(nuc_m)
    )


@dataclass(frozen=True)
class KeyRatePoint:
    """Key-rate bound at one channel transmissivity.

    rate_raw is in bits per tapped (conditioned) use, rate = p_sub * rate_raw
    in bits per source pulse, rate_normalized = rate_raw (memory-assisted).
    """

    t_e: float
    i_g: float
    chi_g: float
    p_sub: float
    rate_raw: float
    rate: float
    rate_normalized: float

    CSV_COLUMNS = ("t_e", "i_g", "chi_g", "p_sub", "rate_raw", "rate", "rate_normalized")

    def to_csv_row(self) -> str:
        return ",".join(f"{getattr(self, c):.12g}" for c in self.CSV_COLUMNS)


def key_rate_from_summary(s: CovarianceSummary, recon_eff: float, t_e: float) -> KeyRatePoint:
    i_g = mutual_information(s.v_a, s.v_b2, s.c_ab2)
    chi_g = holevo_bound(s)
    rate_raw = recon_eff * i_g - chi_g
    return KeyRatePoint(
        t_e=t_e,
        i_g=i_g,
        chi_g=chi_g,
        p_sub=s.p_sub,
        rate_raw=rate_raw,
        rate=s.p_sub * rate_raw,
        rate_normalized=rate_raw,
    )


def key_rate(cfg: SchemeConfig, t_e: float) -> KeyRatePoint:
    """Build the state, extract moments and evaluate the Gaussian bound."""
    state = build_state(cfg, t_e)
    s = covariance_summary(state)
    try:
        return key_rate_from_summary(s, cfg.recon_eff, t_e)
    except NumericalDomainError as exc:
        raise NumericalDomainError(f"{exc} (scheme={cfg.scheme}, t_e={t_e})") from exc


def key_rate_batch(cfg: SchemeConfig, t_e_values) -> list[KeyRatePoint]:
    """key_rate over many transmissivities, output in input order."""
    return [key_rate(cfg, float(t)) for t in t_e_values]
