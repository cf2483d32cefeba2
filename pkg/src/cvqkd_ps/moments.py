"""Second moments of the sparse four-mode states, in shot-noise units.

The states built here have real amplitudes and vanishing first moments, so a
quadrature variance is 1 + 2<n> and a quadrature covariance reduces to ladder
expectation values.  For a pair of modes (X, Y) only one of the two pairings
can be nonzero, selected by the photon-number bookkeeping of the ket pattern:

* <XY + X'Y'>   ("two-mode-squeezing" type, sigma block in the covariance
  matrix: x-x and p-p correlations of opposite sign);
* <XY' + X'Y>   ("beam-splitter" type, identity block: equal sign).

cross_covariance returns their sum, i.e. the x-quadrature covariance, which
is the magnitude entering the block covariance matrices either way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock_states import MODE_INDEX, SparseFourModeState


def _mode_index(mode: str) -> int:
    try:
        return MODE_INDEX[mode]
    except KeyError:
        raise ValueError(f"unknown mode {mode!r}, expected one of {tuple(MODE_INDEX)}") from None


def mean_occupation(state: SparseFourModeState, mode: str) -> float:
    """<n> of one mode: sum of |amplitude|^2 times occupation."""
    i = _mode_index(mode)
    a = state.amps
    return float(np.dot(a * a, state.kets[:, i]))


def variance(state: SparseFourModeState, mode: str) -> float:
    """Quadrature variance 1 + 2<n> (vacuum = 1; first moments vanish)."""
    return 1.0 + 2.0 * mean_occupation(state, mode)


def first_moment(state: SparseFourModeState, mode: str) -> float:
    """<X + X'> of one mode; identically zero for every state built here
    because no stored ket pairs with its own single raise."""
    i = _mode_index(mode)
    idx = state._skeleton.single_raise(i)
    ok = idx >= 0
    if not ok.any():
        return 0.0
    a = state.amps
    occ = state.kets[ok, i].astype(np.float64)
    return float(2.0 * np.dot(a[ok] * np.sqrt(occ + 1.0), a[idx[ok]]))


def cross_covariance(state: SparseFourModeState, mode_x: str, mode_y: str) -> float:
    """x-quadrature covariance of two distinct modes.

    Sum of the raise-raise pairing 2 sum a(k) a(k+1x+1y) sqrt((nx+1)(ny+1))
    and the raise-lower pairing 2 sum a(k) a(k+1x-1y) sqrt((nx+1) ny); the ket
    pattern forces at least one of the two to be an empty sum.  Computed on
    the canonically ordered mode pair, so it is exactly symmetric.
    """
    ix, iy = _mode_index(mode_x), _mode_index(mode_y)
    if ix == iy:
        raise ValueError("cross_covariance needs two distinct modes")
    if ix > iy:
        ix, iy = iy, ix
    sk = state._skeleton
    a = state.amps
    kets = state.kets
    total = 0.0

    idx = sk.raise_raise(ix, iy)
    ok = idx >= 0
    if ok.any():
        w = np.sqrt((kets[ok, ix] + 1.0) * (kets[ok, iy] + 1.0))
        total += 2.0 * float(np.dot(a[ok] * w, a[idx[ok]]))

    idx = sk.raise_lower(ix, iy)
    ok = idx >= 0
    if ok.any():
        w = np.sqrt((kets[ok, ix] + 1.0) * kets[ok, iy])
        total += 2.0 * float(np.dot(a[ok] * w, a[idx[ok]]))

    return total


@dataclass(frozen=True)
class CovarianceSummary:
    """The eight second-moment scalars plus the tap probability.

    c_ab2, c_ef and c_fb2 are two-mode-squeezing type (sigma blocks); c_eb2
    is beam-splitter type (identity block).
    """

    v_a: float
    v_b2: float
    v_e: float
    v_f: float
    c_ab2: float
    c_ef: float
    c_eb2: float
    c_fb2: float
    p_sub: float

    CSV_COLUMNS = ("v_a", "v_b2", "v_e", "v_f", "c_ab2", "c_ef", "c_eb2", "c_fb2", "p_sub")

    def to_csv_row(self) -> str:
        return ",".join(f"{getattr(self, c):.12g}" for c in self.CSV_COLUMNS)


def covariance_summary(state: SparseFourModeState) -> CovarianceSummary:
    """All scalars needed by the Gaussian key-rate bound, in one pass."""
    return CovarianceSummary(
        v_a=variance(state, "A"),
        v_b2=variance(state, "B2"),
        v_e=variance(state, "E"),
        v_f=variance(state, "F"),
        c_ab2=cross_covariance(state, "A", "B2"),
        c_ef=cross_covariance(state, "E", "F"),
        c_eb2=cross_covariance(state, "E", "B2"),
        c_fb2=cross_covariance(state, "F", "B2"),
        p_sub=state.p_sub,
    )
