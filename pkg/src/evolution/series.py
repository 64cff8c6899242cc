"""
Truncated Power-Series Propagation
Taylor coefficients of driving values and marked points, obtained by pushing
truncated series in t through the rational right-hand sides (series division
for every reciprocal), never by symbolic differentiation.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class SeriesCoefficients:
    """Taylor coefficients about the current time (row k = k-th coefficient)"""

    xis: np.ndarray      # (M+1, n_drivers), real-valued
    marks: np.ndarray    # (M+1, n_marks), complex
    imag_residual: float  # |Im xi'| before the real part was taken

    @property
    def xi_dots(self) -> np.ndarray:
        return self.xis[1].real

    @property
    def mark_dots(self) -> np.ndarray:
        return self.marks[1]

    def evaluate_many(self, offsets):
        """Every series at several offsets at once (row i = offsets[i])"""
        powers = np.vander(np.asarray(offsets, dtype=float), self.xis.shape[0], increasing=True)
        return powers @ self.xis.real, powers @ self.marks


def _reciprocal_step(diff, recip, k):
    """k-th coefficient of 1/diff given diff[0..k] and recip[0..k-1]"""
    if k == 0:
        return 1.0 / diff[0]
    return -(diff[1:k + 1] * recip[k - 1::-1]).sum(axis=0) / diff[0]


def chordal_series(xis, marks, exponents, weights, order: int,
                   mode: str = 'derived') -> SeriesCoefficients:
    """Series for the (multi-)chordal system.

    Marks flow by X' = sum_k 2 b_k / (X - xi_k). Drivers follow
      derived: xi_l' = 2 sum_{k!=l} (b_k+b_l)/(xi_l-xi_k) - b_l sum_i e_i/(P_i-xi_l)
      printed: xi_l' = sum_{k!=l} b_k/(xi_l-xi_k) - b_l/2 sum_i e_i/(P_i-xi_l)
    With one driver and b=1 both reduce to the single-slit equation only in
    derived mode.
    """
    xis = np.asarray(xis, dtype=float)
    marks = np.asarray(marks, dtype=complex)
    exponents = np.asarray(exponents, dtype=float)
    weights = np.asarray(weights, dtype=float)
    n_d, n_m = xis.size, marks.size

    xi_c = np.zeros((order + 1, n_d), dtype=complex)
    mk_c = np.zeros((order + 1, n_m), dtype=complex)
    xi_c[0] = xis
    mk_c[0] = marks

    if mode not in ('derived', 'printed'):
        raise ValueError(f"unknown multi-slit mode {mode!r}")
    diff = np.zeros((order, n_m, n_d), dtype=complex)
    recip = np.zeros((order, n_m, n_d), dtype=complex)
    if n_d > 1:
        off_diag = ~np.eye(n_d, dtype=bool)
        gaps = np.zeros((order, n_d, n_d), dtype=complex)
        inter = np.zeros((order, n_d, n_d), dtype=complex)
        pair_weights = weights[None, :] + weights[:, None]
    imag_residual = 0.0

    for k in range(order):
        diff[k] = mk_c[k][:, None] - xi_c[k][None, :]
        recip[k] = _reciprocal_step(diff, recip, k)
        self_term = exponents @ recip[k]
        if mode == 'derived':
            xi_dot = -weights * self_term
        else:
            xi_dot = -0.5 * weights * self_term
        if n_d > 1:
            gaps[k] = xi_c[k][:, None] - xi_c[k][None, :]
            if k == 0:
                gaps[0][~off_diag] = 1.0
            inter[k] = _reciprocal_step(gaps, inter, k)
            inter[k][~off_diag] = 0.0
            if mode == 'derived':
                xi_dot = xi_dot + 2.0 * (pair_weights * inter[k]).sum(axis=1)
            else:
                xi_dot = xi_dot + (weights[None, :] * inter[k]).sum(axis=1)
        mark_dot = 2.0 * (recip[k] @ weights)

        if k == 0:
            imag_residual = float(np.max(np.abs(xi_dot.imag), initial=0.0))
        xi_c[k + 1] = xi_dot.real / (k + 1)
        mk_c[k + 1] = mark_dot / (k + 1)

    return SeriesCoefficients(xi_c, mk_c, imag_residual)


def radial_constant(mode: str, K: int, exponent_total: float) -> float:
    """Constant term c of xi' = -(i/2)[sum e (P+u)/(P-u) + c]"""
    if mode == 'printed':
        return 2.0
    if mode == 'origin':
        return 2.0 - K
    if mode == 'residue':
        return -(6.0 + 2.0 * K + exponent_total)
    raise ValueError(f"unknown radial mode {mode!r}")


def radial_series(xi: float, marks, exponents, K: int, order: int,
                  mode: str = 'residue') -> SeriesCoefficients:
    """Series for the radial system with u = e^{i xi}.

    Marks flow by X' = -X (X+u)/(X-u), so that f_t'(0) = e^-t.
    """
    marks = np.asarray(marks, dtype=complex)
    exponents = np.asarray(exponents, dtype=float)
    n_m = marks.size
    const = radial_constant(mode, K, float(exponents.sum()))

    xi_c = np.zeros((order + 1, 1), dtype=complex)
    mk_c = np.zeros((order + 1, n_m), dtype=complex)
    xi_c[0, 0] = xi
    mk_c[0] = marks

    u_c = np.zeros(order + 1, dtype=complex)
    diff = np.zeros((order, n_m), dtype=complex)
    recip = np.zeros((order, n_m), dtype=complex)
    pu = np.zeros((order, n_m), dtype=complex)     # P + u
    ppu = np.zeros((order, n_m), dtype=complex)    # P (P + u)
    imag_residual = 0.0

    for k in range(order):
        if k == 0:
            u_c[0] = np.exp(1j * xi)
        else:
            u_c[k] = sum(j * 1j * xi_c[j, 0] * u_c[k - j] for j in range(1, k + 1)) / k
        diff[k] = mk_c[k] - u_c[k]
        recip[k] = _reciprocal_step(diff, recip, k)
        pu[k] = mk_c[k] + u_c[k]
        ppu[k] = sum(mk_c[j] * pu[k - j] for j in range(k + 1))

        mark_dot = -sum(ppu[j] * recip[k - j] for j in range(k + 1))
        ratio = sum(pu[j] * recip[k - j] for j in range(k + 1))
        bracket = (exponents * ratio).sum() + (const if k == 0 else 0.0)
        xi_dot = -0.5j * bracket

        if k == 0:
            imag_residual = abs(xi_dot.imag)
        xi_c[k + 1, 0] = xi_dot.real / (k + 1)
        mk_c[k + 1] = mark_dot / (k + 1)

    return SeriesCoefficients(xi_c, mk_c, imag_residual)
