"""Continuous-time quantum walk over the hypercube driver plus a diagonal problem term.

The full Hamiltonian is ``gamma * (m*I - sum_j X_j) + diag``; the constant
``gamma*m*I`` shifts only the global phase and is dropped, so what is evolved
is ``H = -gamma * sum_j X_j + diag``. Time evolution uses a Chebyshev
expansion of the exact propagator, applied matrix-free (diagonal multiply plus
m single-bit-flip hops), so the walk is sampled on a uniform grid with
machine-level norm conservation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import jv

from . import _kernels
from .errors import IntegrationError, InvalidArgumentError

MAX_QUBITS = 21
NORM_DRIFT_LIMIT = 1e-6
_COEFF_TOL = 1e-14
# Sub-samples evaluated from one Chebyshev vector sequence; capped so the
# vector buffer stays modest (large registers fall back to fewer).
_SAMPLES_PER_WINDOW = 35
_PHI_BUFFER_BYTES = 512 << 20


@dataclass(frozen=True)
class WalkParams:
    gamma: float
    n_qubits: int
    t_start: float = 30.0
    t_window: float = 70.0
    dt: float = 0.1

    def __post_init__(self):
        if self.gamma < 0:
            raise InvalidArgumentError(f"gamma must be >= 0, got {self.gamma}")
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise InvalidArgumentError(
                f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}"
            )
        if self.t_window <= 0 or self.dt <= 0 or self.t_start < 0:
            raise InvalidArgumentError("need t_window > 0, dt > 0, t_start >= 0")
        if self.dt > self.t_window / 100:
            raise InvalidArgumentError(
                f"dt={self.dt} too coarse; need dt <= t_window/100 = {self.t_window / 100}"
            )
        steps = self.t_window / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise InvalidArgumentError("dt must divide t_window")

    @property
    def n_samples(self) -> int:
        return int(round(self.t_window / self.dt)) + 1

    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n_samples)


@dataclass(frozen=True)
class SuccessWeights:
    """Per-basis-state probability that a measurement decodes to the target."""

    weights: np.ndarray
    label: str = ""

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1:
            raise InvalidArgumentError("weights must be a vector")
        if np.any(w < -1e-12) or np.any(w > 1 + 1e-12):
            raise InvalidArgumentError("weights must lie in [0, 1]")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class WalkTrajectory:
    times: np.ndarray
    probs: np.ndarray
    avg: float
    norm_drift: float


def _expansion_order(x: float) -> int:
    """Safe upper bound on the Chebyshev order needed for exp(-i x H~)."""
    return int(x + 16.0 * (x + 1.0) ** (1.0 / 3.0) + 24)


def _coeff_rows(x_values: np.ndarray) -> np.ndarray:
    """Chebyshev coefficients (2 - d_k0)(-i)^k J_k(x) for each x, one row per x."""
    x_values = np.atleast_1d(np.asarray(x_values, dtype=np.float64))
    kmax = _expansion_order(float(x_values.max()))
    orders = np.arange(kmax + 1)
    js = jv(orders[None, :], x_values[:, None])
    above = np.flatnonzero(np.abs(js).max(axis=0) > _COEFF_TOL)
    if len(above) == 0:
        K = 1
    else:
        K = int(above[-1]) + 1
        if K > kmax:
            raise IntegrationError("Chebyshev coefficient tail did not converge")
    rows = 2.0 * ((-1j) ** orders[None, :K]) * js[:, :K]
    rows[:, 0] *= 0.5
    return np.ascontiguousarray(rows)


class _Propagator:
    """Chebyshev propagator for H = -gamma * sum_j X_j + diag on m qubits."""

    def __init__(self, diag: np.ndarray, gamma: float, m: int):
        diag = np.ascontiguousarray(diag, dtype=np.float64)
        if len(diag) != (1 << m):
            raise InvalidArgumentError(f"diag must have length 2^{m}")
        self.m = m
        self.dim = 1 << m
        self.gamma = float(gamma)
        self.diag = diag
        self.masks = np.array([1 << (m - 1 - j) for j in range(m)], dtype=np.int64)
        dmin, dmax = float(diag.min()), float(diag.max())
        emin, emax = dmin - gamma * m, dmax + gamma * m
        pad = 1e-12 + 1e-9 * max(1.0, abs(emin), abs(emax))
        self.a = 0.5 * (emax - emin) + pad
        self.b = 0.5 * (emax + emin)
        self.diag2 = np.ascontiguousarray(2.0 * (diag - self.b) / self.a)
        self.g2 = 2.0 * gamma / self.a
        self._zeros = np.zeros(self.dim, dtype=np.complex128)

    def h_apply(self, psi: np.ndarray) -> np.ndarray:
        out = np.empty_like(psi)
        _kernels.h_apply(psi, out, self.diag, self.masks, self.gamma)
        return out

    def energy_expectation(self, psi: np.ndarray) -> float:
        return float(np.real(np.vdot(psi, self.h_apply(psi))))

    def step(self, psi: np.ndarray, delta: float) -> np.ndarray:
        """Return exp(-i H delta) psi via a fused single-accumulator recurrence."""
        if delta == 0.0:
            return psi.copy()
        coeffs = _coeff_rows(np.array([self.a * delta]))[0] * np.exp(-1j * self.b * delta)
        q = psi.copy()  # phi_0
        acc = coeffs[0] * q
        if len(coeffs) > 1:
            p = np.empty_like(psi)
            _kernels.cheb_phi_term(q, self._zeros, p, self.diag2, self.masks, self.g2)
            p *= 0.5  # phi_1 = H~ phi_0
            acc += coeffs[1] * p
            for k in range(2, len(coeffs)):
                _kernels.cheb_acc_term(p, q, acc, self.diag2, self.masks, self.g2, coeffs[k])
                p, q = q, p
        return acc

    def window(self, psi: np.ndarray, coeff_rows: np.ndarray,
               phi_buf: np.ndarray) -> np.ndarray:
        """States at the sub-sample times encoded in coeff_rows (one row each).

        Row ``s`` yields psi(t + dt*(s+1)) up to the global phase
        ``exp(-i b dt (s+1))``, which cancels in every probability.
        """
        K = coeff_rows.shape[1]
        phi_buf[0] = psi
        if K > 1:
            _kernels.cheb_phi_term(
                phi_buf[0], self._zeros, phi_buf[1], self.diag2, self.masks, self.g2
            )
            phi_buf[1] *= 0.5
        for k in range(2, K):
            _kernels.cheb_phi_term(
                phi_buf[k - 1], phi_buf[k - 2], phi_buf[k], self.diag2, self.masks, self.g2
            )
        return np.matmul(coeff_rows, phi_buf[:K])


def uniform_state(m: int) -> np.ndarray:
    dim = 1 << m
    return np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)


def propagate(diag: np.ndarray, gamma: float, t: float, psi0: np.ndarray) -> np.ndarray:
    """Evolve an arbitrary state for time t (used by tests and diagnostics)."""
    m = int(round(np.log2(len(psi0))))
    prop = _Propagator(diag, gamma, m)
    return prop.step(np.ascontiguousarray(psi0, dtype=np.complex128), t)


def evolve_multi(diag: np.ndarray, params: WalkParams, weight_rows) -> list[WalkTrajectory]:
    """Evolve once and score the trajectory against several weight vectors.

    All returned trajectories share the times, the underlying state history and
    the norm drift; only the success weighting differs.
    """
    rows = [w.weights if isinstance(w, SuccessWeights) else np.asarray(w, dtype=np.float64)
            for w in weight_rows]
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    m = int(round(np.log2(len(diag))))
    if (1 << m) != len(diag):
        raise InvalidArgumentError("diag length must be a power of two")
    if m != params.n_qubits:
        raise InvalidArgumentError(
            f"diag is for {m} qubits but params.n_qubits={params.n_qubits}"
        )
    for r in rows:
        if len(r) != len(diag):
            raise InvalidArgumentError("weights length must match diag length")
    wmat = np.vstack(rows) if rows else np.zeros((0, len(diag)))
    times = params.times()
    n_samples = params.n_samples

    if params.gamma == 0.0:
        # Diagonal Hamiltonian: moduli are static, P(t) is exactly constant.
        probs0 = wmat @ np.full(len(diag), 1.0 / len(diag))
        probs = np.repeat(probs0[:, None], n_samples, axis=1)
        return _finish(times, probs, 0.0, params)

    prop = _Propagator(diag, params.gamma, m)
    psi = uniform_state(m)
    if params.t_start > 0:
        psi = prop.step(psi, params.t_start)

    probs = np.empty((wmat.shape[0], n_samples))
    dens = np.abs(psi) ** 2
    probs[:, 0] = wmat @ dens
    norms = np.empty(n_samples)
    norms[0] = np.sqrt(dens.sum())

    n_sub = _SAMPLES_PER_WINDOW
    while n_sub > 1 and (_expansion_order(prop.a * params.dt * n_sub) + 2) * prop.dim * 16 > _PHI_BUFFER_BYTES:
        n_sub //= 2

    if (_expansion_order(prop.a * params.dt) + 2) * prop.dim * 16 > _PHI_BUFFER_BYTES:
        # Register too large for a vector buffer: step sample by sample.
        for s in range(1, n_samples):
            psi = prop.step(psi, params.dt)
            dens = np.abs(psi) ** 2
            probs[:, s] = wmat @ dens
            norms[s] = np.sqrt(dens.sum())
    else:
        sub_x = prop.a * params.dt * np.arange(1, n_sub + 1)
        full_rows = _coeff_rows(sub_x)
        kbuf = full_rows.shape[1] + 1
        phi_buf = np.empty((kbuf, prop.dim), dtype=np.complex128)
        end_phase = np.exp(-1j * prop.b * params.dt * n_sub)

        s = 1
        while s < n_samples:
            w = min(n_sub, n_samples - s)
            if w == n_sub:
                rows_w, phase = full_rows, end_phase
            else:
                rows_w = _coeff_rows(sub_x[:w])
                phase = np.exp(-1j * prop.b * params.dt * w)
            states = prop.window(psi, rows_w, phi_buf)
            dens = np.abs(states) ** 2
            np.matmul(wmat, dens.T, out=probs[:, s : s + w])
            norms[s : s + w] = np.sqrt(dens.sum(axis=1))
            psi = states[-1] * phase
            s += w

    drift = float(np.max(np.abs(norms - 1.0)))
    if drift > NORM_DRIFT_LIMIT:
        raise IntegrationError(
            f"norm drift {drift:.3e} exceeds {NORM_DRIFT_LIMIT}; reduce dt or check inputs"
        )
    return _finish(times, probs, drift, params)


def _finish(times, probs, drift, params) -> list[WalkTrajectory]:
    np.clip(probs, 0.0, 1.0, out=probs)
    out = []
    for row in probs:
        avg = float(np.trapezoid(row, dx=params.dt) / params.t_window)
        out.append(WalkTrajectory(times=times, probs=row, avg=avg, norm_drift=drift))
    return out


def evolve(diag: np.ndarray, params: WalkParams, weights) -> WalkTrajectory:
    w = weights.weights if isinstance(weights, SuccessWeights) else weights
    return evolve_multi(diag, params, [w])[0]


def average_success(traj: WalkTrajectory, t_start: float | None = None,
                    t_window: float | None = None) -> float:
    """Trapezoid time-average of P over [t_start, t_start + t_window]."""
    times, probs = traj.times, traj.probs
    if t_start is None and t_window is None:
        return traj.avg
    t0 = times[0] if t_start is None else t_start
    t1 = t0 + (times[-1] - t0 if t_window is None else t_window)
    eps = 1e-9 * max(1.0, abs(float(times[-1])))
    if t0 < times[0] - eps or t1 > times[-1] + eps:
        raise InvalidArgumentError(
            f"window [{t0}, {t1}] not covered by samples [{times[0]}, {times[-1]}]"
        )
    sel = (times >= t0 - eps) & (times <= t1 + eps)
    tt, pp = times[sel], probs[sel]
    return float(np.trapezoid(pp, tt) / (tt[-1] - tt[0]))


@dataclass(frozen=True)
class GammaSweep:
    gammas: np.ndarray
    averages: np.ndarray
    gamma_opt: float
    avg_opt: float


_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def sweep_gamma(diag, weights, gamma_grid, params: WalkParams,
                refine_tol: float = 1e-3) -> GammaSweep:
    """Average success per gamma over a grid, plus a golden-section-refined argmax.

    Ties in the grid argmax go to the smaller gamma; the refinement pass runs
    between the argmax's neighbours down to the given gamma tolerance.
    """
    grid = np.asarray(gamma_grid, dtype=np.float64)
    if grid.ndim != 1 or len(grid) < 1:
        raise InvalidArgumentError("gamma grid must be a nonempty 1-D array")
    if len(grid) > 1 and np.any(np.diff(grid) <= 0):
        raise InvalidArgumentError("gamma grid must be strictly increasing")
    wrow = weights.weights if isinstance(weights, SuccessWeights) else np.asarray(weights, float)

    def p_bar(g: float) -> float:
        p = WalkParams(gamma=g, n_qubits=params.n_qubits, t_start=params.t_start,
                       t_window=params.t_window, dt=params.dt)
        return evolve(diag, p, wrow).avg

    averages = np.array([p_bar(g) for g in grid])
    if len(grid) == 1:
        return GammaSweep(grid, averages, float(grid[0]), float(averages[0]))
    i = int(np.argmax(averages))  # first max = smaller gamma on ties
    best_g, best_p = float(grid[i]), float(averages[i])
    a = float(grid[max(i - 1, 0)])
    b = float(grid[min(i + 1, len(grid) - 1)])

    def consider(g, p):
        nonlocal best_g, best_p
        if p > best_p or (p == best_p and g < best_g):
            best_g, best_p = g, p

    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = p_bar(c), p_bar(d)
    consider(c, fc)
    consider(d, fd)
    while b - a > refine_tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = p_bar(c)
            consider(c, fc)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = p_bar(d)
            consider(d, fd)
    return GammaSweep(grid, averages, best_g, best_p)
