"""Bohmian and classical trajectory ensembles for one or two Gaussian packets.

Each packet's parameters evolve on their own (Heller RK4, or the lambda = 1
closed form where the ODE refuses), and paths follow v = (hbar/m) Im(psi'/psi)
of the instantaneous sum.  With lambda > 0 the equation is nonlinear, so the
sum of two evolved packets is a modelling choice, not an exact solution.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import heller
from .analytic import classical_action
from .core import NATURAL, Constants, DomainError, GaussianState, gamma_imag_from_alpha, \
    overlap
from .heller import AnalyticPropagationRequired, HellerSeries, IntegrationControls
from .potentials import Harmonic, Potential, Quadratic

EPS_NODE = 1e-12
V_CAP = 1e3
SUBSTEP_FACTOR = 10
MAX_SUBSTEP_DEPTH = 3
SUBSTEP_TOL = 1e-3  # stage-velocity spread times h, in units of the narrowest width


class NodeSingularity(DomainError):
    """The velocity is undefined at a node of the wave function."""

    def __init__(self, x):
        super().__init__(f"wave function vanishes at x = {x!r}; velocity undefined")
        self.x = x


# -- superpositions ------------------------------------------------------------

@dataclass(frozen=True)
class SuperpositionState:
    """One or two packets summed and renormalized; ``norm_factor`` multiplies the sum."""

    packets: tuple[GaussianState, ...]
    constants: Constants = NATURAL
    norm_factor: float = field(init=False)

    def __post_init__(self):
        packets = tuple(self.packets)
        if len(packets) not in (1, 2):
            raise DomainError("a superposition holds one or two packets")
        if any(not p.alpha_i > 0 for p in packets):
            raise DomainError("every packet needs alpha_i > 0")
        object.__setattr__(self, "packets", packets)
        total = sum(overlap(a, b, self.constants).real for a in packets for b in packets)
        object.__setattr__(self, "norm_factor", 1.0 / math.sqrt(total))

    @property
    def t(self) -> float:
        return self.packets[0].t

    def amplitude(self, x):
        x = np.asarray(x, dtype=float)
        return self.norm_factor * sum(_packet_amplitude(p.as_tuple(), x, self.constants.hbar)
                                      for p in self.packets)

    def density(self, x):
        return np.abs(self.amplitude(x)) ** 2


def _packet_amplitude(par, x, hbar):
    xt, pt, ar, ai, gr, gi = par
    y = x - xt
    return np.exp((-(ai * y * y + gi) + 1j * (ar * y * y + pt * y + gr)) / hbar)


def _about(a, b, c, xk):
    """Coefficients in x of a (x - xk)^2 + b (x - xk) + c."""
    return a, b - 2.0 * a * xk, (a * xk - b) * xk + c


def _pair_coeffs(params, hbar):
    """Quadratic-in-x coefficients for the ratio psi_2/psi_1 and for log|psi_1|^2.

    ``d`` is log|psi_2/psi_1|, ``phi`` is arg psi_2 - arg psi_1, ``fd`` holds
    the complex coefficients of f_1 - f_2 with f_k = 2 alpha_k (x - x_k) + p_k,
    and ``f2`` is Re f_2.
    """
    (x1, p1, ar1, ai1, gr1, gi1), (x2, p2, ar2, ai2, gr2, gi2) = params
    r1 = _about(-ai1 / hbar, 0.0, -gi1 / hbar, x1)
    r2 = _about(-ai2 / hbar, 0.0, -gi2 / hbar, x2)
    s1 = _about(ar1 / hbar, p1 / hbar, gr1 / hbar, x1)
    s2 = _about(ar2 / hbar, p2 / hbar, gr2 / hbar, x2)
    d = tuple(b - a for a, b in zip(r1, r2))
    phi = tuple(b - a for a, b in zip(s1, s2))
    f2 = (2.0 * ar2, p2 - 2.0 * ar2 * x2)
    fd = (complex(2.0 * (ar1 - ar2), 2.0 * (ai1 - ai2)),
          complex(p1 - 2.0 * ar1 * x1 - f2[1], 2.0 * (ai2 * x2 - ai1 * x1)))
    return d, phi, r1, fd, f2


# beyond this log-ratio psi_1 is negligible; clipping keeps exp finite
_LOG_RATIO_CLIP = 700.0


def _weights(params, x, hbar, coeffs=None):
    """Complex weight psi_1/psi of the first packet and log|psi|^2 of the unnormalized sum.

    The second weight is 1 - w1.  Both are formed from the ratio psi_2/psi_1,
    whose log is clipped so that far tails neither overflow nor underflow.
    """
    d, phi, r1 = (coeffs or _pair_coeffs(params, hbar))[:3]
    dx = (d[0] * x + d[1]) * x + d[2]
    ph = (phi[0] * x + phi[1]) * x + phi[2]
    clipped = np.minimum(dx, _LOG_RATIO_CLIP)
    one = 1.0 + np.exp(clipped + 1j * ph)  # psi / psi_1
    with np.errstate(divide="ignore", invalid="ignore"):
        w = 1.0 / one
        log_rho = 2.0 * ((r1[0] * x + r1[1]) * x + r1[2] + (dx - clipped) + np.log(np.abs(one)))
    return w, log_rho


def _field_velocity(params, x, hbar, m, co=None):
    """Velocity and log density of the (unnormalized) sum at positions x."""
    if len(params) == 1:
        xt, pt, ar, ai, gr, gi = params[0]
        y = x - xt
        return (pt + 2.0 * ar * y) / m, -2.0 * (ai * y * y + gi) / hbar
    co = co or _pair_coeffs(params, hbar)
    w, log_rho = _weights(params, x, hbar, co)
    fd, f2 = co[3:]
    # Re[w1 f1 + (1 - w1) f2] = Re f2 + Re[w1 (f1 - f2)]
    v = (f2[0] * x + f2[1]) + (w * (fd[0] * x + fd[1])).real
    return v / m, log_rho


def velocity_single(state: GaussianState, x, constants: Constants = NATURAL):
    """[p_t + 2 alpha_r (x - x_t)] / m."""
    return (state.p_t + 2.0 * state.alpha_r * (np.asarray(x, dtype=float) - state.x_t)) \
        / constants.mass


def velocity_superposition(sup: SuperpositionState, x, constants: Constants | None = None,
                           eps_node: float = EPS_NODE):
    """(1/m) Im-part velocity of the summed wave function, in closed form."""
    constants = constants or sup.constants
    x_arr = np.asarray(x, dtype=float)
    params = [p.as_tuple() for p in sup.packets]
    v, log_rho = _field_velocity(params, x_arr, constants.hbar, constants.mass)
    rho = np.exp(log_rho) * sup.norm_factor**2
    bad = rho < eps_node
    if np.any(bad):
        raise NodeSingularity(x_arr[bad].tolist() if x_arr.ndim else float(x_arr))
    return v


# -- parameter tracks ------------------------------------------------------------

class PacketTrack:
    """A packet's parameters on the grid t0 + k dt, at half steps, and at any t."""

    comoving = False

    def __init__(self, t0, dt, n_steps):
        self.t0, self.dt, self.n = t0, dt, n_steps

    def _lists(self):
        # plain floats are much cheaper than numpy scalars in the stepping loop
        self._grid_rows = [tuple(r) for r in self._grid.tolist()]
        self._mid_rows = [tuple(r) for r in self._mid.tolist()]

    def grid(self, k):
        return self._grid_rows[k]

    def mid(self, k):
        return self._mid_rows[k]

    def series(self, every: int, lam: float, constants: Constants) -> HellerSeries:
        idx = _stored_indices(self.n, every)
        return HellerSeries(self.t0 + self.dt * idx, self._grid[idx].copy(), lam, self.dt,
                            constants)


class OdeTrack(PacketTrack):
    def __init__(self, state0, lam, dt, n_steps, potential, constants):
        super().__init__(state0.t, dt, n_steps)
        self._args = (lam, potential.coefficients(constants.mass), constants.hbar,
                      constants.mass)
        self._grid = heller.integrate_steps(state0, lam, dt, n_steps, potential, constants)
        if n_steps:
            cols = heller.rk4_step(tuple(self._grid[:-1].T), 0.5 * dt, *self._args)
            self._mid = np.column_stack(cols)
        else:
            self._mid = np.empty((0, 6))
        self._lists()

    def at(self, t):
        k = min(int(math.floor((t - self.t0) / self.dt)), max(self.n - 1, 0))
        h = t - (self.t0 + k * self.dt)
        if h == 0.0:
            return self.grid(k)
        return heller.rk4_step(self.grid(k), h, *self._args)

    def at_many(self, times):
        """``at`` for times inside one grid cell, as a single vectorized step."""
        times = np.asarray(times, dtype=float)
        mid = 0.5 * (times.min() + times.max())
        k = min(max(int(math.floor((mid - self.t0) / self.dt)), 0), max(self.n - 1, 0))
        cols = heller.rk4_step(self.grid(k), times - (self.t0 + k * self.dt), *self._args)
        return list(zip(*(c.tolist() for c in cols)))


class FocusingTrack(PacketTrack):
    """lambda = 1 in a confining quadratic well, in closed form."""

    comoving = True

    def __init__(self, state0, dt, n_steps, potential, constants):
        super().__init__(state0.t, dt, n_steps)
        if isinstance(potential, Harmonic):
            omega, x_eq, v_eq = potential.omega, 0.0, 0.0
        elif isinstance(potential, Quadratic):
            omega, x_eq, v_eq = potential.equivalent_harmonic(constants.mass)
        else:
            raise DomainError(f"no lambda = 1 closed form for {potential!r}")
        self.omega, self.x_eq, self.v_eq = omega, x_eq, v_eq
        self.state0, self.constants = state0, constants
        self.b = 2.0 * state0.alpha_r / (constants.mass * omega)
        k = np.arange(n_steps + 1)
        self._grid = self._eval(self.t0 + dt * k)
        self._mid = self._eval(self.t0 + dt * (k[:-1] + 0.5))
        self._lists()

    def _eval(self, t):
        s0, m, hbar, w = self.state0, self.constants.mass, self.constants.hbar, self.omega
        tau = np.asarray(t, dtype=float) - self.t0
        c, s = np.cos(w * tau), np.sin(w * tau)
        x0 = s0.x_t - self.x_eq
        xt = self.x_eq + x0 * c + s0.p_t / (m * w) * s
        pt = s0.p_t * c - m * w * x0 * s
        f = c + self.b * s
        with np.errstate(divide="ignore", invalid="ignore"):
            ar = 0.5 * m * w * (self.b * c - s) / f
            ai = s0.alpha_i / (f * f)
            gi = -0.25 * hbar * np.log(2.0 * ai / (np.pi * hbar))
        gr = s0.gamma_r + np.vectorize(classical_action)(x0, s0.p_t, w, tau) - self.v_eq * tau
        return np.column_stack(np.broadcast_arrays(xt, pt, ar, ai, gr, gi))

    def scale(self, t):
        """|w(t)|, the common stretch of every offset from the centroid."""
        tau = t - self.t0
        return abs(math.cos(self.omega * tau) + self.b * math.sin(self.omega * tau))

    def at(self, t):
        return tuple(self._eval(np.array([t]))[0])

    def at_many(self, times):
        return [tuple(r) for r in self._eval(np.asarray(times, dtype=float)).tolist()]


def _stored_indices(n, every):
    idx = np.arange(0, n + 1, max(int(every), 1))
    if idx[-1] != n:
        idx = np.append(idx, n)
    return idx


def make_track(state0, lam, controls: IntegrationControls, potential, constants):
    return _track(state0, float(lam), controls.dt, controls.n_steps, potential, constants)


# tracks are read-only once built; node reports reuse the ensemble's tracks
@functools.lru_cache(maxsize=16)
def _track(state0, lam, dt, n, potential, constants):
    if heller.refuses(lam, potential):
        return FocusingTrack(state0, dt, n, potential, constants)
    return OdeTrack(state0, lam, dt, n, potential, constants)


# -- ensembles -------------------------------------------------------------------

@dataclass
class TrajectoryEnsemble:
    times: np.ndarray
    paths: np.ndarray  # shape (n_times, n_paths)
    labels: list  # (packet index, initial offset in units of that packet's sigma)
    kind: str = "bohmian"
    lam: float | None = None
    v_max: float = 0.0
    deflected: list = field(default_factory=list)  # (path index, time)
    substeps: int = 0
    propagation: str = "ode"
    parameters: list = field(default_factory=list)  # HellerSeries per packet

    @property
    def initial(self) -> np.ndarray:
        return self.paths[0]

    @property
    def n_paths(self) -> int:
        return self.paths.shape[1]


def default_initials(packets, count: int = 15, span: float = 2.5,
                     constants: Constants = NATURAL):
    """``count`` equally spaced starts over +-span sigma around each centroid."""
    positions, labels = [], []
    offsets = np.linspace(-span, span, count) if count > 1 else np.zeros(1)
    for k, p in enumerate(packets):
        sigma = p.width(constants)
        for o in offsets:
            positions.append(p.x_t + o * sigma)
            labels.append((k, float(o)))
    return np.array(positions), labels


def quantile_initials(packets, count: int, constants: Constants = NATURAL,
                      resolution: int = 20001):
    """Starts at the (i + 1/2)/count quantiles of the initial density."""
    sup = SuperpositionState(tuple(packets), constants)
    lo = min(p.x_t - 12 * p.width(constants) for p in packets)
    hi = max(p.x_t + 12 * p.width(constants) for p in packets)
    grid = np.linspace(lo, hi, resolution)
    rho = sup.density(grid)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (rho[1:] + rho[:-1]) * np.diff(grid))])
    cdf /= cdf[-1]
    q = (np.arange(count) + 0.5) / count
    positions = np.interp(q, cdf, grid)
    return positions, label_positions(packets, positions, constants)


def label_positions(packets, positions, constants: Constants = NATURAL):
    labels = []
    for x in np.asarray(positions, dtype=float):
        dens = [float(np.exp(-2.0 * (p.alpha_i * (x - p.x_t) ** 2 + p.gamma_i) / constants.hbar))
                for p in packets]
        k = int(np.argmax(dens))
        labels.append((k, float((x - packets[k].x_t) / packets[k].width(constants))))
    return labels


class _Frames:
    """Packet parameters (plus comoving frame data) at stage times."""

    def __init__(self, tracks, constants):
        self.tracks = tracks
        self.comoving = tracks[0].comoving
        self.hbar, self.m = constants.hbar, constants.mass
        # one packet in the lab frame: the velocity field is affine in x
        self.affine = len(tracks) == 1 and not self.comoving
        if self.comoving:
            a0 = [(t.state0.alpha_r, t.state0.alpha_i) for t in tracks]
            if any(a != a0[0] for a in a0):
                raise DomainError("lambda = 1 focusing superpositions need identical packet shapes")

    def _frame(self, params, t):
        """(params, scale, centre, mean momentum, pair coefficients)."""
        co = _pair_coeffs(params, self.hbar) if len(params) == 2 else None
        if not self.comoving:
            return params, 1.0, 0.0, 0.0, co
        s = self.tracks[0].scale(t)
        c = sum(p[0] for p in params) / len(params)
        pbar = sum(p[1] for p in params) / len(params)
        return params, s, c, pbar, co

    def grid(self, k, t):
        return self._frame([tr.grid(k) for tr in self.tracks], t)

    def mid(self, k, t):
        return self._frame([tr.mid(k) for tr in self.tracks], t)

    def at(self, t):
        return self._frame([tr.at(t) for tr in self.tracks], t)

    def at_many(self, times):
        rows = [tr.at_many(times) for tr in self.tracks]
        return [self._frame(list(ps), t) for t, ps in zip(times, zip(*rows))]

    def rate(self, y, frame):
        """(dy/dt, physical velocity, log density, narrowest width)."""
        params, s, c, pbar, co = frame
        m, hbar = self.m, self.hbar
        width = min(math.sqrt(hbar / (4.0 * p[3])) for p in params)
        if not self.comoving:
            v, log_rho = _field_velocity(params, y, hbar, m, co)
            return v, v, log_rho, width
        x = c + s * y
        ar = params[0][2]
        if len(params) == 1:
            xt, pt, _, ai, _, gi = params[0]
            log_rho = -2.0 * (ai * (x - xt) ** 2 + gi) / hbar
            du = np.zeros_like(y)
        else:
            w, log_rho = _weights(params, x, hbar, co)
            w_re, w_im = w.real, w.imag
            (x1, p1, _, ai, _, _), (x2, p2, _, _, _, _) = params
            q1 = 2.0 * ar * (c - x1) + (p1 - pbar)
            q2 = 2.0 * ar * (c - x2) + (p2 - pbar)
            # Re(w1) q1 + Re(w2) q2 + 2 alpha_i [Im(w1)(x1 - c) + Im(w2)(x2 - c)]
            num = q2 + w_re * (q1 - q2) + 2.0 * ai * w_im * (x1 - x2)
            du = num / (m * s)
        v = (2.0 * ar * (x - c) + pbar) / m + s * du
        return du, v, log_rho, width * (1.0 / s)

    def position(self, y, frame):
        _, s, c, _, _ = frame
        return c + s * y


class _Stepper:
    def __init__(self, frames: _Frames, log_norm2, eps_node, v_cap, substep_tol):
        self.frames = frames
        self.log_eps = math.log(eps_node) - log_norm2
        self.v_cap = v_cap
        self.tol = substep_tol
        self.v_max = 0.0
        self.substeps = 0
        self._zeros = {}

    def _rk4_affine(self, y, h, frames, cap):
        """RK4 for an affine field v = a x + b, composed into y_new = A y + B.

        The smoothness, density and speed tests are affine or concave in y,
        so they are decided at the extreme positions; per-path masks are only
        built when an extreme is close to a threshold.  Returns None when the
        generic stages are needed (capping, non-finite coefficients).
        """
        m, hbar = self.frames.m, self.frames.hbar
        P, Q = 1.0, 0.0  # stage argument P y + Q
        coef, args = [], []
        width = math.inf
        for j, (params, *_) in enumerate(frames):
            xt, pt, ar, ai, _, gi = params[0]
            a, b = 2.0 * ar / m, (pt - 2.0 * ar * xt) / m
            if j:
                f = h if j == 3 else 0.5 * h
                c_prev, d_prev = coef[-1]
                P, Q = 1.0 + f * c_prev, f * d_prev
            args.append((P, Q, xt, ai, gi))
            coef.append((a * P, a * Q + b))
            width = min(width, math.sqrt(hbar / (4.0 * ai)))
        (c1, d1), (c2, d2), (c3, d3), (c4, d4) = coef
        A = 1.0 + h / 6.0 * (c1 + 2.0 * (c2 + c3) + c4)
        B = h / 6.0 * (d1 + 2.0 * (d2 + d3) + d4)
        if not all(map(math.isfinite, (A, B, c1, c2, c3, c4, d1, d2, d3, d4))):
            return None
        y_new = A * y + B
        if not y.size:
            return y_new, None, 0.0, np.zeros(0, bool)
        lo, hi = float(y.min()), float(y.max())
        spread = speed = 0.0
        for c, d in ((c1 - c2, d1 - d2), (c2 - c3, d2 - d3), (c3 - c4, d3 - d4)):
            spread = max(spread, abs(c * lo + d), abs(c * hi + d))
        for c, d in coef:
            speed = max(speed, abs(c * lo + d), abs(c * hi + d))
        log_rho = math.inf
        for P, Q, xt, ai, gi in args:
            far = max(abs(P * lo + Q - xt), abs(P * hi + Q - xt))
            log_rho = min(log_rho, -2.0 * (ai * far * far + gi) / hbar)
        if cap and not speed < 0.5 * self.v_cap:
            return None
        limit = self.tol * width
        if h * spread < 0.5 * limit and log_rho > self.log_eps + 1.0:
            return y_new, None, speed, self._clear(y.size)
        k = [c * y + d for c, d in coef]
        spread = np.maximum(np.maximum(np.abs(k[0] - k[1]), np.abs(k[1] - k[2])),
                            np.abs(k[2] - k[3]))
        rough = h * spread > limit
        for P, Q, xt, ai, gi in args:
            rough |= ~(-2.0 * (ai * (P * y + Q - xt) ** 2 + gi) / hbar > self.log_eps)
        speed = np.maximum(np.maximum(np.abs(k[0]), np.abs(k[1])),
                           np.maximum(np.abs(k[2]), np.abs(k[3])))
        return y_new, rough, speed, self._clear(y.size)

    def _clear(self, n):
        """Shared all-false flag array (read-only use)."""
        z = self._zeros.get(n)
        if z is None:
            z = self._zeros[n] = np.zeros(n, bool)
        return z

    def _rk4(self, y, h, frames, cap, final):
        """One RK4 step; returns (y_new, rough mask, stage speeds, capped mask).

        ``cap`` limits stage speeds to v_cap (inside sub-steps); ``final``
        means no further refinement is possible.
        """
        ks, speeds = [], []
        near = None
        capped = None
        width = math.inf
        rate = self.frames.rate
        for j, frame in enumerate(frames):
            yj = y if j == 0 else y + (h if j == 3 else 0.5 * h) * ks[-1]
            k, v, log_rho, wdt = rate(yj, frame)
            low = ~(log_rho > self.log_eps)
            near = low if near is None else near | low
            width = min(width, wdt)
            speed = np.abs(v)
            top = speed.max() if speed.size else 0.0
            # NaN fails both comparisons, so non-finite rates always take the guard;
            # a non-finite k always gives a non-finite v
            if not (top <= self.v_cap or (not cap and top < math.inf)):
                k, v, near, capped = self._guard(k, v, near, capped, cap, final)
                speed = np.abs(v)
            ks.append(k)
            speeds.append(speed)
        k1, k2, k3, k4 = ks
        spread = np.maximum(np.maximum(np.abs(k1 - k2), np.abs(k2 - k3)), np.abs(k3 - k4))
        y_new = y + h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4)
        speed = np.maximum(np.maximum(speeds[0], speeds[1]), np.maximum(speeds[2], speeds[3]))
        if capped is None:
            capped = np.zeros(y.shape, bool)
        return y_new, (h * spread > self.tol * width) | near, speed, capped

    def _guard(self, k, v, near, capped, cap, final):
        """Handle non-finite rates and, inside sub-steps, speeds above v_cap."""
        bad = ~np.isfinite(k) | ~np.isfinite(v)
        if not final:
            near = near | bad  # refine first
        if not cap:
            return np.where(bad, 0.0, k), np.where(bad, 0.0, v), near, capped
        fast = (bad & final) | (np.abs(np.where(bad, 0.0, v)) > self.v_cap)
        capped = fast if capped is None else capped | fast
        if np.any(fast) or np.any(bad):
            with np.errstate(divide="ignore", invalid="ignore"):
                scale = np.where(fast & ~bad, self.v_cap / np.abs(v), 1.0)
            k = np.where(bad, 0.0, k * scale)
            v = np.where(bad, np.where(final, self.v_cap, 0.0), v * scale)
        return k, v, near, capped

    def step(self, y, t, h, frames, depth=0):
        """Advance y over [t, t + h]; paths with rough stages are sub-stepped.

        Each path is refined on its own, so a path's result does not depend on
        which other paths share the ensemble.  Returns (y_new, capped mask).
        """
        final = depth >= MAX_SUBSTEP_DEPTH
        out = self._rk4_affine(y, h, frames, depth > 0) if self.frames.affine else None
        if out is None:
            out = self._rk4(y, h, frames, depth > 0, final)
        y_new, rough, speed, capped = out
        if final or rough is None or not np.any(rough):
            if y.size:
                self.v_max = max(self.v_max, float(np.max(speed)))
            return y_new, capped
        smooth = ~rough
        if np.any(smooth):
            self.v_max = max(self.v_max, float(speed[smooth].max()))
        self.substeps += 1
        sub = y[rough]
        hs = h / SUBSTEP_FACTOR
        flagged = np.zeros(sub.shape, bool)
        # the block's end frames are the parent's; interior points in one batch
        n = SUBSTEP_FACTOR
        inner = self.frames.at_many([t + 0.5 * j * hs for j in range(1, 2 * n)])
        edges = [frames[0]] + inner[1::2] + [frames[3]]
        for j in range(n):
            sub, f = self.step(sub, t + j * hs, hs, (edges[j], inner[2 * j], inner[2 * j],
                                                     edges[j + 1]), depth + 1)
            flagged |= f
        y_new = y_new.copy()
        y_new[rough] = sub
        out = capped.copy()
        out[rough] = flagged
        return y_new, out


def integrate_ensemble(initials, packets, lam: float, potential: Potential,
                       controls: IntegrationControls, constants: Constants = NATURAL, *,
                       labels=None, eps_node: float = EPS_NODE, v_cap: float = V_CAP,
                       substep_tol: float = SUBSTEP_TOL) -> TrajectoryEnsemble:
    """Co-integrate packet parameters and Bohmian paths with one RK4 grid.

    ``packets`` are the initial packets (one or two).  Where the parameter ODE
    refuses (lambda ~ 1 in a confining well) the closed-form lambda = 1
    propagation is used and paths are integrated as offsets scaled by the
    packet's focusing factor, which keeps them finite through the foci.
    """
    packets = list(packets) if not isinstance(packets, GaussianState) else [packets]
    if len(packets) not in (1, 2):
        raise DomainError("integrate_ensemble takes one or two packets")
    heller.check_lambda(lam)
    y0 = np.asarray(initials, dtype=float).copy()
    if y0.ndim != 1 or not np.all(np.isfinite(y0)):
        raise DomainError("initial positions must be a finite 1-D sequence")
    if labels is None:
        labels = label_positions(packets, y0, constants)
    tracks = [make_track(p, lam, controls, potential, constants) for p in packets]
    frames = _Frames(tracks, constants)
    sup0 = SuperpositionState(tuple(packets), constants)
    stepper = _Stepper(frames, 2.0 * math.log(sup0.norm_factor), eps_node, v_cap, substep_tol)

    n, dt, t0 = controls.n_steps, controls.dt, packets[0].t
    stored = _stored_indices(n, controls.store_every)
    keep = np.zeros(n + 1, bool)
    keep[stored] = True
    out = np.empty((len(stored), y0.size))
    frame = frames.grid(0, t0)
    y = y0 if not frames.comoving else (y0 - frame[2]) / frame[1]
    out[0] = frames.position(y, frame)
    row = 1
    deflected = []
    for k in range(n):
        t = t0 + k * dt
        nxt = frames.grid(k + 1, t + dt)
        mid = frames.mid(k, t + 0.5 * dt)
        y, flags = stepper.step(y, t, dt, (frame, mid, mid, nxt))
        if flags.any():
            deflected.extend((int(i), t + dt) for i in np.nonzero(flags)[0])
        frame = nxt
        if keep[k + 1]:
            out[row] = frames.position(y, frame)
            row += 1
    return TrajectoryEnsemble(
        times=t0 + dt * stored, paths=out, labels=list(labels), kind="bohmian", lam=lam,
        v_max=stepper.v_max, deflected=deflected, substeps=stepper.substeps,
        propagation="analytic" if frames.comoving else "ode",
        parameters=[tr.series(controls.store_every, lam, constants) for tr in tracks])


def classical_ensemble(initials, potential: Potential, controls: IntegrationControls,
                       constants: Constants = NATURAL, labels=None) -> TrajectoryEnsemble:
    """Newtonian point particles from (position, momentum) pairs, RK4 on Hamilton's equations."""
    init = np.asarray(initials, dtype=float).reshape(-1, 2)
    x, p = init[:, 0].copy(), init[:, 1].copy()
    m = constants.mass
    n, dt = controls.n_steps, controls.dt
    stored = _stored_indices(n, controls.store_every)
    keep = np.zeros(n + 1, bool)
    keep[stored] = True
    out = np.empty((len(stored), x.size))
    out[0] = x
    row = 1

    def f(x, p):
        return p / m, potential.force(x, m)

    for k in range(n):
        k1x, k1p = f(x, p)
        k2x, k2p = f(x + 0.5 * dt * k1x, p + 0.5 * dt * k1p)
        k3x, k3p = f(x + 0.5 * dt * k2x, p + 0.5 * dt * k2p)
        k4x, k4p = f(x + dt * k3x, p + dt * k3p)
        x = x + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        p = p + dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
        if keep[k + 1]:
            out[row] = x
            row += 1
    if labels is None:
        labels = [(0, 0.0)] * x.size
    v_max = float(np.max(np.abs(np.diff(out, axis=0)) / np.diff(dt * stored)[:, None])) \
        if len(stored) > 1 else 0.0
    return TrajectoryEnsemble(times=dt * stored, paths=out, labels=list(labels),
                              kind="classical", v_max=v_max, propagation="classical")


def classical_initials(packets, positions, constants: Constants = NATURAL, labels=None):
    """(x, m v) pairs matching each Bohmian start on its source packet's field."""
    if labels is None:
        labels = label_positions(packets, positions, constants)
    out = []
    for x, (k, _) in zip(np.asarray(positions, dtype=float), labels):
        out.append((x, constants.mass * float(velocity_single(packets[k], x, constants))))
    return np.array(out)


# -- audits ----------------------------------------------------------------------

@dataclass(frozen=True)
class CrossingReport:
    passed: bool
    violations: int  # sample times with at least one ordering violation
    first_time: float | None = None
    first_pair: tuple | None = None

    def to_dict(self):
        return {"passed": self.passed, "violations": self.violations,
                "first_time": self.first_time,
                "first_pair": list(self.first_pair) if self.first_pair else None}


def non_crossing_audit(ensemble: TrajectoryEnsemble) -> CrossingReport:
    """Check that the initial left-to-right order of paths holds at every sample."""
    if ensemble.n_paths < 2:
        return CrossingReport(True, 0)
    order = np.argsort(ensemble.paths[0], kind="stable")
    ordered = ensemble.paths[:, order]
    bad = ~(np.diff(ordered, axis=1) > 0)
    rows = np.nonzero(bad.any(axis=1))[0]
    if rows.size == 0:
        return CrossingReport(True, 0)
    r = rows[0]
    j = int(np.nonzero(bad[r])[0][0])
    return CrossingReport(False, int(rows.size), float(ensemble.times[r]),
                          (int(order[j]), int(order[j + 1])))


@dataclass(frozen=True)
class NodeReport:
    t: float
    node_positions: tuple
    spacing: float | None
    expected_spacing: float | None = None

    @property
    def empty(self) -> bool:
        return not self.node_positions


def free_node_spacing(p0: float, constants: Constants = NATURAL) -> float:
    """pi hbar / p0 for a symmetric head-on free collision at momenta +-p0."""
    return math.pi * constants.hbar / abs(p0)


def harmonic_node_spacing(omega: float, x0: float, constants: Constants = NATURAL) -> float:
    """pi hbar / (m omega x0) for packets released from turning points +-x0."""
    return math.pi * constants.hbar / (constants.mass * omega * abs(x0))


def fringe_spacing(sup: SuperpositionState) -> float | None:
    """2 pi hbar / |p1 - p2|: the two cases above, evaluated at the overlap instant."""
    if len(sup.packets) != 2:
        return None
    dp = abs(sup.packets[0].p_t - sup.packets[1].p_t)
    return 2.0 * math.pi * sup.constants.hbar / dp if dp > 0 else None


def detect_nodes(sup: SuperpositionState, x_window, constants: Constants | None = None, *,
                 eps_node: float = EPS_NODE, overlap_threshold: float = 1e-6,
                 resolution: int | None = None) -> NodeReport:
    """Zeros of the summed wave function inside ``x_window``.

    Candidates are local minima of the density on a grid fine enough to
    resolve both the envelopes and the fringes; each is refined by bounded
    minimization and kept if the density there falls below ``eps_node`` both
    absolutely and relative to (|psi_1| + |psi_2|)^2, so that underflowing
    tails of a single packet do not count as nodes.
    """
    constants = constants or sup.constants
    lo, hi = map(float, x_window)
    expected = fringe_spacing(sup)
    if len(sup.packets) != 2:
        return NodeReport(sup.t, (), None, expected)
    a, b = sup.packets
    if resolution is None:
        scale = min(a.width(constants), b.width(constants))
        if expected:
            scale = min(scale, expected)
        resolution = int(min(max(64 * (hi - lo) / scale, 512), 2_000_000))
    x = np.linspace(lo, hi, resolution)
    n2 = sup.norm_factor**2
    hbar = constants.hbar
    pa = _packet_amplitude(a.as_tuple(), x, hbar)
    pb = _packet_amplitude(b.as_tuple(), x, hbar)
    rho = n2 * np.abs(pa + pb) ** 2
    cross = 2.0 * n2 * np.abs(pa) * np.abs(pb)
    if rho.max() <= 0 or cross.max() < overlap_threshold * rho.max():
        return NodeReport(sup.t, (), None, expected)
    cand = np.nonzero((rho[1:-1] < rho[:-2]) & (rho[1:-1] <= rho[2:]))[0] + 1
    nodes = []
    for i in cand:
        if not cross[i] > 0:
            continue
        res = minimize_scalar(lambda z: float(sup.density(z)), bounds=(x[i - 1], x[i + 1]),
                              method="bounded", options={"xatol": 1e-14})
        z = np.array([res.x])
        scale = n2 * float((np.abs(_packet_amplitude(a.as_tuple(), z, hbar))
                            + np.abs(_packet_amplitude(b.as_tuple(), z, hbar)))[0] ** 2)
        if res.fun < eps_node and res.fun <= eps_node * scale:
            nodes.append(float(res.x))
    nodes.sort()
    spacing = float(np.mean(np.diff(nodes))) if len(nodes) >= 2 else None
    return NodeReport(sup.t, tuple(nodes), spacing, expected)



def closest_approach(packets, lam: float, potential: Potential, controls: IntegrationControls,
                     constants: Constants = NATURAL):
    """Instant of closest centroid approach of two packets, and the superposition there.

    The grid minimum of |x1 - x2| is refined in continuous time: by root
    finding when the centroids pass through each other, otherwise by bounded
    minimization.  Returns (t, SuperpositionState, interior) where
    ``interior`` is False if the distance is smallest at either end.
    """
    packets = list(packets)
    if len(packets) != 2:
        raise DomainError("closest approach needs two packets")
    tracks = [make_track(p, lam, controls, potential, constants) for p in packets]
    t0, dt, n = packets[0].t, controls.dt, controls.n_steps
    gap = tracks[0]._grid[:, 0] - tracks[1]._grid[:, 0]
    # the first pass-through wins; otherwise the global minimum distance
    flips = np.nonzero((np.sign(gap[1:]) != np.sign(gap[:-1])) | (gap[1:] == 0.0))[0]
    k = int(flips[0] + 1) if flips.size else int(np.argmin(np.abs(gap)))

    def diff(t):
        return tracks[0].at(t)[0] - tracks[1].at(t)[0]

    t_best = t0 + k * dt
    interior = 0 < k < n
    if interior:
        lo, hi = t0 + (k - 1) * dt, t0 + (k + 1) * dt
        if gap[k] == 0.0:
            pass
        elif np.sign(gap[k - 1]) != np.sign(gap[k]):
            t_best = brentq(diff, lo, t_best, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        elif np.sign(gap[k + 1]) != np.sign(gap[k]):
            t_best = brentq(diff, t_best, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        else:
            t_best = minimize_scalar(lambda t: abs(diff(t)), bounds=(lo, hi), method="bounded",
                                     options={"xatol": 1e-13}).x
    states = tuple(GaussianState.from_tuple(t_best, tr.at(t_best)) for tr in tracks)
    return float(t_best), SuperpositionState(states, constants), interior


__all__ = [
    "CrossingReport", "EPS_NODE", "closest_approach", "NodeReport", "NodeSingularity", "SuperpositionState",
    "TrajectoryEnsemble", "V_CAP", "classical_ensemble", "classical_initials",
    "default_initials", "detect_nodes", "free_node_spacing", "fringe_spacing",
    "harmonic_node_spacing", "integrate_ensemble", "label_positions", "non_crossing_audit",
    "quantile_initials", "velocity_single", "velocity_superposition", "AnalyticPropagationRequired",
    "gamma_imag_from_alpha",
]
