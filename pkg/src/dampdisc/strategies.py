"""Discrimination strategies for a pair of amplitude damping channels.

Each strategy is exposed two ways where possible: a numeric construction
(channel outputs fed into the optimal-measurement machinery), which is the
ground truth, and a closed-form expression, kept as a regression surface and
cross-checked against the construction in the tests.  Batched private helpers
(suffix ``_batch``) exist so grid sweeps and the scalar maximizer can evaluate
thousands of parameter values in one numpy pass; they are validated against
the pointwise routes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import DampingChannel, InputState, SideEntangledInput
from .discrimination import (
    Povm,
    helstrom,
    helstrom_psucc,
    maximize_povm_2x2,
    maximize_scalar,
    pure_state_psucc,
)
from .linalg import hermitian_eig, projector, trace_norm

PSUCC_SLACK = 1e-9
ZERO_BRANCH_TOL = 1e-12  # squared norm below which an outcome is impossible
WEIGHT_SLACK = 1e-10
COMPLEMENT_TOL = 1e-12
SCHMIDT_PRODUCT_TOL = 1e-8
INV_SQRT2 = 1.0 / math.sqrt(2.0)

TWO_SHOT_GRID_POINTS = 513  # 4x4 trace norms have eigenvalue-crossing kinks


@dataclass(frozen=True)
class ChannelPair:
    """Two damping angles, stronger damping first.

    The constructor swaps the angles if given in increasing order and records
    the swap, so every downstream formula can assume eta0 >= eta1.
    """

    eta0: float
    eta1: float
    swapped: bool = field(init=False, default=False)

    def __post_init__(self) -> None:
        for name, value in (("eta0", self.eta0), ("eta1", self.eta1)):
            if not 0.0 <= value <= math.pi / 2:
                raise ValueError(f"{name} must lie in [0, pi/2], got {value}")
        if self.eta1 > self.eta0:
            hi, lo = self.eta1, self.eta0
            object.__setattr__(self, "eta0", hi)
            object.__setattr__(self, "eta1", lo)
            object.__setattr__(self, "swapped", True)

    @property
    def gamma(self) -> float:
        return math.cos(self.eta1) + math.cos(self.eta0)

    @property
    def channel0(self) -> DampingChannel:
        return DampingChannel(self.eta0)

    @property
    def channel1(self) -> DampingChannel:
        return DampingChannel(self.eta1)

    def output_pair(self, x: float) -> tuple[np.ndarray, np.ndarray]:
        """Single-use channel outputs for the probe with excited weight x."""
        inp = InputState(x)
        return self.channel0.output_state(inp), self.channel1.output_state(inp)


@dataclass(frozen=True)
class StrategyResult:
    """Optimized success probability with the parameters that achieve it."""

    psucc: float
    params: dict
    measurement: dict | None = None

    def __post_init__(self) -> None:
        if not 0.5 - PSUCC_SLACK <= self.psucc <= 1.0 + PSUCC_SLACK:
            raise ValueError(f"success probability {self.psucc!r} outside [1/2, 1]")


@dataclass(frozen=True)
class FeedbackTerms:
    """Ingredients of the printed feedback success formula."""

    chi: float
    mu: float
    nu: float
    c0: float
    c1: float

    def __post_init__(self) -> None:
        for name, v in (("chi", self.chi), ("c0", self.c0), ("c1", self.c1)):
            if not -WEIGHT_SLACK <= v <= 1.0 + WEIGHT_SLACK:
                raise ValueError(f"{name} must be a probability, got {v}")


@dataclass(frozen=True)
class ConditionalBranches:
    """System states conditioned on the environment outcome.

    ``norm_*`` are amplitude norms: their squares are the outcome
    probabilities.  A state is None when its outcome has probability zero.
    """

    state_plus: np.ndarray | None
    norm_plus: float
    state_minus: np.ndarray | None
    norm_minus: float


@dataclass(frozen=True)
class PosteriorWeights:
    """Outcome likelihoods of the first-copy projective measurement."""

    p0: float
    q0: float
    p1: float
    q1: float

    def __post_init__(self) -> None:
        for name, v in (("p0", self.p0), ("q0", self.q0), ("p1", self.p1), ("q1", self.q1)):
            if not -WEIGHT_SLACK <= v <= 1.0 + WEIGHT_SLACK:
                raise ValueError(f"{name} must be a probability, got {v}")


@dataclass(frozen=True)
class BackwardWeights:
    """First-copy outcome likelihoods for a general two-outcome effect."""

    r0: float
    s0: float
    r1: float
    s1: float

    def __post_init__(self) -> None:
        if abs(self.r1 - (1.0 - self.s0)) > COMPLEMENT_TOL:
            raise ValueError("r1 must complement s0")
        if abs(self.s1 - (1.0 - self.r0)) > COMPLEMENT_TOL:
            raise ValueError("s1 must complement r0")


@dataclass(frozen=True)
class PolarCurvePoint:
    """Separation from the ground state in polar form: angle encodes the input."""

    theta: float
    radius: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= math.pi / 2:
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta}")
        if not -WEIGHT_SLACK <= self.radius <= 2.0 + WEIGHT_SLACK:
            raise ValueError(f"radius must lie in [0, 2], got {self.radius}")


# ---------------------------------------------------------------------------
# batched building blocks


def _trace_norm_2x2(t: np.ndarray, det: np.ndarray) -> np.ndarray:
    """Trace norm of Hermitian 2x2 matrices from trace and determinant."""
    return np.maximum(np.abs(t), np.sqrt(np.maximum(t * t - 4.0 * det, 0.0)))


def _output_entries(eta: float, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Entries (00, 01, 11) of the single-use output, broadcast over x."""
    c = math.cos(eta)
    off = c * np.sqrt(np.clip(x * (1.0 - x), 0.0, None))
    pop = x * c * c
    return 1.0 - pop, off, pop


# ---------------------------------------------------------------------------
# single use, bare probe


def one_shot_psucc(pair: ChannelPair, x) -> float | np.ndarray:
    """Closed-form success probability for a bare probe with excited weight x."""
    xs = np.asarray(x, dtype=float)
    dc = math.cos(pair.eta1) - math.cos(pair.eta0)
    radicand = np.clip(xs * (1.0 - xs * (1.0 - pair.gamma**2)), 0.0, None)
    out = 0.5 * (1.0 + dc * np.sqrt(radicand))
    return out if xs.ndim else float(out)


def one_shot_psucc_numeric(pair: ChannelPair, x: float) -> float:
    """Same quantity from channel outputs and the optimal binary measurement."""
    rho0, rho1 = pair.output_pair(x)
    return helstrom_psucc(rho0, rho1)


def _one_shot_values_batch(pair: ChannelPair, xs: np.ndarray) -> np.ndarray:
    a0, b0, _ = _output_entries(pair.eta0, xs)
    a1, b1, _ = _output_entries(pair.eta1, xs)
    # the difference is traceless, so its trace norm is 2*hypot of the entries
    return 0.5 + 0.5 * np.hypot(a0 - a1, b0 - b1)


def one_shot_optimal(pair: ChannelPair) -> StrategyResult:
    """Closed-form optimum over the probe weight x."""
    g = pair.gamma
    dc = math.cos(pair.eta1) - math.cos(pair.eta0)
    if g < INV_SQRT2:
        x_star = 1.0 / (2.0 * (1.0 - g * g))
        psucc = 0.25 * (2.0 + dc / math.sqrt(1.0 - g * g))
    else:
        x_star = 1.0
        psucc = 0.5 * (math.sin(pair.eta0) ** 2 + math.cos(pair.eta1) ** 2)
    return StrategyResult(psucc=psucc, params={"x": x_star})


def one_shot_optimal_numeric(pair: ChannelPair) -> tuple[float, float]:
    return maximize_scalar(
        lambda xs: _one_shot_values_batch(pair, xs), 0.0, 1.0, vectorized=True
    )


def damping_polar_curve(eta1: float, n_points: int) -> list[PolarCurvePoint]:
    """Separation of the damped probe from the ground state, on a theta grid.

    theta parametrizes the probe via x = sin(theta)^2; the radius is the trace
    norm of (ground-state projector minus damped output).
    """
    if n_points < 2:
        raise ValueError(f"n_points must be >= 2, got {n_points}")
    ch = DampingChannel(eta1)
    ground = np.diag([1.0, 0.0]).astype(complex)
    points = []
    for theta in np.linspace(0.0, math.pi / 2, n_points):
        x = math.sin(theta) ** 2
        radius = trace_norm(ground - ch.output_state(InputState(x)))
        points.append(PolarCurvePoint(theta=float(theta), radius=radius))
    return points


# ---------------------------------------------------------------------------
# single use, entangled reference


def side_ent_psucc(pair: ChannelPair, y: float) -> float:
    """Success probability with an idle reference qubit, measured jointly."""
    inp = SideEntangledInput(y)
    out0 = pair.channel0.side_entangled_output(inp)
    out1 = pair.channel1.side_entangled_output(inp)
    return helstrom_psucc(out0, out1)


def _side_values_batch(pair: ChannelPair, ys: np.ndarray) -> np.ndarray:
    s0sq, s1sq = math.sin(pair.eta0) ** 2, math.sin(pair.eta1) ** 2
    c0, c1 = math.cos(pair.eta0), math.cos(pair.eta1)
    ys = np.asarray(ys, dtype=float)
    delta = np.zeros(ys.shape + (4, 4))
    a = (1.0 - ys) * (s0sq - s1sq)
    b = (c0 - c1) * np.sqrt(np.clip(ys * (1.0 - ys), 0.0, None))
    delta[..., 0, 0] = a
    delta[..., 1, 1] = -a
    delta[..., 1, 2] = delta[..., 2, 1] = b
    return 0.5 + 0.25 * np.abs(np.linalg.eigvalsh(delta)).sum(axis=-1)


def side_ent_gain_expression(pair: ChannelPair, y) -> float | np.ndarray:
    """Closed-form separation between the two reference-assisted outputs.

    This is the trace norm of the output difference; the success probability
    is 1/2 plus a quarter of it.
    """
    ys = np.asarray(y, dtype=float)
    dc = math.cos(pair.eta1) - math.cos(pair.eta0)
    g = pair.gamma
    inner = (1.0 - ys) * (4.0 * ys + (1.0 - ys) * g * g)
    out = dc * ((1.0 - ys) * g + np.sqrt(np.clip(inner, 0.0, None)))
    return out if ys.ndim else float(out)


def side_ent_optimal(pair: ChannelPair) -> StrategyResult:
    """Closed-form optimal reference weight, success probability evaluated numerically."""
    g = pair.gamma
    y_star = 0.0 if g >= 2.0 else max(0.0, (g - 1.0) / (g - 2.0))
    return StrategyResult(psucc=side_ent_psucc(pair, y_star), params={"y": y_star})


def side_ent_optimal_numeric(pair: ChannelPair) -> tuple[float, float]:
    return maximize_scalar(
        lambda ys: _side_values_batch(pair, ys), 0.0, 1.0, vectorized=True
    )


# ---------------------------------------------------------------------------
# single use, environment feedback


def feedback_conditional_states(ch: DampingChannel, x: float, alpha: float) -> ConditionalBranches:
    """Project the dilation output on an environment basis tilted by alpha.

    The basis is (cos a, sin a) / (-sin a, cos a).  Returned norms are the
    amplitude norms of the unnormalized projected states; a branch whose
    squared norm is below tolerance carries no state.
    """
    if not 0.0 <= alpha <= math.pi / 2:
        raise ValueError(f"alpha must lie in [0, pi/2], got {alpha}")
    psi = InputState(x).ket()
    joint = ch.dilation_unitary() @ np.kron(psi, np.array([1.0, 0.0]))
    env0 = joint[0::2]  # system amplitudes with environment in |0>
    env1 = joint[1::2]
    ca, sa = math.cos(alpha), math.sin(alpha)
    raw_plus = ca * env0 + sa * env1
    raw_minus = -sa * env0 + ca * env1

    def normalize(raw: np.ndarray) -> tuple[np.ndarray | None, float]:
        norm = float(np.linalg.norm(raw))
        if norm * norm < ZERO_BRANCH_TOL:
            return None, norm
        return raw / norm, norm

    state_plus, norm_plus = normalize(raw_plus)
    state_minus, norm_minus = normalize(raw_minus)
    return ConditionalBranches(
        state_plus=state_plus,
        norm_plus=norm_plus,
        state_minus=state_minus,
        norm_minus=norm_minus,
    )


def feedback_psucc(pair: ChannelPair, x: float, alpha: float) -> float:
    """Environment-outcome-conditioned discrimination, built from the branches.

    Each environment outcome is followed by the optimal equal-prior
    measurement between the two conditional pure states; outcomes of
    probability zero contribute nothing, and an outcome reachable under only
    one hypothesis identifies the channel outright.
    """
    br0 = feedback_conditional_states(pair.channel0, x, alpha)
    br1 = feedback_conditional_states(pair.channel1, x, alpha)
    total = 0.0
    for s0, n0, s1, n1 in (
        (br0.state_plus, br0.norm_plus, br1.state_plus, br1.norm_plus),
        (br0.state_minus, br0.norm_minus, br1.state_minus, br1.norm_minus),
    ):
        weight = 0.5 * (n0 * n0 + n1 * n1)
        if weight <= ZERO_BRANCH_TOL:
            continue
        if s0 is None or s1 is None:
            total += weight  # only one hypothesis can produce this outcome
        else:
            total += weight * pure_state_psucc(s0, s1)
    return total


def _feedback_values_batch(pair: ChannelPair, x, alpha) -> np.ndarray:
    """Same protocol value as feedback_psucc, vectorized over (x, alpha)."""
    xs, als = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(alpha, dtype=float))
    s0, c0 = math.sin(pair.eta0), math.cos(pair.eta0)
    s1, c1 = math.sin(pair.eta1), math.cos(pair.eta1)
    dc_sq = (c1 - c0) ** 2
    sd_sq = math.sin(pair.eta0 - pair.eta1) ** 2
    ca2 = np.cos(als) ** 2
    sa2 = np.sin(als) ** 2

    def branch(csq: np.ndarray, ssq: np.ndarray) -> np.ndarray:
        # csq/ssq are cos^2/sin^2 of alpha for this branch; the Gram
        # determinant of the two unnormalized conditional states reduces, for
        # two-component vectors, to the squared modulus of their 2x2
        # determinant, which avoids the cancellation of norms minus overlap
        n0sq = csq * (1.0 - xs * s0 * s0) + ssq * xs * s0 * s0
        n1sq = csq * (1.0 - xs * s1 * s1) + ssq * xs * s1 * s1
        gram = csq * xs * (csq * (1.0 - xs) * dc_sq + ssq * xs * sd_sq)
        prod = n0sq * n1sq
        weight = 0.5 * (n0sq + n1sq)
        safe = prod > ZERO_BRANCH_TOL * ZERO_BRANCH_TOL
        scaled = np.sqrt(np.clip(gram, 0.0, None) / np.where(safe, prod, 1.0))
        return np.where(safe, 0.5 * weight + 0.25 * (n0sq + n1sq) * np.minimum(scaled, 1.0), weight)

    return branch(ca2, sa2) + branch(sa2, ca2)


def feedback_terms(pair: ChannelPair, x: float, alpha: float) -> FeedbackTerms:
    """Scalar ingredients of the printed feedback formula."""
    s0sq, s1sq = math.sin(pair.eta0) ** 2, math.sin(pair.eta1) ** 2
    c0, c1 = math.cos(pair.eta0), math.cos(pair.eta1)
    s0, s1 = math.sin(pair.eta0), math.sin(pair.eta1)
    c2a = math.cos(2.0 * alpha)
    chi = 0.5 - 0.5 * c2a * (1.0 - x * (s0sq + s1sq))
    mu = 1.0 + (2.0 * x - 1.0) * c0 * c1 + s0 * s1
    nu = c2a * ((2.0 * x - 1.0) + c0 * c1 + (2.0 * x - 1.0) * s0 * s1)
    cc0 = 0.5 - 0.5 * c2a * (1.0 - 2.0 * x * s0sq)
    cc1 = 0.5 - 0.5 * c2a * (1.0 - 2.0 * x * s1sq)
    return FeedbackTerms(chi=chi, mu=mu, nu=nu, c0=cc0, c1=cc1)


def feedback_psucc_closed_form(pair: ChannelPair, x: float, alpha: float) -> float:
    """Printed closed form of the feedback success probability.

    Only defined away from degenerate branch probabilities (both outcome
    likelihoods strictly inside (0, 1)); the constructed feedback_psucc is
    authoritative elsewhere.
    """
    t = feedback_terms(pair, x, alpha)
    if min(t.c0, t.c1, 1.0 - t.c0, 1.0 - t.c1) < 1e-9:
        raise ValueError("branch probability too close to 0 or 1 for the closed form")
    half_sin = math.sin((pair.eta0 - pair.eta1) / 2.0)
    first = 0.5 * t.chi * (
        1.0
        + math.sin(alpha) * half_sin * math.sqrt(max(x * (t.mu + t.nu), 0.0) / (t.c0 * t.c1))
    )
    second = 0.5 * (1.0 - t.chi) * (
        1.0
        + math.cos(alpha)
        * half_sin
        * math.sqrt(max(x * (t.mu - t.nu), 0.0) / ((1.0 - t.c0) * (1.0 - t.c1)))
    )
    return first + second


def feedback_optimal(pair: ChannelPair) -> StrategyResult:
    """Best over probe weight and environment basis: excited probe, balanced basis."""
    psucc = 0.5 * (1.0 + math.sin(pair.eta0 - pair.eta1))
    return StrategyResult(psucc=psucc, params={"x": 1.0, "alpha": math.pi / 4})


def feedback_optimal_numeric(
    pair: ChannelPair, grid_points: int = 129, rounds: int = 3
) -> tuple[float, float, float]:
    """Coordinate-ascent maximization over (x, alpha); returns (x, alpha, value).

    Seeded by a coarse joint grid; equivalent mirrored maxima in alpha resolve
    to the smallest alpha through the first-maximum convention of the scans.
    """
    xs = np.linspace(0.0, 1.0, 33)
    als = np.linspace(0.0, math.pi / 2, 33)
    coarse = _feedback_values_batch(pair, xs[:, None], als[None, :])
    i, j = np.unravel_index(int(np.argmax(coarse)), coarse.shape)
    best_x, best_alpha = float(xs[i]), float(als[j])
    best_val = float(coarse[i, j])
    for _ in range(rounds):
        x_new, val = maximize_scalar(
            lambda t: _feedback_values_batch(pair, t, best_alpha),
            0.0,
            1.0,
            grid_points=grid_points,
            vectorized=True,
        )
        if val > best_val:
            best_x, best_val = x_new, val
        alpha_new, val = maximize_scalar(
            lambda t: _feedback_values_batch(pair, best_x, t),
            0.0,
            math.pi / 2,
            grid_points=grid_points,
            vectorized=True,
        )
        if val > best_val:
            best_alpha, best_val = alpha_new, val
    return best_x, best_alpha, best_val


# ---------------------------------------------------------------------------
# two uses, entangled or product probes, collective measurement


def two_shot_entangled_psucc(pair: ChannelPair, variant: str, x: float) -> float:
    """Collective discrimination of the two-probe entangled input outputs."""
    out0 = pair.channel0.two_shot_entangled_output(variant, x)
    out1 = pair.channel1.two_shot_entangled_output(variant, x)
    return helstrom_psucc(out0, out1)


def _two_shot_ent_values_batch(pair: ChannelPair, variant: str, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    delta = np.zeros(xs.shape + (4, 4))
    root = np.sqrt(np.clip(xs * (1.0 - xs), 0.0, None))
    if variant == "odd":
        for sign, eta in ((1.0, pair.eta0), (-1.0, pair.eta1)):
            c2, s2 = math.cos(eta) ** 2, math.sin(eta) ** 2
            delta[..., 0, 0] += sign * s2
            delta[..., 1, 1] += sign * (1.0 - xs) * c2
            delta[..., 2, 2] += sign * xs * c2
            off = sign * c2 * root
            delta[..., 1, 2] += off
            delta[..., 2, 1] += off
    elif variant == "even":
        for sign, eta in ((1.0, pair.eta0), (-1.0, pair.eta1)):
            c2, s2 = math.cos(eta) ** 2, math.sin(eta) ** 2
            delta[..., 0, 0] += sign * ((1.0 - xs) + xs * s2 * s2)
            delta[..., 1, 1] += sign * xs * c2 * s2
            delta[..., 2, 2] += sign * xs * c2 * s2
            delta[..., 3, 3] += sign * xs * c2 * c2
            off = sign * c2 * root
            delta[..., 0, 3] += off
            delta[..., 3, 0] += off
    else:
        raise ValueError(f"variant must be 'odd' or 'even', got {variant!r}")
    return 0.5 + 0.25 * np.abs(np.linalg.eigvalsh(delta)).sum(axis=-1)


def two_shot_entangled_optimal(pair: ChannelPair, variant: str) -> StrategyResult:
    x_star, psucc = maximize_scalar(
        lambda xs: _two_shot_ent_values_batch(pair, variant, xs),
        0.0,
        1.0,
        grid_points=TWO_SHOT_GRID_POINTS,
        vectorized=True,
    )
    return StrategyResult(psucc=psucc, params={"x": x_star})


def two_shot_product_psucc(pair: ChannelPair, x: float) -> float:
    """Collective discrimination of the twice-repeated bare probe outputs."""
    rho0, rho1 = pair.output_pair(x)
    return helstrom_psucc(np.kron(rho0, rho0), np.kron(rho1, rho1))


def _product_delta_batch(pair: ChannelPair, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    delta = np.zeros(xs.shape + (4, 4))
    for sign, eta in ((1.0, pair.eta0), (-1.0, pair.eta1)):
        a, b, d = _output_entries(eta, xs)
        rho = np.empty(xs.shape + (2, 2))
        rho[..., 0, 0] = a
        rho[..., 0, 1] = rho[..., 1, 0] = b
        rho[..., 1, 1] = d
        delta += sign * np.einsum("...ij,...kl->...ikjl", rho, rho).reshape(xs.shape + (4, 4))
    return delta


def _two_shot_product_values_batch(pair: ChannelPair, xs: np.ndarray) -> np.ndarray:
    delta = _product_delta_batch(pair, xs)
    return 0.5 + 0.25 * np.abs(np.linalg.eigvalsh(delta)).sum(axis=-1)


def _schmidt_second_singular_values(delta: np.ndarray) -> list[float]:
    dec = hermitian_eig(delta)
    out = []
    for k in range(4):
        amp = dec.vector(k).reshape(2, 2)
        out.append(float(np.linalg.svd(amp, compute_uv=False)[1]))
    return out


def two_shot_product_optimal(pair: ChannelPair) -> StrategyResult:
    """Optimal probe weight for the repeated bare probe, collective measurement.

    The measurement description reports whether all four optimal-measurement
    eigenvectors are product states (second Schmidt coefficient below
    tolerance), i.e. whether the collective measurement is secretly local.
    """
    x_star, psucc = maximize_scalar(
        lambda xs: _two_shot_product_values_batch(pair, xs),
        0.0,
        1.0,
        grid_points=TWO_SHOT_GRID_POINTS,
        vectorized=True,
    )
    if psucc - 0.5 <= PSUCC_SLACK:
        # indistinguishable pair: the objective is flat, pin the boundary probe
        x_star = 1.0
    seconds = _schmidt_second_singular_values(_product_delta_batch(pair, np.asarray(x_star)))
    local = all(s <= SCHMIDT_PRODUCT_TOL for s in seconds)
    return StrategyResult(
        psucc=psucc,
        params={"x": x_star},
        measurement={"local": local, "second_schmidt_coefficients": tuple(seconds)},
    )


# ---------------------------------------------------------------------------
# two uses, individual measurements, outcome-driven second step


def posterior_weights(pair: ChannelPair, x: float) -> PosteriorWeights:
    """Outcome likelihoods of measuring the first copy in the difference eigenbasis."""
    rho0, rho1 = pair.output_pair(x)
    dec = hermitian_eig(rho0 - rho1)
    v0, v1 = dec.vector(0), dec.vector(1)
    return PosteriorWeights(
        p0=float(np.vdot(v0, rho0 @ v0).real),
        q0=float(np.vdot(v0, rho1 @ v0).real),
        p1=float(np.vdot(v1, rho1 @ v1).real),
        q1=float(np.vdot(v1, rho0 @ v1).real),
    )


def adaptive_forward_psucc(pair: ChannelPair, x: float) -> float:
    """First copy measured projectively, second measurement reweighted by the outcome.

    Uses the identity P = 1/2 + (|| p0 rho0 - q0 rho1 ||_1
    + || q1 rho0 - p1 rho1 ||_1) / 4, which absorbs the posterior
    normalizations and stays finite for impossible outcomes.
    """
    rho0, rho1 = pair.output_pair(x)
    w = posterior_weights(pair, x)
    return 0.5 + 0.25 * (
        trace_norm(w.p0 * rho0 - w.q0 * rho1) + trace_norm(w.q1 * rho0 - w.p1 * rho1)
    )


def _adaptive_forward_values_batch(pair: ChannelPair, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    a0, b0, d0 = _output_entries(pair.eta0, xs)
    a1, b1, d1 = _output_entries(pair.eta1, xs)
    diff_a = a0 - a1
    diff_b = b0 - b1
    r = np.hypot(diff_a, diff_b)
    # eigenvector of [[A, B], [B, -A]] for +r, branch chosen for stability
    big = diff_a >= 0.0
    u0 = np.where(big, r + diff_a, diff_b)
    u1 = np.where(big, diff_b, r - diff_a)
    nrm = np.hypot(u0, u1)
    ok = nrm > 1e-300
    u0 = np.where(ok, u0 / np.where(ok, nrm, 1.0), 1.0)
    u1 = np.where(ok, u1 / np.where(ok, nrm, 1.0), 0.0)

    p0 = u0 * u0 * a0 + 2.0 * u0 * u1 * b0 + u1 * u1 * d0
    q0 = u0 * u0 * a1 + 2.0 * u0 * u1 * b1 + u1 * u1 * d1
    q1 = u1 * u1 * a0 - 2.0 * u0 * u1 * b0 + u0 * u0 * d0
    p1 = u1 * u1 * a1 - 2.0 * u0 * u1 * b1 + u0 * u0 * d1

    def norm_of(w0, w1):
        m00 = w0 * a0 - w1 * a1
        m01 = w0 * b0 - w1 * b1
        m11 = w0 * d0 - w1 * d1
        return _trace_norm_2x2(m00 + m11, m00 * m11 - m01 * m01)

    return 0.5 + 0.25 * (norm_of(p0, q0) + norm_of(q1, p1))


def adaptive_forward_optimal(pair: ChannelPair) -> StrategyResult:
    x_star, psucc = maximize_scalar(
        lambda xs: _adaptive_forward_values_batch(pair, xs), 0.0, 1.0, vectorized=True
    )
    return StrategyResult(psucc=psucc, params={"x": x_star})


# ---------------------------------------------------------------------------
# two uses, individual measurements, environment feedback on each copy


def adaptive_feedback_psucc(pair: ChannelPair) -> float:
    """Two copies, each with environment feedback, outcome-reweighted second step.

    Probe fixed fully excited and environment basis balanced (the single-copy
    feedback optimum); every stage then deals in pure conditional states.
    """
    alpha = math.pi / 4
    br0 = feedback_conditional_states(pair.channel0, 1.0, alpha)
    br1 = feedback_conditional_states(pair.channel1, 1.0, alpha)
    branches = []
    for s0, n0, s1, n1 in (
        (br0.state_plus, br0.norm_plus, br1.state_plus, br1.norm_plus),
        (br0.state_minus, br0.norm_minus, br1.state_minus, br1.norm_minus),
    ):
        if s0 is None or s1 is None:
            raise ArithmeticError("conditional branch unexpectedly empty")
        branches.append((s0, n0 * n0, s1, n1 * n1))

    total = 0.0
    for phi0_first, w0_first, phi1_first, w1_first in branches:
        dec = hermitian_eig(projector(phi0_first) - projector(phi1_first))
        for k in range(2):
            v = dec.vector(k)
            joint0 = 0.5 * w0_first * abs(np.vdot(v, phi0_first)) ** 2
            joint1 = 0.5 * w1_first * abs(np.vdot(v, phi1_first)) ** 2
            for phi0_second, w0_second, phi1_second, w1_second in branches:
                u0 = joint0 * w0_second
                u1 = joint1 * w1_second
                gap = trace_norm(u0 * projector(phi0_second) - u1 * projector(phi1_second))
                total += 0.5 * (u0 + u1 + gap)
    return total


def adaptive_feedback_closed_form(pair: ChannelPair) -> float:
    d = pair.eta0 - pair.eta1
    return 0.5 * (1.0 + math.sin(d) * math.sqrt(1.0 + math.cos(d) ** 2))


# ---------------------------------------------------------------------------
# two uses, individual measurements, first step a general two-outcome effect


def backward_weights(rho0: np.ndarray, rho1: np.ndarray, effect: np.ndarray) -> BackwardWeights:
    r0 = float(np.trace(rho0 @ effect).real)
    s0 = float(np.trace(rho1 @ effect).real)
    return BackwardWeights(r0=r0, s0=s0, r1=1.0 - s0, s1=1.0 - r0)


def _backward_value(rho0: np.ndarray, rho1: np.ndarray, w: BackwardWeights) -> float:
    return 0.5 + 0.25 * (
        trace_norm(w.r0 * rho0 - w.s0 * rho1) + trace_norm(w.r1 * rho1 - w.s1 * rho0)
    )


def backward_adaptive_measurement(pair: ChannelPair, x: float) -> tuple[Povm, float]:
    """Best first-copy two-outcome effect, second step outcome-reweighted.

    The search is seeded with the projective first-copy measurement, so the
    result never falls below the forward strategy at the same probe weight.
    """
    rho0, rho1 = pair.output_pair(x)
    a0, d0 = rho0[0, 0].real, rho0[1, 1].real
    a1, d1 = rho1[0, 0].real, rho1[1, 1].real
    b0, b1 = rho0[0, 1], rho1[0, 1]

    def batch(effects: np.ndarray) -> np.ndarray:
        r0 = np.einsum("ij,...ji->...", rho0, effects).real
        s0 = np.einsum("ij,...ji->...", rho1, effects).real
        t = r0 - s0
        m00 = r0 * a0 - s0 * a1
        m01 = r0 * b0 - s0 * b1
        m11 = r0 * d0 - s0 * d1
        first = _trace_norm_2x2(t, m00 * m11 - np.abs(m01) ** 2)
        k00 = (1.0 - s0) * a1 - (1.0 - r0) * a0
        k01 = (1.0 - s0) * b1 - (1.0 - r0) * b0
        k11 = (1.0 - s0) * d1 - (1.0 - r0) * d0
        second = _trace_norm_2x2(-t, k00 * k11 - np.abs(k01) ** 2)
        return 0.5 + 0.25 * (first + second)

    def objective(povm: Povm) -> float:
        return _backward_value(rho0, rho1, backward_weights(rho0, rho1, povm.effects[0]))

    hel = helstrom(rho0, rho1)
    return maximize_povm_2x2(
        objective,
        seeds=(hel.projector_plus, hel.projector_minus),
        batch_objective=batch,
    )


def backward_adaptive_psucc(pair: ChannelPair, x: float) -> float:
    return backward_adaptive_measurement(pair, x)[1]


def backward_adaptive_optimal(pair: ChannelPair, grid_points: int = 65) -> tuple[float, float]:
    return maximize_scalar(
        lambda x: backward_adaptive_psucc(pair, x), 0.0, 1.0, grid_points=grid_points, tol=1e-6
    )


def fwd_bwd_difference(pair: ChannelPair) -> float:
    """max-over-x forward value minus max-over-x backward value (signed)."""
    forward = adaptive_forward_optimal(pair)
    _, bwd = backward_adaptive_optimal(pair)
    bwd = max(bwd, backward_adaptive_psucc(pair, forward.params["x"]))
    return forward.psucc - bwd


# ---------------------------------------------------------------------------
# two uses in sequence


def sequential_effective_pair(pair: ChannelPair) -> ChannelPair:
    """Damping twice equals damping once with squared survival amplitude."""
    return ChannelPair(
        eta0=math.acos(min(1.0, math.cos(pair.eta0) ** 2)),
        eta1=math.acos(min(1.0, math.cos(pair.eta1) ** 2)),
    )


def sequential_two_shot_psucc(pair: ChannelPair, x: float) -> float:
    """Both copies applied back to back to one probe, then a single measurement."""
    inp = InputState(x)
    out0 = pair.channel0.apply(pair.channel0.output_state(inp))
    out1 = pair.channel1.apply(pair.channel1.output_state(inp))
    return helstrom_psucc(out0, out1)


def sequential_two_shot_optimal(pair: ChannelPair) -> StrategyResult:
    eff = sequential_effective_pair(pair)
    x_star, psucc = maximize_scalar(
        lambda xs: _one_shot_values_batch(eff, xs), 0.0, 1.0, vectorized=True
    )
    return StrategyResult(psucc=psucc, params={"x": x_star})
