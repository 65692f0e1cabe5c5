"""Minimum-error two-hypothesis discrimination primitives.

Contains the optimal binary measurement for arbitrary priors, the pure-state
overlap bound, derivative-free maximizers (scalar and two-outcome qubit POVM),
and a deterministic Monte Carlo engine for finite measurement trees.  All
optimizers are grid + golden-section: the objectives downstream involve trace
norms, which are only piecewise smooth (kinks at eigenvalue crossings), so
derivative-based methods are the wrong tool.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .linalg import check_density_matrix, check_pure_state, hermitian_eig, projector, trace_norm

PRIOR_SUM_TOL = 1e-12
POVM_SUM_TOL = 1e-10
POVM_EIGENVALUE_SLACK = 1e-10
OUTCOME_PROB_TOL = 1e-9

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

# one Monte Carlo chunk; chunk index seeds the generator, so the estimate is a
# pure function of (seed, trials) no matter how chunks are spread over workers
MC_CHUNK = 65536


@dataclass(frozen=True)
class PriorPair:
    """Prior probabilities of the two hypotheses."""

    p0: float
    p1: float

    def __post_init__(self) -> None:
        if self.p0 < 0.0 or self.p1 < 0.0:
            raise ValueError(f"priors must be nonnegative, got ({self.p0}, {self.p1})")
        if abs(self.p0 + self.p1 - 1.0) > PRIOR_SUM_TOL:
            raise ValueError(f"priors must sum to 1, got {self.p0 + self.p1!r}")


EQUAL_PRIORS = PriorPair(0.5, 0.5)


@dataclass(frozen=True)
class HelstromResult:
    """Optimal binary measurement: success probability plus its projectors."""

    psucc: float
    projector_plus: np.ndarray
    projector_minus: np.ndarray


def helstrom(rho0: np.ndarray, rho1: np.ndarray, priors: PriorPair = EQUAL_PRIORS) -> HelstromResult:
    """Minimum-error measurement between two density matrices.

    Projects onto the nonnegative / negative eigenspaces of
    p0*rho0 - p1*rho1; zero eigenvalues are assigned to the plus projector
    (the success probability does not care, golden tests do).
    """
    r0 = check_density_matrix(rho0, name="rho0")
    r1 = check_density_matrix(rho1, name="rho1")
    if r0.shape != r1.shape:
        raise ValueError(f"dimension mismatch: {r0.shape} vs {r1.shape}")
    dec = hermitian_eig(priors.p0 * r0 - priors.p1 * r1)
    dim = r0.shape[0]
    plus = np.zeros((dim, dim), dtype=complex)
    minus = np.zeros((dim, dim), dtype=complex)
    for i, lam in enumerate(dec.eigenvalues):
        target = plus if lam >= 0.0 else minus
        target += projector(dec.vector(i))
    psucc = float(
        (priors.p0 * np.trace(r0 @ plus) + priors.p1 * np.trace(r1 @ minus)).real
    )
    return HelstromResult(psucc=psucc, projector_plus=plus, projector_minus=minus)


def helstrom_psucc(rho0: np.ndarray, rho1: np.ndarray, priors: PriorPair = EQUAL_PRIORS) -> float:
    """Success probability alone: (1 + ||p0 rho0 - p1 rho1||_1) / 2."""
    r0 = check_density_matrix(rho0, name="rho0")
    r1 = check_density_matrix(rho1, name="rho1")
    if r0.shape != r1.shape:
        raise ValueError(f"dimension mismatch: {r0.shape} vs {r1.shape}")
    return 0.5 * (1.0 + trace_norm(priors.p0 * r0 - priors.p1 * r1))


def pure_state_psucc(a: np.ndarray, b: np.ndarray) -> float:
    """Equal-prior optimum for two pure states: (1 + sqrt(1 - |<a|b>|^2)) / 2.

    1 - |<a|b>|^2 is evaluated as sum_{i<j} |a_i b_j - a_j b_i|^2, which is
    the same quantity for unit vectors but does not cancel catastrophically
    when the states nearly coincide.
    """
    va = check_pure_state(a, name="a")
    vb = check_pure_state(b, name="b")
    if va.shape != vb.shape:
        raise ValueError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    cross = np.outer(va, vb)
    cross = cross - cross.T
    gram = 0.5 * float(np.sum(np.abs(cross) ** 2))
    return 0.5 * (1.0 + math.sqrt(min(1.0, gram)))


def _golden_section(f: Callable[[float], float], a: float, b: float, tol: float) -> tuple[float, float]:
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def maximize_scalar(
    f: Callable,
    lo: float,
    hi: float,
    *,
    grid_points: int = 257,
    tol: float = 1e-9,
    vectorized: bool = False,
) -> tuple[float, float]:
    """Deterministic scalar maximization: coarse grid, then golden refinement.

    Ties go to the smallest argument (a constant function returns ``lo``).
    With ``vectorized=True`` the objective is called once on the whole grid.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    xs = np.linspace(lo, hi, grid_points)
    if vectorized:
        ys = np.asarray(f(xs), dtype=float)
        scalar_f = lambda x: float(f(np.array([x]))[0])  # noqa: E731
    else:
        ys = np.array([f(x) for x in xs], dtype=float)
        scalar_f = f
    i = int(np.argmax(ys))
    best_x, best_y = float(xs[i]), float(ys[i])
    a = float(xs[max(i - 1, 0)])
    b = float(xs[min(i + 1, grid_points - 1)])
    if b > a:
        x, y = _golden_section(scalar_f, a, b, tol)
        # strict improvement only, so plateaus keep the leftmost grid point
        if y > best_y:
            best_x, best_y = x, y
    return best_x, best_y


@dataclass(frozen=True)
class Povm:
    """Positive effects summing to the identity."""

    effects: tuple

    def __post_init__(self) -> None:
        mats = tuple(np.asarray(e, dtype=complex) for e in self.effects)
        if not mats:
            raise ValueError("POVM needs at least one effect")
        dim = mats[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for e in mats:
            if e.shape != (dim, dim):
                raise ValueError(f"effect shape {e.shape} does not match dimension {dim}")
            asym = float(np.max(np.abs(e - e.conj().T)))
            if asym > POVM_SUM_TOL:
                raise ValueError(f"effect is not Hermitian: asymmetry {asym:.3e}")
            vals = np.linalg.eigvalsh(0.5 * (e + e.conj().T))
            if vals[0] < -POVM_EIGENVALUE_SLACK or vals[-1] > 1.0 + POVM_EIGENVALUE_SLACK:
                raise ValueError(
                    f"effect eigenvalues [{vals[0]:.3e}, {vals[-1]:.3e}] outside [0, 1]"
                )
            total += e
        err = float(np.max(np.abs(total - np.eye(dim))))
        if err > POVM_SUM_TOL:
            raise ValueError(f"effects sum deviates from identity by {err:.3e}")
        object.__setattr__(self, "effects", mats)

    @property
    def n_outcomes(self) -> int:
        return len(self.effects)

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]


def two_outcome_povm(m: np.ndarray) -> Povm:
    """{M, I - M} for a single qubit effect M."""
    a = np.asarray(m, dtype=complex)
    return Povm(effects=(a, np.eye(a.shape[0], dtype=complex) - a))


def _effect_from_parameters(theta: float, chi: float, lam1: float, lam2: float) -> np.ndarray:
    ct, st = math.cos(theta), math.sin(theta)
    phase = complex(math.cos(chi), math.sin(chi))
    u = np.array([ct, phase * st])
    u_perp = np.array([-phase.conjugate() * st, ct])
    return lam1 * np.outer(u, u.conj()) + lam2 * np.outer(u_perp, u_perp.conj())


def _effect_batch(theta, chi, lam1, lam2) -> np.ndarray:
    """Batched qubit effects, shape (..., 2, 2), from broadcastable parameters."""
    theta, chi, lam1, lam2 = np.broadcast_arrays(theta, chi, lam1, lam2)
    ct, st = np.cos(theta), np.sin(theta)
    phase = np.exp(1j * chi)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = lam1 * ct * ct + lam2 * st * st
    out[..., 1, 1] = lam1 * st * st + lam2 * ct * ct
    out[..., 0, 1] = (lam1 - lam2) * ct * st * np.conj(phase)
    out[..., 1, 0] = np.conj(out[..., 0, 1])
    return out


def _parameters_from_effect(m: np.ndarray) -> tuple[float, float, float, float]:
    dec = hermitian_eig(np.asarray(m, dtype=complex))
    lam1 = float(min(max(dec.eigenvalues[0], 0.0), 1.0))
    lam2 = float(min(max(dec.eigenvalues[1], 0.0), 1.0))
    u = dec.vector(0)
    theta = math.atan2(abs(u[1]), abs(u[0]))
    chi = float(np.angle(u[1]) - np.angle(u[0])) % (2.0 * math.pi) if abs(u[1]) > 1e-14 else 0.0
    return theta, chi, lam1, lam2


def maximize_povm_2x2(
    objective: Callable[[Povm], float],
    *,
    seeds: Sequence[np.ndarray] = (),
    grid_points: int = 17,
    batch_objective: Callable[[np.ndarray], np.ndarray] | None = None,
    refine_tol: float = 1e-7,
) -> tuple[Povm, float]:
    """Maximize over two-outcome qubit POVMs {M, I - M}.

    M ranges over lam1 |u><u| + lam2 |u_perp><u_perp| with lam_i in [0, 1] and
    |u> = (cos theta, e^{i chi} sin theta): a grid over the four parameters,
    then coordinate-wise golden refinement.  ``seeds`` are candidate effects
    that are always evaluated (and refined around if they win), so callers can
    guarantee the result dominates known projective strategies.
    ``batch_objective`` takes a (..., 2, 2) stack of effects and returns the
    objective per effect; when given it also evaluates the grid, the seeds and
    the refinement slices, so it must agree with ``objective``.
    """
    thetas = np.linspace(0.0, math.pi / 2, grid_points)
    chis = np.linspace(0.0, 2.0 * math.pi, grid_points, endpoint=False)
    lams = np.linspace(0.0, 1.0, grid_points)

    def scalar_value(params: tuple[float, float, float, float]) -> float:
        if batch_objective is not None:
            return float(batch_objective(_effect_batch(*map(np.asarray, params))))
        return float(objective(two_outcome_povm(_effect_from_parameters(*params))))

    tg, cg, l1g, l2g = np.meshgrid(thetas, chis, lams, lams, indexing="ij")
    if batch_objective is not None:
        values = np.asarray(batch_objective(_effect_batch(tg, cg, l1g, l2g)), dtype=float)
    else:
        effects = _effect_batch(tg, cg, l1g, l2g)
        flat = effects.reshape(-1, 2, 2)
        values = np.array(
            [objective(two_outcome_povm(e)) for e in flat], dtype=float
        ).reshape(tg.shape)
    i = np.unravel_index(int(np.argmax(values)), values.shape)
    best_params = (float(tg[i]), float(cg[i]), float(l1g[i]), float(l2g[i]))
    best_value = float(values[i])

    for seed in seeds:
        params = _parameters_from_effect(seed)
        value = scalar_value(params)
        if value > best_value:
            best_params, best_value = params, value

    bounds = ((0.0, math.pi / 2), (0.0, 2.0 * math.pi), (0.0, 1.0), (0.0, 1.0))
    for _ in range(3):  # coordinate ascent passes
        for axis, (lo, hi) in enumerate(bounds):
            def slice_f(t: float, axis=axis) -> float:
                params = list(best_params)
                params[axis] = t
                return scalar_value(tuple(params))

            x, y = _golden_section(slice_f, lo, hi, refine_tol)
            if y > best_value:
                params = list(best_params)
                params[axis] = x
                best_params, best_value = tuple(params), y

    best_effect = _effect_from_parameters(*best_params)
    return two_outcome_povm(best_effect), best_value


def _draw_categorical(probs: np.ndarray, rng: np.random.Generator) -> int:
    p = np.asarray(probs, dtype=float)
    total = float(p.sum())
    if abs(total - 1.0) > OUTCOME_PROB_TOL:
        raise ValueError(f"outcome probabilities sum to {total!r}, not 1")
    p = np.clip(p, 0.0, None) / max(total, 1e-300)
    edges = np.cumsum(p)
    k = int(np.searchsorted(edges, rng.random(), side="right"))
    return min(k, len(p) - 1)


def sample_measurement(rho: np.ndarray, povm: Povm, rng: np.random.Generator) -> int:
    """Draw one outcome index with Born-rule probabilities Tr[rho E_k]."""
    r = check_density_matrix(rho)
    probs = np.array([float(np.trace(r @ e).real) for e in povm.effects])
    return _draw_categorical(probs, rng)


@dataclass(frozen=True, eq=False)
class Protocol:
    """Finite measurement tree for a uniformly random binary hypothesis.

    ``stage_tables[s]`` has shape (2, k_0, ..., k_{s-1}, k_s): conditional
    outcome distribution of stage s given the hypothesis and all earlier
    outcomes.  ``decisions`` maps a full outcome history to the guess.
    """

    name: str
    stage_tables: tuple
    decisions: np.ndarray
    analytic_psucc: float

    def __post_init__(self) -> None:
        tables = tuple(np.asarray(t, dtype=float) for t in self.stage_tables)
        if not tables:
            raise ValueError("protocol needs at least one stage")
        shape: tuple = ()
        for s, t in enumerate(tables):
            if t.shape[: s + 1] != (2,) + shape:
                raise ValueError(f"stage {s} table shape {t.shape} inconsistent with history {shape}")
            if t.ndim != s + 2:
                raise ValueError(f"stage {s} table must have rank {s + 2}, got {t.ndim}")
            if np.min(t) < -1e-12:
                raise ValueError(f"stage {s} has negative outcome probability {np.min(t):.3e}")
            row_sums = t.sum(axis=-1)
            if np.max(np.abs(row_sums - 1.0)) > OUTCOME_PROB_TOL:
                raise ValueError(f"stage {s} outcome probabilities do not sum to 1")
            shape = shape + (t.shape[-1],)
        decisions = np.asarray(self.decisions, dtype=np.int64)
        if decisions.shape != shape:
            raise ValueError(f"decision table shape {decisions.shape}, expected {shape}")
        if not np.isin(decisions, (0, 1)).all():
            raise ValueError("decisions must be 0 or 1")
        object.__setattr__(self, "stage_tables", tables)
        object.__setattr__(self, "decisions", decisions)

    @property
    def n_stages(self) -> int:
        return len(self.stage_tables)


@dataclass(frozen=True)
class OutcomeSample:
    true_hypothesis: int
    outcomes: tuple
    guessed: int


def sample_protocol(protocol: Protocol, true_hypothesis: int, rng: np.random.Generator) -> OutcomeSample:
    """Run one trial of the measurement tree for a fixed true hypothesis."""
    if true_hypothesis not in (0, 1):
        raise ValueError(f"true_hypothesis must be 0 or 1, got {true_hypothesis}")
    outcomes: list[int] = []
    for table in protocol.stage_tables:
        probs = table[(true_hypothesis, *outcomes)]
        outcomes.append(_draw_categorical(probs, rng))
    guessed = int(protocol.decisions[tuple(outcomes)])
    return OutcomeSample(true_hypothesis=true_hypothesis, outcomes=tuple(outcomes), guessed=guessed)


def exact_psucc(protocol: Protocol) -> float:
    """Exact success probability of the tree by summing all outcome paths."""
    total = 0.0
    for h in (0, 1):
        acc = np.array(1.0)
        for table in protocol.stage_tables:
            acc = acc[..., None] * table[h]
        total += 0.5 * float(acc[protocol.decisions == h].sum())
    return total


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    stderr: float
    trials: int
    n_correct: int


def _run_chunk(protocol: Protocol, n: int, seed: int, chunk_index: int) -> int:
    rng = np.random.default_rng([seed, chunk_index])
    u = rng.random((n, protocol.n_stages + 1))
    h = (u[:, 0] >= 0.5).astype(np.int64)
    outcomes: list[np.ndarray] = []
    for s, table in enumerate(protocol.stage_tables):
        probs = table[(h, *outcomes)]
        edges = np.cumsum(probs, axis=1)
        k = (edges < u[:, s + 1, None]).sum(axis=1)
        outcomes.append(np.minimum(k, table.shape[-1] - 1))
    guesses = protocol.decisions[tuple(outcomes)]
    return int((guesses == h).sum())


def monte_carlo_psucc(
    protocol: Protocol, trials: int, seed: int, workers: int = 1
) -> MonteCarloEstimate:
    """Estimate the success probability by simulating the measurement tree.

    Trials are processed in fixed-size chunks, each seeded by (seed, chunk
    index), so the estimate depends only on (seed, trials) and not on how
    chunks are distributed over workers.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    sizes = [MC_CHUNK] * (trials // MC_CHUNK)
    if trials % MC_CHUNK:
        sizes.append(trials % MC_CHUNK)
    jobs = list(enumerate(sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda job: _run_chunk(protocol, job[1], seed, job[0]), jobs))
    else:
        counts = [_run_chunk(protocol, size, seed, i) for i, size in jobs]
    n_correct = int(sum(counts))
    estimate = n_correct / trials
    stderr = math.sqrt(estimate * (1.0 - estimate) / trials)
    return MonteCarloEstimate(estimate=estimate, stderr=stderr, trials=trials, n_correct=n_correct)
