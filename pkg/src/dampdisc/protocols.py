"""Measurement-tree builders for Monte Carlo simulation of each strategy.

Every builder reduces a strategy to a Protocol: conditional outcome tables for
each measurement stage plus a guess for every outcome history.  The analytic
success probability travels with the protocol so simulations can be checked
against it; exact_psucc recomputes it independently from the tables.
"""

from __future__ import annotations

import math

import numpy as np

from .channel import InputState, SideEntangledInput
from .discrimination import PriorPair, Protocol, helstrom
from .linalg import hermitian_eig, projector
from .strategies import (
    ChannelPair,
    adaptive_feedback_psucc,
    adaptive_forward_optimal,
    adaptive_forward_psucc,
    backward_adaptive_measurement,
    feedback_conditional_states,
    feedback_psucc,
    one_shot_optimal,
    one_shot_psucc_numeric,
    sequential_two_shot_optimal,
    sequential_two_shot_psucc,
    side_ent_optimal,
    side_ent_psucc,
    two_shot_entangled_optimal,
    two_shot_entangled_psucc,
    two_shot_product_optimal,
    two_shot_product_psucc,
)

UNREACHABLE_ROW = (0.5, 0.5)  # never sampled; keeps rows normalized

MC_STRATEGIES = (
    "one-shot",
    "side-ent",
    "feedback",
    "two-shot-entangled",
    "two-shot-product",
    "adaptive",
    "adaptive-fb",
    "backward",
    "sequential",
)


def _outcome_row(rho: np.ndarray, effects: tuple) -> list[float]:
    return [float(np.trace(rho @ e).real) for e in effects]


def _binary_helstrom_protocol(
    name: str, rho0: np.ndarray, rho1: np.ndarray, analytic: float
) -> Protocol:
    hel = helstrom(rho0, rho1)
    effects = (hel.projector_plus, hel.projector_minus)
    table = np.array([_outcome_row(rho0, effects), _outcome_row(rho1, effects)])
    return Protocol(
        name=name,
        stage_tables=(table,),
        decisions=np.array([0, 1]),
        analytic_psucc=analytic,
    )


def one_shot_protocol(pair: ChannelPair, x: float) -> Protocol:
    rho0, rho1 = pair.output_pair(x)
    return _binary_helstrom_protocol(
        "one-shot", rho0, rho1, one_shot_psucc_numeric(pair, x)
    )


def side_entangled_protocol(pair: ChannelPair, y: float) -> Protocol:
    inp = SideEntangledInput(y)
    rho0 = pair.channel0.side_entangled_output(inp)
    rho1 = pair.channel1.side_entangled_output(inp)
    return _binary_helstrom_protocol("side-ent", rho0, rho1, side_ent_psucc(pair, y))


def two_shot_entangled_protocol(pair: ChannelPair, variant: str, x: float) -> Protocol:
    rho0 = pair.channel0.two_shot_entangled_output(variant, x)
    rho1 = pair.channel1.two_shot_entangled_output(variant, x)
    return _binary_helstrom_protocol(
        f"two-shot-entangled-{variant}", rho0, rho1, two_shot_entangled_psucc(pair, variant, x)
    )


def two_shot_product_protocol(pair: ChannelPair, x: float) -> Protocol:
    rho0, rho1 = pair.output_pair(x)
    return _binary_helstrom_protocol(
        "two-shot-product",
        np.kron(rho0, rho0),
        np.kron(rho1, rho1),
        two_shot_product_psucc(pair, x),
    )


def sequential_protocol(pair: ChannelPair, x: float) -> Protocol:
    inp = InputState(x)
    rho0 = pair.channel0.apply(pair.channel0.output_state(inp))
    rho1 = pair.channel1.apply(pair.channel1.output_state(inp))
    return _binary_helstrom_protocol(
        "sequential", rho0, rho1, sequential_two_shot_psucc(pair, x)
    )


def _pure_branch_effects(
    state0: np.ndarray | None, state1: np.ndarray | None, priors: PriorPair | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Guess-0 / guess-1 effects for a branch holding two conditional pure states.

    When only one hypothesis can reach the branch, its projector pins the
    guess; otherwise the optimal two-state measurement is used.  With equal
    priors and coinciding states the measurement is balanced so each
    hypothesis succeeds with probability 1/2, matching the per-branch value
    the strategy assigns (any measurement is optimal there, but an asymmetric
    one would simulate a different protocol).
    """
    if state0 is None and state1 is None:
        raise ValueError("branch unreachable under both hypotheses")
    if state1 is None:
        p = projector(state0)
        return p, np.eye(2, dtype=complex) - p
    if state0 is None:
        p = projector(state1)
        return np.eye(2, dtype=complex) - p, p
    if priors is None:
        cross = np.outer(state0, state1)
        cross = cross - cross.T
        if float(np.sum(np.abs(cross) ** 2)) < 1e-24:
            perp = np.array([-np.conj(state0[1]), np.conj(state0[0])])
            return projector((state0 + perp) / math.sqrt(2.0)), projector(
                (state0 - perp) / math.sqrt(2.0)
            )
    hel = helstrom(projector(state0), projector(state1), priors or PriorPair(0.5, 0.5))
    return hel.projector_plus, hel.projector_minus


def _branch_row(state: np.ndarray | None, effects: tuple) -> list[float]:
    if state is None:
        return list(UNREACHABLE_ROW)
    return [float(np.vdot(state, e @ state).real) for e in effects]


def feedback_protocol(pair: ChannelPair, x: float, alpha: float) -> Protocol:
    """Environment measured in the tilted basis, then the conditional system state."""
    br0 = feedback_conditional_states(pair.channel0, x, alpha)
    br1 = feedback_conditional_states(pair.channel1, x, alpha)
    env_table = np.array(
        [
            [br0.norm_plus**2, br0.norm_minus**2],
            [br1.norm_plus**2, br1.norm_minus**2],
        ]
    )
    branches = (
        (br0.state_plus, br1.state_plus),
        (br0.state_minus, br1.state_minus),
    )
    system_table = np.empty((2, 2, 2))
    for e, (s0, s1) in enumerate(branches):
        if s0 is None and s1 is None:
            system_table[0, e] = system_table[1, e] = UNREACHABLE_ROW
            continue
        effects = _pure_branch_effects(s0, s1)
        system_table[0, e] = _branch_row(s0, effects)
        system_table[1, e] = _branch_row(s1, effects)
    decisions = np.array([[0, 1], [0, 1]])
    return Protocol(
        name="feedback",
        stage_tables=(env_table, system_table),
        decisions=decisions,
        analytic_psucc=feedback_psucc(pair, x, alpha),
    )


def adaptive_forward_protocol(pair: ChannelPair, x: float) -> Protocol:
    """Projective first measurement, posterior-reweighted optimal second."""
    rho0, rho1 = pair.output_pair(x)
    dec = hermitian_eig(rho0 - rho1)
    basis = (dec.vector(0), dec.vector(1))
    first = np.array(
        [[float(np.vdot(v, rho @ v).real) for v in basis] for rho in (rho0, rho1)]
    )
    second = np.empty((2, 2, 2))
    for k in range(2):
        joint0, joint1 = 0.5 * first[0, k], 0.5 * first[1, k]
        total = joint0 + joint1
        if total <= 1e-15:
            second[0, k] = second[1, k] = UNREACHABLE_ROW
            continue
        priors = PriorPair(joint0 / total, joint1 / total)
        hel = helstrom(rho0, rho1, priors)
        effects = (hel.projector_plus, hel.projector_minus)
        second[0, k] = _outcome_row(rho0, effects)
        second[1, k] = _outcome_row(rho1, effects)
    return Protocol(
        name="adaptive",
        stage_tables=(first, second),
        decisions=np.array([[0, 1], [0, 1]]),
        analytic_psucc=adaptive_forward_psucc(pair, x),
    )


def backward_adaptive_protocol(pair: ChannelPair, x: float) -> Protocol:
    """Optimized two-outcome first effect, posterior-reweighted second step."""
    rho0, rho1 = pair.output_pair(x)
    povm, value = backward_adaptive_measurement(pair, x)
    effects0 = tuple(povm.effects)
    first = np.array([_outcome_row(rho0, effects0), _outcome_row(rho1, effects0)])
    second = np.empty((2, 2, 2))
    for m in range(2):
        joint0, joint1 = 0.5 * first[0, m], 0.5 * first[1, m]
        total = joint0 + joint1
        if total <= 1e-15:
            second[0, m] = second[1, m] = UNREACHABLE_ROW
            continue
        priors = PriorPair(joint0 / total, joint1 / total)
        hel = helstrom(rho0, rho1, priors)
        effects = (hel.projector_plus, hel.projector_minus)
        second[0, m] = _outcome_row(rho0, effects)
        second[1, m] = _outcome_row(rho1, effects)
    return Protocol(
        name="backward",
        stage_tables=(first, second),
        decisions=np.array([[0, 1], [0, 1]]),
        analytic_psucc=value,
    )


def adaptive_feedback_protocol(pair: ChannelPair) -> Protocol:
    """Both copies with environment feedback at the single-copy optimum.

    Four stages: environment of copy one, conditional system measurement,
    environment of copy two, then the posterior-reweighted optimal
    measurement on the second conditional state.
    """
    alpha = math.pi / 4
    br0 = feedback_conditional_states(pair.channel0, 1.0, alpha)
    br1 = feedback_conditional_states(pair.channel1, 1.0, alpha)
    branches = (
        (br0.state_plus, br0.norm_plus**2, br1.state_plus, br1.norm_plus**2),
        (br0.state_minus, br0.norm_minus**2, br1.state_minus, br1.norm_minus**2),
    )
    for s0, _, s1, _ in branches:
        if s0 is None or s1 is None:
            raise ArithmeticError("conditional branch unexpectedly empty")

    env1 = np.array(
        [[branches[0][1], branches[1][1]], [branches[0][3], branches[1][3]]]
    )
    system1 = np.empty((2, 2, 2))
    bases = []
    for e1, (phi0, _, phi1, _) in enumerate(branches):
        dec = hermitian_eig(projector(phi0) - projector(phi1))
        basis = (dec.vector(0), dec.vector(1))
        bases.append(basis)
        for h, phi in ((0, phi0), (1, phi1)):
            system1[h, e1] = [abs(np.vdot(v, phi)) ** 2 for v in basis]

    env2 = np.empty((2, 2, 2, 2))
    env2[0, ..., 0], env2[0, ..., 1] = branches[0][1], branches[1][1]
    env2[1, ..., 0], env2[1, ..., 1] = branches[0][3], branches[1][3]

    system2 = np.empty((2, 2, 2, 2, 2))
    for e1 in range(2):
        for k in range(2):
            v = bases[e1][k]
            like0 = env1[0, e1] * abs(np.vdot(v, branches[e1][0])) ** 2
            like1 = env1[1, e1] * abs(np.vdot(v, branches[e1][2])) ** 2
            for e2, (phi0, w0, phi1, w1) in enumerate(branches):
                joint0 = 0.5 * like0 * w0
                joint1 = 0.5 * like1 * w1
                total = joint0 + joint1
                if total <= 1e-15:
                    system2[0, e1, k, e2] = system2[1, e1, k, e2] = UNREACHABLE_ROW
                    continue
                priors = PriorPair(joint0 / total, joint1 / total)
                effects = _pure_branch_effects(phi0, phi1, priors)
                system2[0, e1, k, e2] = _branch_row(phi0, effects)
                system2[1, e1, k, e2] = _branch_row(phi1, effects)

    decisions = np.broadcast_to(np.array([0, 1]), (2, 2, 2, 2)).copy()
    return Protocol(
        name="adaptive-fb",
        stage_tables=(env1, system1, env2, system2),
        decisions=decisions,
        analytic_psucc=adaptive_feedback_psucc(pair),
    )


def build_protocol(strategy: str, pair: ChannelPair, params: dict | None = None) -> Protocol:
    """Protocol for a named strategy; omitted parameters default to the optimum."""
    p = dict(params or {})
    if strategy == "one-shot":
        return one_shot_protocol(pair, p.get("x", one_shot_optimal(pair).params["x"]))
    if strategy == "side-ent":
        return side_entangled_protocol(pair, p.get("y", side_ent_optimal(pair).params["y"]))
    if strategy == "feedback":
        return feedback_protocol(pair, p.get("x", 1.0), p.get("alpha", math.pi / 4))
    if strategy == "two-shot-entangled":
        variant = p.get("variant", "odd")
        x = p.get("x")
        if x is None:
            x = two_shot_entangled_optimal(pair, variant).params["x"]
        return two_shot_entangled_protocol(pair, variant, x)
    if strategy == "two-shot-product":
        return two_shot_product_protocol(
            pair, p.get("x", two_shot_product_optimal(pair).params["x"])
        )
    if strategy == "adaptive":
        return adaptive_forward_protocol(
            pair, p.get("x", adaptive_forward_optimal(pair).params["x"])
        )
    if strategy == "adaptive-fb":
        return adaptive_feedback_protocol(pair)
    if strategy == "backward":
        return backward_adaptive_protocol(
            pair, p.get("x", adaptive_forward_optimal(pair).params["x"])
        )
    if strategy == "sequential":
        return sequential_protocol(
            pair, p.get("x", sequential_two_shot_optimal(pair).params["x"])
        )
    raise ValueError(
        f"strategy {strategy!r} cannot be simulated; choose one of {', '.join(MC_STRATEGIES)}"
    )
