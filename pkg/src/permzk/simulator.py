"""Black-box simulator for the conjugacy protocol, plus the machinery that
checks its output distribution: an explicit bijection between honest-prover
randomness and consistent views, exact view laws by enumeration on tiny
instances, and two-sample statistical comparison at larger sizes.

The simulator guesses the challenge side, commits accordingly, replays the
verifier program on the same tape, and restarts from scratch (fresh
commitment randomness, same tape) until the guess matches.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .engine import (
    BudgetExceeded,
    GeneratingSet,
    build_chain,
    enumerate_elements,
    generating_tuples,
    random_generating_tuple,
)
from .framework import RandomTape, TapePrefix, VerifierProgram, challenge_bit
from .conjugacy import InstanceContext, TUPLE_LENGTH_FACTOR

DEFAULT_MAX_RESTARTS = 10 * 64
DEFAULT_EXACT_CAP = 20_000


@dataclass(frozen=True)
class SimulatedView:
    """Same shape for simulated and real views: consumed tape prefix,
    commitment tuple, challenge bytes, revealed permutation."""

    r_prefix: TapePrefix
    commit: tuple
    challenge: bytes
    response: object


@dataclass(frozen=True)
class AttemptRecord:
    mask: object
    side: int
    commit: tuple
    challenge: bytes
    tape_draws: int


@dataclass
class SimulateResult:
    view: SimulatedView
    restarts: int
    sample_attempts: int
    attempts_log: tuple = ()


def simulate_with_rewinding(
    instance,
    chain_u,
    sample_commit,
    program: VerifierProgram,
    rng: random.Random,
    tape_seed: Optional[int] = None,
    max_restarts: int = DEFAULT_MAX_RESTARTS,
    record_attempts: bool = False,
) -> SimulateResult:
    """The rewinding loop shared by the group and element simulators.
    sample_commit(side, mask, rng) -> (payload, attempts) must draw a fresh
    commitment for the chosen side, already conjugated by mask."""
    if tape_seed is None:
        tape_seed = rng.getrandbits(64)
    total_attempts = 0
    log = []
    for restart in range(1, max_restarts + 1):
        mask = chain_u.random_element(rng)
        side = rng.randrange(2)
        commit, attempts = sample_commit(side, mask, rng)
        total_attempts += attempts
        tape = RandomTape(tape_seed)
        challenge = program.challenge(instance, tape, commit)
        if record_attempts:
            log.append(AttemptRecord(mask, side, commit, challenge, tape.consumed))
        if challenge_bit(challenge) == side:
            view = SimulatedView(tape.prefix(), commit, challenge, mask)
            return SimulateResult(view, restart, total_attempts, tuple(log))
    raise BudgetExceeded(
        f"simulator hit the restart cap ({max_restarts}); "
        "the instance is not a yes-instance or the verifier program defeats the side guess"
    )


def _group_commit_sampler(ctx: InstanceContext, k: int):
    def sample(side: int, mask, rng):
        gt = random_generating_tuple(ctx.instance.side(side), k, rng, chain=ctx.side_chain(side))
        return tuple(x.conjugated_by(mask) for x in gt.perms), gt.attempts

    return sample


def simulate(
    ctx: InstanceContext,
    program: VerifierProgram,
    rng: random.Random,
    *,
    k: Optional[int] = None,
    tape_seed: Optional[int] = None,
    max_restarts: int = DEFAULT_MAX_RESTARTS,
    record_attempts: bool = False,
) -> SimulateResult:
    """Simulate one session view without the witness."""
    k = k if k is not None else TUPLE_LENGTH_FACTOR * ctx.degree
    return simulate_with_rewinding(
        ctx.instance,
        ctx.chain_u,
        _group_commit_sampler(ctx, k),
        program,
        rng,
        tape_seed,
        max_restarts,
        record_attempts,
    )


def view_from_randomness(
    ctx: InstanceContext,
    program: VerifierProgram,
    tape_seed: int,
    base_tuple: tuple,
    mask,
    *,
    witness=None,
) -> SimulatedView:
    """The honest-prover view as a function of the prover's randomness: a
    generating tuple of <A1> and a mask from <U>.  This is exactly the map
    the real protocol computes, so real_view() samples its inputs and then
    calls it."""
    v = witness if witness is not None else ctx.witness()
    commit = tuple(x.conjugated_by(mask) for x in base_tuple)
    tape = RandomTape(tape_seed)
    challenge = program.challenge(ctx.instance, tape, commit)
    response = mask if challenge_bit(challenge) else v * mask
    return SimulatedView(tape.prefix(), commit, challenge, response)


def randomness_of_view(ctx: InstanceContext, view: SimulatedView, *, witness=None):
    """Inverse of view_from_randomness on consistent views: recover the
    generating tuple of <A1> and the mask."""
    v = witness if witness is not None else ctx.witness()
    mask = view.response if challenge_bit(view.challenge) else v.inverse() * view.response
    mask_inv = mask.inverse()
    base_tuple = tuple(x.conjugated_by(mask_inv) for x in view.commit)
    return base_tuple, mask


def real_view(
    ctx: InstanceContext,
    program: VerifierProgram,
    rng: random.Random,
    *,
    k: Optional[int] = None,
    tape_seed: Optional[int] = None,
) -> SimulatedView:
    """Run the honest prover against the verifier program and record the
    view in the simulator's output shape."""
    k = k if k is not None else TUPLE_LENGTH_FACTOR * ctx.degree
    if tape_seed is None:
        tape_seed = rng.getrandbits(64)
    mask = ctx.chain_u.random_element(rng)
    gt = random_generating_tuple(ctx.instance.a1, k, rng, chain=ctx.chain_a1)
    return view_from_randomness(ctx, program, tape_seed, gt.perms, mask)


def enumerate_consistent_views(
    ctx: InstanceContext,
    program: VerifierProgram,
    tape_seed: int,
    k: int,
    cap: int = DEFAULT_EXACT_CAP,
) -> tuple:
    """Every view (commit, challenge, response) that the honest verifier
    accepts and whose challenge the program actually emits on this tape:
    response in <U>, challenge = program(commit), commit generating the
    challenged group conjugated by the response.  Enumerated directly from
    the definition, not through the prover or the simulator."""
    u_elems = enumerate_elements(ctx.chain_u, cap)
    candidates = set()
    for side in (0, 1):
        for x in enumerate_elements(ctx.side_chain(side), cap):
            for w in u_elems:
                candidates.add(x.conjugated_by(w))
    elems = sorted(candidates)
    if len(elems) ** k * len(u_elems) > cap:
        raise BudgetExceeded(
            f"{len(elems)}^{k} x {len(u_elems)} candidate views exceed cap {cap}"
        )
    views = []
    for tup in itertools.product(elems, repeat=k):
        tape = RandomTape(tape_seed)
        challenge = program.challenge(ctx.instance, tape, tup)
        prefix = tape.prefix()
        side_chain = ctx.side_chain(challenge_bit(challenge))
        tuple_order = build_chain(GeneratingSet(ctx.degree, tup)).order()
        if tuple_order != side_chain.order():
            continue
        for w in u_elems:
            w_inv = w.inverse()
            if all(side_chain.contains(x.conjugated_by(w_inv)) for x in tup):
                views.append(SimulatedView(prefix, tup, challenge, w))
    return tuple(views)


def verify_view_bijection(
    ctx: InstanceContext,
    program: VerifierProgram,
    tape_seed: int,
    k: int,
    *,
    witness=None,
    cap: int = DEFAULT_EXACT_CAP,
) -> bool:
    """Check that the honest-view map is a bijection from prover randomness
    (generating tuples of <A1> crossed with <U>) onto the consistent-view
    set, with randomness_of_view as its inverse."""
    v = witness if witness is not None else ctx.witness()
    u_elems = enumerate_elements(ctx.chain_u, cap)
    tuples1 = generating_tuples(ctx.instance.a1, k, cap, chain=ctx.chain_a1)
    images = []
    for base in tuples1:
        for mask in u_elems:
            view = view_from_randomness(ctx, program, tape_seed, base, mask, witness=v)
            back = randomness_of_view(ctx, view, witness=v)
            if back != (base, mask):
                return False
            images.append(view)
    if len(set(images)) != len(images):
        return False
    consistent = set(enumerate_consistent_views(ctx, program, tape_seed, k, cap))
    return set(images) == consistent


def exact_real_law(
    ctx: InstanceContext,
    program: VerifierProgram,
    tape_seed: int,
    k: int,
    cap: int = DEFAULT_EXACT_CAP,
) -> dict:
    """Exact law of the honest-prover view for a fixed verifier tape."""
    u_elems = enumerate_elements(ctx.chain_u, cap)
    tuples1 = generating_tuples(ctx.instance.a1, k, cap, chain=ctx.chain_a1)
    weight = Fraction(1, len(u_elems) * len(tuples1))
    law: dict = {}
    for base in tuples1:
        for mask in u_elems:
            view = view_from_randomness(ctx, program, tape_seed, base, mask)
            law[view] = law.get(view, Fraction(0)) + weight
    return law


def exact_sim_law(
    ctx: InstanceContext,
    program: VerifierProgram,
    tape_seed: int,
    k: int,
    cap: int = DEFAULT_EXACT_CAP,
) -> dict:
    """Exact law of the simulator's output for a fixed verifier tape: the
    per-attempt draw conditioned on the side guess matching the challenge."""
    u_elems = enumerate_elements(ctx.chain_u, cap)
    side_tuples = {
        side: generating_tuples(ctx.instance.side(side), k, cap, chain=ctx.side_chain(side))
        for side in (0, 1)
    }
    mass: dict = {}
    total = Fraction(0)
    for side in (0, 1):
        weight = Fraction(1, 2 * len(u_elems) * len(side_tuples[side]))
        for base in side_tuples[side]:
            for mask in u_elems:
                commit = tuple(x.conjugated_by(mask) for x in base)
                tape = RandomTape(tape_seed)
                challenge = program.challenge(ctx.instance, tape, commit)
                if challenge_bit(challenge) != side:
                    continue
                view = SimulatedView(tape.prefix(), commit, challenge, mask)
                mass[view] = mass.get(view, Fraction(0)) + weight
                total += weight
    if total == 0:
        raise BudgetExceeded("the verifier program defeats every side guess on this tape")
    return {view: p / total for view, p in mass.items()}


def total_variation(law_p: dict, law_q: dict) -> Fraction:
    keys = set(law_p) | set(law_q)
    return sum((abs(law_p.get(v, Fraction(0)) - law_q.get(v, Fraction(0))) for v in keys), Fraction(0)) / 2


def bucket_of_commit(commit: tuple, nbuckets: int) -> int:
    """Stable hash bucket for a commitment tuple (independent of process
    hash randomization, so reports reproduce byte for byte)."""
    h = 0
    for p in commit:
        for i in p.images:
            h = (h * 1000003 + i) & 0xFFFFFFFF
    return h % nbuckets


def compare_view_distributions(
    ctx: InstanceContext,
    program: VerifierProgram,
    *,
    tape_seed: int,
    k: Optional[int] = None,
    exact: bool = False,
    samples: int = 5000,
    rng: Optional[random.Random] = None,
    buckets: int = 8,
    cap: int = DEFAULT_EXACT_CAP,
    max_restarts: int = DEFAULT_MAX_RESTARTS,
) -> dict:
    """Compare real and simulated view distributions for one fixed verifier
    tape.  Exact mode enumerates both laws and the consistent-view set;
    statistical mode draws samples from each side and runs a two-sample
    chi-square over (challenge bit, response, commit bucket) cells.
    Only meaningful on yes-instances; anything else is refused."""
    if not ctx.is_yes():
        raise ValueError("zero-knowledge comparison applies to yes-instances only")
    k = k if k is not None else TUPLE_LENGTH_FACTOR * ctx.degree
    if exact:
        law_r = exact_real_law(ctx, program, tape_seed, k, cap)
        law_s = exact_sim_law(ctx, program, tape_seed, k, cap)
        consistent = enumerate_consistent_views(ctx, program, tape_seed, k, cap)
        uniform = Fraction(1, len(consistent))
        tv = total_variation(law_r, law_s)
        return {
            "mode": "exact",
            "domain": len(consistent),
            "laws_equal": law_r == law_s,
            "uniform_on_consistent": all(law_r.get(v) == uniform for v in consistent)
            and len(law_r) == len(consistent),
            "tv_distance_upper": float(tv),
        }

    from scipy import stats

    if rng is None:
        rng = random.Random(0)
    sim_counts: dict = {}
    restarts = 0
    attempts = 0
    for _ in range(samples):
        res = simulate(ctx, program, rng, k=k, tape_seed=tape_seed, max_restarts=max_restarts)
        restarts += res.restarts
        attempts += res.sample_attempts
        key = (
            challenge_bit(res.view.challenge),
            res.view.response,
            bucket_of_commit(res.view.commit, buckets),
        )
        sim_counts[key] = sim_counts.get(key, 0) + 1
    real_counts: dict = {}
    for _ in range(samples):
        view = real_view(ctx, program, rng, k=k, tape_seed=tape_seed)
        key = (
            challenge_bit(view.challenge),
            view.response,
            bucket_of_commit(view.commit, buckets),
        )
        real_counts[key] = real_counts.get(key, 0) + 1
    keys = sorted(set(sim_counts) | set(real_counts), key=repr)
    table = [
        [sim_counts.get(key, 0) for key in keys],
        [real_counts.get(key, 0) for key in keys],
    ]
    if len(keys) < 2:
        p_value = 1.0
    else:
        p_value = float(stats.chi2_contingency(table).pvalue)
    tv = sum(abs(sim_counts.get(c, 0) - real_counts.get(c, 0)) for c in keys) / (2 * samples)
    return {
        "mode": "stat",
        "samples": samples,
        "cells": len(keys),
        "restarts_mean": restarts / samples,
        "attempts_per_restart": attempts / restarts,
        "chi2_p": p_value,
        "tv_distance_upper": tv,
    }
