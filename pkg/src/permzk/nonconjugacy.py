"""Two-round interactive proof that two permutation groups are NOT
conjugate by any element of a third group, sound against an honest
verifier.

The roles flip relative to the conjugacy protocol: the verifier secretly
picks a side, masks it by a random element of <U>, and sends a batch of
random elements of the masked group; the prover must name the side.  When
the groups are not conjugate inside <U> the batch pins down its side as
soon as it generates the masked group; when they are conjugate the batch
carries no information about the side bit, so any prover is caught with
probability one half per session.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable, Optional

from .engine import GeneratingSet, build_chain, group_profile
from .framework import (
    PROVER,
    VERIFIER,
    Message,
    RandomTape,
    SessionOutcome,
    View,
    bit_payload,
    challenge_bit,
    run_parallel,
    run_sequential,
)
from .conjugacy import InstanceContext, ProtocolParams
from .perm import Permutation

CHALLENGE_LENGTH_FACTOR = 8
DEFAULT_SESSIONS = 2


def params_for(instance, k: Optional[int] = None, t: int = DEFAULT_SESSIONS) -> ProtocolParams:
    """Challenge batches default to 8 times the degree, long enough that a
    non-generating batch is a rare event."""
    return ProtocolParams(k if k is not None else CHALLENGE_LENGTH_FACTOR * instance.degree, t)


@dataclass(frozen=True)
class NonConjChallenge:
    side: int
    mask: Permutation
    payload: tuple


def draw_challenge(ctx: InstanceContext, k: int, tape: RandomTape) -> NonConjChallenge:
    """The honest verifier's secret draw: a side bit, a mask from <U>, and
    k independent uniform elements of the chosen group, all conjugated by
    the mask.  The batch is not conditioned on generating anything."""
    side = tape.bit()
    mask = ctx.chain_u.random_element(tape)
    chain = ctx.side_chain(side)
    payload = tuple(chain.random_element(tape).conjugated_by(mask) for _ in range(k))
    return NonConjChallenge(side, mask, payload)


def challenge_matched(side: int, response) -> bool:
    return isinstance(response, bytes) and challenge_bit(response) == side


def matched_sides(ctx: InstanceContext, payload: tuple) -> tuple:
    """Sides whose group is conjugate to <payload> by some element of <U>,
    decided by brute force over <U>.  The containment is tested on the
    side's few generators against the payload's chain, after pruning by
    order and by the conjugation-invariant cycle-type profile; the payload
    may be long, so the symmetric test would be far slower."""
    chain_p = build_chain(GeneratingSet(ctx.degree, payload))
    profile_p = group_profile(chain_p, ctx.search_cap)
    out = []
    for side in (0, 1):
        if ctx.side_chain(side).order() != chain_p.order():
            continue
        if profile_p is not None and ctx.side_profile(side) not in (None, profile_p):
            continue
        gens = ctx.instance.side(side).canonical().gens
        for v in ctx.u_elements():
            if all(chain_p.contains(g.conjugated_by(v)) for g in gens):
                out.append(side)
                break
    return tuple(out)


@dataclass(frozen=True)
class ResponderProgram:
    """A prover strategy for the side-identification round."""

    name: str
    respond: Callable[[InstanceContext, tuple, random.Random], bytes]


def brute_force_responder() -> ResponderProgram:
    """The honest unbounded prover: name the unique matching side; if both
    or neither side matches, the batch is uninformative, answer 0."""

    def respond(ctx, payload, rng):
        sides = matched_sides(ctx, payload)
        return bit_payload(sides[0] if len(sides) == 1 else 0)

    return ResponderProgram("brute", respond)


def constant_responder(bit: int) -> ResponderProgram:
    payload = bit_payload(int(bit))
    return ResponderProgram("const" + payload.decode("ascii"), lambda ctx, p, rng: payload)


def majority_responder() -> ResponderProgram:
    """Cheating heuristic: score each side by how many elements of <U>
    conjugate the whole batch into it, answer the higher score, ties to 0."""

    def respond(ctx, payload, rng):
        scores = [0, 0]
        chain_p = build_chain(GeneratingSet(ctx.degree, payload))
        for side in (0, 1):
            if ctx.side_chain(side).order() != chain_p.order():
                continue
            gens = ctx.instance.side(side).canonical().gens
            for v in ctx.u_elements():
                if all(chain_p.contains(g.conjugated_by(v)) for g in gens):
                    scores[side] += 1
        return bit_payload(1 if scores[1] > scores[0] else 0)

    return ResponderProgram("majority", respond)


STANDARD_RESPONDERS = {
    "brute": brute_force_responder,
    "const0": lambda: constant_responder(0),
    "const1": lambda: constant_responder(1),
    "majority": majority_responder,
}


def session(ctx: InstanceContext, params: ProtocolParams, responder: ResponderProgram, rng_p, tape_v: RandomTape):
    """One atomic session: verifier challenge, prover side claim."""
    messages = []
    round_ns = []
    last = time.perf_counter_ns()

    def mark():
        nonlocal last
        now = time.perf_counter_ns()
        round_ns.append(now - last)
        last = now

    challenge = draw_challenge(ctx, params.k, tape_v)
    mark()
    msg = Message(VERIFIER, challenge.payload)
    messages.append(msg)
    yield msg

    reply = responder.respond(ctx, challenge.payload, rng_p)
    mark()
    msg = Message(PROVER, reply)
    messages.append(msg)
    yield msg

    accepted = challenge_matched(challenge.side, reply)
    mark()
    return SessionOutcome(
        accepted,
        View(tape_v.prefix(), tuple(messages)),
        {"round_ns": tuple(round_ns), "side": challenge.side},
    )


def make_session_factory(ctx, params, responder):
    return lambda rng_p, tape_v: session(ctx, params, responder, rng_p, tape_v)


def run_composed(ctx, params, responder, rng: random.Random, parallel: bool = True):
    """Compose params.t sessions, bundled round by round unless asked
    otherwise; accept iff all sessions accept."""
    factory = make_session_factory(ctx, params, responder)
    runner = run_parallel if parallel else run_sequential
    return runner(factory, params.t, rng)
