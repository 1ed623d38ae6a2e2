"""Three-round interactive proof that two permutation groups are conjugate
by an element of a third group.

Instance: generating sets A0, A1, U of subgroups of the same symmetric
group.  Yes-instances have some v in <U> with <A1> = <A0 conjugated by v>.
The prover masks A1 by a random u in <U> and commits to a random generating
tuple of the masked group; the verifier asks for a bit; the prover reveals
w = u for challenge 1 and w = v*u otherwise; the verifier accepts when w
lies in <U> and the committed tuple generates the challenged group
conjugated by w.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Optional

from .engine import (
    BudgetExceeded,
    GeneratingSet,
    StabilizerChain,
    build_chain,
    enumerate_elements,
    group_profile,
    random_generating_tuple,
)
from .framework import (
    PROVER,
    VERIFIER,
    Message,
    RandomTape,
    SessionOutcome,
    VerifierProgram,
    View,
    bit_payload,
    challenge_bit,
    run_parallel,
    run_sequential,
)
from .perm import Permutation

TUPLE_LENGTH_FACTOR = 4
DEFAULT_SEARCH_CAP = 10_000


@dataclass(frozen=True)
class GroupConjInstance:
    degree: int
    a0: GeneratingSet
    a1: GeneratingSet
    u: GeneratingSet
    witness: Optional[Permutation] = None

    def __post_init__(self):
        for name, gset in (("A0", self.a0), ("A1", self.a1), ("U", self.u)):
            if gset.degree != self.degree:
                raise ValueError(f"{name} degree {gset.degree} does not match instance degree {self.degree}")
        if self.witness is not None and self.witness.degree != self.degree:
            raise ValueError("witness degree does not match instance degree")

    def side(self, bit: int) -> GeneratingSet:
        return self.a1 if bit else self.a0


@dataclass(frozen=True)
class ProtocolParams:
    """k is the commitment tuple length, t the number of composed sessions."""

    k: int
    t: int = 1

    def __post_init__(self):
        if self.k < 1 or self.t < 1:
            raise ValueError("k and t must be at least 1")

    @classmethod
    def for_instance(cls, instance, k: Optional[int] = None, t: int = 1) -> "ProtocolParams":
        return cls(k if k is not None else TUPLE_LENGTH_FACTOR * instance.degree, t)


def find_group_conjugator(
    a0: GeneratingSet,
    a1: GeneratingSet,
    u: GeneratingSet,
    cap: int = DEFAULT_SEARCH_CAP,
) -> Optional[Permutation]:
    """Brute-force search of <U> for a conjugator taking <A0> to <A1>,
    first match in enumeration order; None if no element works."""
    chain_u = build_chain(u)
    if chain_u.order() > cap:
        raise BudgetExceeded(f"prover budget exceeded: |<U>| = {chain_u.order()} > cap {cap}")
    chain0 = build_chain(a0)
    chain1 = build_chain(a1)
    if chain0.order() != chain1.order():
        return None
    gens0 = a0.canonical().gens
    for v in enumerate_elements(chain_u, cap):
        if all(chain1.contains(g.conjugated_by(v)) for g in gens0):
            return v
    return None


class InstanceContext:
    """Chains, enumerations, and the resolved witness for one instance,
    shared by every session that runs on it."""

    def __init__(self, instance: GroupConjInstance, search_cap: int = DEFAULT_SEARCH_CAP):
        self.instance = instance
        self.search_cap = search_cap
        self._chains: dict = {}
        self._u_elements = None
        self._witness = instance.witness
        self._searched = instance.witness is not None

    @property
    def degree(self) -> int:
        return self.instance.degree

    def _chain(self, key: str, gset: GeneratingSet) -> StabilizerChain:
        if key not in self._chains:
            self._chains[key] = build_chain(gset)
        return self._chains[key]

    @property
    def chain_a0(self) -> StabilizerChain:
        return self._chain("a0", self.instance.a0)

    @property
    def chain_a1(self) -> StabilizerChain:
        return self._chain("a1", self.instance.a1)

    @property
    def chain_u(self) -> StabilizerChain:
        return self._chain("u", self.instance.u)

    def side_chain(self, bit: int) -> StabilizerChain:
        return self.chain_a1 if bit else self.chain_a0

    def u_elements(self) -> tuple:
        if self._u_elements is None:
            self._u_elements = enumerate_elements(self.chain_u, self.search_cap)
        return self._u_elements

    def side_profile(self, bit: int) -> Optional[tuple]:
        key = f"profile{bit}"
        if key not in self._chains:
            self._chains[key] = group_profile(self.side_chain(bit), self.search_cap)
        return self._chains[key]

    def _resolve(self):
        if not self._searched:
            self._witness = find_group_conjugator(
                self.instance.a0, self.instance.a1, self.instance.u, self.search_cap
            )
            self._searched = True

    def is_yes(self) -> bool:
        self._resolve()
        return self._witness is not None

    def witness(self) -> Permutation:
        self._resolve()
        if self._witness is None:
            raise ValueError("no conjugating element in <U>: not a yes-instance")
        return self._witness


def _coerce_perm(item, degree: int) -> Optional[Permutation]:
    """Accept a Permutation of the right degree, or raw wire data (text or
    an integer sequence) that parses into one; anything else is ill-typed."""
    if isinstance(item, Permutation):
        return item if item.degree == degree else None
    if isinstance(item, str):
        try:
            p = Permutation(item.split())
        except ValueError:
            return None
        return p if p.degree == degree else None
    if isinstance(item, (list, tuple)) and all(isinstance(i, int) for i in item):
        try:
            p = Permutation(item)
        except ValueError:
            return None
        return p if p.degree == degree else None
    return None


def coerce_commit(degree: int, k: int, payload) -> Optional[tuple]:
    """Validated commitment: exactly k permutations of the instance degree,
    or None when the payload is malformed."""
    if not isinstance(payload, (tuple, list)) or len(payload) != k:
        return None
    out = []
    for item in payload:
        p = _coerce_perm(item, degree)
        if p is None:
            return None
        out.append(p)
    return tuple(out)


def commit_payload_ok(degree: int, k: int, payload) -> bool:
    return coerce_commit(degree, k, payload) is not None


def response_accepted(ctx: InstanceContext, commit: tuple, challenge, response) -> bool:
    """The verifier's final checks: the response is a permutation in <U>
    and the committed tuple generates the challenged group conjugated by it."""
    w = _coerce_perm(response, ctx.degree)
    if w is None or not ctx.chain_u.contains(w):
        return False
    side_chain = ctx.side_chain(challenge_bit(challenge))
    tuple_chain = build_chain(GeneratingSet(ctx.degree, commit))
    if tuple_chain.order() != side_chain.order():
        return False
    w_inv = w.inverse()
    return all(side_chain.contains(x.conjugated_by(w_inv)) for x in commit)


class HonestProver:
    """Follows the protocol; requires a conjugating witness."""

    def __init__(self, ctx: InstanceContext, params: ProtocolParams):
        self.ctx = ctx
        self.params = params
        self._v = ctx.witness()

    def commit(self, rng):
        ctx = self.ctx
        mask = ctx.chain_u.random_element(rng)
        gt = random_generating_tuple(ctx.instance.a1, self.params.k, rng, chain=ctx.chain_a1)
        payload = tuple(x.conjugated_by(mask) for x in gt.perms)
        return (mask, gt.attempts), payload

    def respond(self, state, challenge) -> Permutation:
        mask = state[0]
        return mask if challenge_bit(challenge) else self._v * mask


class GuessingProver:
    """Cheating strategy without a witness: commits on a random side and
    reveals the bare mask regardless of the challenge, so it wins exactly
    when the challenge lands on its guess (or the groups already agree)."""

    def __init__(self, ctx: InstanceContext, params: ProtocolParams):
        self.ctx = ctx
        self.params = params

    def commit(self, rng):
        ctx = self.ctx
        side = rng.randrange(2)
        mask = ctx.chain_u.random_element(rng)
        gt = random_generating_tuple(
            ctx.instance.side(side), self.params.k, rng, chain=ctx.side_chain(side)
        )
        payload = tuple(x.conjugated_by(mask) for x in gt.perms)
        return (mask, gt.attempts), payload

    def respond(self, state, challenge) -> Permutation:
        return state[0]


def session(ctx: InstanceContext, params: ProtocolParams, prover, program: VerifierProgram, rng_p, tape_v: RandomTape):
    """One atomic session as a generator; ill-typed prover messages abort
    with a rejecting outcome."""
    messages = []
    round_ns = []
    last = time.perf_counter_ns()

    def mark():
        nonlocal last
        now = time.perf_counter_ns()
        round_ns.append(now - last)
        last = now

    def outcome(accepted, extra=None):
        counters = {"round_ns": tuple(round_ns)}
        if extra:
            counters.update(extra)
        return SessionOutcome(accepted, View(tape_v.prefix(), tuple(messages)), counters)

    state, payload = prover.commit(rng_p)
    mark()
    msg = Message(PROVER, payload)
    messages.append(msg)
    yield msg
    commit = coerce_commit(ctx.degree, params.k, payload)
    if commit is None:
        return outcome(False)

    challenge = program.challenge(ctx.instance, tape_v, payload)
    mark()
    msg = Message(VERIFIER, challenge)
    messages.append(msg)
    yield msg

    response = prover.respond(state, challenge)
    mark()
    msg = Message(PROVER, response)
    messages.append(msg)
    yield msg

    accepted = response_accepted(ctx, commit, challenge, response)
    mark()
    return outcome(accepted, {"tuple_attempts": state[1]})


def make_session_factory(ctx, params, prover, program):
    return lambda rng_p, tape_v: session(ctx, params, prover, program, rng_p, tape_v)


def run_composed(ctx, params, prover, program, rng: random.Random, parallel: bool = False):
    """Compose params.t sessions; accept iff all of them accept."""
    factory = make_session_factory(ctx, params, prover, program)
    runner = run_parallel if parallel else run_sequential
    return runner(factory, params.t, rng)


def replay_verdict(ctx: InstanceContext, params: ProtocolParams, view: View) -> bool:
    """Re-run the honest verifier on a recorded view: redraw the challenge
    from the recorded tape prefix and recheck the prover messages."""
    msgs = view.messages
    if len(msgs) < 3:
        return False
    commit = coerce_commit(ctx.degree, params.k, msgs[0].payload)
    if commit is None:
        return False
    tape = RandomTape(view.r_prefix.seed)
    challenge = bit_payload(tape.bit())
    return response_accepted(ctx, commit, challenge, msgs[2].payload)


def extract_witness(response_0: Permutation, response_1: Permutation) -> Permutation:
    """Knowledge extraction from two accepting responses to both challenges
    of one commitment: the returned value conjugates <A0> onto <A1>."""
    return response_0 * response_1.inverse()
