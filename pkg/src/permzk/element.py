"""Interactive proof that two single permutations are conjugate by an
element of a given group, plus the two reductions tying that problem to
coset intersection with a centralizer.

The protocol is the group-conjugacy protocol with the commitment shrunk to
one permutation: mask a1 by a random u in <U>, reveal u or v*u on demand.
No generating-tuple sampling is involved, so the simulator's restart loop
needs exactly one sample per attempt.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .engine import (
    BudgetExceeded,
    GeneratingSet,
    StabilizerChain,
    build_chain,
    centralizer_in_sym,
    enumerate_elements,
)
from .framework import (
    PROVER,
    VERIFIER,
    Message,
    RandomTape,
    SessionOutcome,
    VerifierProgram,
    View,
    challenge_bit,
    run_parallel,
    run_sequential,
)
from .conjugacy import DEFAULT_SEARCH_CAP, ProtocolParams, _coerce_perm
from .perm import Permutation, conjugator_in_sym
from .simulator import (
    DEFAULT_MAX_RESTARTS,
    SimulatedView,
    SimulateResult,
    simulate_with_rewinding,
    total_variation,
)


@dataclass(frozen=True)
class ElemConjInstance:
    """Are a0 and a1 conjugate by an element of <U>?"""

    degree: int
    a0: Permutation
    a1: Permutation
    u: GeneratingSet
    witness: Optional[Permutation] = None

    def __post_init__(self):
        for name, p in (("a0", self.a0), ("a1", self.a1)):
            if p.degree != self.degree:
                raise ValueError(f"{name} degree {p.degree} does not match instance degree {self.degree}")
        if self.u.degree != self.degree:
            raise ValueError(f"U degree {self.u.degree} does not match instance degree {self.degree}")
        if self.witness is not None and self.witness.degree != self.degree:
            raise ValueError("witness degree does not match instance degree")

    def side(self, bit: int) -> Permutation:
        return self.a1 if bit else self.a0


@dataclass(frozen=True)
class CosetIntersectionInstance:
    """Does the centralizer of x in S_m meet the coset <U>*y?"""

    degree: int
    x: Permutation
    y: Permutation
    u: GeneratingSet

    def __post_init__(self):
        for name, p in (("x", self.x), ("y", self.y)):
            if p.degree != self.degree:
                raise ValueError(f"{name} degree {p.degree} does not match instance degree {self.degree}")
        if self.u.degree != self.degree:
            raise ValueError(f"U degree {self.u.degree} does not match instance degree {self.degree}")


def find_elem_conjugator(
    a0: Permutation,
    a1: Permutation,
    u: GeneratingSet,
    cap: int = DEFAULT_SEARCH_CAP,
) -> Optional[Permutation]:
    """First v in <U> (enumeration order, identity first) conjugating a0 to
    a1; None when no element works."""
    if a0.cycle_type() != a1.cycle_type():
        return None
    chain_u = build_chain(u)
    if chain_u.order() > cap:
        raise BudgetExceeded(f"prover budget exceeded: |<U>| = {chain_u.order()} > cap {cap}")
    for v in enumerate_elements(chain_u, cap):
        if a0.conjugated_by(v) == a1:
            return v
    return None


class ElementContext:
    """Cached chain and witness resolution for one element instance."""

    def __init__(self, instance: ElemConjInstance, search_cap: int = DEFAULT_SEARCH_CAP):
        self.instance = instance
        self.search_cap = search_cap
        self._chain_u: Optional[StabilizerChain] = None
        self._u_elements = None
        self._witness = instance.witness
        self._searched = instance.witness is not None

    @property
    def degree(self) -> int:
        return self.instance.degree

    @property
    def chain_u(self) -> StabilizerChain:
        if self._chain_u is None:
            self._chain_u = build_chain(self.instance.u)
        return self._chain_u

    def u_elements(self) -> tuple:
        if self._u_elements is None:
            self._u_elements = enumerate_elements(self.chain_u, self.search_cap)
        return self._u_elements

    def _resolve(self):
        if not self._searched:
            self._witness = find_elem_conjugator(
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


def params_for(instance, k: int = 1, t: int = 1) -> ProtocolParams:
    """The commitment is a single permutation; k is fixed at 1 and kept in
    the params object only so the session plumbing stays shared."""
    return ProtocolParams(k, t)


def response_accepted(ctx: ElementContext, commit: Permutation, challenge, response) -> bool:
    """Verifier checks: response in <U> and the committed permutation is the
    challenged side conjugated by it."""
    w = _coerce_perm(response, ctx.degree)
    if w is None or not ctx.chain_u.contains(w):
        return False
    return commit == ctx.instance.side(challenge_bit(challenge)).conjugated_by(w)


class HonestElemProver:
    def __init__(self, ctx: ElementContext):
        self.ctx = ctx
        self._v = ctx.witness()

    def commit(self, rng):
        mask = self.ctx.chain_u.random_element(rng)
        return (mask,), self.ctx.instance.a1.conjugated_by(mask)

    def respond(self, state, challenge) -> Permutation:
        mask = state[0]
        return mask if challenge_bit(challenge) else self._v * mask


class GuessingElemProver:
    """Witness-free cheater: commit on a guessed side, reveal the mask."""

    def __init__(self, ctx: ElementContext):
        self.ctx = ctx

    def commit(self, rng):
        side = rng.randrange(2)
        mask = self.ctx.chain_u.random_element(rng)
        return (mask,), self.ctx.instance.side(side).conjugated_by(mask)

    def respond(self, state, challenge) -> Permutation:
        return state[0]


def session(ctx: ElementContext, params: ProtocolParams, prover, program: VerifierProgram, rng_p, tape_v: RandomTape):
    """One atomic session; an ill-typed commitment aborts with a reject."""
    messages = []
    round_ns = []
    last = time.perf_counter_ns()

    def mark():
        nonlocal last
        now = time.perf_counter_ns()
        round_ns.append(now - last)
        last = now

    def outcome(accepted):
        return SessionOutcome(
            accepted, View(tape_v.prefix(), tuple(messages)), {"round_ns": tuple(round_ns)}
        )

    state, payload = prover.commit(rng_p)
    mark()
    msg = Message(PROVER, payload)
    messages.append(msg)
    yield msg
    commit = _coerce_perm(payload, ctx.degree)
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

    return outcome(response_accepted(ctx, commit, challenge, response))


def make_session_factory(ctx, params, prover, program):
    return lambda rng_p, tape_v: session(ctx, params, prover, program, rng_p, tape_v)


def run_composed(ctx, params, prover, program, rng: random.Random, parallel: bool = False):
    factory = make_session_factory(ctx, params, prover, program)
    runner = run_parallel if parallel else run_sequential
    return runner(factory, params.t, rng)


# -- reductions against coset intersection --------------------------------


def reduce_element_to_coset(inst: ElemConjInstance) -> Optional[CosetIntersectionInstance]:
    """When the elements are conjugate in the full symmetric group at all,
    the conjugators form the coset C(a0)*s, so membership of one in <U>
    becomes an intersection question with y = s inverse.  Different cycle
    types mean a trivial no, reported as None."""
    s = conjugator_in_sym(inst.a0, inst.a1)
    if s is None:
        return None
    return CosetIntersectionInstance(inst.degree, inst.a0, s.inverse(), inst.u)


def reduce_coset_to_element(inst: CosetIntersectionInstance) -> ElemConjInstance:
    """C(x) meets <U>*y exactly when x and its conjugate by y inverse are
    conjugate via <U>."""
    return ElemConjInstance(
        inst.degree, inst.x, inst.x.conjugated_by(inst.y.inverse()), inst.u
    )


def coset_intersects(inst: CosetIntersectionInstance, cap: int = DEFAULT_SEARCH_CAP) -> bool:
    """Exhaustive ground truth: some h in <U> with h*y centralizing x."""
    chain_u = build_chain(inst.u)
    x = inst.x
    for h in enumerate_elements(chain_u, cap):
        z = h * inst.y
        if z * x == x * z:
            return True
    return False


def centralizer_coset_oracle(inst: CosetIntersectionInstance, cap: int = DEFAULT_SEARCH_CAP) -> bool:
    """Same question from the other side: enumerate the centralizer of x in
    S_m and test membership of c*y^-1 in <U>.  Used to cross-check
    coset_intersects in tests."""
    chain_c = build_chain(centralizer_in_sym(inst.x))
    chain_u = build_chain(inst.u)
    y_inv = inst.y.inverse()
    return any(chain_u.contains(c * y_inv) for c in enumerate_elements(chain_c, cap))


def elements_conjugate_in(
    a0: Permutation, a1: Permutation, u: GeneratingSet, cap: int = DEFAULT_SEARCH_CAP
) -> bool:
    return find_elem_conjugator(a0, a1, u, cap) is not None


# -- simulator specialization ----------------------------------------------


def _element_commit_sampler(ctx: ElementContext):
    def sample(side: int, mask, rng):
        return ctx.instance.side(side).conjugated_by(mask), 1

    return sample


def simulate_element(
    ctx: ElementContext,
    program: VerifierProgram,
    rng: random.Random,
    *,
    tape_seed: Optional[int] = None,
    max_restarts: int = DEFAULT_MAX_RESTARTS,
    record_attempts: bool = False,
) -> SimulateResult:
    return simulate_with_rewinding(
        ctx.instance,
        ctx.chain_u,
        _element_commit_sampler(ctx),
        program,
        rng,
        tape_seed,
        max_restarts,
        record_attempts,
    )


def element_view_from_randomness(
    ctx: ElementContext,
    program: VerifierProgram,
    tape_seed: int,
    mask,
    *,
    witness=None,
) -> SimulatedView:
    """Honest-prover view as a function of the prover's one random draw."""
    v = witness if witness is not None else ctx.witness()
    commit = ctx.instance.a1.conjugated_by(mask)
    tape = RandomTape(tape_seed)
    challenge = program.challenge(ctx.instance, tape, commit)
    response = mask if challenge_bit(challenge) else v * mask
    return SimulatedView(tape.prefix(), commit, challenge, response)


def randomness_of_element_view(ctx: ElementContext, view: SimulatedView, *, witness=None):
    v = witness if witness is not None else ctx.witness()
    return view.response if challenge_bit(view.challenge) else v.inverse() * view.response


def real_element_view(
    ctx: ElementContext,
    program: VerifierProgram,
    rng: random.Random,
    *,
    tape_seed: Optional[int] = None,
) -> SimulatedView:
    if tape_seed is None:
        tape_seed = rng.getrandbits(64)
    mask = ctx.chain_u.random_element(rng)
    return element_view_from_randomness(ctx, program, tape_seed, mask)


def enumerate_consistent_element_views(
    ctx: ElementContext,
    program: VerifierProgram,
    tape_seed: int,
    cap: int = DEFAULT_SEARCH_CAP,
) -> tuple:
    """Every accepting view for this tape, straight from the definition."""
    views = []
    seen = set()
    for w in ctx.u_elements():
        for side in (0, 1):
            commit = ctx.instance.side(side).conjugated_by(w)
            tape = RandomTape(tape_seed)
            challenge = program.challenge(ctx.instance, tape, commit)
            if challenge_bit(challenge) != side:
                continue
            view = SimulatedView(tape.prefix(), commit, challenge, w)
            if view not in seen:
                seen.add(view)
                views.append(view)
    return tuple(views)


def verify_element_bijection(
    ctx: ElementContext,
    program: VerifierProgram,
    tape_seed: int,
    *,
    witness=None,
    cap: int = DEFAULT_SEARCH_CAP,
) -> bool:
    v = witness if witness is not None else ctx.witness()
    images = []
    for mask in ctx.u_elements():
        view = element_view_from_randomness(ctx, program, tape_seed, mask, witness=v)
        if randomness_of_element_view(ctx, view, witness=v) != mask:
            return False
        images.append(view)
    if len(set(images)) != len(images):
        return False
    consistent = set(enumerate_consistent_element_views(ctx, program, tape_seed, cap))
    return set(images) == consistent


def exact_element_real_law(
    ctx: ElementContext, program: VerifierProgram, tape_seed: int
) -> dict:
    elems = ctx.u_elements()
    weight = Fraction(1, len(elems))
    law: dict = {}
    for mask in elems:
        view = element_view_from_randomness(ctx, program, tape_seed, mask)
        law[view] = law.get(view, Fraction(0)) + weight
    return law


def exact_element_sim_law(
    ctx: ElementContext, program: VerifierProgram, tape_seed: int
) -> dict:
    elems = ctx.u_elements()
    weight = Fraction(1, 2 * len(elems))
    mass: dict = {}
    total = Fraction(0)
    for side in (0, 1):
        for mask in elems:
            commit = ctx.instance.side(side).conjugated_by(mask)
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


def compare_element_view_distributions(
    ctx: ElementContext, program: VerifierProgram, *, tape_seed: int
) -> dict:
    """Exact-only comparison; the whole view space is |<U>| big, so there is
    nothing to sample."""
    if not ctx.is_yes():
        raise ValueError("zero-knowledge comparison applies to yes-instances only")
    law_r = exact_element_real_law(ctx, program, tape_seed)
    law_s = exact_element_sim_law(ctx, program, tape_seed)
    consistent = enumerate_consistent_element_views(ctx, program, tape_seed)
    uniform = Fraction(1, len(consistent))
    return {
        "mode": "exact",
        "domain": len(consistent),
        "laws_equal": law_r == law_s,
        "uniform_on_consistent": all(law_r.get(v) == uniform for v in consistent)
        and len(law_r) == len(consistent),
        "tv_distance_upper": float(total_variation(law_r, law_s)),
    }
