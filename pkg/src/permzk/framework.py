"""Session plumbing shared by every protocol in the package: messages,
deterministic random tapes, views, verifier programs, and the sequential and
parallel composition runners.

A session is a generator that yields each Message as it is sent and returns
a SessionOutcome.  The runners only drive generators and record events, so
they work for any round schedule.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from .perm import Permutation, format_perm

PROVER = "P"
VERIFIER = "V"


def challenge_bit(payload) -> int:
    """Canonical challenge decoding: exactly the byte string b"1" means 1,
    any other payload (including junk bytes) means 0."""
    return 1 if payload == b"1" else 0


def bit_payload(bit: int) -> bytes:
    return b"1" if bit else b"0"


@dataclass(frozen=True)
class Message:
    """One protocol message: sender "P" or "V" plus a payload, which is a
    permutation, a tuple of permutations, or a byte string."""

    sender: str
    payload: object


def render_payload(payload) -> str:
    if isinstance(payload, Permutation):
        return format_perm(payload)
    if isinstance(payload, bytes):
        return payload.decode("ascii", errors="backslashreplace")
    if isinstance(payload, (tuple, list)):
        parts = []
        for item in payload:
            parts.append(format_perm(item) if isinstance(item, Permutation) else repr(item))
        return ";".join(parts)
    return repr(payload)


@dataclass(frozen=True)
class TapePrefix:
    """The consumed prefix of a random tape: the seed plus how many draws
    were made.  Identical prefixes replay identically."""

    seed: int
    draws: int


class RandomTape:
    """Deterministic random stream for one party, with a draw counter."""

    def __init__(self, seed: int):
        self.seed = seed
        self.consumed = 0
        self._rng = random.Random(seed)

    def randrange(self, n: int) -> int:
        self.consumed += 1
        return self._rng.randrange(n)

    def bit(self) -> int:
        return self.randrange(2)

    def getrandbits(self, n: int) -> int:
        self.consumed += 1
        return self._rng.getrandbits(n)

    def prefix(self) -> TapePrefix:
        return TapePrefix(self.seed, self.consumed)


@dataclass(frozen=True)
class View:
    """Everything one party saw in a session: the verifier tape prefix and
    the ordered messages."""

    r_prefix: TapePrefix
    messages: tuple


@dataclass
class SessionOutcome:
    accepted: bool
    view: View
    counters: dict = field(default_factory=dict)


@dataclass(frozen=True)
class VerifierProgram:
    """A (possibly dishonest) verifier's challenge chooser: a pure function
    of the instance, its random tape, and the commitment message.  A tape
    budget, when declared, bounds how many draws one challenge may consume."""

    name: str
    choose: Callable[[object, RandomTape, object], bytes]
    tape_budget: Optional[int] = None

    def challenge(self, instance, tape: RandomTape, commit) -> bytes:
        before = tape.consumed
        out = self.choose(instance, tape, commit)
        if self.tape_budget is not None and tape.consumed - before > self.tape_budget:
            raise RuntimeError(
                f"verifier {self.name} consumed {tape.consumed - before} tape draws, "
                f"over its budget of {self.tape_budget}"
            )
        return out


def honest_verifier() -> VerifierProgram:
    """Challenge is one fresh tape bit, ignoring the commitment."""
    return VerifierProgram(
        "honest", lambda inst, tape, commit: bit_payload(tape.bit()), tape_budget=1
    )


def constant_verifier(bit) -> VerifierProgram:
    payload = bit if isinstance(bit, bytes) else bit_payload(int(bit))
    name = "const" + payload.decode("ascii", errors="backslashreplace")
    return VerifierProgram(name, lambda inst, tape, commit: payload, tape_budget=0)


def _payload_fixed_points(payload) -> int:
    perms = payload if isinstance(payload, (tuple, list)) else (payload,)
    total = 0
    for p in perms:
        if isinstance(p, Permutation):
            total += sum(1 for i, j in enumerate(p.images) if j == i + 1)
    return total


def parity_verifier() -> VerifierProgram:
    """Challenge is the parity of the total fixed-point count of the
    commitment, a deterministic message-dependent bit."""
    return VerifierProgram(
        "parity",
        lambda inst, tape, commit: bit_payload(_payload_fixed_points(commit) & 1),
        tape_budget=0,
    )


STANDARD_VERIFIERS = {
    "honest": honest_verifier,
    "const0": lambda: constant_verifier(0),
    "const1": lambda: constant_verifier(1),
    "parity": parity_verifier,
}


@dataclass
class CompositeOutcome:
    """Result of a composed run: accept iff every session accepted.  Events
    are (session index, round index, message) in emission order, which is
    session-major for sequential runs and round-major for parallel runs."""

    accepted: bool
    outcomes: tuple
    events: tuple

    def transcript(self) -> str:
        return render_transcript(self.events, self.accepted)


def render_transcript(events, accepted: bool) -> str:
    lines = [
        f"s{s + 1}.r{r + 1} {msg.sender} {render_payload(msg.payload)}"
        for s, r, msg in events
    ]
    lines.append("ACCEPT" if accepted else "REJECT")
    return "\n".join(lines) + "\n"


def run_session(session: Iterator) -> SessionOutcome:
    """Drive a session generator to completion, discarding the event trace."""
    while True:
        try:
            next(session)
        except StopIteration as stop:
            return stop.value


def _spawn(rng: random.Random):
    rng_p = random.Random(rng.getrandbits(64))
    tape_v = RandomTape(rng.getrandbits(64))
    return rng_p, tape_v


def run_sequential(make_session, t: int, rng: random.Random) -> CompositeOutcome:
    """t independent sessions one after another; accept iff all accept.
    make_session(rng_p, tape_v) must return a session generator."""
    if t < 1:
        raise ValueError("t must be at least 1")
    events = []
    outcomes = []
    for s_idx in range(t):
        rng_p, tape_v = _spawn(rng)
        gen = make_session(rng_p, tape_v)
        r_idx = 0
        while True:
            try:
                msg = next(gen)
            except StopIteration as stop:
                outcomes.append(stop.value)
                break
            events.append((s_idx, r_idx, msg))
            r_idx += 1
    accepted = all(o.accepted for o in outcomes)
    return CompositeOutcome(accepted, tuple(outcomes), tuple(events))


def run_parallel(make_session, t: int, rng: random.Random) -> CompositeOutcome:
    """t independent sessions advanced in lockstep, messages bundled round by
    round; accept iff all accept."""
    if t < 1:
        raise ValueError("t must be at least 1")
    gens = []
    for _ in range(t):
        rng_p, tape_v = _spawn(rng)
        gens.append(make_session(rng_p, tape_v))
    outcomes: dict = {}
    events = []
    alive = list(range(t))
    r_idx = 0
    while alive:
        still = []
        for s_idx in alive:
            try:
                msg = next(gens[s_idx])
            except StopIteration as stop:
                outcomes[s_idx] = stop.value
                continue
            events.append((s_idx, r_idx, msg))
            still.append(s_idx)
        alive = still
        r_idx += 1
    ordered = tuple(outcomes[i] for i in range(t))
    accepted = all(o.accepted for o in ordered)
    return CompositeOutcome(accepted, ordered, tuple(events))


class RoundTimer:
    """Wall-clock counters for the per-round work inside a session."""

    def __init__(self):
        self.round_ns = []
        self._last = time.perf_counter_ns()

    def mark(self):
        now = time.perf_counter_ns()
        self.round_ns.append(now - self._last)
        self._last = now
