"""Two-round cooperative repair of h failed nodes from d helpers.

Round 1: the failed node of rank u downloads from every helper ``i`` the
s**n sums::

    sum_{j=0}^{s-2} c[i, j+1, a(i_u, a_{i_u}+j)] + c[i, s+u-1, a(i_u, a_{i_u}+s-1)]

(digit arithmetic mod s). Summing the parity checks of the s slices involved
shows these values, together with the s own symbols and the same sums for
every other node, form a GRS codeword of length n+s-1 and dimension d, so
the d helper sums determine the rest. The failed node thereby learns planes
1..s-1 and s+u-1 of itself plus the corresponding sums for every other
failed node.

Round 2: failed node u sends each other failed node w the sums it learned
about w. Node w knows planes 1..s-1 of itself and peels them off, leaving
plane s+u-1 of its own content.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .bounds import RepairTranscript
from .code import CodeParams, erasure_solve_batch


class RepairError(ValueError):
    pass


@dataclass(frozen=True)
class RepairPlan:
    failed: tuple[int, ...]
    helpers: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "failed", tuple(sorted(self.failed)))
        object.__setattr__(self, "helpers", tuple(sorted(self.helpers)))
        if len(set(self.failed)) != len(self.failed) or len(set(self.helpers)) != len(self.helpers):
            raise RepairError("duplicate node in repair plan")
        if set(self.failed) & set(self.helpers):
            raise RepairError("a failed node cannot be a helper")

    def rank(self, node: int) -> int:
        """1-based position of ``node`` in the sorted failed set."""
        try:
            return self.failed.index(node) + 1
        except ValueError:
            raise RepairError(f"node {node} is not failed in this plan") from None

    def node(self, rank: int) -> int:
        if not 1 <= rank <= len(self.failed):
            raise RepairError(f"rank {rank} outside [1, {len(self.failed)}]")
        return self.failed[rank - 1]

    def validate(self, params: CodeParams) -> None:
        nodes = self.failed + self.helpers
        if any(not 1 <= i <= params.n for i in nodes):
            raise RepairError(f"node index outside [1, {params.n}]")
        if len(self.failed) != params.h:
            raise RepairError(f"plan has {len(self.failed)} failed nodes, code repairs h={params.h}")
        if len(self.helpers) != params.d:
            raise RepairError(f"plan has {len(self.helpers)} helpers, code needs d={params.d}")


@dataclass(frozen=True)
class RepairMessage:
    sender: int
    receiver: int
    round: int
    payload: np.ndarray

    @property
    def symbols(self) -> int:
        return int(self.payload.size)


@dataclass
class PartialNode:
    """What a failed node knows after round 1.

    ``known_planes`` maps 0-based plane index to that plane's s**n symbols;
    ``cross_sums`` maps each other failed node to the round-1 sums about it.
    """

    owner: int
    rank: int
    known_planes: dict[int, np.ndarray]
    cross_sums: dict[int, np.ndarray] = field(default_factory=dict)


def _rank_plane(params: CodeParams, rank: int) -> int:
    # plane s+u-1 in 1-based numbering
    return params.s + rank - 2


def helper_round1_response(params: CodeParams, helper: int, content, plan: RepairPlan, rank: int) -> RepairMessage:
    """Sums that helper node ``helper`` sends to the failed node of ``rank``."""
    if helper not in plan.helpers:
        raise RepairError(f"node {helper} is not a helper in this plan")
    target = plan.node(rank)
    gf_planes = params.planes(np.asarray(content, dtype=np.int64))
    s = params.s
    payload = gf_planes[_rank_plane(params, rank)][params.shifted(target, s - 1)].copy()
    for j in range(s - 1):
        payload ^= gf_planes[j][params.shifted(target, j)]
    return RepairMessage(helper, target, 1, payload)


def round1_decode(params: CodeParams, plan: RepairPlan, rank: int, responses: Mapping[int, RepairMessage] | Sequence[RepairMessage]) -> PartialNode:
    """Solve the per-index GRS systems from the d helper responses."""
    msgs = list(responses.values()) if isinstance(responses, Mapping) else list(responses)
    target = plan.node(rank)
    by_sender: dict[int, np.ndarray] = {}
    for msg in msgs:
        if msg.round != 1 or msg.receiver != target:
            raise RepairError(f"message {msg.sender}->{msg.receiver} (round {msg.round}) not addressed to rank {rank}")
        if msg.sender in by_sender:
            raise RepairError(f"duplicate response from helper {msg.sender}")
        if msg.sender not in plan.helpers:
            raise RepairError(f"response from non-helper {msg.sender}")
        if msg.payload.size != params.width:
            raise RepairError(f"payload from {msg.sender} has {msg.payload.size} symbols, expected {params.width}")
        by_sender[msg.sender] = np.asarray(msg.payload, dtype=np.int64)
    missing = set(plan.helpers) - set(by_sender)
    if missing:
        raise RepairError(f"missing responses from helpers {sorted(missing)}")

    s = params.s
    others = [i for i in range(1, params.n + 1) if i != target]
    pos = {i: s + p for p, i in enumerate(others)}
    # Length n+s-1 GRS vector at index a: the target's s symbols at points
    # lam[target, a_t + j], then one sum per other node at lam[i, a_i].
    own = params.digit_table[:, target - 1]
    pts = np.concatenate(
        [
            params.eval_points[target - 1][(own[:, None] + np.arange(s)[None, :]) % s],
            params.slice_points[:, [i - 1 for i in others]],
        ],
        axis=1,
    )
    vec = np.zeros((params.width, s + len(others)), dtype=np.int64)
    for i in plan.helpers:
        vec[:, pos[i]] = by_sender[i]
    unknown = list(range(s)) + [pos[i] for i in others if i not in plan.helpers]
    solved = erasure_solve_batch(params.field, pts, params.r, vec, unknown).T

    # coordinate j < s-1 is c[target, j+1, a(target, a_t+j)]; coordinate s-1
    # sits on the rank's own plane
    known_planes = {}
    for j in range(s):
        plane = j if j < s - 1 else _rank_plane(params, rank)
        vals = np.zeros(params.width, dtype=np.int64)
        vals[params.shifted(target, j)] = solved[j]
        known_planes[plane] = vals
    cross = {w: solved[pos[w]].copy() for w in plan.failed if w != target}
    return PartialNode(target, rank, known_planes, cross)


def round2_message(partial: PartialNode, receiver: int) -> RepairMessage:
    """Forward the round-1 sums about ``receiver`` to it, verbatim."""
    if receiver not in partial.cross_sums:
        raise RepairError(f"node {partial.owner} holds no round-1 sums about node {receiver}")
    return RepairMessage(partial.owner, receiver, 2, partial.cross_sums[receiver])


def round2_finish(params: CodeParams, plan: RepairPlan, partial: PartialNode, messages: Sequence[RepairMessage]) -> np.ndarray:
    """Peel known planes off the round-2 sums and return the full node vector."""
    if partial.owner != plan.node(partial.rank):
        raise RepairError("partial node does not match the plan")
    s = params.s
    planes = np.zeros((params.m, params.width), dtype=np.int64)
    for p, vals in partial.known_planes.items():
        planes[p] = vals
    got = {}
    for msg in messages:
        if msg.round != 2 or msg.receiver != partial.owner:
            raise RepairError(f"message {msg.sender}->{msg.receiver} (round {msg.round}) not for node {partial.owner}")
        if msg.sender in got:
            raise RepairError(f"duplicate round-2 message from {msg.sender}")
        got[msg.sender] = msg
    expected = set(plan.failed) - {partial.owner}
    if set(got) != expected:
        raise RepairError(f"round-2 senders {sorted(got)} do not match {sorted(expected)}")

    for sender, msg in got.items():
        peeled = np.asarray(msg.payload, dtype=np.int64).copy()
        for j in range(s - 1):
            peeled ^= planes[j][params.shifted(sender, j)]
        plane = _rank_plane(params, plan.rank(sender))
        planes[plane][params.shifted(sender, s - 1)] = peeled
    return planes.reshape(params.l)


def cooperative_repair(params: CodeParams, surviving: Mapping[int, Sequence[int]], plan: RepairPlan) -> tuple[dict[int, np.ndarray], RepairTranscript]:
    """Run both rounds in-process; returns repaired nodes and the transcript.

    Only the helpers listed in ``plan`` are read from ``surviving``.
    """
    plan.validate(params)
    missing = [i for i in plan.helpers if i not in surviving]
    if missing:
        raise RepairError(f"helper nodes {missing} not available")
    transcript = RepairTranscript(k=params.k, l=params.l, h=len(plan.failed), d=len(plan.helpers))

    partials = {}
    for rank, target in enumerate(plan.failed, start=1):
        responses = [helper_round1_response(params, i, surviving[i], plan, rank) for i in plan.helpers]
        for msg in responses:
            transcript.record(msg.round, msg.sender, msg.receiver, msg.symbols)
        partials[target] = round1_decode(params, plan, rank, responses)

    inbox: dict[int, list[RepairMessage]] = {i: [] for i in plan.failed}
    for sender in plan.failed:
        for receiver in plan.failed:
            if receiver != sender:
                msg = round2_message(partials[sender], receiver)
                transcript.record(msg.round, msg.sender, msg.receiver, msg.symbols)
                inbox[receiver].append(msg)

    repaired = {i: round2_finish(params, plan, partials[i], inbox[i]) for i in plan.failed}
    return repaired, transcript
