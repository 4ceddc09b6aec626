"""Deterministic in-process simulation of an n-node storage cluster.

Every repair message crosses a metered channel; failed nodes rebuild
themselves only from what arrives on their inbox plus their own round-1
state. The simulator keeps a copy of each failed node's content for test
comparison (``oracle_node``); no protocol code path reads it.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from typing import Iterable, Mapping

import numpy as np

from .bounds import BoundReport, RepairTranscript, meter_close
from .code import CodeParams, encode, is_codeword, mds_decode
from .repair import (
    RepairError,
    RepairMessage,
    RepairPlan,
    helper_round1_response,
    round1_decode,
    round2_finish,
    round2_message,
)

log = logging.getLogger(__name__)


class ClusterLost(RuntimeError):
    """More than n-k nodes have failed; the data is unrecoverable."""


class _Network:
    """Synchronous lossless channels with a shared symbol meter."""

    def __init__(self, transcript: RepairTranscript):
        self.transcript = transcript
        self._inbox: dict[tuple[int, int], list[RepairMessage]] = defaultdict(list)

    def send(self, msg: RepairMessage) -> None:
        self.transcript.record(msg.round, msg.sender, msg.receiver, msg.symbols)
        self._inbox[(msg.receiver, msg.round)].append(msg)

    def receive(self, node: int, round: int) -> list[RepairMessage]:
        return self._inbox.pop((node, round), [])


class ClusterState:
    def __init__(self, params: CodeParams, shards: Mapping[int, np.ndarray]):
        self.params = params
        self.shards: dict[int, np.ndarray | None] = {}
        for i in range(1, params.n + 1):
            vec = shards.get(i)
            if vec is not None:
                vec = np.array(vec, dtype=np.int64).reshape(params.l)
            self.shards[i] = vec
        self.meter: RepairTranscript | None = None
        self.events: list[str] = []
        self._oracle: dict[int, np.ndarray] = {i: v.copy() for i, v in self.shards.items() if v is not None}
        if len(self.failed) > params.n - params.k:
            raise ClusterLost(f"{len(self.failed)} nodes missing; at most {params.n - params.k} tolerated")

    @property
    def failed(self) -> list[int]:
        return [i for i, v in self.shards.items() if v is None]

    @property
    def live(self) -> list[int]:
        return [i for i, v in self.shards.items() if v is not None]

    def oracle_node(self, i: int) -> np.ndarray:
        """Content node ``i`` held before it failed. Test-only."""
        return self._oracle[i].copy()


def cluster_init(params: CodeParams, message) -> ClusterState:
    word = encode(params, message)
    return ClusterState(params, {i + 1: word[i] for i in range(params.n)})


def fail_nodes(state: ClusterState, nodes: Iterable[int]) -> ClusterState:
    nodes = set(nodes)
    for i in nodes:
        if i not in state.shards:
            raise ValueError(f"node {i} outside [1, {state.params.n}]")
    after = set(state.failed) | nodes
    if len(after) > state.params.n - state.params.k:
        raise ClusterLost(f"failing {sorted(after)} exceeds the n-k={state.params.n - state.params.k} tolerated failures")
    for i in sorted(nodes):
        state.shards[i] = None
    return state


def _close_session(state: ClusterState, transcript: RepairTranscript) -> BoundReport:
    report = meter_close(transcript)
    state.meter = transcript
    for rec in transcript.canonical():
        state.events.append(f"R{rec.round} {rec.sender}->{rec.receiver} {rec.symbols}")
    state.events.append(f"TOTAL round1={report.round1_total} round2={report.round2_total} total={report.total}")
    yn = {True: "yes", False: "no"}
    state.events.append(
        f"BOUND co={report.co_bound} met={yn[report.co_met]} ce={report.ce_bound} met={yn[report.ce_met]} naive={report.naive_cooperative}"
    )
    return report


def run_cooperative_repair(state: ClusterState, failed: Iterable[int], helpers: Iterable[int]) -> tuple[ClusterState, BoundReport]:
    params = state.params
    failed, helpers = sorted(set(failed)), sorted(set(helpers))
    transcript = RepairTranscript(k=params.k, l=params.l, h=len(failed), d=len(helpers))
    if not failed:
        return state, _close_session(state, transcript)
    not_failed = [i for i in failed if state.shards.get(i, 0) is not None]
    if not_failed:
        raise RepairError(f"nodes {not_failed} are not failed")
    dead = [i for i in helpers if state.shards.get(i) is None]
    if dead or len(helpers) < params.d:
        raise RepairError(f"insufficient live helpers: need d={params.d} live nodes, got {len(helpers) - len(dead)}")
    plan = RepairPlan(tuple(failed), tuple(helpers))
    plan.validate(params)

    net = _Network(transcript)
    for rank, target in enumerate(plan.failed, start=1):
        for i in plan.helpers:
            net.send(helper_round1_response(params, i, state.shards[i], plan, rank))
    partials = {t: round1_decode(params, plan, rank, net.receive(t, 1)) for rank, t in enumerate(plan.failed, start=1)}

    # barrier: round-2 payloads exist only once every round-1 decode is done
    for sender in plan.failed:
        for receiver in plan.failed:
            if receiver != sender:
                net.send(round2_message(partials[sender], receiver))
    for t in plan.failed:
        state.shards[t] = round2_finish(params, plan, partials[t], net.receive(t, 2))

    report = _close_session(state, transcript)
    log.debug("cooperative repair of %s from %s: %d symbols", failed, helpers, report.total)
    return state, report


def run_naive_repair(state: ClusterState, failed: Iterable[int]) -> tuple[ClusterState, BoundReport]:
    """Baseline: every failed node downloads k whole nodes and decodes."""
    params = state.params
    failed = sorted(set(failed))
    not_failed = [i for i in failed if state.shards.get(i, 0) is not None]
    if not_failed:
        raise RepairError(f"nodes {not_failed} are not failed")
    live = state.live
    if len(live) < params.k:
        raise ClusterLost(f"only {len(live)} live nodes; need k={params.k}")
    sources = live[: params.k]
    # bounds are those of the code's design point, for contrast with the optimum
    transcript = RepairTranscript(k=params.k, l=params.l, h=len(failed), d=params.d)
    net = _Network(transcript)
    for t in failed:
        for i in sources:
            net.send(RepairMessage(i, t, 1, state.shards[i].copy()))
    for t in failed:
        got = {msg.sender: msg.payload for msg in net.receive(t, 1)}
        state.shards[t] = mds_decode(params, got)[t - 1]
    return state, _close_session(state, transcript)


def verify_cluster(state: ClusterState) -> bool:
    """True iff the live shards agree with a single codeword."""
    params = state.params
    live = state.live
    if len(live) < params.k:
        raise ClusterLost(f"only {len(live)} live nodes; need k={params.k} to verify")
    word = mds_decode(params, {i: state.shards[i] for i in live[: params.k]})
    if any(not np.array_equal(word[i - 1], state.shards[i]) for i in live):
        return False
    if len(live) == params.n:
        return is_codeword(params, np.stack([state.shards[i] for i in live]))
    return True
