"""Feasible flows with arc demands and max-cost circulations on top of networkx."""

from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Hashable
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

from ha_quotas.core.errors import FlowNetworkError

log = logging.getLogger(__name__)

Node = Hashable
UNBOUNDED = None
Flow = tuple[int, ...]

_SUPER_SOURCE = ("__flow__", "source")
_SUPER_SINK = ("__flow__", "sink")


@dataclass(frozen=True)
class Arc:
    tail: Node
    head: Node
    demand: int = 0
    capacity: Optional[int] = UNBOUNDED
    cost: int = 0


@dataclass
class FlowNetwork:
    """Directed network whose arcs carry a demand D, a capacity C (or UNBOUNDED) and a unit cost."""

    nodes: list[Node] = field(default_factory=list)
    arcs: list[Arc] = field(default_factory=list)
    allow_unbounded_demand: bool = False

    def add_node(self, v: Node) -> None:
        if v not in self.nodes:
            self.nodes.append(v)

    def add_arc(
        self,
        tail: Node,
        head: Node,
        demand: int = 0,
        capacity: Optional[int] = UNBOUNDED,
        cost: int = 0,
    ) -> int:
        """Append an arc and return its index."""
        self.add_node(tail)
        self.add_node(head)
        self.arcs.append(Arc(tail, head, demand, capacity, cost))
        return len(self.arcs) - 1

    def validate(self) -> None:
        known = set(self.nodes)
        for i, arc in enumerate(self.arcs):
            if arc.tail not in known or arc.head not in known:
                raise FlowNetworkError(f"arc {i} references an unknown node")
            values = [arc.demand, arc.cost] + ([] if arc.capacity is None else [arc.capacity])
            if any(not isinstance(x, int) or isinstance(x, bool) for x in values):
                raise FlowNetworkError(f"arc {i} has non-integer data")
            if arc.demand < 0:
                raise FlowNetworkError(f"arc {i} has negative demand {arc.demand}")
            if arc.capacity is not None and arc.capacity < arc.demand:
                raise FlowNetworkError(
                    f"arc {i} has demand {arc.demand} above capacity {arc.capacity}"
                )
            if arc.capacity is None and arc.demand and not self.allow_unbounded_demand:
                raise FlowNetworkError(f"arc {i} is unbounded but has nonzero demand")

    def finite_bound(self) -> int:
        """A capacity no circulation of these constructions ever needs to exceed."""
        finite = sum(a.capacity for a in self.arcs if a.capacity is not None)
        return finite + sum(a.demand for a in self.arcs)

    def capacity_of(self, arc: Arc) -> int:
        return self.finite_bound() if arc.capacity is None else arc.capacity


def check_flow_certificate(
    net: FlowNetwork,
    flow: Flow,
    source: Optional[Node] = None,
    sink: Optional[Node] = None,
) -> bool:
    """Bounds on every arc and conservation everywhere except at source and sink."""
    if len(flow) != len(net.arcs):
        return False
    balance: dict[Node, int] = defaultdict(int)
    for arc, f in zip(net.arcs, flow):
        if f < arc.demand or (arc.capacity is not None and f > arc.capacity):
            return False
        balance[arc.head] += f
        balance[arc.tail] -= f
    return all(b == 0 for v, b in balance.items() if v not in (source, sink))


# ── Feasible flow ──────────────────────────────────────────────────────

def feasible_flow(net: FlowNetwork, source: Node, sink: Node) -> Optional[Flow]:
    """An integral source–sink flow within [D, C] on every arc, or None.

    A sink → source return arc turns the question into a circulation; demands
    are removed by the excess/deficit transformation and the remainder is one
    max-flow problem between a super source and a super sink.
    """
    net.validate()
    if source not in net.nodes or sink not in net.nodes:
        raise FlowNetworkError("source and sink must be nodes of the network")
    bound = net.finite_bound()
    arcs = list(net.arcs) + [Arc(sink, source, 0, UNBOUNDED, 0)]

    G = nx.DiGraph()
    excess: dict[Node, int] = defaultdict(int)
    for i, arc in enumerate(arcs):
        cap = (bound if arc.capacity is None else arc.capacity) - arc.demand
        mid = ("__arc__", i)  # keeps parallel arcs apart in a simple DiGraph
        G.add_edge(arc.tail, mid, capacity=cap)
        G.add_edge(mid, arc.head, capacity=cap)
        excess[arc.head] += arc.demand
        excess[arc.tail] -= arc.demand

    required = 0
    G.add_node(_SUPER_SOURCE)
    G.add_node(_SUPER_SINK)
    for v, e in excess.items():
        if e > 0:
            G.add_edge(_SUPER_SOURCE, v, capacity=e)
            required += e
        elif e < 0:
            G.add_edge(v, _SUPER_SINK, capacity=-e)

    value, flow_dict = nx.maximum_flow(G, _SUPER_SOURCE, _SUPER_SINK)
    if value < required:
        log.debug("feasible_flow: pushed %d of %d required units", value, required)
        return None

    flow = tuple(
        arc.demand + flow_dict[arc.tail][("__arc__", i)] for i, arc in enumerate(net.arcs)
    )
    if not check_flow_certificate(net, flow, source, sink):
        raise FlowNetworkError("feasible_flow produced an invalid flow")
    return flow


# ── Max-cost circulation ───────────────────────────────────────────────

def max_cost_circulation(net: FlowNetwork) -> Optional[tuple[Flow, int]]:
    """Integral circulation of maximum total cost within [D, C], or None if none exists.

    Solved as a min-cost circulation on negated costs; lower bounds become node
    demands and unbounded capacities are capped at ``finite_bound``.
    """
    net.validate()
    bound = net.finite_bound()
    G = nx.MultiDiGraph()
    G.add_nodes_from(net.nodes)
    demand: dict[Node, int] = defaultdict(int)
    loops: dict[int, int] = {}
    for i, arc in enumerate(net.arcs):
        cap = bound if arc.capacity is None else arc.capacity
        if arc.tail == arc.head:
            loops[i] = cap if arc.cost > 0 else arc.demand
            continue
        G.add_edge(arc.tail, arc.head, key=i, capacity=cap - arc.demand, weight=-arc.cost)
        demand[arc.tail] += arc.demand
        demand[arc.head] -= arc.demand
    for v, d in demand.items():
        G.nodes[v]["demand"] = d

    flow_dict: dict = {}
    if G.number_of_nodes():
        try:
            _, flow_dict = nx.network_simplex(G)
        except nx.NetworkXUnfeasible:
            log.debug("max_cost_circulation: demands cannot be met")
            return None

    flow = tuple(
        loops[i] if i in loops else arc.demand + flow_dict[arc.tail][arc.head][i]
        for i, arc in enumerate(net.arcs)
    )
    if not check_flow_certificate(net, flow):
        raise FlowNetworkError("max_cost_circulation produced an invalid circulation")
    return flow, sum(arc.cost * f for arc, f in zip(net.arcs, flow))
