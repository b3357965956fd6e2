"""Price trees of seller machines, increments, and consistency checks.

The tree is enumerated at node level through ``machine.node_step`` so a
penalized search yields the modified tree whose rejection edges take ``r``
rounds.  Node ``t`` is the round at which the node's price is first
offered; only nodes with ``t <= depth`` are kept.
"""
from __future__ import annotations

from dataclasses import dataclass

MAX_TREE_DEPTH = 20


@dataclass(frozen=True)
class PriceTreeNode:
    id: int
    price: float
    accept_child: int | None
    reject_child: int | None
    t: int
    delta_r: float | None   # p(accept child) - p(node)
    delta_l: float | None   # max over the reject subtree of p(node) - p(n')
    path: str               # decisions from the root, 'A'/'R' per node step


class PriceTree:
    """Column storage for up to 2**20 nodes; ``tree[i]`` builds a node view."""

    def __init__(self, machine, depth: int):
        if depth < 1:
            raise ValueError("depth must be >= 1")
        if depth > MAX_TREE_DEPTH:
            raise ValueError(
                f"price tree depth {depth} refused: enumeration is exponential, "
                f"limit is {MAX_TREE_DEPTH}")
        self.machine = machine
        self.depth = depth
        self.price: list[float] = []
        self.t: list[int] = []
        self.acc: list[int | None] = []
        self.rej: list[int | None] = []
        self.paths: list[str] = []
        self.states: list = []
        self._build()
        self._subtree_extremes()

    def _add(self, state, t, path):
        self.price.append(self.machine.quote(state))
        self.t.append(t)
        self.acc.append(None)
        self.rej.append(None)
        self.paths.append(path)
        self.states.append(state)
        return len(self.price) - 1

    def _build(self):
        stack = [self._add(self.machine.initial_state(), 1, "")]
        while stack:
            i = stack.pop()
            _, acc_state, rej_state, rounds = self.machine.node_step(self.states[i])
            t = self.t[i]
            if t + rounds <= self.depth:
                j = self._add(rej_state, t + rounds, self.paths[i] + "R")
                self.rej[i] = j
                stack.append(j)
            if t + 1 <= self.depth:
                j = self._add(acc_state, t + 1, self.paths[i] + "A")
                self.acc[i] = j
                stack.append(j)

    def _subtree_extremes(self):
        n = len(self.price)
        lo = list(self.price)
        hi = list(self.price)
        # children always have larger ids than their parent
        for i in range(n - 1, -1, -1):
            for c in (self.acc[i], self.rej[i]):
                if c is not None:
                    lo[i] = min(lo[i], lo[c])
                    hi[i] = max(hi[i], hi[c])
        self.sub_min = lo
        self.sub_max = hi

    def __len__(self):
        return len(self.price)

    def __getitem__(self, i) -> PriceTreeNode:
        a, r = self.acc[i], self.rej[i]
        p = self.price[i]
        return PriceTreeNode(
            id=i, price=p, accept_child=a, reject_child=r, t=self.t[i],
            delta_r=None if a is None else self.price[a] - p,
            delta_l=None if r is None else p - self.sub_min[r],
            path=self.paths[i])

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def root(self) -> PriceTreeNode:
        return self[0]

    def distinct_states(self) -> int:
        return len(set(self.states))

    def find(self, path: str) -> PriceTreeNode:
        for i, p in enumerate(self.paths):
            if p == path:
                return self[i]
        raise KeyError(path)

    def to_text(self) -> str:
        lines = []

        def walk(i, indent, edge):
            node = self[i]
            extra = ""
            if node.delta_r is not None:
                extra += f" dr={node.delta_r:.6g}"
            if node.delta_l is not None:
                extra += f" dl={node.delta_l:.6g}"
            lines.append(f"{'  ' * indent}{edge}{node.price:.6g} (t={node.t}){extra}")
            if node.accept_child is not None:
                walk(node.accept_child, indent + 1, "A: ")
            if node.reject_child is not None:
                walk(node.reject_child, indent + 1, "R: ")

        walk(0, 0, "")
        return "\n".join(lines) + "\n"

    def to_dot(self, name: str = "price_tree") -> str:
        out = [f"digraph {name} {{", "  node [shape=circle];"]
        for i in range(len(self)):
            out.append(f'  n{i} [label="{self.price[i]:.6g}"];')
        for i in range(len(self)):
            if self.rej[i] is not None:
                out.append(f'  n{i} -> n{self.rej[i]} [label="reject"];')
            if self.acc[i] is not None:
                out.append(f'  n{i} -> n{self.acc[i]} [label="accept"];')
        out.append("}")
        return "\n".join(out) + "\n"


def price_tree(machine, depth: int) -> PriceTree:
    return PriceTree(machine, depth)


@dataclass(frozen=True)
class Violation:
    node: int
    path: str
    price: float
    left_max: float | None
    right_min: float | None


def check_consistent(machine, depth: int) -> tuple[bool, Violation | None]:
    """Every reject-subtree price <= node price <= every accept-subtree price."""
    tree = PriceTree(machine, depth)
    for i in range(len(tree)):
        p = tree.price[i]
        a, r = tree.acc[i], tree.rej[i]
        left_max = tree.sub_max[r] if r is not None else None
        right_min = tree.sub_min[a] if a is not None else None
        if (left_max is not None and left_max > p) or (right_min is not None and right_min < p):
            return False, Violation(i, tree.paths[i], p, left_max, right_min)
    return True, None


def node_increments(machine, state, steps: int) -> tuple[float, float]:
    """Right and left increments of the node at ``state``.

    The left increment looks ``steps`` node levels into the reject subtree.
    For a consistent machine the cheapest price there lies on the
    all-reject path, so walking that path is exact.
    """
    p, acc_state, rej_state, _ = machine.node_step(state)
    delta_r = machine.quote(acc_state) - p
    lowest = p
    s = rej_state
    for _ in range(max(steps, 0)):
        q = machine.quote(s)
        if q < lowest:
            lowest = q
        if machine.constant_price(s) is not None:
            break
        s = machine.node_step(s)[2]
    return delta_r, p - lowest
