"""Finite-horizon behavior fragments and exact behavioral inclusion.

A *window* is a finite string over the machine's external alphabet,
optionally padded on the left with the diamond symbol to encode positions
before time zero.  The n-long windows generated by a machine (its
dominoes) are computed by an exact forward fixpoint over
(state, recent-history) pairs; behavioral inclusion between two machines
is decided on prefix languages via a deterministic prefix acceptor, which
is exact for live, finitely branching machines because their infinite
behavior is the safety closure of the prefix language.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import IncompatibleAlphabets, InvalidSpec, UnknownState
from .machine import (
    DIAMOND,
    ExternalAlphabet,
    StateMachine,
    machines_compatible,
    require_accepted,
    require_live_reachable,
)

def symbol_token(symbol) -> str:
    """Printable token: outputs verbatim, pairs as 'u/y', diamond as '<>'."""
    if symbol == DIAMOND:
        return DIAMOND
    if isinstance(symbol, tuple):
        return f"{symbol[0]}/{symbol[1]}"
    return symbol


@dataclass(frozen=True)
class Window:
    """Fixed-length string over (external symbols + diamond).

    Diamonds, when present, form a contiguous prefix; interior diamonds
    are rejected at construction.
    """

    symbols: tuple

    def __post_init__(self):
        seen_real = False
        for sym in self.symbols:
            if sym == DIAMOND:
                if seen_real:
                    raise InvalidSpec(f"interior diamond in window {self.symbols!r}")
            else:
                seen_real = True

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def restrict(self, a: int, b: int) -> "Window":
        """The sub-window over positions [a, b] (inclusive, 0-based).

        An inverted range (a = b + 1) yields the empty window, matching
        the convention for empty restrictions.
        """
        if a > b + 1 or a < 0 or b >= len(self.symbols):
            raise InvalidSpec(f"restriction [{a},{b}] out of range for length {len(self.symbols)}")
        return Window(self.symbols[a : b + 1])

    def concat(self, other: "Window") -> "Window":
        return Window(self.symbols + other.symbols)

    def append(self, symbol) -> "Window":
        return Window(self.symbols + (symbol,))

    def shift(self, symbol) -> "Window":
        """Drop the first symbol and append one: the next history window."""
        return Window(self.symbols[1:] + (symbol,))

    @property
    def name(self) -> str:
        """Dot-joined rendering used for abstract state tokens."""
        cached = self.__dict__.get("_name_memo")
        if cached is None:
            cached = ".".join(symbol_token(s) for s in self.symbols)
            object.__setattr__(self, "_name_memo", cached)
        return cached

    @property
    def line(self) -> str:
        """Space-joined rendering used in domino-set listings."""
        return " ".join(symbol_token(s) for s in self.symbols)

    def __str__(self) -> str:
        return self.name


def diamond_window(length: int) -> Window:
    return Window((DIAMOND,) * length)


@dataclass(frozen=True)
class IntervalSpec:
    """Anchored window interval: l symbols, of which m lie in the future."""

    l: int
    m: int

    def __post_init__(self):
        if self.l < 1:
            raise InvalidSpec(f"window length l must be >= 1, got {self.l}")
        if not 0 <= self.m <= self.l:
            raise InvalidSpec(f"future length m must satisfy 0 <= m <= l, got m={self.m}")


def symbol_sort_key(machine: StateMachine):
    """Canonical symbol order: diamond first, then declaration order."""
    out_ix = {y: i for i, y in enumerate(machine.outputs)}
    in_ix = {u: i for i, u in enumerate(machine.inputs)}

    def key(symbol):
        if symbol == DIAMOND:
            return (-1, -1)
        if isinstance(symbol, tuple):
            return (in_ix[symbol[0]], out_ix[symbol[1]])
        return (0, out_ix[symbol])

    return key


def window_sort_key(machine: StateMachine):
    sym_key = symbol_sort_key(machine)

    def key(window: Window):
        return tuple(sym_key(s) for s in window.symbols)

    return key


@dataclass(frozen=True)
class DominoSet:
    """All windows of one fixed length, kept in canonical order."""

    length: int
    windows: tuple[Window, ...]
    _members: frozenset = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        for w in self.windows:
            if len(w) != self.length:
                raise InvalidSpec(f"window {w} has length {len(w)}, expected {self.length}")
        object.__setattr__(self, "_members", frozenset(self.windows))

    def __contains__(self, window: Window) -> bool:
        return window in self._members

    def __iter__(self):
        return iter(self.windows)

    def __len__(self) -> int:
        return len(self.windows)

    def as_set(self) -> frozenset:
        return self._members

    def render(self) -> str:
        return "\n".join(w.line for w in self.windows) + ("\n" if self.windows else "")


# -- forward fixpoints -------------------------------------------------------


@lru_cache(maxsize=None)
def _past_map(machine: StateMachine, mode: ExternalAlphabet, k: int):
    """For every state, the k-long external histories of runs reaching it.

    Breadth-first closure of (state, last-k-window) pairs seeded with
    (x0, diamond^k); exact because the machine is finite and live.
    """
    machine = machine.with_external(mode)
    past: dict[str, set] = {x: set() for x in machine.states}
    seed = diamond_window(k)
    queue = deque()
    seen = set()
    for x0 in machine.initial:
        pair = (x0, seed)
        seen.add(pair)
        past[x0].add(seed)
        queue.append(pair)
    while queue:
        x, hist = queue.popleft()
        for _, u, y, x2 in machine.outgoing(x):
            nxt = hist.shift(machine.project_external(u, y)) if k else hist
            pair = (x2, nxt)
            if pair not in seen:
                seen.add(pair)
                past[x2].add(nxt)
                queue.append(pair)
    return {x: frozenset(ws) for x, ws in past.items()}


@lru_cache(maxsize=None)
def _future_map(machine: StateMachine, mode: ExternalAlphabet, k: int):
    """For every state, the set of k-long label sequences of paths from it."""
    machine = machine.with_external(mode)
    fut = {x: frozenset([Window(())]) for x in machine.states}
    for _ in range(k):
        nxt = {}
        for x in machine.states:
            acc = set()
            for _, u, y, x2 in machine.outgoing(x):
                w = machine.project_external(u, y)
                for tail in fut[x2]:
                    acc.add(Window((w,)).concat(tail))
            nxt[x] = frozenset(acc)
        fut = nxt
    return fut


def past_windows(machine: StateMachine, mode: ExternalAlphabet, x: str, k: int) -> frozenset:
    if x not in machine.states:
        raise UnknownState(f"state {x!r} not declared")
    return _past_map(machine, mode, k)[x]


def future_windows(machine: StateMachine, mode: ExternalAlphabet, x: str, k: int) -> frozenset:
    if x not in machine.states:
        raise UnknownState(f"state {x!r} not declared")
    return _future_map(machine, mode, k)[x]


@lru_cache(maxsize=None)
def dominoes(machine: StateMachine, mode: ExternalAlphabet, n: int) -> DominoSet:
    """All n-long external windows the machine can exhibit.

    Includes diamond-prefixed windows from positions before time zero.
    """
    if n < 1:
        raise InvalidSpec(f"domino length must be >= 1, got {n}")
    require_accepted(machine, "dominoes")
    past = _past_map(machine, mode, n - 1)
    fut = _future_map(machine, mode, 1)
    found = set()
    for x in machine.states:
        for hist in past[x]:
            for step in fut[x]:
                found.add(hist.concat(step))
    ordered = tuple(sorted(found, key=window_sort_key(machine)))
    return DominoSet(n, ordered)


def external_strings(
    machine: StateMachine,
    mode: ExternalAlphabet,
    x: str,
    spec: IntervalSpec,
    extended: bool = False,
) -> tuple[Window, ...]:
    """Windows a run can exhibit around a visit to state ``x``.

    The window covers l - m past symbols and m future ones (m + 1 with
    ``extended``).  Computed as the product of the past-history and
    future-label sets, which is exact because any history reaching ``x``
    can be continued by any future leaving it.
    """
    require_accepted(machine, "external_strings")
    if x not in machine.states:
        raise UnknownState(f"state {x!r} not declared")
    past = past_windows(machine, mode, x, spec.l - spec.m)
    fut = future_windows(machine, mode, x, spec.m + 1 if extended else spec.m)
    combined = {p.concat(f) for p in past for f in fut}
    return tuple(sorted(combined, key=window_sort_key(machine)))


def external_strings_map(
    machine: StateMachine, mode: ExternalAlphabet, spec: IntervalSpec, extended: bool = False
) -> dict:
    """``external_strings`` for every state at once (single fixpoint)."""
    require_accepted(machine, "external_strings")
    past = _past_map(machine, mode, spec.l - spec.m)
    fut = _future_map(machine, mode, spec.m + 1 if extended else spec.m)
    key = window_sort_key(machine)
    result = {}
    for x in machine.states:
        combined = {p.concat(f) for p in past[x] for f in fut[x]}
        result[x] = tuple(sorted(combined, key=key))
    return result


# -- prefix acceptor and behavioral inclusion --------------------------------


@dataclass(frozen=True)
class PrefixAutomaton:
    """Deterministic, complete acceptor of a machine's finite prefixes.

    Built by the subset construction over the external alphabet; state 0
    is the start and ``sink`` is the unique reject state.  Every non-sink
    state is accepting (prefix languages are prefix-closed).
    """

    alphabet: tuple
    subsets: tuple[frozenset, ...]
    table: tuple[tuple[int, ...], ...]
    sink: int

    _columns: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_columns", {s: i for i, s in enumerate(self.alphabet)})

    @property
    def start(self) -> int:
        return 0

    def step(self, state: int, symbol) -> int:
        col = self._columns.get(symbol)
        if col is None:
            return self.sink
        return self.table[state][col]

    def accepts(self, word) -> bool:
        state = self.start
        for symbol in word:
            state = self.step(state, symbol)
            if state == self.sink:
                return False
        return True

    def to_dot(self, name: str = "prefixes") -> str:
        import json as _json

        lines = [f"digraph {_json.dumps(name)} {{", "  rankdir=LR;"]
        for i in range(len(self.table)):
            if i == self.sink:
                label, shape = "sink", "box"
            else:
                label = "{" + ",".join(sorted(self.subsets[i])) + "}"
                shape = "doublecircle" if i == self.start else "circle"
            lines.append(f'  n{i} [label={_json.dumps(label)} shape={shape}];')
        for i, row in enumerate(self.table):
            for col, j in enumerate(row):
                token = symbol_token(self.alphabet[col])
                lines.append(f"  n{i} -> n{j} [label={_json.dumps(token)}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


@lru_cache(maxsize=None)
def prefix_automaton(machine: StateMachine, mode: ExternalAlphabet) -> PrefixAutomaton:
    machine = machine.with_external(mode)
    alphabet = machine.external_symbols()
    start = frozenset(machine.initial)
    subsets = [start]
    index = {start: 0}
    frontier = deque([start])
    rows: dict[frozenset, list] = {}
    while frontier:
        subset = frontier.popleft()
        row = []
        for symbol in alphabet:
            succ = frozenset(
                t[3]
                for x in subset
                for t in machine.outgoing(x)
                if machine.project_external(t[1], t[2]) == symbol
            )
            if succ not in index:
                index[succ] = len(subsets)
                subsets.append(succ)
                frontier.append(succ)
            row.append(index[succ])
        rows[subset] = row
    empty = frozenset()
    if empty not in index:
        index[empty] = len(subsets)
        subsets.append(empty)
        rows[empty] = [index[empty]] * len(alphabet)
    sink = index[empty]
    rows[empty] = [sink] * len(alphabet)
    table = tuple(tuple(rows[s]) for s in subsets)
    return PrefixAutomaton(tuple(alphabet), tuple(subsets), table, sink)


@dataclass(frozen=True)
class InclusionVerdict:
    included: bool
    counterexample: tuple | None = None

    def __bool__(self) -> bool:
        return self.included

    def counterexample_tokens(self) -> tuple[str, ...]:
        if self.counterexample is None:
            return ()
        return tuple(symbol_token(s) for s in self.counterexample)


def behavior_included(
    left: StateMachine, right: StateMachine, mode: ExternalAlphabet
) -> InclusionVerdict:
    """Decide that every external behavior of ``left`` is one of ``right``.

    Exact reduction to prefix-language inclusion: search the product of
    ``left``'s transition graph with the deterministic prefix acceptor of
    ``right`` for a reachable rejected prefix.  Soundness for infinite
    behaviors rests on liveness and finite branching (safety closure).
    """
    require_live_reachable(left, "behavior_included")
    require_live_reachable(right, "behavior_included")
    if not machines_compatible(left, right, mode):
        raise IncompatibleAlphabets("behavior_included: external alphabets differ")
    left = left.with_external(mode)
    acceptor = prefix_automaton(right, mode)
    seen = set()
    queue = deque()
    parents: dict = {}
    for x0 in left.initial:
        pair = (x0, acceptor.start)
        if pair not in seen:
            seen.add(pair)
            parents[pair] = None
            queue.append(pair)
    while queue:
        pair = queue.popleft()
        x, acc = pair
        for _, u, y, x2 in left.outgoing(x):
            symbol = left.project_external(u, y)
            nxt = acceptor.step(acc, symbol)
            if nxt == acceptor.sink:
                word = [symbol]
                cursor = pair
                while parents[cursor] is not None:
                    cursor, sym = parents[cursor]
                    word.append(sym)
                return InclusionVerdict(False, tuple(reversed(word)))
            nxt_pair = (x2, nxt)
            if nxt_pair not in seen:
                seen.add(nxt_pair)
                parents[nxt_pair] = (pair, symbol)
                queue.append(nxt_pair)
    return InclusionVerdict(True, None)


def behavior_equal(left: StateMachine, right: StateMachine, mode: ExternalAlphabet) -> bool:
    return bool(behavior_included(left, right, mode)) and bool(
        behavior_included(right, left, mode)
    )


@lru_cache(maxsize=None)
def saturation_check(machine: StateMachine, mode: ExternalAlphabet, l: int) -> bool:
    """Whether lengthening the window from l to l + 1 gains no precision.

    Holds iff every overlapping pair of (l+1)-windows (the first possibly
    all-diamond) joins into a realizable (l+2)-window; equivalently the
    window-closure behaviors at horizons l and l + 1 coincide.
    """
    if l < 1:
        raise InvalidSpec(f"saturation_check requires l >= 1, got {l}")
    require_accepted(machine, "saturation_check")
    d_next = dominoes(machine, mode, l + 1)
    d_join = dominoes(machine, mode, l + 2)
    heads = set(d_next) | {diamond_window(l + 1)}
    tails = {}
    for w in d_next:
        tails.setdefault(w.restrict(0, l - 1), []).append(w)
    for head in heads:
        overlap = head.restrict(1, l)
        for tail in tails.get(overlap, ()):
            joined = head.append(tail.symbols[-1])
            if joined not in d_join:
                return False
    return True
