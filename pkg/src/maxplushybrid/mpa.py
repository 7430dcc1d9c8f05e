"""Max-plus automata: word evaluation, acceptance and discrete abstraction.

A max-plus automaton carries one square weight matrix per input symbol plus
initial and final weight vectors.  The value of a word is the largest
accumulated weight over paths that enter at a finite initial weight and
leave at a finite final weight; it is EPS exactly when no such path exists,
so acceptance is a byproduct of evaluation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .finite import FiniteAutomaton, Word, make_delta
from .tropical import EPS, TropicalMatrix, Weight, is_finite, otimes


@dataclass(frozen=True)
class MaxPlusAutomaton:
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    alpha: tuple[Weight, ...]
    mu: dict[str, TropicalMatrix]
    beta: tuple[Weight, ...]
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        n = len(self.states)
        if len(set(self.states)) != n:
            raise ValueError("duplicate state names")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("duplicate alphabet symbols")
        if len(self.alpha) != n or len(self.beta) != n:
            raise ValueError("alpha/beta length must match the state count")
        if set(self.mu) != set(self.alphabet):
            raise ValueError("mu must define exactly one matrix per symbol")
        for symbol, m in self.mu.items():
            if m.rows != n or m.cols != n:
                raise ValueError(f"mu({symbol!r}) must be {n}x{n}")
            if m.has_top_entry():
                raise ValueError("transition weights must not be +inf")
        if any(a == float("inf") for a in self.alpha + self.beta):
            raise ValueError("initial/final weights must not be +inf")
        if not any(is_finite(a) for a in self.alpha):
            raise ValueError("some initial weight must be finite")

    @property
    def n(self) -> int:
        return len(self.states)

    def check_word(self, word: Word) -> None:
        for symbol in word:
            if symbol not in self.mu:
                raise ValueError(f"unknown symbol {symbol!r}")


def eval_state(a: MaxPlusAutomaton, word: Word) -> tuple[Weight, ...]:
    """Row vector after the word: alpha^T times the mu matrices in order."""
    a.check_word(word)
    row = TropicalMatrix.row_vector(a.alpha)
    for symbol in word:
        row = row.otimes(a.mu[symbol])
    return row.entries


def eval_output(a: MaxPlusAutomaton, word: Word) -> Weight:
    """Word value; EPS iff the automaton has no accepting path for the word."""
    x = eval_state(a, word)
    acc = EPS
    for v, b in zip(x, a.beta):
        acc = max(acc, otimes(v, b))
    return acc


def accepts(a: MaxPlusAutomaton, word: Word) -> bool:
    return eval_output(a, word) != EPS


def language_upto(a: MaxPlusAutomaton, max_len: int) -> set[Word]:
    """All accepted words of length <= max_len, the empty word included
    when the initial and final weights already meet."""
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    out: set[Word] = set()
    for k in range(max_len + 1):
        for word in itertools.product(a.alphabet, repeat=k):
            if accepts(a, word):
                out.add(word)
    return out


def to_finite_abstraction(a: MaxPlusAutomaton) -> FiniteAutomaton:
    """Forget the weights: keep a transition wherever the weight is not EPS."""
    triples = [
        (a.states[i], symbol, a.states[j])
        for symbol, m in a.mu.items()
        for i in range(a.n)
        for j in range(a.n)
        if m[i, j] != EPS
    ]
    return FiniteAutomaton(
        states=a.states,
        alphabet=a.alphabet,
        delta=make_delta(triples),
        initial=frozenset(s for s, w in zip(a.states, a.alpha) if w != EPS),
        final=frozenset(s for s, w in zip(a.states, a.beta) if w != EPS),
        meta={"source": "max-plus automaton"},
    )
