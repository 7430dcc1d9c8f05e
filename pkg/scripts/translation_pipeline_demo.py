#!/usr/bin/env python3
"""Chain the three model classes and verify their agreements.

Starts from the bundled weighted word automaton, translates it into a
switching system and then a hybrid automaton, and checks word values,
trace equality, bounded language equality of the two finite abstractions,
and the bisimulation witness between them.
"""

import random

from maxplushybrid import equivalence, fixtures, hybrid, mpa, smpl


def main() -> None:
    automaton = fixtures.gaubert_mpa()
    system = smpl.from_mpa(automaton)
    machine = hybrid.from_smpl_open(system)

    print("word values through the three models:")
    for text in ("ab", "aab", "abb", "b", "aaa"):
        word = tuple(text)
        value = mpa.eval_output(automaton, word)
        trace = smpl.simulate(system, smpl.word_inputs(word))
        hybrid_trace = hybrid.run(machine, smpl.word_inputs(word))
        smpl_value = trace.records[-1].y[0] if trace.completed else "halt"
        maha_value = (
            hybrid_trace.records[-1].y[0] if hybrid_trace.completed else "halt"
        )
        print(f"  {text:>4}: automaton={value}  switching={smpl_value}  hybrid={maha_value}")

    accepted = sorted(
        ("".join(w) for w in equivalence.exhaustive_words(automaton.alphabet, 5)
         if mpa.accepts(automaton, w)),
        key=lambda t: (len(t), t),
    )
    print(f"\naccepted words up to length 5: {accepted}")

    weight_free = mpa.to_finite_abstraction(automaton)
    fused = hybrid.mpa_chain_abstraction(machine)
    equal, witness = equivalence.language_equal_upto(weight_free, fused, 6)
    print(f"\nbounded languages of the two abstractions equal up to 6: {equal}")
    relation = equivalence.bisimulation(weight_free, fused)
    print(f"bisimulation witness pairs: {sorted(relation.pairs) if relation else None}")

    rng = random.Random(0)
    checked = 0
    for _ in range(10):
        sample = fixtures.random_mpa(rng)
        at = mpa.to_finite_abstraction(sample)
        hoat = hybrid.mpa_chain_abstraction(
            hybrid.from_smpl_open(smpl.from_mpa(sample))
        )
        ok, _ = equivalence.language_equal_upto(at, hoat, 5)
        checked += ok
    print(f"random spot checks: {checked}/10 language agreements")


if __name__ == "__main__":
    main()
