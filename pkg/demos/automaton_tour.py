"""
From formulas to automata that mark the first completion
========================================================

Formulas compile by progression: each automaton state is the residual
obligation left after reading a prefix. The modification then separates the
instant of first satisfaction from everything after it.
"""

from unpred.automata import accepts, compile_formula, modify, words
from unpred.formula import holds_on, parse, pretty

AP = ["p1", "p2"]

for text in ["F(p1 & F p2)", "!p2 U p1", "F(p1 & X p2)", "F p1 | F p2"]:
    f = parse(text, AP)
    a = modify(compile_formula(f, AP))
    print(f"{pretty(f):<16} {a.n_states} states, first-completion states "
          f"{sorted(a.short_name(s) for s in a.f_states)}")
    for s in a.states:
        print(f"    {a.short_name(s):<4} {a.name(s)}")

# %%
# The automaton and the finite-word semantics are independent
# implementations; they agree on every short word.
f = parse("F(p1 & X p2)", AP)
a = modify(compile_formula(f, AP))
mismatch = [w for w in words(AP, 5) if accepts(a, w) != holds_on(w, f)]
print("disagreements on words up to length 5:", len(mismatch))
