# %% [markdown]
# # From codes to words, and games on words
#
# Ternary words embed into binary ones block by block (0, 1, 2 become 00, 01,
# 10).  On the image, "these three words are separated" turns into a ternary
# relation R on binary words of equal length.  The witness family below is a
# row of triples in R that cannot be mixed, which is the shape of argument
# that keeps R out of reach of monadic second-order logic.

# %%
from triff.hashcore import CodeParams, is_hashed, relation_R, ternary_to_binary, witness_family
from triff.msolab import (
    ef_equivalent,
    ef_game_search,
    evaluate,
    parse_formula,
    product_structure,
    quantifier_rank,
    word_structure,
)

# %%
triple = ["0001", "1111", "1211"]
print(is_hashed(triple, CodeParams(3, 3, 4)))
print([ternary_to_binary(w) for w in triple], relation_R(*map(ternary_to_binary, triple)))

# %% [markdown]
# `witness_family(n, ell)` returns three binary words of length 2*ell.  The
# n-th family is in R, and swapping in the first word of any other family
# breaks it.

# %%
ell = 4
fams = [witness_family(n, ell) for n in range(ell)]
for n, (x, y, z) in enumerate(fams):
    print(n, x, y, z, relation_R(x, y, z))
print([relation_R(fams[m][0], *fams[0][1:]) for m in range(ell)])

# %% [markdown]
# ## Reading triples as words over a product alphabet
#
# Stacking three words gives one word whose letters are triples.  Being
# hashed is then a rank-1 sentence: some position carries a permutation of
# 012.

# %%
hashed = parse_formula("(exists1 x (or " + " ".join(
    f"(letter {a}{b}{c} x)" for a, b, c in
    ["012", "021", "102", "120", "201", "210"]) + "))")
print(quantifier_rank(hashed))
print(evaluate(product_structure(["0001", "1111", "1211"]), hashed),
      evaluate(product_structure(["0100", "1111", "1211"]), hashed))

# %% [markdown]
# ## Ehrenfeucht-Fraisse games
#
# Two structures agree on every sentence of rank rho exactly when Bob, the
# duplicator, survives rho rounds.  With one round, "01" and "10" look the
# same: both contain each letter.  A second round lets Alice pick the 0 and
# then ask for a successor.

# %%
a, b = word_structure("01"), word_structure("10")
for rho in (1, 2):
    winner, trace = ef_game_search(a, b, rho)
    print(rho, winner, ef_equivalent(a, b, rho))
print(ef_game_search(a, b, 2)[1])

# %% [markdown]
# Unlabelled lines of length 3 and 4 split at rank 2: only the shorter one
# has a point next to every other point.

# %%
middle = parse_formula("(exists1 x (forall1 y (or (= y x) (succ 0 x y) (succ 0 y x))))")
a3, a4 = word_structure(length=3), word_structure(length=4)
print(ef_equivalent(a3, a4, 1), ef_equivalent(a3, a4, 2), evaluate(a3, middle), evaluate(a4, middle))
