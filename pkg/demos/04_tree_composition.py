# %% [markdown]
# # Gluing equivalences on trees
#
# On a truncated ternary tree, restricting to the root plus branch j gives a
# smaller structure.  If two trees agree branch by branch at rank rho, they
# agree as wholes at rank rho.  Here that is sampled rather than proved:
# build random pairs with matching branches and look for a counterexample.

# %%
import random

from triff.msolab import (
    ef_equivalent,
    rank_type,
    restrict,
    sample_sentences,
    sentence_agreement,
    tree_structure,
    vocabulary_of,
)

# %%
labels = tree_structure(3, 2).labels
print(len(labels), labels[:6])

t = tree_structure(3, 2, sets={"V": ["1", "12", "20"]})
for j in range(3):
    r = restrict(t, j)
    print(j, r.labels, r.members(dict(r.sets)["V"]))

# %% [markdown]
# Rank types are the canonical objects behind equivalence: two structures are
# rank-rho equivalent exactly when their types coincide.

# %%
u = tree_structure(3, 2, sets={"V": ["1", "11", "22"]})
print(rank_type(t, 1) == rank_type(u, 1), ef_equivalent(t, u, 1))

# %% [markdown]
# A pair with matched branches: keep the root's membership and resample each
# branch until its restriction matches.

# %%
rnd = random.Random(7)


def matched_partner(a):
    root = [""] if "" in a.members(dict(a.sets)["V"]) else []
    picks = list(root)
    for j in range(3):
        nodes = [n for n in labels if n[:1] == str(j)]
        while True:
            trial = [n for n in nodes if rnd.random() < 0.5]
            probe = tree_structure(3, 2, sets={"V": root + trial})
            if ef_equivalent(restrict(probe, j), restrict(a, j), 1):
                picks += trial
                break
    return tree_structure(3, 2, sets={"V": picks})


counterexamples = 0
for _ in range(30):
    a = tree_structure(3, 2, sets={"V": [n for n in labels if rnd.random() < 0.5]})
    b = matched_partner(a)
    counterexamples += not ef_equivalent(a, b, 1)
print("counterexamples:", counterexamples)

# %% [markdown]
# Equivalence is a claim about all sentences of the given rank, so sampled
# sentences make a cheap cross-check.

# %%
sentences = sample_sentences(vocabulary_of(a, b), 1, 100, seed=3)
print(len(sentence_agreement(a, b, sentences)))
