# %% [markdown]
# # Hash codes and exhaustive search
#
# A set of ternary words is a (3,3)-hash code when every three of them are
# separated by some coordinate: the three words carry three different
# symbols there.  This walk-through checks small codes by hand, then lets the
# search find the largest ones for short lengths.

# %%
from triff.bounds import classic_upper, improved_upper, km_lower
from triff.hashcore import Code, CodeParams, first_violation, format_code, is_hashed
from triff.searcher import SearchConfig, canonicalize, max_size, search_exact

# %% [markdown]
# Three words of length 4.  The first triple fails: no column holds 0, 1 and
# 2 together.  Changing one letter repairs it.

# %%
p4 = CodeParams(3, 3, 4)
print(is_hashed(["0100", "1111", "1211"], p4))
print(is_hashed(["0001", "1111", "1211"], p4))

# %% [markdown]
# `first_violation` names the first bad triple of a whole code, which is the
# handy form when a candidate comes from elsewhere.

# %%
bad = Code.from_strings(CodeParams(3, 3, 2), ["00", "01", "10", "22"])
print(first_violation(bad))

# %% [markdown]
# ## Exact maxima
#
# `max_size` asks for one more word at a time until the search exhausts a
# size; the last code found is the certificate.

# %%
for n in range(1, 5):
    res = max_size(CodeParams(3, 3, n))
    nodes = sum(v.stats.nodes for v in res.verdicts)
    print(n, res.lower, res.upper, res.status, f"nodes={nodes}")

# %% [markdown]
# Length 5 is where it gets interesting: ten words fit, eleven do not.  The
# symmetry level `full` fixes the first word to zeros and the second to a
# block of ones at minimum distance, which is what keeps the exhaustion
# short.

# %%
p5 = CodeParams(3, 3, 5)
ten = search_exact(p5, 10)
print(type(ten).__name__, ten.stats.nodes)
print(format_code(canonicalize(ten.code)))

eleven = search_exact(p5, 11, SearchConfig(threads=2))
print(type(eleven).__name__, eleven.stats.nodes, round(eleven.stats.elapsed, 2))

# %% [markdown]
# The same searches without symmetry reduction, under a node budget, show
# what the reduction buys.

# %%
for level in ("none", "fix-first-row", "full"):
    v = search_exact(p5, 11, SearchConfig(symmetry=level, max_nodes=200_000, threads=1))
    print(f"{level:15s} {type(v).__name__:20s} nodes={v.stats.nodes}")

# %% [markdown]
# For scale, the asymptotic envelopes with their default constants.  The
# constants are not known, so only the growth rates mean anything here.

# %%
for n in (5, 10, 20):
    print(n, round(km_lower(n), 2), round(improved_upper(n), 2), round(classic_upper(n), 2))
