# %% [markdown]
# # Handing the existence question to a solver
#
# "Is there a hash code with m words of length n?" can be written down as a
# CNF formula or as an SMT-LIB2 script.  Both documents carry their own
# variable map, so a model coming back from any solver can be decoded and
# re-verified without trusting the solver.

# %%
import os
import tempfile
from pathlib import Path

from triff.encoders import (
    SOLVER_ENV,
    decode_assignment,
    dimacs_counts,
    emit_dimacs,
    emit_smtlib,
    load_document,
    run_external_solver,
    solve_smt_finite,
    solve_with_dpll,
)
from triff.hashcore import CodeParams, format_code

# %% [markdown]
# A small document first.  Each cell gets one boolean per symbol; the
# auxiliaries say "rows p and q differ in column j" and "this triple is
# separated in column j".

# %%
p2 = CodeParams(3, 3, 2)
doc = emit_dimacs(p2, 4)
print("\n".join(doc.text.splitlines()[:4]))
print("...")
print(dimacs_counts(p2, 4))

# %% [markdown]
# The bundled DPLL is enough at this scale.  Its answer decodes into a code
# that is checked again on the way out.

# %%
out = solve_with_dpll(doc)
print(format_code(decode_assignment(doc, out)))
print(solve_with_dpll(emit_dimacs(p2, 5)).strip())

# %% [markdown]
# The SMT-LIB2 form uses one bounded integer per cell and a `distinct` per
# column.  The finite model finder that ships with the package enumerates
# cell values directly.

# %%
smt = emit_smtlib(p2, 4)
print("\n".join(smt.text.splitlines()[-4:]))
print(format_code(decode_assignment(smt, solve_smt_finite(smt))))

# %% [markdown]
# Documents survive a trip through disk: `load_document` rebuilds the map
# from the comment lines.

# %%
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "n2m4.cnf"
    path.write_text(doc.text)
    again = load_document(path.read_text())
    print(again.varmap == doc.varmap, again.aux == doc.aux)

# %% [markdown]
# ## The length-5 instance
#
# The plain model for eleven words of length 5 keeps every row, column and
# symbol symmetry, and general-purpose solvers wander through all of it.
# With `symmetry_break=True` the document also pins the normal form used by
# the native search, which leaves satisfiability unchanged.

# %%
p5 = CodeParams(3, 3, 5)
print(dimacs_counts(p5, 11), dimacs_counts(p5, 11, symmetry_break=True))

# %% [markdown]
# With a solver configured (for example `demos/pysat_solver.py`, or any
# binary printing `s`/`v` lines), the eleven-word question comes back UNSAT
# in seconds.

# %%
if os.environ.get(SOLVER_ENV):
    for m in (10, 11):
        res = run_external_solver(emit_dimacs(p5, m, symmetry_break=True))
        print(m, res.status)
else:
    print(f"set {SOLVER_ENV} to run this cell")
