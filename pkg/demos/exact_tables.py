"""Tour of the exact combinatorial layer.

Prints the small Catalan and Narayana tables, checks the weighted
composition identity that ties them together, and shows the moment
sequence of the limiting spectral law at a few aspect ratios.
"""
from fractions import Fraction

from rmtlab.combinat import (
    catalan,
    catalan_composition_residual,
    mp_moment_exact,
    narayana_count,
)

print("Catalan numbers C_0 .. C_10")
print(" ", [catalan(i) for i in range(11)])
print()

print("Narayana triangle, rows p = 1 .. 6 (each row sums to C_p)")
for p in range(1, 7):
    row = [narayana_count(p, i) for i in range(p)]
    print(f"  p={p}: {row}  sum={sum(row)}  C_p={catalan(p)}")
print()

print("Composition identity residual (zero means the weighted sum of")
print("Catalan products over compositions reproduces C_l exactly):")
for l in range(1, 13):
    print(f"  l={l:2d}: residual {catalan_composition_residual(l)}")
print()

print("Moments of the limiting spectral law by aspect ratio")
for gamma in (Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2)):
    moments = ", ".join(str(mp_moment_exact(k, gamma)) for k in range(1, 6))
    note = "  <- the Catalan numbers" if gamma == 1 else ""
    print(f"  gamma={gamma}: [{moments}]{note}")
