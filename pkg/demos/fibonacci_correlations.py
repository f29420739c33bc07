"""Return times of words in the Fibonacci and periodic substitution shifts.

In the Fibonacci shift the letter a returns at every offset, while longer
words leave gaps of positive density (the shift is not weakly mixing).  The
periodic control a -> ab, b -> ab only returns at even offsets.
"""

from tilinglab.seqdyn import correlation_set, gap_density, gap_profile
from tilinglab.subst import load_catalog

fib = load_catalog("fibonacci_word")
per = load_catalog("periodic_ab")

for w1, w2 in [("a", "a"), ("aa", "aa"), ("ab", "ba")]:
    c = correlation_set(fib, w1, w2, 400)
    prof = gap_profile(c)
    missing = sorted(set(range(401)) - c.hits)
    at = ", ".join(f"{n}: {float(prof.prefix[n]):.3f}" for n in (50, 100, 200, 400))
    print(f"fibonacci {w1}/{w2}: {len(c.hits)} hits, first gaps {missing[:8]}, "
          f"gap density {gap_density(c)} (prefix densities {at})")

c = correlation_set(per, "a", "a", 20)
print("periodic a/a hits:", c.sorted_hits())
