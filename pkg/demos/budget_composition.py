"""How a fixed privacy budget splits across iterations under three accountants.

An iterative solver spends its budget twice per iteration (one release
for each moment).  The per-release budget eps' decides the noise scale,
so bigger is better.  Basic composition divides the budget evenly;
strong composition pays a sqrt-overhead for a failure probability but
degrades more slowly; the concentrated accountant tracks the actual
privacy-loss distribution and wins clearly at every iteration count.

Strong composition is NOT uniformly better than basic: it only pulls
ahead once the release count k = 2J exceeds 2 ln(1/failure_prob).  The
table prints that crossover rather than hiding it.
"""

import math

from dpirls import advanced_per_release, cdp_per_release, conventional_per_release


def main():
    epsilon, failure_prob = 0.9, 1e-5
    crossover = 2.0 * math.log(1.0 / failure_prob)
    print(f"total budget epsilon = {epsilon}, failure probability = {failure_prob}")
    print(f"strong composition beats basic once k = 2J > {crossover:.1f} releases\n")

    print(f"{'J':>4} {'k':>5}  {'basic':>10}  {'strong':>10}  {'concentrated':>13}   winner (basic vs strong)")
    for iters in (2, 5, 10, 12, 20, 50, 100):
        k = 2 * iters
        conv = conventional_per_release(epsilon, iters)
        adv = advanced_per_release(epsilon, failure_prob, iters)
        cdp = cdp_per_release(epsilon, iters)
        winner = "strong" if adv > conv else "basic"
        marker = "  <- past crossover" if k > crossover and winner == "strong" else ""
        print(f"{iters:>4} {k:>5}  {conv:>10.6f}  {adv:>10.6f}  {cdp:>13.6f}   {winner}{marker}")

    iters = 20
    ratio = cdp_per_release(epsilon, iters) / conventional_per_release(epsilon, iters)
    print(f"\nat J = {iters}, the concentrated accountant allows {ratio:.1f}x the per-release")
    print("budget of basic composition, i.e. noise scales shrink by the same factor.")


if __name__ == "__main__":
    main()
