"""How often the profile-likelihood elbow of a contaminated graph's scree lands on 2."""
import argparse
from collections import Counter

from vsparse.config import ContaminationSpec
from vsparse.evaluation import simulate
from vsparse.sbm import sim_params
from vsparse.spectral import profile_likelihood_elbow, scree


def elbow_counts(kind, rate, n, replicates, seed, top_m=None, which=1):
    spec = ContaminationSpec(kind, rate)
    counts = Counter()
    for r in range(replicates):
        values = scree(simulate(sim_params(), n, spec, seed, r).adjacency, top_m).magnitudes
        counts[profile_likelihood_elbow(values, which)] += 1
    return counts


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rate", type=float, default=0.74)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--replicates", type=int, default=100)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--top-m", type=int, nargs="*", default=[0, 22],
                    help="scree lengths to try; 0 means the full spectrum")
    args = ap.parse_args()

    for kind in ("occlusion", "reversion", "mixed"):
        for m in args.top_m:
            for which in (1, 2):
                c = elbow_counts(kind, args.rate, args.n, args.replicates, args.seed,
                                 m or None, which)
                label = "full" if not m else f"top {m}"
                print(f"{kind:<10} {label:<7} elbow {which}: "
                      + ", ".join(f"{d}x{k}" for d, k in sorted(c.items())))


if __name__ == "__main__":
    main()
