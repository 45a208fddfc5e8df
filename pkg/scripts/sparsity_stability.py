"""SRC error across sparsity levels next to 1NN error across embedding dimensions."""
import argparse

from vsparse.config import ClassifierSpec, ContaminationSpec
from vsparse.data_io import write_curve
from vsparse.evaluation import sweep
from vsparse.sbm import sim_params


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--replicates", type=int, default=100)
    ap.add_argument("--seed", type=int, default=6)
    ap.add_argument("--occlusion", type=float, default=0.0)
    ap.add_argument("--out-prefix", default="stability")
    args = ap.parse_args()

    occ = ContaminationSpec("occlusion" if args.occlusion else "none", args.occlusion)
    src = sweep(sim_params(), args.n, "s", list(range(1, 21)), occ, ClassifierSpec("src"),
                replicates=args.replicates, base_seed=args.seed)
    knn = sweep(sim_params(), args.n, "d_hat", list(range(1, 21)), occ, ClassifierSpec("knn"),
                replicates=args.replicates, base_seed=args.seed)
    write_curve(f"{args.out_prefix}_src.csv", src)
    write_curve(f"{args.out_prefix}_1nn.csv", knn)
    print(f"SRC spread {src.spread():.4f}   1NN spread {knn.spread():.4f}")


if __name__ == "__main__":
    main()
