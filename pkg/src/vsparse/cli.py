"""Command-line front end.

Exit status: 0 on success, 1 on invalid input or configuration, 2 when the
computation itself fails.
"""
import argparse
import json
import os
import sys

import numpy as np

from . import data_io, evaluation, sbm, spectral
from .config import ConfigError, ExperimentConfig
from .graph import LabeledGraph, diagonal_augment, preprocess

COMMANDS = ("simulate", "contaminate", "check-condition", "scree", "embed", "loo", "sweep", "mc")


def load_config(args):
    if args.config is None:
        raise ConfigError(["--config: required for this command"])
    try:
        with open(args.config) as fh:
            cfg = ExperimentConfig.from_json(fh.read())
    except OSError as e:
        raise ConfigError([f"--config: {e}"]) from None
    if args.seed is not None:
        cfg.seed = args.seed
    if args.output is not None:
        cfg.output = args.output
    errs = cfg.problems()
    if errs:
        raise ConfigError(errs)
    return cfg


def load_dataset(spec):
    if spec.format == "gml":
        raw = data_io.read_gml(spec.graph)
    elif spec.format == "edgelist":
        raw = data_io.read_edge_list(spec.graph, spec.index_base)
    else:
        raise ConfigError([f"dataset.format: unknown format {spec.format!r}"])
    if spec.labels is not None:
        lv = data_io.read_labels(spec.labels, raw.n)
    else:
        attr = raw.labels("value")
        if attr is None:
            raise ConfigError(["dataset.labels: no label file and no node 'value' attribute"])
        lv = data_io.encode_labels(attr)
    A = preprocess(raw.adjacency())
    if spec.augment_diagonal:
        A = diagonal_augment(A)
    return LabeledGraph(A, lv.labels, {"dataset": spec.graph, "classes": lv.classes,
                                        "contamination": []})


def load_graph(cfg, contaminate=True):
    """The single graph a config describes: a seeded sample or a dataset."""
    if cfg.model is not None:
        spec = cfg.contamination if contaminate else None
        return evaluation.simulate(cfg.model, cfg.n, spec, cfg.seed, 0)
    g = load_dataset(cfg.dataset)
    c = cfg.contamination
    if contaminate and c.type != "none":
        g = sbm.contaminate(g, c.type, c.rate, np.random.SeedSequence((cfg.seed, 0)).spawn(2)[1])
    return g


def _header(cfg, g=None):
    head = f"config={cfg.digest()} seed={cfg.seed}"
    if g is not None and "classes" in g.provenance:
        # label k in the output is the k-th entry of this list
        head += " classes=" + json.dumps(g.provenance["classes"], separators=(",", ":"))
    return head


def _emit(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)


def _write_graph(cfg, g, path):
    if path is None:
        raise ConfigError(["--output: required for this command"])
    data_io.write_edge_list(path, g.adjacency, _header(cfg))
    data_io.write_labels(path + ".labels", g.labels, g.provenance.get("classes"))
    side = {"config": cfg.to_dict(), "config_digest": cfg.digest(), "seed": cfg.seed,
            "n": g.n, "provenance": g.provenance}
    with open(path + ".json", "w") as fh:
        json.dump(side, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.random.SeedSequence):
        return {"entropy": x.entropy, "spawn_key": list(x.spawn_key)}
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def cmd_simulate(args):
    cfg = load_config(args)
    if cfg.model is None:
        raise ConfigError(["model: simulate needs a block model"])
    _write_graph(cfg, load_graph(cfg), cfg.output)


def cmd_contaminate(args):
    cfg = load_config(args)
    _write_graph(cfg, load_graph(cfg), cfg.output)


def format_condition_table(report):
    K = len(report.satisfied_for_class)
    lines = [f"{'q':>3} {'r':>3} {'lhs':>12} {'rhs':>12}  holds"]
    for q in range(K):
        for r in range(K):
            if q != r:
                lines.append(f"{q + 1:>3} {r + 1:>3} {report.lhs[q, r]:>12.6g} "
                             f"{report.rhs[q, r]:>12.6g}  {'yes' if report.pairwise[q, r] else 'NO'}")
    lines.append(f"overall: {'satisfied' if report.overall else 'violated'}")
    return "\n".join(lines) + "\n"


def cmd_check_condition(args):
    if args.model is not None:
        try:
            with open(args.model) as fh:
                model = sbm.BlockModel.from_dict(json.load(fh))
        except (OSError, KeyError, TypeError, ValueError) as e:
            raise ConfigError([f"model: {e}"]) from None
    else:
        cfg = load_config(args)
        if cfg.model is None:
            raise ConfigError(["model: check-condition needs a block model"])
        model = cfg.model
    report = sbm.check_src_condition(model)
    mt = sbm.moments(model)
    out = report.to_dict()
    out["moments"] = {"m1": mt.m1.tolist(), "m2": mt.m2.tolist(),
                      "cross": mt.cross.tolist(), "rho": mt.rho.tolist()}
    text = json.dumps(out, indent=2) + "\n"
    sys.stderr.write(format_condition_table(report))
    if args.output and args.output != "-":
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_scree(args):
    cfg = load_config(args)
    g = load_graph(cfg)
    sc = spectral.scree(g.adjacency, args.top_m)
    text = data_io.write_scree(cfg.output, sc, _header(cfg, g))
    _emit(text, cfg.output)
    if len(sc.values) >= 3:
        e1 = spectral.profile_likelihood_elbow(sc.magnitudes, 1)
        e2 = spectral.profile_likelihood_elbow(sc.magnitudes, 2)
        sys.stderr.write(f"elbows: {e1} {e2}\n")


def cmd_embed(args):
    cfg = load_config(args)
    g = load_graph(cfg)
    d = evaluation.resolve_d_hat(g.adjacency, cfg.embedding)
    emb = spectral.ase(g.adjacency, d, cfg.embedding.ordering)
    header = ["vertex", "label"] + [f"z{i + 1}" for i in range(d)]
    rows = [[v, int(y), *z] for v, (y, z) in enumerate(zip(g.labels, emb.Z))]
    _emit(data_io.write_csv(cfg.output, header, rows, _header(cfg, g)), cfg.output)


def cmd_loo(args):
    cfg = load_config(args)
    g = load_graph(cfg)
    c = cfg.classifier
    if c.type == "src":
        res = evaluation.loo_src(g.adjacency, g.labels, c.s, c.normalize, c.variant)
    else:
        d = evaluation.resolve_d_hat(g.adjacency, cfg.embedding)
        res = evaluation.loo_ase(g.adjacency, g.labels, c.type, d, c.k, c.ridge,
                                 cfg.embedding.ordering, cfg.embedding.strict)
    _emit(data_io.write_loo(cfg.output, res, _header(cfg, g)), cfg.output)


def cmd_sweep(args):
    cfg = load_config(args)
    if cfg.sweep is None:
        raise ConfigError(["sweep: required for the sweep command"])
    sw = cfg.sweep
    if cfg.model is not None:
        curve = evaluation.sweep(cfg.model, cfg.n, sw.variable, sw.grid, cfg.contamination,
                                 cfg.classifier, cfg.embedding, cfg.replicates, cfg.seed,
                                 args.threads)
    else:
        if sw.variable not in ("s", "d_hat", "k"):
            raise ConfigError([f"sweep.variable: {sw.variable!r} needs a simulated model"])
        g = load_graph(cfg)
        curve = evaluation.sweep_graph(g.adjacency, g.labels, sw.variable, sw.grid,
                                       cfg.classifier, cfg.embedding)
    _emit(data_io.write_curve(cfg.output, curve, _header(cfg)), cfg.output)


def cmd_mc(args):
    cfg = load_config(args)
    if cfg.model is None:
        raise ConfigError(["model: mc needs a block model"])
    curve = evaluation.monte_carlo(cfg.model, cfg.n, cfg.contamination, cfg.classifier,
                                   cfg.embedding, cfg.replicates, cfg.seed, args.threads)
    _emit(data_io.write_curve(cfg.output, curve, _header(cfg)), cfg.output)


HANDLERS = {
    "simulate": cmd_simulate,
    "contaminate": cmd_contaminate,
    "check-condition": cmd_check_condition,
    "scree": cmd_scree,
    "embed": cmd_embed,
    "loo": cmd_loo,
    "sweep": cmd_sweep,
    "mc": cmd_mc,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config (JSON)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--output", help="output path ('-' for stdout)")
    common.add_argument("--threads", type=int,
                        default=int(os.environ.get("VSPARSE_THREADS", "1")),
                        help="worker threads; never changes results (default $VSPARSE_THREADS or 1)")
    parser = argparse.ArgumentParser(prog="vsparse", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = subs.add_parser(name, parents=[common])
        if name == "check-condition":
            p.add_argument("model", nargs="?", help="block model JSON {K, B, pi}")
        if name == "scree":
            p.add_argument("--top-m", type=int, help="keep the largest m eigenvalues in magnitude")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code else 0
    if args.threads < 1:
        sys.stderr.write("error: --threads: must be at least 1\n")
        return 1
    try:
        HANDLERS[args.command](args)
    except (ConfigError, data_io.ParseError) as e:
        for msg in getattr(e, "errors", [str(e)]):
            sys.stderr.write(f"error: {msg}\n")
        return 1
    except Exception as e:  # noqa: BLE001
        sys.stderr.write(f"failed: {type(e).__name__}: {e}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
