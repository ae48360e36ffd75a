"""Command-line front end.

Exit status: 0 success, 1 usage error, 2 data error, 3 numeric error.

    ifnet build    --input data.csv --header --method tmfg --out net.edges --tree tree.json
    ifnet logo     --input data.csv --header --tree tree.json --out precision.coo
    ifnet ensemble --input data.csv --header --method mst --replicas 100 --seed 7 \\
                   --alpha 0.05 --out validated.edges
    ifnet hnn      --edges net.edges --mode layered --dmax 2 --out hnn.json
    ifnet rank     --edges net.edges --centrality eigenvector --out ranking.tsv
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import feature_ranking
from .core import estimate_covariance
from .ensemble import bootstrap_ensemble, merge_report
from .errors import ConfigError, IFNError, NumericError
from .hnn import MODES, export_hnn
from .io import (
    fmt, format_edges, format_precision, format_tree, parse_edges, parse_tree,
    read_data, read_matrix,
)
from .logo import logo_precision
from .pipeline import GAINS, METHOD_ALIASES, METHODS, Recipe

log = logging.getLogger("ifnet")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("build", "logo", "ensemble", "hnn", "rank")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    input: Path | None = None
    kind: str = "data"
    header: bool = False
    method: str = "tmfg"
    gain: str = "edge"
    min_clique: int = 4
    max_clique: int = 4
    max_mult: int | None = 1
    threshold: float | None = None
    shrinkage: float = 0.0
    replicas: int = 100
    alpha: float = 0.05
    seed: int = 0
    subsample: float | None = None
    workers: int = 1
    mode: str = "layered"
    dmax: int = 2
    centrality: str = "degree"
    tree: Path | None = None
    edges: Path | None = None
    out: Path | None = None
    freq: Path | None = None
    problems: list[str] = field(default_factory=list)

    def recipe(self) -> Recipe:
        return Recipe(self.method, self.gain, self.min_clique, self.max_clique,
                      self.max_mult, self.threshold, self.shrinkage)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ifnet", description="Information filtering networks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common_input(sp):
        sp.add_argument("--input", help="CSV file: observations x variables, or a p x p matrix")
        sp.add_argument("--kind", default="data", help="data (default) or matrix")
        sp.add_argument("--header", action="store_true", help="first CSV row holds variable names")
        sp.add_argument("--shrinkage", default="0")

    def recipe_flags(sp, default_method="tmfg"):
        sp.add_argument("--method", default=default_method,
                        help=f"one of {', '.join(METHODS)} (alias: mst)")
        sp.add_argument("--gain", default="edge", help="mfcf gain: edge, sumsq or mi")
        sp.add_argument("--min-clique", default="4")
        sp.add_argument("--max-clique", default="4")
        sp.add_argument("--max-mult", default="1", help="integer or inf")
        sp.add_argument("--threshold", default=None, help="mfcf gain threshold (starts a new component)")

    b = sub.add_parser("build", help="construct a filtered network")
    common_input(b)
    recipe_flags(b)
    b.add_argument("--out", help="edge-list output")
    b.add_argument("--tree", help="clique-tree document output (tmfg, mfcf or chordal results)")

    lg = sub.add_parser("logo", help="LoGo sparse precision from a clique tree")
    common_input(lg)
    lg.add_argument("--tree", help="clique-tree document")
    lg.add_argument("--out", help="precision coordinate-file output")

    e = sub.add_parser("ensemble", help="bootstrap ensemble with hypergeometric validation")
    common_input(e)
    recipe_flags(e, "mst")
    e.add_argument("--replicas", default="100")
    e.add_argument("--seed", default="0", help="decimal 64-bit master seed")
    e.add_argument("--alpha", default="0.05")
    e.add_argument("--subsample", default=None, help="row fraction drawn without replacement")
    e.add_argument("--workers", default="1")
    e.add_argument("--out", help="validated edge-list output")
    e.add_argument("--freq", help="ensemble document output (edge counts)")

    h = sub.add_parser("hnn", help="export an HNN architecture")
    h.add_argument("--edges", help="edge list of the network")
    h.add_argument("--mode", default="layered", help="layered or flat")
    h.add_argument("--dmax", default="2")
    h.add_argument("--out", help="HNN document output")

    r = sub.add_parser("rank", help="centrality ranking of the vertices")
    r.add_argument("--edges", help="edge list of the network")
    r.add_argument("--centrality", default="degree", help="degree or eigenvector")
    r.add_argument("--out", help="ranking output (name<TAB>score, most central first)")
    return p


def _int(problems, flag, raw, lo=None, hi=None):
    try:
        val = int(raw, 10)
    except (TypeError, ValueError):
        problems.append(f"{flag}: {raw!r} is not an integer")
        return None
    if (lo is not None and val < lo) or (hi is not None and val > hi):
        problems.append(f"{flag}: {val} out of range")
        return None
    return val


def _float(problems, flag, raw, lo=None, hi=None):
    try:
        val = float(raw)
    except (TypeError, ValueError):
        problems.append(f"{flag}: {raw!r} is not a number")
        return None
    if not math.isfinite(val) or (lo is not None and val < lo) or (hi is not None and val > hi):
        problems.append(f"{flag}: {raw} out of range")
        return None
    return val


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    """Convert and validate every flag, collecting all problems at once."""
    cfg = RunConfig(ns.command)
    bad = cfg.problems
    get = lambda name: getattr(ns, name, None)  # noqa: E731

    for name in ("input", "tree", "edges", "out", "freq"):
        if get(name) is not None:
            setattr(cfg, name, Path(get(name)))
    if get("kind") is not None:
        if ns.kind not in ("data", "matrix"):
            bad.append(f"--kind: {ns.kind!r} is not data or matrix")
        cfg.kind = ns.kind
    cfg.header = bool(get("header"))
    if get("shrinkage") is not None:
        cfg.shrinkage = _float(bad, "--shrinkage", ns.shrinkage, 0.0, 1.0)
    if get("method") is not None:
        method = METHOD_ALIASES.get(ns.method, ns.method)
        if method not in METHODS:
            bad.append(f"--method: {ns.method!r} is not one of {', '.join(METHODS)}")
        cfg.method = method
        if ns.gain not in GAINS:
            bad.append(f"--gain: {ns.gain!r} is not one of {', '.join(GAINS)}")
        cfg.gain = ns.gain
        cfg.min_clique = _int(bad, "--min-clique", ns.min_clique, 2)
        cfg.max_clique = _int(bad, "--max-clique", ns.max_clique, 2)
        if cfg.min_clique and cfg.max_clique and cfg.max_clique < cfg.min_clique:
            bad.append("--max-clique must be >= --min-clique")
        cfg.max_mult = None if ns.max_mult.lower() == "inf" else _int(bad, "--max-mult", ns.max_mult, 1)
        if ns.threshold is not None:
            cfg.threshold = _float(bad, "--threshold", ns.threshold)
        if method != "mfcf" and (ns.gain != "edge" or ns.threshold is not None):
            bad.append("--gain and --threshold only apply to --method mfcf")
    if cfg.command == "ensemble":
        cfg.replicas = _int(bad, "--replicas", ns.replicas, 1)
        cfg.seed = _int(bad, "--seed", ns.seed, 0, (1 << 64) - 1)
        cfg.alpha = _float(bad, "--alpha", ns.alpha, 0.0, 1.0)
        cfg.workers = _int(bad, "--workers", ns.workers, 1)
        if ns.subsample is not None:
            cfg.subsample = _float(bad, "--subsample", ns.subsample, 0.0, 1.0)
            if cfg.subsample == 0.0:
                bad.append("--subsample must be > 0")
        if cfg.kind == "matrix":
            bad.append("ensemble needs raw data (--kind data)")
    if cfg.command == "hnn":
        if ns.mode not in MODES:
            bad.append(f"--mode: {ns.mode!r} is not layered or flat")
        cfg.mode = ns.mode
        cfg.dmax = _int(bad, "--dmax", ns.dmax, 1)
    if cfg.command == "rank":
        if ns.centrality not in ("degree", "eigenvector"):
            bad.append(f"--centrality: {ns.centrality!r} is not degree or eigenvector")
        cfg.centrality = ns.centrality

    needs = {"build": ("input", "out"), "logo": ("input", "tree", "out"),
             "ensemble": ("input", "out"), "hnn": ("edges", "out"), "rank": ("edges", "out")}
    for name in needs[cfg.command]:
        if getattr(cfg, name) is None:
            bad.append(f"--{name} is required for {cfg.command}")
    for name in ("input", "tree", "edges"):
        path = getattr(cfg, name)
        if path is not None and name in needs[cfg.command] and not path.is_file():
            bad.append(f"--{name}: {path} does not exist")
    if cfg.command == "build" and cfg.tree is not None and cfg.method in ("mst-prim", "mst-kruskal", "pmfg"):
        log.info("--tree with %s: the clique tree is extracted from the output graph", cfg.method)
    return cfg


def _write(path: Path, text: str):
    path.write_text(text, encoding="utf-8", newline="\n")


def _covariance(cfg: RunConfig):
    if cfg.kind == "matrix":
        cov = read_matrix(cfg.input, cfg.header)
        if cfg.shrinkage:
            from .core import WeightMatrix
            import numpy as np
            v = cov.values
            cov = WeightMatrix((1 - cfg.shrinkage) * v + cfg.shrinkage * np.diag(np.diag(v)),
                               cov.kind, cov.names)
        return cov
    return estimate_covariance(read_data(cfg.input, cfg.header), cfg.shrinkage)


def _cmd_build(cfg: RunConfig):
    net = cfg.recipe().from_covariance(_covariance(cfg))
    _write(cfg.out, format_edges(net.graph))
    if cfg.tree is not None:
        tree = net.tree
        if tree is None:
            from .core import extract_clique_tree
            tree = extract_clique_tree(net.graph)
        _write(cfg.tree, format_tree(tree))


def _cmd_logo(cfg: RunConfig):
    cov = _covariance(cfg)
    tree = parse_tree(cfg.tree.read_text())
    missing = [n for n in tree.names if n not in cov.names]
    if missing or len(cov.names) != len(tree.names):
        from .errors import InvalidInputError
        raise InvalidInputError(f"clique-tree vertices do not match the input variables (missing: {missing})")
    order = [cov.names.index(n) for n in tree.names]
    from .core import WeightMatrix
    import numpy as np
    cov = WeightMatrix(cov.values[np.ix_(order, order)], cov.kind, tree.names)
    _write(cfg.out, format_precision(logo_precision(cov, tree)))


def _cmd_ensemble(cfg: RunConfig):
    data = read_data(cfg.input, cfg.header)
    if cfg.replicas > data.p * (data.p - 1) // 2:
        raise ConfigError(f"--replicas {cfg.replicas} exceeds p(p-1)/2 = {data.p * (data.p - 1) // 2} "
                          f"for p = {data.p}; the validation null needs r <= p(p-1)/2")
    ens = bootstrap_ensemble(data, cfg.replicas, cfg.recipe(), cfg.seed, cfg.subsample, cfg.workers)
    report = merge_report(ens, cfg.alpha)
    _write(cfg.out, format_edges(report.graph))
    if cfg.freq is not None:
        doc = ens.to_dict()
        doc["alpha"] = cfg.alpha
        doc["validated"] = {"edges": report.graph.n_edges, "chordal": report.chordal,
                            "planar": report.planar}
        _write(cfg.freq, json.dumps(doc, indent=2) + "\n")
    log.info("validated %d of %d observed edges (chordal=%s, planar=%s)",
             report.graph.n_edges, len(ens.freq), report.chordal, report.planar)


def _cmd_hnn(cfg: RunConfig):
    g = parse_edges(cfg.edges.read_text())
    _write(cfg.out, export_hnn(g, cfg.mode, cfg.dmax).to_json())


def _cmd_rank(cfg: RunConfig):
    g = parse_edges(cfg.edges.read_text())
    rk = feature_ranking(g, cfg.centrality)
    _write(cfg.out, "".join(f"{g.names[v]}\t{fmt(rk.scores[v])}\n" for v in rk.order))


def run(cfg: RunConfig) -> int:
    handlers = {"build": _cmd_build, "logo": _cmd_logo, "ensemble": _cmd_ensemble,
                "hnn": _cmd_hnn, "rank": _cmd_rank}
    if cfg.problems:
        print("ifnet: invalid configuration:", file=sys.stderr)
        for msg in cfg.problems:
            print(f"  - {msg}", file=sys.stderr)
        return EXIT_USAGE
    try:
        handlers[cfg.command](cfg)
    except ConfigError as exc:
        print(f"ifnet: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"ifnet: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except IFNError as exc:
        print(f"ifnet: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    try:
        ns = _parser().parse_args(argv)
    except UsageError as exc:
        print(f"ifnet: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
