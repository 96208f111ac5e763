"""Command-line front end: reproducible experiments with JSON reports.

Every command writes a JSON report embedding the resolved configuration
and the tool version (no timestamps, so identical configs give
byte-identical reports).  Exit codes: 0 success, 1 usage error, 2
verification failure, 3 capacity/cap violation.  A key=value config
file can replace or seed any flag set, and BF_CACHE_DIR enables on-disk
memoization of building balls.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .building import (
    CapacityError,
    LatticeClass,
    ball,
    link,
    neighbors,
    standard_lattice,
)
from .coarse import (
    FiniteMetricSpace,
    distortion_lower_bound,
    growth_profile,
    qi_check,
    skeleton_lemma_verify,
)
from .fields import poly_from_csv
from .flags import elementary_root_groups, flag_complex, gaussian_binomial, root_group_check
from .quotients import (
    PartialClosureError,
    build_quotient,
    covering_check,
    systole,
)
from .simplicial import ColoredGraph
from .spectral import adjacency_spectrum, cheeger_estimate, colored_spectra, ramanujan_check

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2
EXIT_CAPACITY = 3


class UsageError(Exception):
    pass


class ExperimentConfig:
    """A command name plus its fully resolved parameters.

    Serializable both ways: embedded in every JSON report, and writable as a
    key=value file that replays the run (same config and seeds give
    byte-identical reports).
    """

    def __init__(self, command, parameters):
        self.command = command
        self.parameters = dict(parameters)

    @classmethod
    def from_args(cls, args):
        params = {k: v for k, v in sorted(vars(args).items())
                  if k not in ("fn", "command", "config") and v is not None}
        return cls(args.command, params)

    def to_json_dict(self):
        return {"command": self.command, **self.parameters}

    def to_file_text(self):
        lines = [f"{k} = {v}" for k, v in sorted(self.parameters.items())]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_file(cls, command, path):
        params = {}
        for line in Path(path).read_text().splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, value = (s.strip() for s in line.split("=", 1))
            params[key] = value
        return cls(command, params)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_poly(text, p):
    try:
        return poly_from_csv(text, p)
    except ValueError as e:
        raise UsageError(f"malformed polynomial encoding {text!r}: "
                         "expected comma-separated coefficients, constant term first") from e


def _load_graph(path):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read graph file {path}: {e}") from e
    return ColoredGraph.from_edge_list_text(text)


def _load_map(path):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read map file {path}: {e}") from e
    text = text.strip()
    if text.startswith("["):
        return [int(v) for v in json.loads(text)]
    return [int(line.split()[-1]) for line in text.splitlines() if line.strip()]


def _report(command, config, result):
    return {
        "tool": {"name": "buildinglab", "version": __version__},
        "command": command,
        "config": config,
        "result": result,
    }


def _emit(report, out):
    payload = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(payload)
    else:
        sys.stdout.write(payload)


def _write_svg(path, xs, ys, title):
    """Minimal deterministic polyline SVG, no external plotting dependency."""
    w, h, pad = 640, 400, 48
    if not xs:
        xs, ys = [0], [0]
    xmin, xmax = min(xs), max(xs) or 1
    ymin, ymax = min(ys), max(ys) or 1
    xmax = xmax if xmax > xmin else xmin + 1
    ymax = ymax if ymax > ymin else ymin + 1

    def sx(x):
        return pad + (x - xmin) / (xmax - xmin) * (w - 2 * pad)

    def sy(y):
        return h - pad - (y - ymin) / (ymax - ymin) * (h - 2 * pad)

    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">'
        f'<rect width="{w}" height="{h}" fill="white"/>'
        f'<text x="{w // 2}" y="24" text-anchor="middle" font-size="14">{title}</text>'
        f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="1.5"/>'
        f'</svg>\n'
    )
    Path(path).write_text(svg)


# ---------------------------------------------------------------------------
# ball caching


def _ball_cache_path(d, p, r):
    root = os.environ.get("BF_CACHE_DIR")
    if not root:
        return None
    Path(root).mkdir(parents=True, exist_ok=True)
    return Path(root) / f"ball-v{__version__}-d{d}-p{p}-r{r}.json"


def cached_ball(d, p, r, vertex_cap=None):
    from .building import DEFAULT_VERTEX_CAP, BuildingBall

    cap = vertex_cap or DEFAULT_VERTEX_CAP
    path = _ball_cache_path(d, p, r)
    if path and path.exists():
        data = json.loads(path.read_text())
        payloads = [LatticeClass(d, p, tuple(tuple(tuple(e) for e in row) for row in m))
                    for m in data["matrices"]]
        return BuildingBall(payloads, [tuple(s) for s in data["simplices"]], d, p, r,
                            [list(s) for s in data["shells"]],
                            {int(k): v for k, v in data["neighbor_ids"].items()})
    bl = ball(standard_lattice(d, p), r, vertex_cap=cap)
    if path:
        data = {
            "matrices": [[[list(e) for e in row] for row in v.mat] for v in bl.payloads],
            "shells": bl.shells,
            "neighbor_ids": {str(k): v for k, v in bl.neighbor_ids.items()},
            "simplices": [list(s) for s in sorted(bl.simplices)],
        }
        path.write_text(json.dumps(data, sort_keys=True))
    return bl


# ---------------------------------------------------------------------------
# commands


def cmd_ball(args):
    bl = cached_ball(args.d, args.p, args.r, args.vertex_cap)
    expected_degree = sum(gaussian_binomial(args.d, k, args.p) for k in range(1, args.d))
    degree_check = None
    if args.verify_degree:
        ok = True
        for v in bl.payloads:
            if len(neighbors(v)) != expected_degree:
                ok = False
                break
        degree_check = {"expected": expected_degree, "pass": ok}
    result = {
        "vertices": bl.n_vertices,
        "edges": len(bl.simplices_of_dim(1)),
        "chambers": len(bl.simplices_of_dim(args.d - 1)),
        "shells": [len(s) for s in bl.shells],
        "degree_check": degree_check,
    }
    if args.out:
        Path(args.out + ".edges").write_text(bl.export_edge_list())
    code = EXIT_OK if (degree_check is None or degree_check["pass"]) else EXIT_VERIFICATION
    return code, result


def cmd_link(args):
    lk = link(standard_lattice(args.d, args.p))
    result = {
        "vertices": lk.n_vertices,
        "chambers": len(lk.maximal_simplices()),
        "dimension": lk.dimension,
    }
    if args.out:
        Path(args.out + ".edges").write_text(lk.export_edge_list())
    return EXIT_OK, result


def cmd_flags(args):
    fc = flag_complex(args.n, args.q)
    expected = sum(gaussian_binomial(args.n, k, args.q) for k in range(1, args.n))
    result = {
        "vertices": fc.n_vertices,
        "vertices_expected": expected,
        "chambers": len(fc.simplices_of_dim(args.n - 2)),
        "dimension": fc.dimension,
    }
    if args.out:
        Path(args.out + ".edges").write_text(fc.export_edge_list())
    code = EXIT_OK if fc.n_vertices == expected else EXIT_VERIFICATION
    return code, result


def cmd_roots(args):
    fc = flag_complex(args.n, args.q)
    entries = []
    all_passed = True
    for (i, j), root, gens in elementary_root_groups(args.n, args.q):
        verdict = root_group_check(fc, root, gens)
        entries.append({
            "pair": [i, j],
            "order": verdict.group_order,
            "passed": verdict.passed,
            "checked_chambers": verdict.checked_chambers,
        })
        all_passed &= verdict.passed
    result = {"roots": entries, "all_passed": all_passed}
    return (EXIT_OK if all_passed else EXIT_VERIFICATION), result


def cmd_quotient(args):
    g = _parse_poly(args.g, args.p)
    X = build_quotient(args.d, args.p, g, cap=args.cap)
    result = X.to_json_dict()
    if args.systole:
        s = systole(X, vertex_transitive=True)
        result["systole"] = s if math.isfinite(s) else None
    if args.covering_r is not None:
        verdict = covering_check(X, args.covering_r)
        result["covering"] = {
            "radius": verdict.radius,
            "passed": verdict.passed,
            "mismatch": verdict.mismatch,
        }
    if args.spectrum and X.n <= 5000:
        rep = adjacency_spectrum(X)
        result["spectrum"] = {
            "top": rep.eigenvalues[0],
            "second": rep.eigenvalues[1] if X.n > 1 else None,
            "min": rep.eigenvalues[-1],
        }
    if args.out:
        Path(args.out + ".edges").write_text(X.colored_graph().export_edge_list())
    ok = result.get("order_divides_pgl", True) and \
        result.get("covering", {}).get("passed", True)
    return (EXIT_OK if ok else EXIT_VERIFICATION), result


def cmd_spectrum(args):
    if args.input:
        cg = _load_graph(args.input)
    else:
        g = _parse_poly(args.g, args.p)
        cg = build_quotient(args.d, args.p, g, cap=args.cap)
    rep = adjacency_spectrum(cg, mode=args.mode)
    verdict = None
    if args.ramanujan:
        verdict = ramanujan_check(cg)
        rep = verdict.report
    result = rep.to_json_dict()
    if verdict is not None:
        result["ramanujan_verdict"] = verdict.to_json_dict()
    if args.csv:
        Path(args.csv).write_text(rep.to_csv())
    if args.svg:
        eigs = rep.eigenvalues
        _write_svg(args.svg, list(range(len(eigs))), eigs, "adjacency spectrum")
    if args.colored and hasattr(cg, "colored_graph"):
        result["colored"] = {str(s): r.to_json_dict() for s, r in colored_spectra(cg).items()}
    code = EXIT_OK
    if verdict is not None and not verdict.passed:
        code = EXIT_VERIFICATION
    return code, result


def cmd_cheeger(args):
    cg = _load_graph(args.input)
    bounds = cheeger_estimate(cg, exact_cap=args.exact_cap)
    return EXIT_OK, bounds.to_json_dict()


def cmd_systole(args):
    if args.input:
        cg = _load_graph(args.input)
        s = systole(cg, vertex_transitive=args.vertex_transitive)
    else:
        g = _parse_poly(args.g, args.p)
        X = build_quotient(args.d, args.p, g, cap=args.cap)
        s = systole(X, vertex_transitive=True)
    return EXIT_OK, {"systole": s if math.isfinite(s) else None,
                     "infinite": not math.isfinite(s)}


def cmd_qi_check(args):
    X = FiniteMetricSpace.from_graph(_load_graph(args.x))
    Y = FiniteMetricSpace.from_graph(_load_graph(args.y))
    phi = _load_map(args.map)
    w = qi_check(X, Y, phi, args.L, args.C,
                 check_coarse_surjectivity=args.coarse_surjective)
    return (EXIT_OK if w.valid else EXIT_VERIFICATION), w.to_json_dict()


def cmd_distortion(args):
    X = FiniteMetricSpace.from_graph(_load_graph(args.x))
    Y = FiniteMetricSpace.from_graph(_load_graph(args.y))
    db = distortion_lower_bound(X, Y, C_max=args.cmax, radius_budget=args.radius_budget)
    return EXIT_OK, db.to_json_dict()


def cmd_skeleton_lemma(args):
    rep = skeleton_lemma_verify(args.d, args.p, args.r, convention=args.convention,
                                jobs=args.jobs)
    return (EXIT_OK if rep.passed else EXIT_VERIFICATION), rep.to_json_dict()


def cmd_growth(args):
    if args.input:
        cg = _load_graph(args.input)
        gp = growth_profile(cg, args.base, args.R)
    else:
        bl = cached_ball(args.d, args.p, args.R)
        gp = growth_profile(bl, args.base, args.R)
    if args.csv:
        Path(args.csv).write_text(gp.to_csv())
    if args.svg:
        _write_svg(args.svg, list(range(len(gp.sizes))), list(gp.sizes), "growth profile")
    return EXIT_OK, gp.to_json_dict()


# ---------------------------------------------------------------------------
# wiring


def _build_parser():
    top = _Parser(prog="buildinglab",
                  description="exact laboratory for buildings, quotient complexes, "
                              "spectra, and coarse geometry")
    top.add_argument("--config", help="key=value file supplying defaults for the command")
    sub = top.add_subparsers(dest="command")

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(fn=fn)
        p.add_argument("--out", help="output prefix (JSON to <out>.json, edges to <out>.edges)"
                       if name in ("ball", "link", "flags", "quotient") else "JSON output path")
        return p

    p = add("ball", cmd_ball, help="build and export a building ball")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--vertex-cap", type=int, default=None)
    p.add_argument("--verify-degree", action=argparse.BooleanOptionalAction, default=True)

    p = add("link", cmd_link, help="link of the base vertex")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=int, required=True)

    p = add("flags", cmd_flags, help="flag complex of F_q^n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)

    p = add("roots", cmd_roots, help="verify all elementary root groups")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--q", type=int, default=2)

    p = add("quotient", cmd_quotient, help="congruence quotient pipeline")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--g", required=True, help="modulus coefficients, constant first")
    p.add_argument("--cap", type=int, default=250_000)
    p.add_argument("--systole", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--covering-r", type=int, default=1)
    p.add_argument("--spectrum", action=argparse.BooleanOptionalAction, default=False)

    p = add("spectrum", cmd_spectrum, help="adjacency spectrum of a graph or quotient")
    p.add_argument("--input", help="edge-list file")
    p.add_argument("--d", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--g")
    p.add_argument("--cap", type=int, default=250_000)
    p.add_argument("--mode", choices=["dense", "iterative"], default="dense")
    p.add_argument("--ramanujan", action=argparse.BooleanOptionalAction, default=False)
    p.add_argument("--colored", action=argparse.BooleanOptionalAction, default=False)
    p.add_argument("--csv")
    p.add_argument("--svg")

    p = add("cheeger", cmd_cheeger, help="Cheeger constant bounds")
    p.add_argument("--input", required=True)
    p.add_argument("--exact-cap", type=int, default=24)

    p = add("systole", cmd_systole, help="girth of the 1-skeleton")
    p.add_argument("--input")
    p.add_argument("--d", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--g")
    p.add_argument("--cap", type=int, default=250_000)
    p.add_argument("--vertex-transitive", action=argparse.BooleanOptionalAction,
                   default=False)

    p = add("qi-check", cmd_qi_check, help="verify an (L,C) quasi-isometric embedding")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--map", required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--coarse-surjective", action=argparse.BooleanOptionalAction,
                   default=False)

    p = add("distortion", cmd_distortion, help="packing lower bound on distortion")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--cmax", type=int, default=0)
    p.add_argument("--radius-budget", type=int, default=None)

    p = add("skeleton-lemma", cmd_skeleton_lemma,
            help="graph-vs-flat metric comparison on a building ball")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--convention", choices=["unit-edge", "embedding"], default="unit-edge")
    p.add_argument("--jobs", type=int, default=1)

    p = add("growth", cmd_growth, help="ball-size growth profile")
    p.add_argument("--input")
    p.add_argument("--d", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--base", type=int, default=0)
    p.add_argument("--csv")
    p.add_argument("--svg")

    return top


def _apply_config(argv, top):
    """Pull --config out of argv and convert its key=value lines to defaults."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    try:
        path = argv[i + 1]
    except IndexError:
        raise UsageError("--config requires a file path") from None
    rest = argv[:i] + argv[i + 2:]
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as e:
        raise UsageError(f"cannot read config file {path}: {e}") from e
    injected = []
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"malformed config line: {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "false"):
            injected.append(flag if value.lower() == "true" else
                            flag.replace("--", "--no-", 1))
        else:
            injected.extend([flag, value])
    # config values come first so explicit flags win on conflicts argparse allows
    if rest:
        return [rest[0]] + injected + rest[1:]
    return injected


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    top = _build_parser()
    try:
        argv = _apply_config(argv, top)
        args = top.parse_args(argv)
        if not getattr(args, "fn", None):
            raise UsageError("a command is required (see --help)")
        config = ExperimentConfig.from_args(args).to_json_dict()
        code, result = args.fn(args)
        report = _report(args.command, config, result)
        out_json = (args.out + ".json") if (args.out and args.command in
                                            ("ball", "link", "flags", "quotient")) else args.out
        _emit(report, out_json)
        return code
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (CapacityError, PartialClosureError) as e:
        print(f"capacity error: {e}", file=sys.stderr)
        return EXIT_CAPACITY
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
