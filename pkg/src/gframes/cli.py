"""Command-line front end.

Exit codes: 0 success, 1 unreadable or malformed input, 2 precondition
failure, 3 numerical failure. Reports go to ``--output`` (stdout for ``-``);
diagnostics go to stderr, with verbosity taken from ``GFRAME_LOG``.
"""

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .constructions import (
    EnsembleSpec,
    build_compact_example,
    build_random_g_frame,
    build_riesz_bridge_example,
    complex_gaussian,
)
from .core import (
    DEFAULT_DEPTH,
    DEFAULT_TOL,
    GFrameFamily,
    canonical_dual,
    classify,
    frame_bounds,
)
from .errors import (
    ConstructionError,
    DimensionError,
    DomainError,
    FormatError,
    NumericalError,
    PreconditionError,
)
from .io import family_from_dict, loads_json, operator_from_dict, read_json
from .perturbation import (
    SWEEP_COLUMNS,
    decay_perturbation,
    dual_member_norm_bound,
    perturbation_sweep,
    riesz_perturbation,
)
from .report import SCHEMA_VERSION, to_jsonable
from .representation import (
    compactness_dichotomy,
    fit_representation,
    injectivity_report,
    kernel_shift_invariance,
    power_decay,
    range_span_identity,
    unitary_obstruction,
)

log = logging.getLogger("gframes")

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_NUMERICAL = 0, 1, 2, 3
COMMANDS = ("analyze", "fit", "perturb", "demo", "sweep")


def _configure_logging():
    level = os.environ.get("GFRAME_LOG", "WARNING").upper()
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def load_spec(text, args):
    """``--spec`` accepts a path to a JSON file or the JSON text itself."""
    if text.lstrip().startswith("{"):
        d = loads_json(text, "--spec")
    else:
        d = read_json(text)
    if not isinstance(d, dict):
        raise FormatError("ensemble spec must be a JSON object")
    d = dict(d)
    if d.get("kind") in ("dynamical", "compact_example"):
        d.setdefault("member_count", args.depth)
    d.setdefault("seed", args.seed)
    return EnsembleSpec.from_dict(d)


def load_family(args):
    if (args.input is None) == (args.spec is None):
        raise PreconditionError("give exactly one of --input or --spec")
    if args.input is not None:
        return family_from_dict(read_json(args.input), args.input)
    spec = load_spec(args.spec, args)
    log.info("building %s family from spec (seed %d)", spec.kind, spec.seed)
    return build_random_g_frame(spec)


def _summary(family):
    return {
        "dom_dim": family.dom_dim,
        "member_count": len(family),
        "cod_dims": list(family.cod_dims),
    }


def _random_unit(n, seed):
    rng = np.random.default_rng(seed)
    f = complex_gaussian(rng, (n,))
    return f / np.linalg.norm(f)


def cmd_analyze(args):
    family = load_family(args)
    cls = classify(family, args.tol)
    report = {"family": _summary(family), "classification": cls}
    if cls.is_g_frame:
        report["dual_bounds"] = frame_bounds(canonical_dual(family, args.tol))
        report["dual_member_norms"] = dual_member_norm_bound(family, args.tol)
    else:
        report["dual_bounds"] = None
    return report


def cmd_fit(args):
    family = load_family(args)
    fit = fit_representation(family, args.tol)
    report = {
        "family": _summary(family),
        "fit": fit,
        "shift_invariance": kernel_shift_invariance(family, args.tol),
        "range_span": range_span_identity(family, fit.t_matrix, args.tol),
        "compactness": compactness_dichotomy(family, fit.t_matrix, args.tol),
        "injectivity": None,
        "decay": None,
    }
    if fit.exact and frame_bounds(family).is_positive(args.tol):
        report["injectivity"] = injectivity_report(family, fit.t_matrix, args.tol)
        f = _random_unit(family.dom_dim, args.seed)
        report["decay"] = power_decay(fit.t_matrix, f, family[0], args.depth)
    return report


def _field(doc, key, where):
    try:
        return doc[key]
    except KeyError:
        raise FormatError(f"{where}: missing field {key!r}") from None


def cmd_perturb(args):
    """Three input shapes: ``{"base", "perturbed"}`` families, a generator
    problem ``{"lambda1", "t", "theta1", "mu"[, "depth"]}``, or a plain
    family (``--input``/``--spec``) perturbed randomly at ``--scale``.
    """
    doc = read_json(args.input) if args.input else None
    where = args.input
    if isinstance(doc, dict) and "base" in doc:
        base = family_from_dict(doc["base"], f"{where}: base")
        perturbed = family_from_dict(_field(doc, "perturbed", where), f"{where}: perturbed")
        return {"perturbation": riesz_perturbation(base, perturbed, args.tol, seed=args.seed)}
    if isinstance(doc, dict) and "lambda1" in doc:
        try:
            mu = float(_field(doc, "mu", where))
            depth = int(doc.get("depth", args.depth))
        except (TypeError, ValueError) as exc:
            raise FormatError(f"{where}: bad mu/depth ({exc})") from exc
        report = decay_perturbation(
            operator_from_dict(doc["lambda1"], "lambda1"),
            operator_from_dict(_field(doc, "t", where), "t"),
            operator_from_dict(_field(doc, "theta1", where), "theta1"),
            mu,
            depth,
            args.tol,
        )
        return {"decay_perturbation": report, "verdict": report.verdict}
    base = load_family(args)
    direction = _random_direction(base, args.seed)
    perturbed = GFrameFamily(tuple(a + args.scale * e for a, e in zip(base, direction)))
    return {"scale": args.scale,
            "perturbation": riesz_perturbation(base, perturbed, args.tol, seed=args.seed)}


def _random_direction(base, seed):
    """Seeded perturbation blocks normalized so that ``alpha_proof`` equals 1 at scale 1."""
    rng = np.random.default_rng(seed)
    blocks = [complex_gaussian(rng, m.shape) for m in base]
    unit = GFrameFamily(tuple(blocks))
    probe = GFrameFamily(tuple(a + e for a, e in zip(base, blocks)))
    alpha = riesz_perturbation(base, probe, check_mechanism=False).alpha_proof
    return GFrameFamily(tuple(e / alpha for e in unit))


def cmd_sweep(args):
    base = load_family(args)
    direction = _random_direction(base, args.seed)
    scales = [0.0] + list(np.logspace(np.log10(args.min_scale), np.log10(args.max_scale), args.points))
    rows = perturbation_sweep(base, direction, scales, args.tol)
    return {"columns": list(SWEEP_COLUMNS), "rows": rows}


def cmd_demo(args):
    report = {}
    compact = {}
    for alpha in (0.1, 0.5, 0.9):
        fam, _ = build_compact_example(alpha, 4, args.depth)
        b = frame_bounds(fam)
        compact[str(alpha)] = {"lower": b.lower, "upper": b.upper, "limit": 1 / (1 - alpha**2)}
    report["compact_example"] = compact

    fam, t_adj = build_riesz_bridge_example(4, 0.5, seed=args.seed)
    fit = fit_representation(fam, args.tol)
    report["riesz_bridge"] = {
        "classification": classify(fam, args.tol),
        "fit_residual": fit.max_residual,
        "injectivity": injectivity_report(fam, t_adj, args.tol),
    }

    rot = np.array([[np.cos(1.0), -np.sin(1.0)], [np.sin(1.0), np.cos(1.0)]])
    report["unitary_obstruction"] = unitary_obstruction(np.diag([1.0, 0.0]), rot, (32, 64, 128))

    report["decay_perturbation"] = decay_perturbation(
        np.eye(2), np.diag([0.5, 1 / 3]), 0.1 * np.eye(2), 0.5, 1, args.tol
    )
    return report


HANDLERS = {
    "analyze": cmd_analyze,
    "fit": cmd_fit,
    "perturb": cmd_perturb,
    "sweep": cmd_sweep,
    "demo": cmd_demo,
}


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, json.dumps(obj) if isinstance(obj, list) else obj


def render(command, report, fmt):
    data = to_jsonable(report)
    if fmt == "json":
        return json.dumps({"schema_version": SCHEMA_VERSION, "command": command, **data},
                          indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# gframes {command} v{SCHEMA_VERSION}\n")
    writer = csv.writer(buf, lineterminator="\n")
    if command == "sweep":
        writer.writerow(data["columns"])
        for row in data["rows"]:
            writer.writerow([row[c] for c in data["columns"]])
    else:
        writer.writerow(["key", "value"])
        for key, value in _flatten(data):
            writer.writerow([key, value])
    return buf.getvalue()


def build_parser():
    parser = argparse.ArgumentParser(prog="gframes", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", help="family JSON file (perturb: perturbation document)")
        p.add_argument("--spec", help="ensemble spec: JSON file or inline JSON")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", default="-", help="report path, '-' for stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if name == "perturb":
            p.add_argument("--scale", type=float, default=0.5,
                           help="random perturbation size, in units of alpha")
        if name == "sweep":
            p.add_argument("--min-scale", type=float, default=1e-3)
            p.add_argument("--max-scale", type=float, default=10.0)
            p.add_argument("--points", type=int, default=25)
    return parser


def main(argv=None):
    _configure_logging()
    args = build_parser().parse_args(argv)
    if args.tol <= 0 or args.depth < 1 or args.seed < 0:
        print("gframes: --tol must be positive, --depth and --seed non-negative", file=sys.stderr)
        return EXIT_PRECONDITION
    try:
        report = HANDLERS[args.command](args)
        text = render(args.command, report, args.format)
    except FormatError as exc:
        print(f"gframes: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (PreconditionError, DimensionError, DomainError) as exc:
        print(f"gframes: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (NumericalError, ConstructionError, np.linalg.LinAlgError) as exc:
        print(f"gframes: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")
        log.info("wrote %s", args.output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
