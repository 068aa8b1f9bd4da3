"""Command-line driver: load transform definitions, run checks,
classification, Jacobian dumps and corpus fuzzing, emit machine-readable
reports.

Subcommands: classify, check, diff, fuzz, mazur-ulam.

Exit codes (exhaustive):
    0  the run completed with a positive verdict
    2  the run completed with a negative verdict; a diagnostic report is
       still emitted: not_a_symmetry, mixed_branch, not_unitary,
       reconstruction_mismatch, origin_not_fixed,
       not_probability_preserving, degenerate_pair, not_isometry,
       not_orthogonal, zero_reference, fuzz failures, and evaluation
       failures (non_finite_evaluation, division_near_zero)
    1  the question was ill-posed: io_error, parse_error,
       unknown_identifier, unknown_matrix, dimension_mismatch,
       schema_error (bad constants/manifest/flag values), not_real_map,
       not_unitary_input, and command-line usage errors

Reports are JSON by default (schema version 1, complex numbers always as
[re, im] pairs, operators row-major); --format csv and --format human are
also available. With --no-timestamp the generated_at and timing_ms fields
are suppressed so identical runs produce byte-identical reports. All
randomness flows from --seed (default 0).
"""

import argparse
import concurrent.futures
import csv
import dataclasses
import io
import json
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import dsl
from .classifier import (
    ClassifyConfig,
    align_global_phase,
    check_preservation,
    classify,
)
from .errors import (
    DegeneratePair,
    DimensionMismatch,
    DivisionNearZero,
    MixedBranch,
    NonFiniteEvaluation,
    NotASymmetry,
    NotIsometry,
    NotOrthogonal,
    NotProbabilityPreserving,
    NotRealMap,
    NotUnitary,
    NotUnitaryInput,
    OriginNotFixed,
    ParseError,
    ReconstructionMismatch,
    SchemaError,
    UnknownIdentifier,
    UnknownMatrix,
    WignerError,
    ZeroReference,
)
from .generators import (
    default_manifest,
    is_symmetry_kind,
    transformation_from_entry,
    validate_manifest,
)
from .mazurulam import RealTransformation, check_isometry, reconstruct_orthogonal
from .states import zero_state
from .wirtinger import richardson_refine, wirtinger_jacobian

SCHEMA_VERSION = 1

# recovery threshold for fuzz ground-truth comparison reuses --tol-unitary
_VERDICT_ERROR_CODES = (
    (NotASymmetry, "not_a_symmetry"),
    (MixedBranch, "mixed_branch"),
    (NotUnitary, "not_unitary"),
    (ReconstructionMismatch, "reconstruction_mismatch"),
    (OriginNotFixed, "origin_not_fixed"),
    (NotProbabilityPreserving, "not_probability_preserving"),
    (DegeneratePair, "degenerate_pair"),
    (NotIsometry, "not_isometry"),
    (NotOrthogonal, "not_orthogonal"),
    (NonFiniteEvaluation, "non_finite_evaluation"),
    (DivisionNearZero, "division_near_zero"),
    (ZeroReference, "zero_reference"),
)
_INPUT_ERROR_CODES = (
    (UnknownIdentifier, "unknown_identifier"),
    (ParseError, "parse_error"),
    (UnknownMatrix, "unknown_matrix"),
    (SchemaError, "schema_error"),
    (DimensionMismatch, "dimension_mismatch"),
    (NotRealMap, "not_real_map"),
    (NotUnitaryInput, "not_unitary_input"),
)

_COMPLEX_PAIR = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}
_COMPLEX_MATRIX = {
    "type": "array",
    "items": {"type": "array", "items": _COMPLEX_PAIR},
}
_PRESERVATION_BLOCK = {
    "type": "object",
    "required": ["pairs_tested", "max_deviation", "tolerance", "passed"],
    "properties": {
        "pairs_tested": {"type": "integer"},
        "max_deviation": {"type": "number"},
        "tolerance": {"type": "number"},
        "passed": {"type": "boolean"},
        "pairs": {"type": "array"},
    },
}

#: JSON schema for every emitted report (validated in the test suite).
REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["schema_version", "config_echo"],
    "oneOf": [{"required": ["verdict"]}, {"required": ["error"]}],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "verdict": {"type": "string"},
        "error": {"type": "string"},
        "detail": {"type": "string"},
        "branch": {"enum": ["linear", "antilinear"]},
        "operator": _COMPLEX_MATRIX,
        "operator_real": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        "unitarity_residual": {"type": "number"},
        "reconstruction_residual": {"type": "number"},
        "orthogonality_residual": {"type": "number"},
        "origin_d_z_norm": {"type": "number"},
        "origin_d_zbar_norm": {"type": "number"},
        "smoothness": {"type": "object"},
        "caveats": {"type": "array", "items": {"type": "string"}},
        "preservation": _PRESERVATION_BLOCK,
        "isometry": _PRESERVATION_BLOCK,
        "d_z": _COMPLEX_MATRIX,
        "d_zbar": _COMPLEX_MATRIX,
        "d_zbar_max": {"type": "number"},
        "point": {"type": "array", "items": _COMPLEX_PAIR},
        "step": {"type": "number"},
        "levels": {"type": "integer"},
        "counts": {"type": "object"},
        "instances": {"type": "array"},
        "config_echo": {"type": "object"},
        "timing_ms": {"type": "number"},
        "generated_at": {"type": "string"},
    },
}


def _complex_matrix_payload(matrix) -> list:
    return [
        [[float(v.real), float(v.imag)] for v in row] for row in np.asarray(matrix)
    ]


def _real_matrix_payload(matrix) -> list:
    return [[float(v) for v in row] for row in np.asarray(matrix)]


def _vector_payload(vec) -> list:
    return [[float(v.real), float(v.imag)] for v in np.asarray(vec)]


def _error_payload(exc: WignerError) -> tuple[int, dict]:
    for klass, code in _INPUT_ERROR_CODES:
        if isinstance(exc, klass):
            return 1, {"error": code, "detail": str(exc)}
    for klass, code in _VERDICT_ERROR_CODES:
        if isinstance(exc, klass):
            payload = {"error": code, "detail": str(exc)}
            report = getattr(exc, "report", None)
            if report is not None:
                payload["preservation"] = _preservation_payload(report)
            return 2, payload
    return 2, {"error": "analysis_error", "detail": str(exc)}


def _preservation_payload(report, with_pairs: bool = False) -> dict:
    block = {
        "pairs_tested": report.pairs_tested,
        "max_deviation": report.max_deviation,
        "tolerance": report.tolerance,
        "passed": report.passed,
    }
    if with_pairs and getattr(report, "records", None):
        block["pairs"] = [dataclasses.asdict(r) for r in report.records]
    return block


# ---------------------------------------------------------------------------
# input loading

def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_transformation(args):
    spec = dsl.parse(_read_text(args.spec))
    constants = dsl.load_constants(args.constants) if args.constants else None
    return dsl.compile_to_transformation(spec, constants)


def _config_from_args(args) -> ClassifyConfig:
    return ClassifyConfig(
        step=args.step,
        tol_preserve=args.tol_preserve,
        tol_unitary=args.tol_unitary,
        tol_branch=args.tol_branch,
        samples=args.samples,
        seed=args.seed,
    )


def _validate_numeric_flags(args) -> None:
    for name in ("step", "tol_preserve", "tol_unitary", "tol_branch"):
        if getattr(args, name) <= 0:
            raise SchemaError(f"--{name.replace('_', '-')} must be positive")
    if args.samples < 1:
        raise SchemaError("--samples must be at least 1")
    if args.jobs < 1:
        raise SchemaError("--jobs must be at least 1")
    if getattr(args, "levels", 0) not in range(0, 5):
        raise SchemaError("--levels must be in 0..4")


# ---------------------------------------------------------------------------
# subcommands

def _cmd_classify(args) -> tuple[int, dict]:
    transform = _load_transformation(args)
    result = classify(transform, _config_from_args(args))
    smooth = result.smoothness
    payload = {
        "verdict": "symmetry",
        "branch": result.branch,
        "operator": _complex_matrix_payload(result.operator),
        "unitarity_residual": result.unitarity_residual,
        "reconstruction_residual": result.reconstruction_residual,
        "origin_d_z_norm": result.origin_d_z_norm,
        "origin_d_zbar_norm": result.origin_d_zbar_norm,
        "smoothness": {
            "coarse_difference": smooth.coarse_difference,
            "fine_difference": smooth.fine_difference,
            "halving_ratio": smooth.halving_ratio,
        },
        "preservation": _preservation_payload(result.preservation),
        "caveats": list(result.caveats),
    }
    return 0, payload


def _cmd_check(args) -> tuple[int, dict]:
    transform = _load_transformation(args)
    report = check_preservation(transform, args.samples, args.seed, args.tol_preserve)
    payload = {"preservation": _preservation_payload(report, with_pairs=True)}
    if report.passed:
        payload["verdict"] = "preserving"
        return 0, payload
    payload["error"] = "not_a_symmetry"
    payload["detail"] = (
        f"max modulus deviation {report.max_deviation:.6g} exceeds "
        f"{report.tolerance:g}"
    )
    return 2, payload


def _cmd_diff(args) -> tuple[int, dict]:
    transform = _load_transformation(args)
    if args.point is None:
        point = zero_state(transform.dimension)
    else:
        components = [dsl.parse_constant(part) for part in args.point.split(",")]
        if len(components) != transform.dimension:
            raise DimensionMismatch(
                f"--point has {len(components)} components, "
                f"spec dimension is {transform.dimension}"
            )
        point = np.asarray(components, dtype=np.complex128)
    if args.levels == 0:
        jac = wirtinger_jacobian(transform, point, args.step)
    else:
        jac = richardson_refine(transform, point, args.step, args.levels)
    analytic = jac.d_zbar_norm < args.tol_branch
    payload = {
        "verdict": "analytic" if analytic else "not_analytic",
        "point": _vector_payload(point),
        "d_z": _complex_matrix_payload(jac.d_z),
        "d_zbar": _complex_matrix_payload(jac.d_zbar),
        "d_zbar_max": jac.d_zbar_norm,
        "step": args.step,
        "levels": args.levels,
    }
    return 0, payload


def _fuzz_instance(index: int, entry: dict, args) -> dict:
    record = {
        "index": index,
        "kind": entry["kind"],
        "n": entry["n"],
        "seed": entry["seed"],
    }
    symmetry = is_symmetry_kind(entry["kind"])
    if symmetry:
        record["dressing_degree"] = entry.get("dressing_degree", 0)
    if entry["n"] == 1:
        record["status"] = "caveat_n1"
        return record
    transform = transformation_from_entry(entry)
    config = dataclasses.replace(_config_from_args(args), seed=args.seed + index)
    try:
        result = classify(transform, config)
    except WignerError as exc:
        code = _error_payload(exc)[1]["error"]
        record["status"] = "rejected"
        record["error"] = code
        return record
    record["branch"] = result.branch
    if not symmetry:
        record["status"] = "accepted"
        return record
    truth = transform.ground_truth
    alignment = align_global_phase(result.operator, truth["matrix"])
    record["residual"] = alignment.aligned_residual
    if result.branch == truth["kind"] and alignment.aligned_residual < args.tol_unitary:
        record["status"] = "recovered"
    else:
        record["status"] = "mismatch"
    return record


def _cmd_fuzz(args) -> tuple[int, dict]:
    if args.manifest:
        raw = json.loads(_read_text(args.manifest))
    else:
        raw = default_manifest()
    entries = validate_manifest(raw)

    if args.jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = [
                pool.submit(_fuzz_instance, idx, entry, args)
                for idx, entry in enumerate(entries)
            ]
            records = [f.result() for f in futures]
    else:
        records = [
            _fuzz_instance(idx, entry, args) for idx, entry in enumerate(entries)
        ]
    records.sort(key=lambda r: r["index"])

    symmetries = [r for r in records if is_symmetry_kind(r["kind"]) and r["status"] != "caveat_n1"]
    adversaries = [r for r in records if not is_symmetry_kind(r["kind"]) and r["status"] != "caveat_n1"]
    counts = {
        "symmetries": len(symmetries),
        "recovered": sum(r["status"] == "recovered" for r in symmetries),
        "adversaries": len(adversaries),
        "rejected": sum(r["status"] == "rejected" for r in adversaries),
        "caveat_n1": sum(r["status"] == "caveat_n1" for r in records),
    }
    ok = counts["recovered"] == counts["symmetries"] and counts["rejected"] == counts[
        "adversaries"
    ]
    payload = {"counts": counts, "instances": records}
    if ok:
        payload["verdict"] = "ok"
        return 0, payload
    payload["error"] = "fuzz_failures"
    payload["detail"] = (
        f"{counts['recovered']}/{counts['symmetries']} symmetries recovered, "
        f"{counts['rejected']}/{counts['adversaries']} adversaries rejected"
    )
    return 2, payload


def _as_real_transformation(transform) -> RealTransformation:
    def evaluator(u: np.ndarray) -> np.ndarray:
        out = transform(u.astype(np.complex128))
        worst = float(np.abs(out.imag).max())
        if worst > 1e-9:
            raise NotRealMap(
                f"map produced imaginary output of magnitude {worst:.3g} on real input"
            )
        return out.real

    return RealTransformation(evaluator=evaluator, dimension=transform.dimension)


def _cmd_mazur_ulam(args) -> tuple[int, dict]:
    transform = _as_real_transformation(_load_transformation(args))
    isometry = check_isometry(
        transform, num_pairs=args.samples, seed=args.seed, tol=args.tol_unitary
    )
    payload = {
        "isometry": {
            "pairs_tested": isometry.pairs_tested,
            "max_deviation": isometry.max_deviation,
            "tolerance": isometry.tolerance,
            "passed": isometry.passed,
        }
    }
    matrix = reconstruct_orthogonal(
        transform,
        step=args.step,
        tol=args.tol_unitary,
        num_pairs=args.samples,
        seed=args.seed,
    )
    n = transform.dimension
    payload["verdict"] = "orthogonal"
    payload["operator_real"] = _real_matrix_payload(matrix)
    payload["orthogonality_residual"] = float(
        np.abs(matrix.T @ matrix - np.eye(n)).max()
    )
    return 0, payload


_HANDLERS = {
    "classify": _cmd_classify,
    "check": _cmd_check,
    "diff": _cmd_diff,
    "fuzz": _cmd_fuzz,
    "mazur-ulam": _cmd_mazur_ulam,
}


# ---------------------------------------------------------------------------
# report assembly and serialization

def _config_echo(args) -> dict:
    echo = {
        "command": args.command,
        "step": args.step,
        "tol_preserve": args.tol_preserve,
        "tol_unitary": args.tol_unitary,
        "tol_branch": args.tol_branch,
        "samples": args.samples,
        "seed": args.seed,
        "format": args.format,
        "jobs": args.jobs,
    }
    for attr in ("spec", "constants", "manifest", "point"):
        value = getattr(args, attr, None)
        if value is not None:
            echo[attr] = value
    if hasattr(args, "levels"):
        echo["levels"] = args.levels
    return echo


def _assemble(payload: dict, args, started: float) -> dict:
    report = dict(payload)
    report["schema_version"] = SCHEMA_VERSION
    report["config_echo"] = _config_echo(args)
    if not args.no_timestamp:
        report["timing_ms"] = round((time.perf_counter() - started) * 1000.0, 3)
        report["generated_at"] = datetime.now(timezone.utc).isoformat(
            timespec="seconds"
        )
    return report


def _to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


_CSV_SCALAR_FIELDS = (
    "verdict",
    "error",
    "branch",
    "unitarity_residual",
    "reconstruction_residual",
    "orthogonality_residual",
    "d_zbar_max",
)


def _to_csv(report: dict) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    command = report["config_echo"]["command"]
    if command == "fuzz":
        writer.writerow(
            ["index", "kind", "n", "seed", "dressing_degree", "status", "branch", "residual", "error"]
        )
        for inst in report.get("instances", []):
            writer.writerow(
                [
                    inst.get("index"),
                    inst.get("kind"),
                    inst.get("n"),
                    inst.get("seed"),
                    inst.get("dressing_degree", ""),
                    inst.get("status"),
                    inst.get("branch", ""),
                    inst.get("residual", ""),
                    inst.get("error", ""),
                ]
            )
        return buffer.getvalue()
    if command == "check" and "preservation" in report:
        writer.writerow(["label", "norm_w", "norm_z", "expected", "deviation"])
        for pair in report["preservation"].get("pairs", []):
            writer.writerow(
                [pair["label"], pair["norm_w"], pair["norm_z"], pair["expected"], pair["deviation"]]
            )
        return buffer.getvalue()
    if command == "diff":
        writer.writerow(["row", "col", "d_z_re", "d_z_im", "d_zbar_re", "d_zbar_im"])
        d_z = report.get("d_z", [])
        d_zbar = report.get("d_zbar", [])
        for r, (row_z, row_b) in enumerate(zip(d_z, d_zbar)):
            for c, (vz, vb) in enumerate(zip(row_z, row_b)):
                writer.writerow([r, c, vz[0], vz[1], vb[0], vb[1]])
        return buffer.getvalue()
    fields = [f for f in _CSV_SCALAR_FIELDS if f in report]
    extras = []
    if "preservation" in report:
        extras = ["pairs_tested", "max_deviation"]
    writer.writerow(fields + extras)
    row = [report[f] for f in fields]
    if extras:
        row += [report["preservation"][e] for e in extras]
    writer.writerow(row)
    return buffer.getvalue()


def _format_complex(pair) -> str:
    return f"{pair[0]:.6g}{pair[1]:+.6g}i"


def _human_matrix(rows, complex_entries: bool = True) -> list[str]:
    lines = []
    for row in rows:
        if complex_entries:
            cells = [f"{_format_complex(v):>22}" for v in row]
        else:
            cells = [f"{v:>12.6g}" for v in row]
        lines.append("  " + " ".join(cells))
    return lines


def _flag(value: float, tol: float) -> str:
    return "[ok]" if value < tol else f"[EXCEEDS {tol:g}]"


def _to_human(report: dict) -> str:
    echo = report["config_echo"]
    lines = [f"command: {echo['command']}"]
    if "error" in report:
        lines.append(f"error: {report['error']}")
        if "detail" in report:
            lines.append(f"detail: {report['detail']}")
    else:
        lines.append(f"verdict: {report['verdict']}")
    if "branch" in report:
        lines.append(f"branch: {report['branch']}")
    if "operator" in report:
        lines.append("operator:")
        lines += _human_matrix(report["operator"])
    if "operator_real" in report:
        lines.append("operator:")
        lines += _human_matrix(report["operator_real"], complex_entries=False)
    if "unitarity_residual" in report:
        lines.append(
            f"unitarity residual: {report['unitarity_residual']:.3g} "
            + _flag(report["unitarity_residual"], echo["tol_unitary"])
        )
    if "reconstruction_residual" in report:
        lines.append(
            f"reconstruction residual: {report['reconstruction_residual']:.3g} "
            + _flag(report["reconstruction_residual"], echo["tol_unitary"])
        )
    if "orthogonality_residual" in report:
        lines.append(
            f"orthogonality residual: {report['orthogonality_residual']:.3g} "
            + _flag(report["orthogonality_residual"], echo["tol_unitary"])
        )
    if "preservation" in report:
        block = report["preservation"]
        lines.append(
            f"preservation: {block['pairs_tested']} pairs, max deviation "
            f"{block['max_deviation']:.3g} "
            + ("[ok]" if block["passed"] else f"[EXCEEDS {block['tolerance']:g}]")
        )
    if "d_zbar_max" in report:
        lines.append(f"max |d_zbar| entry: {report['d_zbar_max']:.3g}")
    if "d_z" in report:
        lines.append("d_z:")
        lines += _human_matrix(report["d_z"])
        lines.append("d_zbar:")
        lines += _human_matrix(report["d_zbar"])
    if "counts" in report:
        counts = report["counts"]
        lines.append(
            f"fuzz: {counts['recovered']}/{counts['symmetries']} symmetries "
            f"recovered, {counts['rejected']}/{counts['adversaries']} adversaries "
            f"rejected, {counts['caveat_n1']} n=1 caveats"
        )
    if "caveats" in report and report["caveats"]:
        lines.append("caveats: " + ", ".join(report["caveats"]))
    if "timing_ms" in report:
        lines.append(f"timing: {report['timing_ms']} ms")
    return "\n".join(lines) + "\n"


def _emit(report: dict, args) -> None:
    if args.format == "json":
        text = _to_json(report)
    elif args.format == "csv":
        text = _to_csv(report)
    else:
        text = _to_human(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument parsing and entry point

class _ArgumentParser(argparse.ArgumentParser):
    # usage mistakes are input problems: exit 1, matching the error table
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--step", type=float, default=1e-5, help="finite-difference step")
    common.add_argument("--tol-preserve", type=float, default=1e-8, dest="tol_preserve")
    common.add_argument("--tol-unitary", type=float, default=1e-6, dest="tol_unitary")
    common.add_argument("--tol-branch", type=float, default=1e-4, dest="tol_branch")
    common.add_argument("--samples", type=int, default=50)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv", "human"), default="json")
    common.add_argument("--output", default=None, help="write the report here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="fuzz concurrency")
    common.add_argument("--no-timestamp", action="store_true", dest="no_timestamp")

    spec_opts = _ArgumentParser(add_help=False)
    spec_opts.add_argument("--spec", required=True, help="transform definition file")
    spec_opts.add_argument("--constants", default=None, help="JSON matrix constants file")

    parser = _ArgumentParser(
        prog="wigner",
        description="Classify probability-preserving transformations on C^n "
        "as unitary or antiunitary and reconstruct the operator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common, spec_opts],
                   help="full verdict: branch + reconstructed operator")
    sub.add_parser("check", parents=[common, spec_opts],
                   help="modulus-preservation check only")
    diff = sub.add_parser("diff", parents=[common, spec_opts],
                          help="dump the Wirtinger Jacobian pair at a point")
    diff.add_argument("--point", default=None,
                      help="comma-separated components, e.g. '1+2i, 0.5, -i' (default: origin)")
    diff.add_argument("--levels", type=int, default=0,
                      help="Richardson refinement levels (0 = plain differences)")
    fuzz = sub.add_parser("fuzz", parents=[common],
                          help="run a generated corpus through classification")
    fuzz.add_argument("--manifest", default=None,
                      help="corpus manifest JSON (default: built-in 50-instance corpus)")
    sub.add_parser("mazur-ulam", parents=[common, spec_opts],
                   help="real Euclidean analysis: isometry check + orthogonal matrix")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        _validate_numeric_flags(args)
        code, payload = _HANDLERS[args.command](args)
    except WignerError as exc:
        code, payload = _error_payload(exc)
    except OSError as exc:
        code, payload = 1, {"error": "io_error", "detail": str(exc)}
    except json.JSONDecodeError as exc:
        code, payload = 1, {"error": "schema_error", "detail": str(exc)}
    _emit(_assemble(payload, args, started), args)
    return code


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
