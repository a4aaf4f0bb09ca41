# main.py
import argparse
import json
import logging
import os
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

# Add the src directory to the path so imports work correctly
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from bitstream import Bitstream, fabric_slots, program
from equivalence import verify_design
from errors import ParamsError, RedactorError, RedactorInternalError
from expansion import expand_design
from file_service import FileService
from fabric import ElementKind, segment_length
from metrics import (MetricsReport, TdiWeights, clut_function_distribution, complexity_estimates,
                     count_all_input_functions, count_functions_depending_on_all, gate_overhead,
                     similarity_matrix, tdi_s_reports)
from models import Kind
from netlist import Hypergraph
from params_manager import ParamsManager, RedactionParams
from redactor import RedactionResult, audit_input_coverage, redact_netlist
from variant_manifest import VariantManifest, VariantRecord

logger = logging.getLogger("redactor.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MISMATCH = 2
EXIT_INTERNAL = 3

INFO_TABLE_WIDTHS = range(2, 7)


class CliParser(argparse.ArgumentParser):
    """argparse parser whose usage errors use the tool's error line and exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: usage: ArgumentError: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


# -------------------------------------------------------------------
# Shared helpers
# -------------------------------------------------------------------

def build_params(preset: Optional[str], params_file: Optional[str], assignments: Sequence[str]) -> RedactionParams:
    """defaults -> preset -> parameter file -> --set overrides."""
    manager = ParamsManager()
    if preset:
        manager.apply_preset(preset)
    if params_file:
        manager.load_file(params_file)
    for assignment in assignments or ():
        manager.set_from_assignment(assignment)
    return manager.build()


def redaction_stats(original: Hypergraph, result: RedactionResult) -> Dict[str, object]:
    """Counters, complexity and overhead of one redaction, as written to reports and manifests."""
    stats = dict(result.design.stats())
    stats["bitstream_bits"] = result.bitstream.total_bits
    stats["complexity"] = complexity_estimates(result.design).to_dict()
    if any(v.kind not in (Kind.PI, Kind.PO) for v in original.vertices.values()):
        stats["gate_overhead"] = round(gate_overhead(original, expand_design(result.netlist)), 6)
    problems = audit_input_coverage(result.design)
    stats["coverage_problems"] = problems
    for problem in problems:
        logger.warning("input coverage: %s", problem)
    return stats


def _split_pair(value: str) -> Tuple[str, str]:
    net, sep, bits = value.rpartition(":")
    if not sep or not net or not bits:
        raise ParamsError(f"--variant expects netlist:bitstream, got {value!r}")
    return net, bits


def load_variants(args, files: FileService) -> List[Tuple[str, Hypergraph, Bitstream, Dict[str, object]]]:
    """(label, netlist, bitstream, recorded stats) for every --variant pair or manifest entry."""
    loaded = []
    if args.manifest:
        manifest = VariantManifest.load(args.manifest)
        for record in manifest.variants:
            loaded.append((record.label,
                           files.read_netlist(manifest.resolve(record.netlist)),
                           files.read_bitstream(manifest.resolve(record.bitstream)),
                           record.stats))
    for value in args.variant or ():
        net, bits = _split_pair(value)
        label = os.path.splitext(os.path.basename(net))[0]
        loaded.append((label, files.read_netlist(net), files.read_bitstream(bits), {}))
    if not loaded:
        raise ParamsError("no variants given; use --variant net:bits or --manifest")
    labels = [entry[0] for entry in loaded]
    if len(set(labels)) != len(labels):
        raise ParamsError(f"duplicate variant labels: {', '.join(labels)}")
    return loaded


def parse_weights(text: str) -> TdiWeights:
    try:
        values = [float(x) for x in text.split(",")]
    except ValueError:
        raise ParamsError(f"--weights expects four numbers, got {text!r}") from None
    if len(values) != 4:
        raise ParamsError(f"--weights expects four numbers, got {len(values)}")
    return TdiWeights(*values)


def emit_report(report: MetricsReport, json_path: Optional[str], csv_path: Optional[str]) -> None:
    if json_path:
        with open(json_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(report.to_json())
    if csv_path:
        with open(csv_path, "w", encoding="utf-8", newline="") as f:
            report.write_csv(f)
    if not json_path and not csv_path:
        sys.stdout.write(report.to_json())


# -------------------------------------------------------------------
# Commands
# -------------------------------------------------------------------

def cmd_redact(args) -> int:
    files = FileService()
    params = build_params(args.preset, args.params, args.set)
    original = files.read_netlist(args.input, args.format)
    result = redact_netlist(original, args.seed, params)
    files.write_netlist(args.output, result.netlist, args.format)
    files.write_bitstream(args.bitstream, result.bitstream, args.packed)
    if args.report:
        report = {"seed": args.seed, "params": params.to_dict(), "stats": redaction_stats(original, result)}
        with open(args.report, "w", encoding="utf-8", newline="\n") as f:
            json.dump(report, f, indent=2, sort_keys=True)
            f.write("\n")
    return EXIT_OK


def cmd_program(args) -> int:
    files = FileService()
    redacted = files.read_netlist(args.input, args.format)
    resolved = program(redacted, files.read_bitstream(args.bitstream))
    files.write_netlist(args.output, resolved, args.format)
    return EXIT_OK


def cmd_verify(args) -> int:
    files = FileService()
    original = files.read_netlist(args.original)
    candidate = files.read_netlist(args.redacted)
    if args.bitstream:
        candidate = program(candidate, files.read_bitstream(args.bitstream))
    elif candidate.has_fabric:
        raise ParamsError(f"{args.redacted} contains fabric cells; pass its bitstream with -b")
    verdict = verify_design(original, candidate, exhaustive=True if args.exhaustive else None,
                            vectors=args.vectors, cycles=args.cycles, seed=args.seed)
    print(verdict.describe())
    return EXIT_OK if verdict.equivalent else EXIT_MISMATCH


def cmd_metrics(args) -> int:
    files = FileService()
    original = files.read_netlist(args.original)
    variants = load_variants(args, files)
    report = MetricsReport()

    for label, _, bitstream, stats in variants:
        dist = clut_function_distribution([bitstream])
        report.function_counts[label] = {str(w): n for w, n in dist.unique_counts().items()}
        report.bitstream_bits[label] = bitstream.total_bits
        if "complexity" in stats:
            report.complexity[label] = stats["complexity"]
    if len(variants) > 1:
        pooled = clut_function_distribution(b for _, _, b, _ in variants)
        report.function_counts["all"] = {str(w): n for w, n in pooled.unique_counts().items()}

    widest = max((int(w) for counts in report.function_counts.values() for w in counts), default=0)
    for n in range(widest + 1):
        report.function_space[str(n)] = {"recurrence": count_all_input_functions(n),
                                         "depending_on_all": count_functions_depending_on_all(n)}

    netlists = {label: g for label, g, _, _ in variants}
    report.tdi = tdi_s_reports(original, netlists, args.samples, parse_weights(args.weights), args.tolerance)
    for label, g in netlists.items():
        report.overhead[label] = gate_overhead(original, expand_design(g))
    emit_report(report, args.json, args.csv)
    return EXIT_OK


def cmd_compare(args) -> int:
    files = FileService()
    variants = load_variants(args, files)
    matrix = similarity_matrix([g for _, g, _, _ in variants], args.vectors, args.seed, args.tolerance)
    report = MetricsReport()
    report.similarity_labels = [label for label, _, _, _ in variants]
    report.similarity = [[float(x) for x in row] for row in matrix]
    emit_report(report, args.json, args.csv)
    return EXIT_OK


def _generate_variant(job: Tuple[str, str, int, Optional[str], Tuple[str, ...], str, str, bool]) -> VariantRecord:
    """One gen-variants job; runs in a worker process when --jobs > 1."""
    source, preset, seed, params_file, assignments, out_dir, fmt, packed = job
    files = FileService()
    params = build_params(preset, params_file, assignments)
    original = files.read_netlist(source, fmt)
    result = redact_netlist(original, seed, params)
    stem = os.path.splitext(os.path.basename(source))[0]
    ext = ".json" if files.netlist_format(source, fmt) == "json" else ".blif"
    netlist_name = f"{stem}-{preset}-s{seed}{ext}"
    bits_name = f"{stem}-{preset}-s{seed}{'.bitsbin' if packed else '.bits'}"
    files.write_netlist(os.path.join(out_dir, netlist_name), result.netlist, fmt)
    files.write_bitstream(os.path.join(out_dir, bits_name), result.bitstream, packed)
    return VariantRecord(preset, seed, netlist_name, bits_name, params.to_dict(),
                         redaction_stats(original, result))


def cmd_gen_variants(args) -> int:
    manager = ParamsManager()
    if args.family:
        presets = manager.family(args.family)
    else:
        presets = args.preset or ["randomized"]
    for name in presets:
        if name not in manager.preset_names():
            raise ParamsError(f"unknown preset {name!r}")

    jobs = [(args.input, preset, seed, args.params, tuple(args.set or ()), args.out_dir, args.format, args.packed)
            for preset in presets for seed in args.seeds]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(_generate_variant, jobs))
    else:
        records = [_generate_variant(job) for job in jobs]

    manifest = VariantManifest(args.out_dir, os.path.abspath(args.input))
    for record in records:
        manifest.add(record)
    manifest.save()
    logger.info("gen-variants presets=%d seeds=%d variants=%d", len(presets), len(args.seeds), len(records))
    return EXIT_OK


def inventory(g: Hypergraph) -> Dict[str, int]:
    """Fabric counts per kind and width, plus the bitstream size the cells require."""
    counts = g.count_kinds()
    rows: Dict[str, int] = {"pis": len(g.pi_ids), "pos": len(g.po_ids),
                            "gates": len(g.gate_ids), "dffs": counts.get(Kind.DFF, 0)}
    slots = fabric_slots(g)
    widths = sorted({s.width for s in slots if s.kind != ElementKind.CPI} | set(INFO_TABLE_WIDTHS))
    for kind in (ElementKind.CLUT, ElementKind.CSB):
        for w in widths:
            rows[f"{kind.value}{w}"] = sum(1 for s in slots if s.kind == kind and s.width == w)
    for w in sorted({s.width for s in slots if s.kind == ElementKind.CPI}):
        rows[f"CPI{w}"] = sum(1 for s in slots if s.kind == ElementKind.CPI and s.width == w)
    rows["elements"] = len(slots)
    rows["bitstream_bits"] = sum(segment_length(s.kind, s.width) for s in slots)
    return rows


def cmd_info(args) -> int:
    files = FileService()
    g = files.read_netlist(args.input, args.format)
    for key, value in inventory(g).items():
        print(f"{key} {value}")
    if args.bitstream:
        b = files.read_bitstream(args.bitstream)
        print(f"bitstream_file_segments {len(b)}")
        print(f"bitstream_file_bits {b.total_bits}")
    return EXIT_OK


# -------------------------------------------------------------------
# Parser
# -------------------------------------------------------------------

def _add_params_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--params", help="parameter file (key = value, or YAML)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one parameter")
    p.add_argument("--format", choices=("blif", "json"), default="", help="netlist format (default: by extension)")
    p.add_argument("--packed", action="store_true", help="write the packed binary bitstream")


def _add_variant_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--variant", action="append", metavar="NET:BITS", help="a redacted netlist and its bitstream")
    p.add_argument("--manifest", help="manifest.yaml (or its directory) written by gen-variants")
    p.add_argument("--json", help="write the JSON report here")
    p.add_argument("--csv", help="write the CSV report here")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> CliParser:
    parser = CliParser(prog="netlist-redactor", description="Gate-level IP redaction with configurable fabric.")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("-q", "--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("redact", help="redact a netlist and write its bitstream")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("-b", "--bitstream", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--preset")
    p.add_argument("--report", help="write counters and estimates as JSON")
    _add_params_flags(p)
    p.set_defaults(handler=cmd_redact)

    p = sub.add_parser("program", help="load a bitstream into a redacted netlist")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-b", "--bitstream", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", choices=("blif", "json"), default="")
    p.set_defaults(handler=cmd_program)

    p = sub.add_parser("verify", help="check a redacted (or resolved) netlist against the original")
    p.add_argument("-a", "--original", required=True)
    p.add_argument("-r", "--redacted", required=True)
    p.add_argument("-b", "--bitstream")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--vectors", type=int)
    mode.add_argument("--cycles", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("metrics", help="function counts, TDI_S samples and overhead of variants")
    p.add_argument("-a", "--original", required=True)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--weights", default="1,1,1,1", help="w1,w2,w3,w4")
    p.add_argument("--tolerance", type=float, default=0.0, help="relative tolerance for TDI_S matches")
    _add_variant_flags(p)
    p.set_defaults(handler=cmd_metrics)

    p = sub.add_parser("compare", help="pairwise similarity matrix of variants")
    p.add_argument("--vectors", type=int, default=256)
    p.add_argument("--tolerance", type=float, default=0.05, help="per-feature structural tolerance")
    _add_variant_flags(p)
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("gen-variants", help="redact one netlist under several presets and seeds")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--seeds", type=int, nargs="+", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--preset", action="append")
    group.add_argument("--family", help="preset family, e.g. S or F")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--jobs", type=int, default=1)
    _add_params_flags(p)
    p.set_defaults(handler=cmd_gen_variants)

    p = sub.add_parser("info", help="fabric inventory of a netlist")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-b", "--bitstream")
    p.add_argument("--format", choices=("blif", "json"), default="")
    p.set_defaults(handler=cmd_info)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        return args.handler(args)
    except RedactorInternalError as e:
        print(f"error: {e.stage}: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except RedactorError as e:
        print(f"error: {e.stage}: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: io: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:
        logger.debug("%s", traceback.format_exc())
        print(f"error: internal: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == '__main__':
    sys.exit(main())
