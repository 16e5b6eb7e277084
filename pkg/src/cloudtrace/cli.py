"""Command-line interface.

    cloudtrace scan <root> [--os HINT] [--out DIR] [--format json,csv,html]
                    [--jurisdiction in|out] [--warrant] [--reveal-secrets]
    cloudtrace fixtures (<spec.json> | --preset NAME) --out DIR
    cloudtrace catalog [--service S] [--os O]

Exit codes for scan: 0 clean, 1 fatal (unrecognized layout, missing
inputs), 2 finished with skipped-file diagnostics.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .catalog import catalog_as_dicts
from .errors import (
    CloudTraceError,
    FixtureGapError,
    MissingJurisdictionError,
    UnrecognizedLayoutError,
)
from .fixtures import PRESETS, generate_corpus, load_spec
from .pipeline import run_scan
from .report import write_reports

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_DIAGNOSTICS = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cloudtrace",
        description="Scan extracted device trees for cloud storage artifacts",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scan_p = sub.add_parser("scan", help="scan a device tree or case root")
    scan_p.add_argument("root", help="extracted device tree (or directory of trees)")
    scan_p.add_argument("--os", dest="os_hint", default=None,
                        help="override layout detection (e.g. windows-vista7)")
    scan_p.add_argument("--out", default="cloudtrace-report",
                        help="report output directory")
    scan_p.add_argument("--format", default="json",
                        help="comma-separated subset of json,csv,html")
    scan_p.add_argument("--jurisdiction", choices=["in", "out"], default=None,
                        help="is the storage provider inside the investigator's jurisdiction")
    scan_p.add_argument("--warrant", action="store_true",
                        help="assume a search and seizure warrant is issued")
    scan_p.add_argument("--reveal-secrets", action="store_true",
                        help="show secret values in the HTML report")

    fix_p = sub.add_parser("fixtures", help="generate a synthetic evidence corpus")
    fix_p.add_argument("spec", nargs="?", default=None,
                       help="fixture spec JSON file")
    fix_p.add_argument("--preset", choices=sorted(PRESETS), default=None)
    fix_p.add_argument("--out", required=True, help="corpus output directory")

    cat_p = sub.add_parser("catalog", help="dump the artifact path catalog as JSON")
    cat_p.add_argument("--service", default=None)
    cat_p.add_argument("--os", dest="os_family", default=None)
    return parser


def cmd_scan(args) -> int:
    root = Path(args.root)
    if not root.is_dir():
        print(f"error: not a readable directory: {root}", file=sys.stderr)
        return EXIT_FATAL
    formats = [f.strip() for f in args.format.split(",") if f.strip()]
    unknown = [f for f in formats if f not in ("json", "csv", "html")]
    if unknown or not formats:
        print(f"error: unsupported report format: {', '.join(unknown) or '(none)'}",
              file=sys.stderr)
        return EXIT_FATAL
    jurisdiction = None
    if args.jurisdiction is not None:
        jurisdiction = args.jurisdiction == "in"
    try:
        outcome = run_scan(root, os_hint=args.os_hint,
                           in_jurisdiction=jurisdiction,
                           warrant_assumed=args.warrant)
    except MissingJurisdictionError as exc:
        print(f"error: {exc} (pass --jurisdiction in|out)", file=sys.stderr)
        return EXIT_FATAL
    except UnrecognizedLayoutError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    written = write_reports(outcome, Path(args.out), formats,
                            reveal_secrets=args.reveal_secrets)
    for path in written:
        print(path)
    print(f"devices: {len(outcome.devices)}  records: {len(outcome.records)}  "
          f"findings: {len(outcome.findings)}  events: {len(outcome.events)}  "
          f"branch: {outcome.report.branch}")
    if outcome.skipped:
        for line in outcome.skipped:
            print(f"skipped: {line}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    return EXIT_OK


def cmd_fixtures(args) -> int:
    if (args.spec is None) == (args.preset is None):
        print("error: give a spec file or --preset, not both", file=sys.stderr)
        return EXIT_FATAL
    try:
        spec = PRESETS[args.preset]() if args.preset else load_spec(args.spec)
        manifest = generate_corpus(spec, args.out)
    except FixtureGapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: invalid fixture spec: {exc}", file=sys.stderr)
        return EXIT_FATAL
    planted = sum(len(tree["planted"]) for tree in manifest["trees"])
    print(f"{Path(args.out) / 'manifest.json'}")
    print(f"trees: {len(manifest['trees'])}  planted artifacts: {planted}")
    return EXIT_OK


def cmd_catalog(args) -> int:
    rows = catalog_as_dicts(service=args.service, os_family=args.os_family)
    print(json.dumps(rows, indent=2, ensure_ascii=False))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "scan":
            return cmd_scan(args)
        if args.command == "fixtures":
            return cmd_fixtures(args)
        return cmd_catalog(args)
    except CloudTraceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
