#!/usr/bin/env python3
"""
fpure-cli - A command-line toolkit for F-purity and F-pure threshold invariants.

Each subcommand turns a polynomial ring over F_p and an ideal into a
self-describing report: Fedder's criterion, Theta_e, certified fpt/dfpt/mfpt
intervals, strata over monomial primes, differential-power membership and
F-signature estimates. Reports are JSON (--json) or aligned text, and can be
replayed from a SQLite cache.
"""
import argparse
import json
import logging
import re
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field

from . import config
from .cache import cache_key, load_report, open_cache, reset_cache, store_report
from .diffops import diff_power_member, theta_at_prime, theta_global
from .errors import FPureError, InternalError, JobSpecError
from .experiments import stratify_monomial
from .export_data import export_csv, render_table, reports_frame, strata_frame, to_json, verdicts_frame
from .frobenius import NOT_FPURE, is_fpure_at_origin
from .groebner import IdealHandle
from .invariants import FORMULAS, fpt_bounds, fsignature_estimate, global_dfpt_bounds, nested, theta_local
from .parser import parse_generators, parse_poly
from .poly import RingContext
from .suites import SUITES, builtin_corpus, run_suite

# Set up logging
logger = logging.getLogger("fpure_cli")
logger.setLevel(logging.INFO)

# Create console handler
console_handler = logging.StreamHandler()
console_handler.setLevel(logging.INFO)

# Create formatter and add it to the handler
formatter = logging.Formatter(config.LOG_FORMAT)
console_handler.setFormatter(formatter)

# Add the handler to the logger
logger.addHandler(console_handler)

EXIT_CODES = {"ok": 0, "not_fpure": 1, "failed": 4}
RING_COMMANDS = ("fedder", "theta", "fpt", "dfpt-strata", "diffpow", "signature")
INPUT_KEYS = ("p", "vars", "gens", "order", "e", "emax", "prime", "poly", "n")


def setup_logging(log_file=None, verbose=False):
    """Set up logging configuration."""
    level = logging.DEBUG if verbose else getattr(logging, config.LOG_LEVEL)
    logger.setLevel(level)
    console_handler.setLevel(level)
    # Add file handler if specified
    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)


# -- job description ---------------------------------------------------------


def _split_list(value):
    """Items of a `;`- or `,`-separated list, with surrounding quotes removed."""
    items = []
    for part in re.split(r"[;,]", value):
        part = part.strip().strip('"').strip()
        if part:
            items.append(part)
    return items


def read_input_file(path):
    """Parse a `key = value` job file, e.g. `gens = "x*y"; "z^2"`. Lines starting with # are ignored."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as e:
        raise JobSpecError(f"cannot read input file {path}: {e}")
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower()
        if not sep or key not in INPUT_KEYS:
            raise JobSpecError(f"{path}:{lineno}: expected 'key = value' with key one of {', '.join(INPUT_KEYS)}")
        values[key] = value.strip()
    return values


@dataclass
class JobSpec:
    """Everything a command needs; two equal JobSpecs produce byte-identical reports."""

    command: str
    p: int = None
    variables: tuple = ()
    generators: tuple = ()
    order: str = config.DEFAULT_ORDER
    e: int = 1
    e_max: int = None
    prime: tuple = ()
    poly: str = None
    n: int = None
    options: dict = field(default_factory=dict)

    def levels(self):
        if self.e_max is not None:
            return list(range(1, self.e_max + 1))
        return [self.e]

    def ring(self):
        return RingContext.create(self.p, list(self.variables), self.order)

    def ideal(self, ring=None):
        ring = self.ring() if ring is None else ring
        return IdealHandle(ring, parse_generators(self.generators, ring))

    def key_dict(self):
        """Canonical form used as the cache key."""
        job = {"command": self.command, "levels": self.levels(), "options": dict(self.options)}
        if self.command in RING_COMMANDS:
            ring = self.ring()
            job.update({
                "p": self.p,
                "variables": list(ring.variables),
                "order": ring.order,
                "generators": [str(g) for g in parse_generators(self.generators, ring)],
                "prime": [str(g) for g in parse_generators(self.prime, ring)],
                "poly": str(parse_poly(self.poly, ring)) if self.poly is not None else None,
                "n": self.n,
            })
        return job


def _to_int(name, value):
    if value is None or isinstance(value, int):
        return value
    try:
        return int(value)
    except ValueError:
        raise JobSpecError(f"{name} must be an integer, got {value!r}")


def build_job(args):
    """Merge the input file (if any) with the command-line flags; flags win."""
    values = read_input_file(args.input) if getattr(args, "input", None) else {}

    def pick(flag, key):
        given = getattr(args, flag, None)
        return given if given is not None else values.get(key)

    command = args.command
    job = JobSpec(command=command)
    job.options = {k: getattr(args, k) for k in ("generic", "global_", "suite", "corpus") if getattr(args, k, None)}
    if "global_" in job.options:
        job.options["global"] = job.options.pop("global_")
    e = _to_int("e", pick("e", "e"))
    job.e = 1 if e is None else e
    job.e_max = _to_int("emax", pick("emax", "emax"))
    if job.e < 1 or (job.e_max is not None and job.e_max < 1):
        raise JobSpecError("levels must satisfy e >= 1")
    if command == "check":
        return job

    job.p = _to_int("p", pick("p", "p"))
    variables = pick("vars", "vars")
    if job.p is None:
        raise JobSpecError(f"{command} needs a characteristic (-p)")
    if not variables:
        raise JobSpecError(f"{command} needs variables (-v)")
    job.variables = tuple(_split_list(variables) if isinstance(variables, str) else variables)
    if args.ideal:
        job.generators = tuple(args.ideal)
    elif "gens" in values:
        job.generators = tuple(_split_list(values["gens"]))
    job.order = pick("order", "order") or config.DEFAULT_ORDER
    prime = pick("prime", "prime")
    job.prime = tuple(_split_list(prime)) if prime else ()
    job.poly = pick("poly", "poly")
    job.n = _to_int("n", pick("n", "n"))
    if command == "diffpow" and (job.poly is None or job.n is None):
        raise JobSpecError("diffpow needs --poly and -n")
    if command == "diffpow" and job.n < 1:
        raise JobSpecError("diffpow needs n >= 1")
    return job


# -- per-level computations ----------------------------------------------------


def compute_level(job, e):
    """The report object for one level of a theta, fedder, fpt or dfpt-strata job."""
    ring = job.ring()
    I = job.ideal(ring)
    generic = job.options.get("generic", False)
    if job.command == "fedder":
        return is_fpure_at_origin(I, e, generic=generic)
    if job.command == "theta":
        if job.options.get("global"):
            return theta_global(I, e)
        if job.prime:
            return theta_at_prime(I, IdealHandle(ring, parse_generators(job.prime, ring)), e)
        return theta_local(I, e, generic=generic)
    if job.command == "fpt":
        return fpt_bounds(I, e, theta=theta_local(I, e, generic=generic))
    if job.command == "dfpt-strata":
        if job.options.get("global"):
            return global_dfpt_bounds(I, e)
        return stratify_monomial(I, e)
    raise JobSpecError(f"{job.command} has no per-level computation")


def _run_level(job, e, budget):
    config.PAIR_BUDGET = budget
    return compute_level(job, e)


def map_levels(job, jobs=1):
    """compute_level over every requested level, in order; jobs > 1 fans out to worker processes."""
    levels = job.levels()
    if jobs <= 1 or len(levels) == 1:
        return [compute_level(job, e) for e in levels]
    results = [None] * len(levels)
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        fut = {ex.submit(_run_level, job, e, config.PAIR_BUDGET): i for i, e in enumerate(levels)}
        for ft in as_completed(fut):
            results[fut[ft]] = ft.result()
    return results


# -- commands ------------------------------------------------------------------


def _header(job):
    return {
        "command": job.command,
        "ring": {"p": job.p, "variables": list(job.variables), "order": job.order},
        "ideal": [str(g) for g in job.ideal().generators],
    }


def _theta_text(value):
    return str(value) if value is NOT_FPURE else value


def fedder_command(job, args):
    payload = _header(job)
    results = map_levels(job, args.jobs)
    payload["results"] = [r.to_dict() for r in results]
    payload["status"] = "ok"
    return payload


def theta_command(job, args):
    payload = _header(job)
    if job.options.get("global"):
        kind, formula = "global", "Theta_e = max{n : images of I^[q]:I under operators of order <= n-1 generate a proper ideal}"
    elif job.prime:
        kind, formula = "prime", "Theta_e(I S_P) = max{n : I^[q]:I in P^<n,q>}"
    else:
        kind, formula = "origin", FORMULAS["theta"]
    values = map_levels(job, args.jobs)
    payload["kind"] = kind
    if job.prime:
        payload["prime"] = list(job.prime)
    payload["results"] = [
        {"e": e, "q": job.p ** e, "theta": _theta_text(v), "formula": formula}
        for e, v in zip(job.levels(), values)
    ]
    payload["status"] = "not_fpure" if NOT_FPURE in values else "ok"
    return payload


def fpt_command(job, args):
    payload = _header(job)
    reports = map_levels(job, args.jobs)
    payload["reports"] = [r.to_dict() for r in reports]
    payload["nested"] = nested(reports)
    payload["status"] = "ok" if all(r.fpure for r in reports) else "not_fpure"
    return payload


def dfpt_strata_command(job, args):
    payload = _header(job)
    results = map_levels(job, args.jobs)
    if job.options.get("global"):
        payload["global"] = [r.to_dict() for r in results]
        payload["status"] = "ok" if all(r.fpure for r in results) else "not_fpure"
    else:
        payload["levels"] = [{"e": e, "strata": [s.to_dict() for s in records]}
                             for e, records in zip(job.levels(), results)]
        payload["status"] = "ok"
    return payload


def diffpow_command(job, args):
    payload = _header(job)
    ring = job.ring()
    f = parse_poly(job.poly, ring)
    prime = IdealHandle(ring, parse_generators(job.prime, ring)) if job.prime else IdealHandle.maximal(ring)
    payload["results"] = [
        {
            "e": e,
            "q": job.p ** e,
            "poly": str(f),
            "n": job.n,
            "prime": [str(g) for g in prime.generators],
            "member": diff_power_member(f, prime, job.n, e),
            "formula": "f in P^<n,q> iff d^(a) f in P for all |a| <= n-1 with a_i < q",
        }
        for e in job.levels()
    ]
    payload["status"] = "ok"
    return payload


def signature_command(job, args):
    payload = _header(job)
    entries = fsignature_estimate(job.ideal(), job.e_max or job.e)
    payload["results"] = [entry.to_dict() for entry in entries]
    payload["status"] = "ok"
    return payload


def check_command(job, args):
    corpus = job.options.get("corpus", "builtin")
    if corpus != "builtin":
        raise JobSpecError(f"unknown corpus {corpus!r}; only 'builtin' is available")
    results = run_suite(job.options.get("suite", "all"), builtin_corpus(), job.e_max or 2)
    failures = sum(r.failures for r in results)
    return {
        "command": "check",
        "corpus": corpus,
        "suites": [r.to_dict() for r in results],
        "checked": sum(r.checked for r in results),
        "failures": failures,
        "status": "failed" if failures else "ok",
    }


COMMANDS = {
    "fedder": fedder_command,
    "theta": theta_command,
    "fpt": fpt_command,
    "dfpt-strata": dfpt_strata_command,
    "diffpow": diffpow_command,
    "signature": signature_command,
    "check": check_command,
}


# -- rendering -----------------------------------------------------------------


def _frame(payload):
    """The main table of a payload, used for text output and --csv-dir."""
    command = payload["command"]
    if command == "fpt":
        return reports_frame(payload["reports"])
    if command == "dfpt-strata":
        if "global" in payload:
            return verdicts_frame(payload["global"])
        return strata_frame([s for level in payload["levels"] for s in level["strata"]])
    if command == "check":
        return verdicts_frame(
            {"suite": s["suite"], "checked": s["checked"], "failures": s["failures"]} for s in payload["suites"]
        )
    if command == "fedder":
        return verdicts_frame(
            {"e": r["e"], "q": r["q"], "fpure": r["fpure"],
             "witness_monomial": r["witness_monomial"]["text"] if r["witness_monomial"] else None}
            for r in payload["results"]
        )
    return verdicts_frame({k: v for k, v in r.items() if k != "formula"} for r in payload["results"])


def render_text(payload):
    lines = []
    if "ring" in payload:
        ring = payload["ring"]
        lines.append(f"ring: F_{ring['p']}[{','.join(ring['variables'])}] ({ring['order']})")
        lines.append("ideal: (" + ", ".join(payload["ideal"]) + ")" if payload["ideal"] else "ideal: (0)")
    command = payload["command"]
    if command == "fedder":
        for r in payload["results"]:
            lines.append(f"e={r['e']} q={r['q']}: F-pure: {'true' if r['fpure'] else 'false'}")
            if r["witness_monomial"]:
                reduced = f" (mod m^[{r['q']}])" if r.get("witness_reduced") else ""
                lines.append(f"  witness monomial: {r['witness_monomial']['text']} in {r['witness']}{reduced}")
            lines.extend(f"  warning: {w}" for w in r["warnings"])
        return "\n".join(lines)
    lines.append(render_table(_frame(payload)))
    if command == "fpt":
        lines.append(f"nested: {'true' if payload['nested'] else 'false'}")
        reports = [r for r in payload["reports"] if r["fpure"]]
        for name, formula in (reports[0]["formulas"] if reports else {}).items():
            lines.append(f"  {name}: {formula}")
    elif command == "check":
        for suite in payload["suites"]:
            bad = [r for r in suite["records"] if not r["ok"]]
            if bad:
                lines.append(f"failures in {suite['suite']}:")
                lines.append(render_table(verdicts_frame(bad)))
        lines.append(f"{payload['checked']} checks, {payload['failures']} failures")
    elif payload.get("results") and "formula" in payload["results"][0]:
        lines.append(f"formula: {payload['results'][0]['formula']}")
    return "\n".join(lines)


def _csv_stem(payload):
    if "ring" in payload:
        return f"{payload['command']}_p{payload['ring']['p']}"
    return payload["command"]


# -- entry point ---------------------------------------------------------------


def run(args):
    """Execute one parsed command line; returns the exit code."""
    if args.budget is not None:
        if args.budget < 1:
            raise JobSpecError("--budget must be positive")
        config.PAIR_BUDGET = args.budget
    cache_dir = config.get_cache_dir(args.cache_dir)
    if args.command == "reset-cache":
        if cache_dir is None:
            raise JobSpecError(f"reset-cache needs --cache-dir or {config.CACHE_ENV_VAR}")
        return 0 if reset_cache(cache_dir) else 4

    job = build_job(args)
    text = None
    key = None
    engine, session = open_cache(cache_dir) if cache_dir is not None else (None, None)
    try:
        if session is not None:
            key = cache_key(job.key_dict())
            text = load_report(session, key)
        if text is None:
            logger.info(f"Running {job.command} at levels {job.levels()}")
            text = to_json(COMMANDS[job.command](job, args))
            if session is not None:
                store_report(session, key, job.command, text)
        else:
            logger.info(f"Replaying cached {job.command} report")
    finally:
        if session is not None:
            session.close()
        if engine is not None:
            engine.dispose()

    payload = json.loads(text)
    print(text if args.json else render_text(payload))
    if args.csv_dir:
        export_csv(_frame(payload), args.csv_dir, _csv_stem(payload))
    return EXIT_CODES[payload["status"]]


def _report_error(args, error, exit_code):
    logger.error(f"{type(error).__name__}: {error}")
    if getattr(args, "json", False):
        print(json.dumps({"error": type(error).__name__, "message": str(error), "exit_code": exit_code},
                         sort_keys=True), file=sys.stderr)
    return exit_code


def build_parser():
    parser = argparse.ArgumentParser(
        description="fpure-cli - F-purity, Theta_e and certified F-pure threshold intervals",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        epilog="You must specify a command. Use -h with a command for more help."
    )

    # Options shared by every command
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Print the report as JSON")
    common.add_argument("--log-file",
                        help="Path to a file where logs will be written (in addition to console output)")
    common.add_argument("--verbose", action="store_true", help="Log per-pair and per-operator detail")
    common.add_argument("--cache-dir", help=f"Report cache directory (default: ${config.CACHE_ENV_VAR}, else no cache)")
    common.add_argument("--budget", type=int, help="Maximum S-pairs per Groebner basis computation")
    common.add_argument("--jobs", type=int, default=1, help="Worker processes for independent levels")
    common.add_argument("--csv-dir", help="Also write the main table as CSV into this directory")
    common.add_argument("-e", type=int, help="Frobenius level e (q = p^e)")
    common.add_argument("--emax", type=int, help="Run every level 1..emax")

    # Ring and ideal
    ring = argparse.ArgumentParser(add_help=False)
    ring.add_argument("--input", help="Job file with 'key = value' lines (p, vars, gens, order, e, emax, prime, poly, n)")
    ring.add_argument("-p", type=int, help="Characteristic, a prime")
    ring.add_argument("-v", "--vars", help="Comma-separated variable names, e.g. x,y,z")
    ring.add_argument("-i", "--ideal", action="append", help="An ideal generator (repeatable)")
    ring.add_argument("--order", choices=config.ORDERS, help="Monomial order")
    ring.add_argument("--generic", action="store_true",
                      help="Use the general colon algorithm even for principal ideals")

    subparsers = parser.add_subparsers(dest="command", help="Command to execute", required=True)

    subparsers.add_parser("fedder", parents=[common, ring], help="Fedder's criterion at the origin")

    theta_parser = subparsers.add_parser("theta", parents=[common, ring], help="Theta_e at the origin, a prime or globally")
    theta_parser.add_argument("--global", dest="global_", action="store_true", help="Global Theta_e over all maximal ideals")
    theta_parser.add_argument("--prime", help="Generators of a prime ideal P, comma-separated")

    subparsers.add_parser("fpt", parents=[common, ring], help="Certified fpt, dfpt and mfpt intervals")

    strata_parser = subparsers.add_parser("dfpt-strata", parents=[common, ring],
                                          help="dfpt and mfpt at every monomial prime of a monomial ideal")
    strata_parser.add_argument("--global", dest="global_", action="store_true",
                               help="Bounds on the global dfpt from the global Theta_e instead")

    diffpow_parser = subparsers.add_parser("diffpow", parents=[common, ring], help="Differential-power membership")
    diffpow_parser.add_argument("--poly", help="The polynomial f to test")
    diffpow_parser.add_argument("-n", type=int, help="The power n in P^<n, q>")
    diffpow_parser.add_argument("--prime", help="Generators of P, comma-separated (default: the maximal ideal)")

    subparsers.add_parser("signature", parents=[common, ring], help="F-signature estimates for e = 1..emax")

    check_parser = subparsers.add_parser("check", parents=[common], help="Run the property suites")
    check_parser.add_argument("--suite", default="all", choices=["all", *SUITES], help="Suite to run")
    check_parser.add_argument("--corpus", default="builtin", help="Instance corpus")

    subparsers.add_parser(
        "reset-cache",
        parents=[common],
        help="Reset the report cache",
        description="Deletes the cached reports and recreates an empty cache."
    )
    return parser


def main(argv=None):
    """Main entry point for the CLI."""
    parser = build_parser()
    args = parser.parse_args(argv)

    # Set up logging
    setup_logging(args.log_file, args.verbose)

    try:
        return run(args)
    except FPureError as e:
        return _report_error(args, e, e.exit_code)
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        return _report_error(args, InternalError(str(e)), InternalError.exit_code)


if __name__ == "__main__":
    sys.exit(main())
