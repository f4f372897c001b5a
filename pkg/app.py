"""
TreeGroups command line.

Usage: python app.py [-v] [--json] <command> [flags]

Cases are written periodic:r or prep:s,r. Polynomials are given by their
constant c in the normal form x^2 + c, either as a rational "a/b" or as a
residue "a mod p"; a general a x^2 + b x + e can be brought to this form
with --coeffs a,b,e.

Exit codes: 0 success, 1 a check or verification failed, 2 usage error.
"""

import argparse
import json
import logging
import sys
import time
from fractions import Fraction

from tqdm import tqdm

from treegroups import settings, tree_core
from treegroups.catalogs import GroupCase, case_catalog
from treegroups.conjugacy import (
    find_conjugator_in_Wn,
    is_odometer_to_level,
    power_conjugator,
)
from treegroups.dynamics import (
    OrbitClass,
    arith_description,
    b_infinity,
    critical_orbit,
    field_of_parameter,
    normalize_quadratic,
    parse_field,
    parse_parameter,
)
from treegroups.errors import TreeGroupError
from treegroups.level_groups import (
    centralizer_in_Wn,
    closed_form_log2_order,
    count_transitive,
    hausdorff_exact,
    hausdorff_partial,
    index,
    model_group,
    normalizer_in_Wn,
    order_log2,
)
from treegroups.recursion_engine import parse_word, system_from_text_file
from treegroups.verify import SUITES, run_all, run_suite
from export.report_generator import (
    generate_report,
    generate_report_json,
    generate_verification_report,
    table_summary,
    verification_lines,
)
from export.table_saver import save_table

logger = logging.getLogger("treegroups.cli")


class UsageError(Exception):
    """Bad combination of flags."""


def _progress_bar(description: str, total: int):
    """tqdm bar driven through the library's progress_callback(current, total)."""
    bar = tqdm(total=total, desc=description, unit="el", leave=False, file=sys.stderr)

    def update(current, _total):
        bar.update(max(current - bar.n, 0))

    return bar, update


def _case(args) -> GroupCase:
    if not args.case:
        raise UsageError("--case is required")
    return GroupCase.parse(args.case)


def _orbit_for_case(case: GroupCase) -> OrbitClass:
    if case.is_periodic:
        return OrbitClass('periodic', r=case.r)
    return OrbitClass('prep', r=case.r, s=case.s)


def _field_and_parameter(args):
    if args.coeffs:
        if args.poly:
            raise UsageError("--poly and --coeffs are exclusive")
        field = parse_field(args.field, args.q)
        a, b, e = (Fraction(x) for x in args.coeffs.split(','))
        return field, normalize_quadratic(a, b, e, field)
    if not args.poly:
        raise UsageError("--poly (or --coeffs) is required")
    field = parse_field(args.field, args.q) if args.field else field_of_parameter(args.poly, args.q)
    return field, parse_parameter(args.poly, field)


def _level(args) -> int:
    if args.level is None:
        raise UsageError("--level is required")
    return tree_core.check_level(args.level)


def cmd_classify(args):
    field, c = _field_and_parameter(args)
    orbit = critical_orbit(c, field, max_steps=args.max_steps, height_bound=args.height_bound)
    data = {'c': str(c), 'field': str(field), **orbit.to_dict()}
    lines = [f"c = {c} over {field}", f"class: {orbit.kind}"]
    if orbit.is_finite:
        lines.append(f"s = {orbit.s}, r = {orbit.r} (model {orbit.case})")
    if orbit.escape_index is not None:
        lines.append(f"escapes at p_{orbit.escape_index}")
    lines.append(f"steps: {orbit.steps}")
    return data, lines, 0


def cmd_gens(args):
    case, n = _case(args), _level(args)
    catalog = case_catalog(case)
    portraits = catalog.generator_portraits(n)
    data = {'case': str(case), 'level': n,
            'generators': {g: tree_core.encode(p) for g, p in zip(catalog.generators, portraits)}}
    lines = [f"{g} = {code}" for g, code in data['generators'].items()]
    return data, lines, 0


def cmd_eval(args):
    n = _level(args)
    if not args.symbol:
        raise UsageError("--symbol is required")
    if args.system:
        if args.case:
            raise UsageError("--case and --system are exclusive")
        system = system_from_text_file(args.system)
        p = system.evaluate_word(parse_word(args.symbol), n)
    else:
        p = case_catalog(_case(args)).evaluate(args.symbol, n)
    data = {'symbol': args.symbol, 'level': n, 'portrait': tree_core.encode(p),
            'log2_order': tree_core.order_log2(p),
            'signs': [int(b) for b in tree_core.sign_bits(p)]}
    lines = [f"{args.symbol} = {data['portrait']}", f"log2 order: {data['log2_order']}"]
    return data, lines, 0


def _enumerate(case: GroupCase, n: int, cap: int, quiet: bool):
    if quiet:
        return model_group(case, n, cap=cap)
    bar, update = _progress_bar(f"G_{n} {case}", cap)
    try:
        return model_group(case, n, cap=cap, progress_callback=update)
    finally:
        bar.close()


def cmd_order(args):
    case, n = _case(args), _level(args)
    table = _enumerate(case, n, args.cap, args.json)
    log2 = order_log2(table)
    expected = closed_form_log2_order(case, n)
    agrees = log2 == expected
    data = {'case': str(case), 'level': n, 'log2_order': log2, 'truncated': table.truncated,
            'log2_order_formula': expected, 'matches_formula': None if log2 is None else agrees}
    lines = [f"log2 |G_{n}| = {log2 if log2 is not None else 'unknown (truncated)'}",
             f"closed form: {expected}"]
    if log2 is None:
        return data, lines, 0
    lines.append("agrees" if agrees else "MISMATCH")
    return data, lines, 0 if agrees else 1


def cmd_enumerate(args):
    case, n = _case(args), _level(args)
    start = time.time()
    table = _enumerate(case, n, args.cap, args.json)
    elapsed = time.time() - start
    data = table_summary(table, case)
    lines = [f"{key}: {value}" for key, value in data.items()]
    if args.output:
        data['output'] = save_table(table, args.output)
        lines.append(f"table written to {data['output']}")
    if args.report:
        writer = generate_report_json if args.report.endswith('.json') else generate_report
        data['report'] = writer(table, case, elapsed, args.report)
        lines.append(f"report written to {data['report']}")
    return data, lines, 0


def cmd_conjugate(args):
    if not args.p:
        raise UsageError("--p is required")
    p = tree_core.decode(args.p)
    if args.k is not None:
        if args.q_element:
            raise UsageError("--k and --q are exclusive for conjugate")
        witness = power_conjugator(p, int(args.k))
        data = {'conjugate': True, 'witness': tree_core.encode(witness.conjugator),
                'power': int(args.k)}
        return data, [f"p ~ p^{args.k}", f"witness: {data['witness']}"], 0
    if not args.q_element:
        raise UsageError("--q (or --k) is required")
    q = tree_core.decode(args.q_element)
    witness = find_conjugator_in_Wn(p, q)
    data = {'conjugate': witness is not None,
            'witness': tree_core.encode(witness.conjugator) if witness else None}
    lines = [f"conjugate: {'yes' if witness else 'no'}"]
    if witness:
        lines.append(f"witness: {data['witness']}")
    return data, lines, 0


def cmd_odometer(args):
    case, n = _case(args), _level(args)
    b_inf = b_infinity(_orbit_for_case(case), n)
    a0 = case_catalog(case).evaluate('a0', n)
    data = {'case': str(case), 'level': n,
            'b_infinity': tree_core.encode(b_inf),
            'b_infinity_is_odometer': is_odometer_to_level(b_inf),
            'a0_is_odometer': is_odometer_to_level(a0)}
    lines = [f"b_infinity = {data['b_infinity']}",
             f"b_infinity odometer: {data['b_infinity_is_odometer']}",
             f"a0 odometer: {data['a0_is_odometer']}"]
    if n <= settings.BRUTE_FORCE_MAX_LEVEL or args.allow_large:
        table = _enumerate(case, n, args.cap, args.json)
        if not table.truncated:
            count = count_transitive(table)
            data['transitive_elements'] = count
            data['group_order'] = table.size
            lines.append(f"transitive elements: {count} of {table.size}")
    ok = data['b_infinity_is_odometer'] and data['a0_is_odometer']
    return data, lines, 0 if ok else 1


def cmd_hausdorff(args):
    case = _case(args)
    exact = hausdorff_exact(case)
    data = {'case': str(case), 'exact': str(exact)}
    lines = [str(exact)]
    if args.level is not None:
        partial = hausdorff_partial(case, args.level)
        data['level'] = args.level
        data['partial'] = str(partial)
        data['partial_float'] = float(partial)
        lines.append(f"level {args.level}: {partial} ~ {float(partial):.8f}")
    return data, lines, 0


def cmd_normalizer(args):
    case, n = _case(args), _level(args)
    table = _enumerate(case, n, args.cap, args.json)
    normalizer = normalizer_in_Wn(table, allow_large=args.allow_large)
    centralizer = centralizer_in_Wn(table, allow_large=args.allow_large)
    data = {'case': str(case), 'level': n,
            'log2_order_G': order_log2(table),
            'log2_order_N': order_log2(normalizer),
            'index_N_G': index(normalizer, table),
            'centralizer_order': centralizer.size}
    lines = [f"log2 |G_{n}| = {data['log2_order_G']}",
             f"log2 |N_{n}| = {data['log2_order_N']}",
             f"[N_{n} : G_{n}] = {data['index_N_G']}",
             f"|C(G_{n})| = {data['centralizer_order']}"]
    return data, lines, 0


def cmd_arith(args):
    if args.case:
        if args.poly or args.coeffs:
            raise UsageError("--case and --poly are exclusive")
        field = parse_field(args.field, args.q)
        orbit = _orbit_for_case(_case(args))
    else:
        field, c = _field_and_parameter(args)
        orbit = critical_orbit(c, field, max_steps=args.max_steps,
                               height_bound=args.height_bound)
    k = int(args.k) if args.k is not None else None
    report = arith_description(orbit, field, k=k, precision=args.precision)
    data = report.to_dict()
    lines = [f"orbit: {orbit.kind}" + (f" (model {orbit.case})" if orbit.is_finite else ""),
             f"field: {field}",
             f"structure of N/G: {report.structure}",
             f"label: {report.label if report.label is not None else 'unrestricted'}",
             f"[G_arith : G_geom]: {report.index_bound}"]
    if report.note:
        lines.append(report.note)
    return data, lines, 0


def cmd_verify(args):
    level = args.level if args.level is not None else 4
    if args.suite == 'all':
        if args.json:
            results = run_all(level=level, seed=args.seed, cap=args.cap)
        else:
            bar, update = _progress_bar("suites", len(SUITES))
            try:
                results = run_all(level=level, seed=args.seed, cap=args.cap,
                                  progress_callback=update)
            finally:
                bar.close()
    else:
        results = [run_suite(args.suite, level=level, seed=args.seed, cap=args.cap)]
    passed = all(r.passed for r in results)
    data = {'level': level, 'seed': args.seed, 'passed': passed,
            'suites': [r.to_dict() for r in results]}
    lines = verification_lines(results)
    lines.append("PASS" if passed else "FAIL")
    if args.output:
        data['report'] = generate_verification_report(results, level, args.seed, args.output)
    return data, lines, 0 if passed else 1


COMMANDS = {
    'classify': (cmd_classify, "classify the critical orbit of x^2 + c"),
    'gens': (cmd_gens, "generator portraits of a model case"),
    'eval': (cmd_eval, "evaluate a symbol or word at a level"),
    'order': (cmd_order, "enumerated order of G_n against the closed form"),
    'enumerate': (cmd_enumerate, "enumerate G_n and export the table"),
    'conjugate': (cmd_conjugate, "decide conjugacy in W_n with a witness"),
    'odometer': (cmd_odometer, "b_infinity and odometer statistics"),
    'hausdorff': (cmd_hausdorff, "exact and partial Hausdorff dimension"),
    'normalizer': (cmd_normalizer, "brute-force normalizer and centralizer in W_n"),
    'arith': (cmd_arith, "arithmetic monodromy description"),
    'verify': (cmd_verify, "run acceptance suites"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="app.py",
        description="Exact computation in automorphism groups of the binary rooted tree.",
        epilog="Cases: periodic:r or prep:s,r. Polynomials: x^2 + c with c given by --poly.",
    )
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help="-v for INFO, -vv for DEBUG logging on stderr")
    parser.add_argument('--json', action='store_true', help="print a JSON document")

    # options repeated after the command must not reset the top-level values
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', action='count', default=argparse.SUPPRESS)
    common.add_argument('--json', action='store_true', default=argparse.SUPPRESS)
    common.add_argument('--case', help="periodic:r or prep:s,r")
    common.add_argument('--level', type=int, help="tree level n")
    common.add_argument('--cap', type=int, default=settings.DEFAULT_CAP,
                        help="element cap for enumerations")
    common.add_argument('--seed', type=int, default=settings.DEFAULT_SEED)
    common.add_argument('--precision', type=int, default=settings.DEFAULT_PRECISION,
                        help="2-adic precision in bits")
    common.add_argument('--allow-large', action='store_true',
                        help=f"allow brute force above level {settings.BRUTE_FORCE_MAX_LEVEL}")
    common.add_argument('--threads', type=int,
                        help="accepted for compatibility; enumeration is vectorized in one process")

    poly = argparse.ArgumentParser(add_help=False)
    poly.add_argument('--poly', help="c in x^2 + c: 'a', 'a/b' or 'a mod p'")
    poly.add_argument('--coeffs', help="a,b,e of a x^2 + b x + e, normalized to x^2 + c")
    poly.add_argument('--field', help="Q (default) or F<p>")
    poly.add_argument('--q', type=int, help="ambient field size, a power of p")
    poly.add_argument('--max-steps', type=int, default=settings.DEFAULT_MAX_STEPS)
    poly.add_argument('--height-bound', type=int, default=settings.DEFAULT_HEIGHT_BOUND,
                      help="bits allowed for an iterate over Q")

    sub = parser.add_subparsers(dest='command', metavar='<command>')
    for name, (_, help_text) in COMMANDS.items():
        parents = [common, poly] if name in ('classify', 'arith') else [common]
        cmd = sub.add_parser(name, parents=parents, help=help_text)
        if name == 'eval':
            cmd.add_argument('--system', help="text file of recursion equations")
            cmd.add_argument('--symbol', help="symbol, named element or word")
        elif name == 'enumerate':
            cmd.add_argument('--output', help="write the table as n:HEX lines")
            cmd.add_argument('--report', help="write a text (or .json) report")
        elif name == 'conjugate':
            cmd.add_argument('--p', help="first element, n:HEX")
            cmd.add_argument('--q', dest='q_element', help="second element, n:HEX")
            cmd.add_argument('--k', help="odd exponent: find c with c p c^-1 = p^k")
        elif name == 'arith':
            cmd.add_argument('--k', help="cyclotomic value; defaults to q over F_p")
        elif name == 'verify':
            cmd.add_argument('--suite', default='all', choices=sorted(SUITES) + ['all'])
            cmd.add_argument('--output', help="write a verification report")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2

    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    if not args.command:
        parser.print_usage(sys.stderr)
        return 2
    if getattr(args, 'threads', None):
        logger.info("Ignoring --threads %d; enumeration runs in one process", args.threads)

    handler = COMMANDS[args.command][0]
    try:
        data, lines, code = handler(args)
    except (UsageError, TreeGroupError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print('\n'.join(lines))
    logger.debug("Command %s finished with exit code %d", args.command, code)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
