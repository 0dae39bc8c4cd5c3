#!/usr/bin/python

import argparse
import logging
import sys

import jsonschema
import pandas as pd

from ibsl_states.algebra.booleanisation import booleanise
from ibsl_states.algebra.finbool import Measure, measure_check
from ibsl_states.algebra.plonka import (
    check_ibsl,
    check_identity,
    check_partition_function,
    decompose,
    is_injective_ibsl,
    is_ngib,
    sum_decomposition,
)
import ibsl_states.counting.counting as counting
from ibsl_states.errors import (
    BadRange,
    CapacityExceeded,
    DocumentError,
    InternalInconsistency,
    NotIBSL,
    TrivialComponent,
)
import ibsl_states.metadata.document as document
import ibsl_states.metadata.json_operations as json_ops
import ibsl_states.probability.metrics_topology as metrics_topology
import ibsl_states.probability.states as states
import ibsl_states.utils.cli_utils as cli_utils
import ibsl_states.utils.config_utils as config_utils
import ibsl_states.utils.report_utils as report_utils

logger = logging.getLogger(__name__)

EXIT_PASSED = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def parse_args(argv=None):
    """
    Parse command line arguments for CLI

    :param list argv: Arguments, sys.argv[1:] if None
    :return: namespace containing the arguments passed.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '--format',
        choices=['text', 'json'],
        default='text',
        help="Report encoding on stdout",
    )
    common.add_argument(
        '--seed',
        type=cli_utils.nonnegative_int,
        default=0,
        help="Seed for randomized candidate families",
    )
    common.add_argument(
        '--cap',
        type=int,
        default=None,
        help="Cap on carrier sizes, overrides config and PLONKA_CAP",
    )
    common.add_argument(
        '--config',
        type=str,
        default=None,
        help="Full path to JSON file with capacity caps",
    )
    common.add_argument(
        '--output',
        type=str,
        default=None,
        help="Also write the JSON report to this file",
    )
    common.add_argument(
        '--verbose',
        dest='verbose',
        action='store_true',
        help="Log progress to stderr",
    )
    parser = argparse.ArgumentParser(
        description="Exact checks on finite involutive bisemilattices",
    )
    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True

    def add(name, help_text, *files):
        sub = subparsers.add_parser(name, parents=[common], help=help_text)
        for file_arg, file_help in files:
            sub.add_argument(file_arg, type=str, help=file_help)
        return sub

    system_file = ('system', "System document (or raw document)")
    state_file = ('state', "State document")
    add('validate', "Validate a system or raw document", system_file)
    add('decompose', "Decompose a raw algebra into a direct system",
        ('raw', "Raw document"))
    add('sum', "Print the Plonka sum of a direct system",
        ('system', "System document"))
    add('booleanise', "Booleanisation classes and quotient", system_file)
    add('check-state', "Validate a state both ways", system_file, state_file)
    add('phi', "Measure on the Booleanisation of a state",
        system_file, state_file)
    add('phi-inverse', "State pulled back from a measure on the quotient",
        system_file, ('measure', "Measure document"))
    faithful = add('faithful', "Faithfulness of a state, or existence of "
                   "a faithful one", system_file)
    faithful.add_argument('state', type=str, nargs='?', default=None,
                          help="Optional state document")
    add('metric', "State distance table and axioms", system_file, state_file)
    add('quotient', "Kolmogorov quotient against the Booleanisation",
        system_file, state_file)
    add('topology', "Quotient topology checks", system_file, state_file)
    count = add('count', "Counting formulas")
    group = count.add_mutually_exclusive_group(required=True)
    group.add_argument('--nd', type=int, nargs=2, metavar=('N', 'K'),
                       help="Inclusive count for chain length N, K components")
    group.add_argument('--forests', type=int, metavar='M',
                       help="Labeled forests on M vertices")
    group.add_argument('--chain', type=int, nargs=2, metavar=('N', 'H'),
                       help="Chain factor for chain length N, H subsets")
    count.add_argument('--oracle', dest='oracle', action='store_true',
                       help="Cross-check forests by brute force")
    enumerate_parser = add('enumerate', "Enumerate inclusive systems")
    enumerate_parser.add_argument('n', type=int, help="Chain length")
    enumerate_parser.add_argument('k', type=int, help="Number of components")
    return parser.parse_args(argv)


def load_system(path, caps):
    """
    A system document, or a raw document decomposed into one.

    :return SystemCheck/None check: Verdict on a system document
    :return Decomposition/None decomposition: When the system is valid
    """
    doc = document.read_document(path)
    if doc.kind == 'raw':
        raw = document.resolve_raw(doc)
        decomposition = decompose(raw, caps['max_carrier'])
        return None, decomposition
    if doc.kind != 'system':
        raise DocumentError("{} is a {} document, expected system or "
                            "raw".format(path, doc.kind))
    check = document.resolve_system(doc, caps['max_atoms'])
    if not check.valid:
        return check, None
    return check, sum_decomposition(check.system, caps['max_carrier'])


def system_failure(command, check):
    checks = [report_utils.make_check(
        'direct system', False, check.witness, check.violation)]
    return report_utils.make_report(
        command, "Invalid direct system: {}".format(check.violation),
        checks), {}


def load_state(decomposition, path, caps):
    """
    :return State/None state: The state when valid
    :return StateReport report: Componentwise verdict, cross-checked
    :return list/None weights: Weight vector per index, as the document
        gives them or as restricted from a top measure
    """
    system = decomposition.system
    doc = document.read_document(path)
    form, weights = document.resolve_state(doc, system)
    if form == 'top':
        top = system.components[system.top_index]
        check = measure_check(top, weights)
        if not check.valid:
            return None, states.StateReport(
                False, False, (('Measure', (system.top_index,
                                            check.reason)),), ()), None
        state = states.phi_inverse(system, Measure(top, weights))
        weights = [state.component_weights(i)
                   for i in system.index.indices()]
    report = states.check_state_componentwise(system, weights,
                                              caps['max_carrier'])
    if not report.valid:
        return None, report, weights
    return states.state_from_components(system, weights,
                                        caps['max_carrier']), report, weights


def element_labels(decomposition):
    raw = decomposition.raw
    names = decomposition.system.index.names
    return list(raw.names), [names[decomposition.component_of(x)]
                             for x in range(raw.size)]


def validate(args, caps):
    doc = document.read_document(args.system)
    checks = []
    if doc.kind == 'system':
        system_check = document.resolve_system(doc, caps['max_atoms'])
        if not system_check.valid:
            return system_failure(args.command, system_check)
        raw = sum_decomposition(system_check.system, caps['max_carrier']).raw
        subject = "Valid direct system; Płonka sum"
    elif doc.kind == 'raw':
        raw = document.resolve_raw(doc)
        subject = "Raw algebra"
    else:
        raise DocumentError("Can't validate a {} document".format(doc.kind))
    axioms = check_ibsl(raw, caps['max_carrier'])
    checks.append(report_utils.make_check(
        'I1-I8', axioms.passed, axioms.witness, axioms.axiom))
    if not axioms.passed:
        return report_utils.make_report(
            args.command, "{} fails {}".format(subject, axioms.axiom),
            checks), {}
    partition = check_partition_function(raw, caps['max_carrier'])
    checks.append(report_utils.make_check(
        'partition function', partition.passed, partition.witness,
        partition.axiom if partition.passed else
        '{} {}'.format(partition.axiom, partition.detail)))
    absorption = check_identity(raw, 'absorption')
    witness = None
    if not absorption.passed:
        witness = [raw.names[x] for x in absorption.witness]
    checks.append(report_utils.make_check(
        'absorption', None, witness, None if absorption.passed else
        raw.names[int(absorption.detail)]))
    checks.append(report_utils.make_check(
        'injective', None, detail=str(is_injective_ibsl(raw,
                                                        caps['max_carrier']))))
    checks.append(report_utils.make_check(
        'ngib', None, detail=str(is_ngib(raw, caps['max_carrier']))))
    summary = "{} passes I1–I8".format(subject)
    return report_utils.make_report(args.command, summary, checks), {}


def decompose_command(args, caps):
    raw = document.resolve_raw(document.read_document(args.raw))
    decomposition = decompose(raw, caps['max_carrier'])
    system = decomposition.system
    text = document.print_document(document.system_document(
        system, 'decomposition'))
    sizes = [c.size for c in system.components]
    summary = "Decomposed into {} components of sizes {}".format(
        len(sizes), ', '.join(str(s) for s in sizes))
    data = {'document': text}
    return report_utils.make_report(args.command, summary, [], data), {}


def sum_command(args, caps):
    check = document.resolve_system(document.read_document(args.system),
                                    caps['max_atoms'])
    if not check.valid:
        return system_failure(args.command, check)
    raw = sum_decomposition(check.system, caps['max_carrier']).raw
    text = document.print_document(document.raw_document(raw, 'sum'))
    summary = "Płonka sum with {} elements".format(raw.size)
    return report_utils.make_report(args.command, summary, [],
                                    {'document': text}), {
        'join': report_utils.operation_frame(raw, 'join'),
        'meet': report_utils.operation_frame(raw, 'meet'),
    }


def booleanise_command(args, caps):
    check, decomposition = load_system(args.system, caps)
    if decomposition is None:
        return system_failure(args.command, check)
    booleanisation = booleanise(decomposition.system, caps['max_carrier'])
    names = decomposition.raw.names
    classes = [[names[decomposition.back[e]] for e in members]
               for members in booleanisation.classes]
    summary = "Booleanisation with {} atoms and {} classes".format(
        booleanisation.quotient.atom_count, len(classes))
    frame = pd.DataFrame({'class': [' '.join(c) for c in classes]})
    return report_utils.make_report(args.command, summary, [],
                                    {'classes': classes}), {'classes': frame}


def _state_verdict(report):
    if not report.valid:
        return "invalid"
    return "valid, faithful" if report.faithful else "valid, not faithful"


def check_state_command(args, caps):
    check, decomposition = load_system(args.system, caps)
    if decomposition is None:
        return system_failure(args.command, check)
    state, report, weights = load_state(decomposition, args.state, caps)
    checks = [report_utils.make_check('state', report.valid,
                                      report.violations or None)]
    tables = {}
    if state is not None:
        table = state.value_table(decomposition)
        direct = states.check_state_direct(decomposition, table)
        checks.append(report_utils.make_check('direct route', direct.valid))
        integral = states.integral_representation_check(state, weights)
        checks.append(report_utils.make_check(
            'integral representation', integral.holds, integral.witness))
        certificate = states.alt_state_equivalence(decomposition,
                                                   seed=args.seed)
        checks.append(report_utils.make_check(
            'weaker state notion', certificate.holds,
            detail=certificate.limitation))
        names, components = element_labels(decomposition)
        tables['values'] = report_utils.value_frame(names, components, table)
    return report_utils.make_report(args.command, _state_verdict(report),
                                    checks), tables


def phi_command(args, caps):
    check, decomposition = load_system(args.system, caps)
    if decomposition is None:
        return system_failure(args.command, check)
    state, report, _ = load_state(decomposition, args.state, caps)
    if state is None:
        return report_utils.make_report(
            args.command, "invalid state",
            [report_utils.make_check('state', False, report.violations)]), {}
    system = decomposition.system
    top = system.top_index
    mu = states.phi(state)
    weights = {name: w for name, w in zip(system.atom_names[top],
                                          mu.weights)}
    summary = "phi(s) = {}".format(', '.join(
        '{}={}'.format(name, cli_utils.format_rational(w))
        for name, w in weights.items()))
    return report_utils.make_report(args.command, summary, [],
                                    {'weights': weights}), {}


def phi_inverse_command(args, caps):
    check, decomposition = load_system(args.system, caps)
    if decomposition is None:
        return system_failure(args.command, check)
    system = decomposition.system
    top = system.top_index
    weights = document.resolve_measure(document.read_document(args.measure),
                                       system.atom_names[top],
                                       caps['max_atoms'])
    measure_verdict = measure_check(system.components[top], weights)
    if not measure_verdict.valid:
        return report_utils.make_report(
            args.command, "invalid measure",
            [report_utils.make_check('measure', False,
                                     measure_verdict.witness,
                                     measure_verdict.reason)]), {}
    state = states.phi_inverse(system, Measure(system.components[top],
                                               weights))
    table = state.value_table(decomposition)
    report = states.check_state_direct(decomposition, table)
    names, components = element_labels(decomposition)
    checks = [report_utils.make_check('state', report.valid)]
    return report_utils.make_report(args.command, _state_verdict(report),
                                    checks), {
        'values': report_utils.value_frame(names, components, table)}


def faithful_command(args, caps):
    check, decomposition = load_system(args.system, caps)
    if decomposition is None:
        return system_failure(args.command, check)
    system = decomposition.system
    if args.state is None:
        exists, _ = states.faithful_state_exists(system)
        summary = "faithful state exists" if exists else \
            "no faithful state exists"
        return report_utils.make_report(
            args.command, summary,
            [report_utils.make_check('faithful state', exists)]), {}
    state, report, _ = load_state(decomposition, args.state, caps)
    if state is None:
        return report_utils.make_report(
            args.command, "invalid state",
            [report_utils.make_check('state', False, report.violations)]), {}
    diagnosis = states.faithful_diagnosis(state)
    witness = None
    if diagnosis.witness is not None:
        witness = system.element_name(diagnosis.witness)
    checks = [
        report_utils.make_check('faithful', diagnosis.faithful, witness),
        report_utils.make_check('regular restrictions', None,
                                detail=str(diagnosis.regular_restrictions)),
        report_utils.make_check('injective homs', None,
                                detail=str(diagnosis.injective_homs)),
    ]
    summary = "faithful" if diagnosis.faithful else "not faithful"
    return report_utils.make_report(args.command, summary, checks), {}


def _space(args, caps):
    check, decomposition = load_system(args.system, caps)
    if decomposition is None:
        return None, system_failure(args.command, check)
    state, report, _ = load_state(decomposition, args.state, caps)
    if state is None:
        return None, (report_utils.make_report(
            args.command, "invalid state",
            [report_utils.make_check('state', False, report.violations)]), {})
    return metrics_topology.pseudometric(decomposition, state), None


def metric_command(args, caps):
    space, failure = _space(args, caps)
    if failure is not None:
        return failure
    checks = [report_utils.make_check(name, holds)
              for name, holds in space.axioms]
    identities = metrics_topology.component_distance_identities(space)
    checks.append(report_utils.make_check(
        'component identities', identities.holds, identities.witness,
        identities.identity))
    metric = metrics_topology.is_metric(space)
    summary = "metric" if metric else "pseudometric with {} zero " \
        "classes".format(len(space.zero_classes))
    names = space.decomposition.raw.names
    return report_utils.make_report(args.command, summary, checks), {
        'distances': report_utils.rational_frame(space.distances, names)}


def quotient_command(args, caps):
    space, failure = _space(args, caps)
    if failure is not None:
        return failure
    certificate = metrics_topology.kolmogorov_quotient(space)
    names = space.decomposition.raw.names

    def named(classes):
        return [[names[x] for x in members] for members in classes]

    checks = [
        report_utils.make_check(
            'classes match', certificate.classes_match
            if certificate.hypotheses_met else None),
        report_utils.make_check('distances transported',
                                certificate.distances_transported),
        report_utils.make_check('quotient metric', None,
                                detail=str(certificate.quotient_is_metric)),
    ]
    summary = "{} zero classes, {} Booleanisation classes".format(
        len(certificate.classes), len(certificate.projection_classes))
    if not certificate.hypotheses_met:
        summary += " (hypotheses unmet, comparison informational)"
    data = {'zero_classes': named(certificate.classes),
            'projection_classes': named(certificate.projection_classes)}
    return report_utils.make_report(args.command, summary, checks, data), {}


def topology_command(args, caps):
    space, failure = _space(args, caps)
    if failure is not None:
        return failure
    report = metrics_topology.topology_report(
        space,
        max_open_classes=caps['max_open_classes'],
        max_subset_bruteforce=caps['max_subset_bruteforce'],
        max_reg_table_atoms=caps['max_reg_table_atoms'],
    )
    names = space.decomposition.raw.names
    informational = not report.hypotheses_met

    def verdict(value):
        return None if informational else value

    witness = None
    if report.interior_witness is not None:
        witness = [names[x] for x in report.interior_witness]
    checks = [
        report_utils.make_check('saturated', report.saturated),
        report_utils.make_check('pi open', report.pi_open),
        report_utils.make_check('pi closed', report.pi_closed),
        report_utils.make_check('closed interior', verdict(
            report.closed_interior)),
        report_utils.make_check('open bijection', verdict(
            report.open_bijection)),
        report_utils.make_check(
            'interior preserving', None, witness,
            '{} ({})'.format(report.interior_preserving,
                             report.interior_method)),
        report_utils.make_check('interior criterion', verdict(
            report.interior_criterion_holds)),
        report_utils.make_check('regular opens', verdict(report.reg_iso)),
    ]
    checks.extend(report_utils.make_check(name, None, detail='skipped')
                  for name in report.skipped)
    section = metrics_topology.make_section(space)
    certificate = metrics_topology.verify_section(space, section)
    checks.append(report_utils.make_check('canonical section',
                                          certificate.passed))
    if report.hypotheses_met:
        uniqueness = metrics_topology.state_uniqueness_check(space)
        checks.append(report_utils.make_check(
            'unique continuous state',
            uniqueness.unique and uniqueness.equals_state))
    summary = "{} zero classes over {} quotient classes".format(
        report.zero_class_count, report.quotient_class_count)
    if informational:
        summary += " (hypotheses unmet, informational)"
    data = {'deletion_witnesses': [names[x]
                                   for x in report.deletion_witnesses]}
    return report_utils.make_report(args.command, summary, checks, data), {}


def count_command(args, caps):
    checks = []
    if args.nd is not None:
        n, k = args.nd
        result = counting.n_d(n, k)
        summary = "N_d = {} (chain {} × forests {})".format(
            result.value, result.chain_factor, result.forest_count)
        if result.formula_only:
            checks.append(report_utils.make_check(
                'formula only', None, detail='no chain subset for k = 2'))
        data = {'value': result.value}
    elif args.forests is not None:
        value = counting.forests(args.forests)
        summary = "forests({}) = {}".format(args.forests, value)
        if args.oracle:
            oracle = counting.forest_oracle(
                args.forests, max_m=caps['max_forest_oracle'],
                progress=args.verbose)
            checks.append(report_utils.make_check(
                'oracle', oracle == value, detail=str(oracle)))
        data = {'value': value}
    else:
        n, h = args.chain
        factor = counting.chain_factor(n, h)
        summary = "chain factor = {}".format(factor.value)
        checks.append(report_utils.make_check(
            'routes agree', factor.by_subsets == factor.by_binomial))
        data = {'value': factor.value}
    return report_utils.make_report(args.command, summary, checks, data), {}


def enumerate_command(args, caps):
    enumeration = counting.enumerate_inclusive(
        args.n, args.k,
        max_n=caps['max_inclusive_n'],
        max_k=caps['max_inclusive_k'],
        max_carrier=caps['max_carrier'],
        progress=args.verbose,
    )
    checks = [report_utils.make_check(
        'formula agreement', enumeration.agrees,
        detail='enumerated {}, formula {}'.format(enumeration.count,
                                                  enumeration.expected))]
    summary = "{} inclusive systems up to isomorphism".format(
        enumeration.count)
    data = {'count': enumeration.count, 'expected': enumeration.expected,
            'candidates': enumeration.candidates}
    return report_utils.make_report(args.command, summary, checks, data), {}


COMMANDS = {
    'validate': validate,
    'decompose': decompose_command,
    'sum': sum_command,
    'booleanise': booleanise_command,
    'check-state': check_state_command,
    'phi': phi_command,
    'phi-inverse': phi_inverse_command,
    'faithful': faithful_command,
    'metric': metric_command,
    'quotient': quotient_command,
    'topology': topology_command,
    'count': count_command,
    'enumerate': enumerate_command,
}


def run(args):
    """
    Run one subcommand and print its report to stdout.

    :param argparse.Namespace args: Parsed arguments
    :return int exit_code: 0 if every check passed, 1 if one failed,
        2 for unreadable input or out-of-range arguments
    """
    try:
        caps = config_utils.get_caps(args.config, args.cap)
    except (FileNotFoundError, ValueError,
            jsonschema.exceptions.ValidationError) as e:
        logger.error("Can't read caps: %s", e)
        return EXIT_USAGE
    try:
        report, tables = COMMANDS[args.command](args, caps)
    except (DocumentError, FileNotFoundError, BadRange) as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except NotIBSL as e:
        report = report_utils.make_report(
            args.command, "Not an involutive bisemilattice",
            [report_utils.make_check(
                e.failure.axiom if e.failure else 'I1-I8', False,
                e.failure.witness if e.failure else None)])
        tables = {}
    except (CapacityExceeded, TrivialComponent, InternalInconsistency) as e:
        report = report_utils.make_report(
            args.command, str(e),
            [report_utils.make_check(type(e).__name__, False)])
        tables = {}
    if args.format == 'json':
        print(report_utils.report_json(report, tables))
    else:
        print(report_utils.report_text(report, tables))
    if args.output is not None:
        json_ops.write_json_file(report, args.output)
    return EXIT_PASSED if report['passed'] else EXIT_FAILED


def main(argv=None):
    args = parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
    )
    return run(args)


if __name__ == '__main__':
    sys.exit(main())
