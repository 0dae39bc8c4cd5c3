"""
Reports are plain dicts validated against REPORT_SCHEMA; tables travel
alongside them as pandas DataFrames.
"""
from fractions import Fraction

import numpy as np
import pandas as pd

import ibsl_states.metadata.json_operations as json_ops
import ibsl_states.utils.cli_utils as cli_utils


def jsonable(value):
    """
    Convert witnesses and values to JSON types: rationals become 'p/q'
    strings, tuples become lists.
    """
    if isinstance(value, Fraction):
        return cli_utils.format_rational(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in value]
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return str(value)


def make_check(name, passed, witness=None, detail=None):
    """
    :param str name: Check name
    :param bool/None passed: Verdict, None when informational
    :param witness: Failing binding, converted to JSON types
    :param str detail: Free text
    :return dict check: Entry of a report's checks list
    """
    check = {'name': name,
             'passed': None if passed is None else bool(passed)}
    if witness is not None:
        check['witness'] = jsonable(witness)
    if detail is not None:
        check['detail'] = str(detail)
    return check


def make_report(command, summary, checks, data=None):
    """
    A report passes when no check has passed == False.

    :return dict report: Report validated against REPORT_SCHEMA
    """
    report = {
        'command': command,
        'passed': all(c['passed'] is not False for c in checks),
        'summary': summary,
        'checks': list(checks),
        'data': jsonable(data or {}),
    }
    json_ops.validate_schema(report, 'REPORT_SCHEMA')
    return report


def checks_frame(checks):
    frame = pd.DataFrame(checks, columns=['name', 'passed', 'witness',
                                          'detail'])
    return frame.fillna('')


def rational_frame(table, labels):
    """Square table of rationals with labelled rows and columns"""
    formatted = [[cli_utils.format_rational(v) for v in row] for row in table]
    return pd.DataFrame(formatted, index=list(labels), columns=list(labels))


def operation_frame(raw, op):
    """Join or meet table of a raw algebra, by element name"""
    table = getattr(raw, op)
    names = list(raw.names)
    return pd.DataFrame([[names[v] for v in row] for row in table],
                        index=names, columns=names)


def value_frame(names, components, values):
    """
    :param list names: Element names
    :param list components: Index name of every element
    :param list values: Rational value of every element
    :return pd.DataFrame frame: One row per element
    """
    return pd.DataFrame({
        'element': list(names),
        'component': list(components),
        'value': [cli_utils.format_rational(v) for v in values],
    })


def report_text(report, tables=None):
    """
    :param dict report: Report from make_report
    :param dict tables: Title -> DataFrame
    :return str text: Summary, checks and tables
    """
    out = [report['summary']]
    if report['checks']:
        out.append(checks_frame(report['checks']).to_string(index=False))
    if 'document' in report['data']:
        out.append('')
        out.append(report['data']['document'].rstrip('\n'))
    for title, frame in (tables or {}).items():
        out.append('')
        out.append(title)
        out.append(frame.to_string())
    return '\n'.join(out)


def report_json(report, tables=None):
    """Report with its tables in pandas 'split' orientation, as JSON"""
    full = dict(report)
    if tables:
        full['data'] = dict(full['data'])
        full['data']['tables'] = {
            title: jsonable(frame.astype(str).to_dict(orient='split'))
            for title, frame in tables.items()}
    return json_ops.report_to_str(full)
