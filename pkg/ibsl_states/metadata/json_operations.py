import json
import logging

import jsonschema

logger = logging.getLogger(__name__)

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "max_atoms": {"type": "integer", "minimum": 0},
        "max_carrier": {"type": "integer", "minimum": 1},
        "max_open_classes": {"type": "integer", "minimum": 0},
        "max_subset_bruteforce": {"type": "integer", "minimum": 0},
        "max_reg_table_atoms": {"type": "integer", "minimum": 0},
        "max_forest_oracle": {"type": "integer", "minimum": 0},
        "max_inclusive_n": {"type": "integer", "minimum": 1},
        "max_inclusive_k": {"type": "integer", "minimum": 2},
    },
    "additionalProperties": False,
}

CHECK_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "passed": {"type": ["boolean", "null"]},
        "witness": {},
        "detail": {"type": "string"},
    },
    "required": ["name", "passed"],
}

REPORT_SCHEMA = {
    "type": "object",
    "properties": {
        "command": {"type": "string"},
        "passed": {"type": "boolean"},
        "summary": {"type": "string"},
        "checks": {"type": "array", "items": CHECK_SCHEMA},
        "data": {"type": "object"},
    },
    "required": ["command", "passed", "summary", "checks"],
}


def validate_schema(json_object, schema):
    """
    Validate JSON object against predefined schema.

    :param json json_object: JSON object
    :param str/dict schema: predefined schema or
        name of schema defined in this file
        current options are:
        CONFIG_SCHEMA: capacity caps
        REPORT_SCHEMA: structured CLI report
    :raise ValidationError: if validation fails
    """
    if isinstance(schema, dict):
        schema_object = schema
    elif isinstance(schema, str):
        try:
            schema_object = globals()[schema]
        except KeyError as e:
            raise KeyError(e)
    else:
        raise AssertionError("Schema neither string or dict")

    try:
        jsonschema.validate(json_object, schema_object)
    except jsonschema.exceptions.ValidationError as e:
        logger.error("Schema validation failed: %s", e.message)
        raise


def read_json_file(json_filename, schema_name=None):
    """
    Read JSON file and validate schema

    :param str json_filename: json file name
    :param str schema_name: if specified, the json will be validated against
        this schema if it is defined in this file
    :return dict json_object: JSON object
    :raise FileNotFoundError: if file can't be read
    :raise ValueError: if file is not in json format
    :raise ValidationError: if json schema is invalid
    """
    try:
        with open(json_filename, "r") as read_file:
            try:
                json_object = json.load(read_file)
            except json.JSONDecodeError:
                raise ValueError("Can't read json {}".format(json_filename))
    except FileNotFoundError as e:
        raise FileNotFoundError("{} not found. {}".format(json_filename, e))
    if schema_name is not None:
        validate_schema(json_object, schema_name)

    return json_object


def write_json_file(json_object, json_filename):
    """
    Writes dict to json file

    :param dict json_object: Dict to be saved as json
    :param json_filename: json file name with full path
    """
    with open(json_filename, "w") as write_file:
        write_file.write(report_to_str(json_object))


def report_to_str(report):
    """
    Validate a report dict and serialize it with a stable key order.

    :param dict report: Report following REPORT_SCHEMA
    :return str json_str: Indented JSON
    """
    validate_schema(report, REPORT_SCHEMA)
    return json.dumps(report, indent=2, sort_keys=True)

