import inspect

import pytest

import ibsl_states.errors as errors

INPUT_ERRORS = [
    cls for name, cls in inspect.getmembers(errors, inspect.isclass)
    if cls.__module__ == errors.__name__ and name != 'InternalInconsistency'
]


@pytest.mark.parametrize('error_class', INPUT_ERRORS,
                         ids=lambda cls: cls.__name__)
def test_input_errors_are_value_errors(error_class):
    assert issubclass(error_class, ValueError)


def test_internal_inconsistency_is_runtime_error():
    assert issubclass(errors.InternalInconsistency, RuntimeError)
    assert not issubclass(errors.InternalInconsistency, ValueError)


def test_document_errors():
    for error_class in (errors.DocumentSyntaxError,
                        errors.UnresolvedReference,
                        errors.DuplicateName):
        assert issubclass(error_class, errors.DocumentError)
    error = errors.DocumentSyntaxError(3, 7, 'a name')
    assert str(error) == '3:7: expected a name'
