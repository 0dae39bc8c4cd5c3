import logging
import os

import ibsl_states.metadata.json_operations as json_ops

logger = logging.getLogger(__name__)

CAP_ENV_VAR = 'PLONKA_CAP'

DEFAULT_CAPS = {
    'max_atoms': 16,
    'max_carrier': 64,
    'max_open_classes': 16,
    'max_subset_bruteforce': 20,
    'max_reg_table_atoms': 8,
    'max_forest_oracle': 7,
    'max_inclusive_n': 3,
    'max_inclusive_k': 5,
}


def get_caps(config_path=None, cap=None, environ=None):
    """
    Resolve capacity caps. Precedence, lowest first: built-in defaults,
    config file, PLONKA_CAP environment variable, explicit cap.
    The environment variable and the explicit cap both set max_carrier.

    :param str/None config_path: JSON config validated with CONFIG_SCHEMA
    :param int/None cap: Carrier cap override
    :param dict/None environ: Environment, defaults to os.environ
    :return dict caps: All caps in DEFAULT_CAPS
    :raise ValueError: If PLONKA_CAP is not an integer or the resolved
        carrier cap is not positive
    """
    caps = dict(DEFAULT_CAPS)
    if config_path is not None:
        caps.update(json_ops.read_json_file(config_path, 'CONFIG_SCHEMA'))
    if environ is None:
        environ = os.environ
    env_cap = environ.get(CAP_ENV_VAR)
    if env_cap is not None:
        try:
            caps['max_carrier'] = int(env_cap)
        except ValueError:
            raise ValueError(
                "{} must be an integer, not {}".format(CAP_ENV_VAR, env_cap),
            )
        logger.info("Carrier cap set to %s from %s", env_cap, CAP_ENV_VAR)
    if cap is not None:
        caps['max_carrier'] = cap
    if caps['max_carrier'] <= 0:
        raise ValueError(
            "Carrier cap must be positive, not {}".format(caps['max_carrier']),
        )
    return caps
