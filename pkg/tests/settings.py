"""
Django settings for tests.
"""

from cmdeg.conf import DEFAULTS, logging_config

SECRET_KEY = "test-secret-key-for-testing-only"

DEBUG = True

INSTALLED_APPS = [
    "cmdeg",
]

USE_TZ = True

LOGGING = logging_config("WARNING")

# Library defaults, independent of CMDEG_* variables in the calling shell
globals().update(DEFAULTS)
