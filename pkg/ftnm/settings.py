"""
Django settings for ftnm project.

Library code reads the FTNM_* values below through django.conf.settings;
every one of them can be overridden from the environment.
"""
import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get('SECRET_KEY', 'secret')

DEBUG = os.environ.get('DEBUG') == 'TRUE'

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'operators.apps.OperatorsConfig',
    'baths.apps.BathsConfig',
    'faults.apps.FaultsConfig',
    'concatenation.apps.ConcatenationConfig',
    'thresholds.apps.ThresholdsConfig',
    'spectra.apps.SpectraConfig',
    'reports.apps.ReportsConfig',
    'rest_framework',
]

# Nothing is persisted
DATABASES = {}

TIME_ZONE = 'UTC'

USE_TZ = True

REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [],
}

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        app: {
            'handlers': ['console'],
            'level': os.environ.get('FTNM_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        }
        for app in (
            'operators', 'baths', 'faults', 'concatenation',
            'thresholds', 'spectra', 'reports',
        )
    },
}

# Numerics

FTNM_VERSION = '0.1.0'
FTNM_SCHEMA_VERSION = os.environ.get('FTNM_SCHEMA_VERSION', '1')

FTNM_MAX_DIM = int(os.environ.get('FTNM_MAX_DIM', 256))
FTNM_HERMITIAN_ATOL = float(os.environ.get('FTNM_HERMITIAN_ATOL', 1e-12))
FTNM_NORM_ATOL = float(os.environ.get('FTNM_NORM_ATOL', 1e-10))
FTNM_BOUND_SLACK = float(os.environ.get('FTNM_BOUND_SLACK', 1e-9))

FTNM_SPARSE_SAMPLING_DENSITY = float(
    os.environ.get('FTNM_SPARSE_SAMPLING_DENSITY', 0.1)
)
FTNM_SPARSE_SAMPLING_ATTEMPTS = int(
    os.environ.get('FTNM_SPARSE_SAMPLING_ATTEMPTS', 10**6)
)

FTNM_MAX_LEVEL = int(os.environ.get('FTNM_MAX_LEVEL', 64))
FTNM_UNDERFLOW_FLOOR = float(os.environ.get('FTNM_UNDERFLOW_FLOOR', 1e-300))
FTNM_LOG_SPACE_BELOW = float(os.environ.get('FTNM_LOG_SPACE_BELOW', 1e-30))
FTNM_BISECTION_XTOL = float(os.environ.get('FTNM_BISECTION_XTOL', 1e-12))

FTNM_QUAD_CUTOFF = float(os.environ.get('FTNM_QUAD_CUTOFF', 60))
FTNM_HYPERFINE_KAPPA = float(os.environ.get('FTNM_HYPERFINE_KAPPA', 1.5))
