"""
Django settings for probe_qpt project.

The project hosts no web surface: Django provides configuration, logging,
translations, the ``manage.py sweep`` command and the test runner.

For more information on this file, see
https://docs.djangoproject.com/en/5.2/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get(
    'DJANGO_SECRET_KEY',
    'django-insecure-probe-qpt-development-key',
)

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'linalg.apps.LinalgConfig',
    'spin_model.apps.SpinModelConfig',
    'probe_protocol.apps.ProbeProtocolConfig',
    'circuit.apps.CircuitConfig',
    'sweeps.apps.SweepsConfig',
]

# Simulador sem estado: nenhuma base de dados é necessária
DATABASES = {}


# Parâmetros numéricos e padrões das varreduras
QPT_PROBE = {
    'MAX_DIM': 2 ** 14,
    'HERMITIAN_TOL': 1e-12,
    'NORM_TOL': 1e-10,
    'DEGENERACY_TOL': 1e-9,
    'FLOAT_DIGITS': 12,
    'SWEEP_WORKERS': 4,
    'DEFAULT_BZ_MIN': -2.0,
    'DEFAULT_BZ_MAX': 2.0,
    'DEFAULT_STEPS': 81,
    'DEFAULT_BX': 0.1,
    'DEFAULT_EPS': 0.2,
    'DEFAULT_TAU': 1.6,
    'DEFAULT_TROTTER_STEPS': 1,
}


# Logging
# https://docs.djangoproject.com/en/5.2/topics/logging/

LOG_LEVEL = os.environ.get('PROBE_QPT_LOG_LEVEL', 'WARNING')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'simple',
        },
    },
    'loggers': {
        app: {'handlers': ['console'], 'level': LOG_LEVEL, 'propagate': False}
        for app in ('linalg', 'spin_model', 'probe_protocol', 'circuit', 'sweeps')
    },
}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'pt-br'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True

# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
