import os
from config.env import env, BASE_DIR, APPS_DIR

SECRET_KEY = env("DJANGO_SECRET_KEY", default="django-insecure-recsys-local-only")

DEBUG = env.bool("DJANGO_DEBUG", default=True)

ALLOWED_HOSTS = ["*"]

LOCAL_APPS = ["src.common", "src.recsys", "src.tasks"]

THIRD_PARTY_APPS = [
    "rest_framework",
]

INSTALLED_APPS = [
    "django.contrib.auth",
    "django.contrib.contenttypes",
    *THIRD_PARTY_APPS,
    *LOCAL_APPS,
]

# No database-backed models; sqlite keeps the auth/contenttypes apps importable.
DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": os.path.join(BASE_DIR, "db.sqlite3"),
    }
}

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

from config.settings.celery import *  # noqa
from config.settings.logging import *  # noqa
from config.settings.training import *  # noqa
