from .base import *  # noqa

DEBUG = False

CELERY_BROKER_URL = "memory://"
CELERY_RESULT_BACKEND = "cache+memory://"
CELERY_TASK_ALWAYS_EAGER = True
CELERY_TASK_EAGER_PROPAGATES = True

# Small, fast defaults for the test suite; explicit run configs override them.
RECSYS_MIN_INTERACTIONS = 1
RECSYS_N_NEG = 20
RECSYS_BATCH_USERS = 8
RECSYS_MAX_EPOCHS = 3
RECSYS_EVAL_EVERY = 1
RECSYS_PATIENCE = 2
RECSYS_DIM = 8
RECSYS_LAYERS = 2

CACHES = {
    "default": {
        "BACKEND": "django.core.cache.backends.locmem.LocMemCache",
    }
}
