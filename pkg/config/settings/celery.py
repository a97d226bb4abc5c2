from config.env import env

CELERY_BROKER_URL = env("CELERY_BROKER_URL", default="redis://127.0.0.1:6380/0")
CELERY_RESULT_BACKEND = env("CELERY_RESULT_BACKEND", default="redis://127.0.0.1:6380/1")
CELERY_TIMEZONE = env("CELERY_TIMEZONE", default="UTC")

CELERY_TASK_SERIALIZER = "json"
CELERY_RESULT_SERIALIZER = "json"
CELERY_ACCEPT_CONTENT = ["json"]

# Training runs are long; only the PPR precomputation gets a hard limit.
CELERY_TASK_SOFT_TIME_LIMIT = env.int("CELERY_TASK_SOFT_TIME_LIMIT", default=None)
CELERY_TASK_TIME_LIMIT = env.int("CELERY_TASK_TIME_LIMIT", default=None)
CELERY_TASK_MAX_RETRIES = 0
RECSYS_PPR_TASK_TIME_LIMIT = env.int("RECSYS_PPR_TASK_TIME_LIMIT", default=6 * 3600)
