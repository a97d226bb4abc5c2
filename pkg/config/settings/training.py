from config.env import env, BASE_DIR

# Defaults of every run configuration field that is not set in the config file.

RECSYS_OUTPUT_DIR = env("RECSYS_OUTPUT_DIR", default=str(BASE_DIR.path("runs")))
RECSYS_SEED = env.int("RECSYS_SEED", default=0)

RECSYS_MIN_INTERACTIONS = env.int("RECSYS_MIN_INTERACTIONS", default=10)

RECSYS_RHO = env.float("RECSYS_RHO", default=0.8)
RECSYS_MU = env.float("RECSYS_MU", default=0.8)
RECSYS_ETA = env.float("RECSYS_ETA", default=0.8)

RECSYS_DIM = env.int("RECSYS_DIM", default=64)
RECSYS_LAYERS = env.int("RECSYS_LAYERS", default=3)
RECSYS_POOLING = env("RECSYS_POOLING", default="mean")
RECSYS_INIT_STD = env.float("RECSYS_INIT_STD", default=0.1)

RECSYS_LOSS = env("RECSYS_LOSS", default="ndcg")
RECSYS_TAU = env.float("RECSYS_TAU", default=1.0)
RECSYS_RECALL_LEVELS = [int(k) for k in env.list("RECSYS_RECALL_LEVELS", default=["10", "20"])]

RECSYS_SAMPLING = env("RECSYS_SAMPLING", default="uniform")
RECSYS_N_POS = env.int("RECSYS_N_POS", default=5)
RECSYS_N_NEG = env.int("RECSYS_N_NEG", default=200)

RECSYS_PPR_ALPHA = env.float("RECSYS_PPR_ALPHA", default=0.15)
RECSYS_PPR_TOL = env.float("RECSYS_PPR_TOL", default=1e-9)
RECSYS_PPR_MAX_ITER = env.int("RECSYS_PPR_MAX_ITER", default=1000)
RECSYS_PPR_TOP_T = env.int("RECSYS_PPR_TOP_T", default=1000)
RECSYS_PPR_SCALE = env.float("RECSYS_PPR_SCALE", default=1.0)
RECSYS_PPR_BLOCK_SIZE = env.int("RECSYS_PPR_BLOCK_SIZE", default=64)

RECSYS_LR = env.float("RECSYS_LR", default=0.001)
RECSYS_L2 = env.float("RECSYS_L2", default=1e-4)

RECSYS_BATCH_USERS = env.int("RECSYS_BATCH_USERS", default=512)
RECSYS_MAX_EPOCHS = env.int("RECSYS_MAX_EPOCHS", default=200)
RECSYS_EVAL_EVERY = env.int("RECSYS_EVAL_EVERY", default=5)
RECSYS_PATIENCE = env.int("RECSYS_PATIENCE", default=10)
RECSYS_KS = [int(k) for k in env.list("RECSYS_KS", default=["10", "20"])]
RECSYS_TARGET_K = env.int("RECSYS_TARGET_K", default=20)

RECSYS_N_JOBS = env.int("RECSYS_N_JOBS", default=1)
