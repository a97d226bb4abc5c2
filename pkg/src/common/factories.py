import factory
import numpy as np
from faker import Faker

from src.domain.data.entities import Dataset
from src.domain.data.value_objects import Protocol
from src.domain.losses.value_objects import LossConfig
from src.domain.model.value_objects import ModelConfig
from src.domain.ppr.value_objects import PPRConfig
from src.domain.training.value_objects import (
    DatasetConfig,
    OptimizerConfig,
    RunConfig,
    SamplingConfig,
    SplitConfig,
    TrainingConfig,
)

faker = Faker()


def random_pairs(num_users: int, num_items: int, density: float, seed: int):
    """
    Random bipartite edges where every user and every item has at least one interaction
    and every user has at least `min(4, num_items)`.
    """
    rng = np.random.default_rng(seed)
    mask = rng.random((num_users, num_items)) < density
    for user in range(num_users):
        mask[user, rng.choice(num_items, size=min(4, num_items), replace=False)] = True
    for item in range(num_items):
        mask[item % num_users, item] = True
    users, items = np.nonzero(mask)
    return users.astype(np.int64), items.astype(np.int64)


class DatasetFactory(factory.Factory):
    class Meta:
        model = Dataset
        exclude = ("pairs", "density", "seed")

    num_users = 12
    num_items = 20
    density = 0.3
    seed = factory.Sequence(lambda n: n)
    pairs = factory.LazyAttribute(lambda o: random_pairs(o.num_users, o.num_items, o.density, o.seed))
    users = factory.LazyAttribute(lambda o: o.pairs[0])
    items = factory.LazyAttribute(lambda o: o.pairs[1])
    user_labels = factory.LazyAttribute(lambda o: tuple(f"u{user:03d}" for user in range(o.num_users)))
    item_labels = factory.LazyAttribute(lambda o: tuple(f"i{item:03d}" for item in range(o.num_items)))


class RatingRowFactory(factory.DictFactory):
    """One line of a MovieLens style ratings log."""

    user = factory.Faker("random_int", min=1, max=30)
    item = factory.Faker("random_int", min=1, max=60)
    rating = factory.Faker("random_element", elements=["1", "2", "3", "4", "5"])
    timestamp = factory.Faker("unix_time")


def write_ratings(path, rows, separator: str = "\t", header: bool = False) -> None:
    lines = [separator.join(["user", "item", "rating", "timestamp"])] if header else []
    lines += [separator.join(str(row[key]) for key in ("user", "item", "rating", "timestamp")) for row in rows]
    path.write_text("\n".join(lines) + "\n")


class DatasetConfigFactory(factory.Factory):
    class Meta:
        model = DatasetConfig

    path = ""
    min_interactions = 1


class SplitConfigFactory(factory.Factory):
    class Meta:
        model = SplitConfig

    protocol = Protocol.TRANSDUCTIVE
    rho = 0.6
    mu = 0.6
    eta = 0.5


class ModelConfigFactory(factory.Factory):
    class Meta:
        model = ModelConfig

    layers = 2
    dim = 8
    init_std = 0.1
    mode = Protocol.TRANSDUCTIVE


class SamplingConfigFactory(factory.Factory):
    class Meta:
        model = SamplingConfig

    n_pos = 3
    n_neg = 10
    top_t = 50


class TrainingConfigFactory(factory.Factory):
    class Meta:
        model = TrainingConfig

    batch_users = 8
    max_epochs = 3
    eval_every = 1
    patience = 2
    ks = (5, 10)
    target_k = 10


class RunConfigFactory(factory.Factory):
    class Meta:
        model = RunConfig

    class Params:
        inductive = factory.Trait(
            split=factory.SubFactory(SplitConfigFactory, protocol=Protocol.INDUCTIVE),
            model=factory.SubFactory(ModelConfigFactory, mode=Protocol.INDUCTIVE),
        )

    dataset = factory.SubFactory(DatasetConfigFactory)
    split = factory.SubFactory(SplitConfigFactory)
    model = factory.SubFactory(ModelConfigFactory)
    loss = factory.LazyFunction(LossConfig)
    sampling = factory.SubFactory(SamplingConfigFactory)
    ppr = factory.LazyFunction(lambda: PPRConfig(tol=1e-10))
    optimizer = factory.LazyFunction(lambda: OptimizerConfig(lr=0.01, l2=1e-4))
    training = factory.SubFactory(TrainingConfigFactory)
    seed = factory.LazyFunction(lambda: faker.random_int(min=0, max=10_000))
