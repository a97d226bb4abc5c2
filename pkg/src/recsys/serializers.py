"""
Run configuration serializers.

Every group is optional in the config file; missing fields fall back to the
RECSYS_* settings.
"""

import json
from pathlib import Path

from django.conf import settings
from rest_framework import serializers

from src.domain.data.value_objects import Protocol
from src.domain.losses.value_objects import LossConfig, LossVariant
from src.domain.model.value_objects import ModelConfig, Pooling
from src.domain.ppr.value_objects import PPRConfig
from src.domain.shared.exceptions import DomainException
from src.domain.training.value_objects import (
    DatasetConfig,
    OptimizerConfig,
    RunConfig,
    SamplingConfig,
    SamplingStrategy,
    SplitConfig,
    TrainingConfig,
)

try:
    import tomllib
except ImportError:  # Python < 3.11
    tomllib = None


def setting(name):
    return lambda: getattr(settings, name)


def choices(enum_cls):
    return [member.value for member in enum_cls]


def fraction(name):
    return serializers.FloatField(min_value=0.0, max_value=1.0, default=setting(name))


class DatasetSerializer(serializers.Serializer):
    path = serializers.CharField(default="", allow_blank=True)
    rating_threshold = serializers.FloatField(default=None, allow_null=True)
    min_interactions = serializers.IntegerField(min_value=1, default=setting("RECSYS_MIN_INTERACTIONS"))


class SplitSerializer(serializers.Serializer):
    protocol = serializers.ChoiceField(choices=choices(Protocol), default=Protocol.TRANSDUCTIVE.value)
    rho = fraction("RECSYS_RHO")
    mu = fraction("RECSYS_MU")
    eta = fraction("RECSYS_ETA")


class ModelSerializer(serializers.Serializer):
    dim = serializers.IntegerField(min_value=1, default=setting("RECSYS_DIM"))
    layers = serializers.IntegerField(min_value=0, default=setting("RECSYS_LAYERS"))
    pooling = serializers.ChoiceField(choices=choices(Pooling), default=setting("RECSYS_POOLING"))
    init_std = serializers.FloatField(min_value=0.0, default=setting("RECSYS_INIT_STD"))
    # mode follows split.protocol; accepted so a stored config.json validates again
    mode = serializers.ChoiceField(choices=choices(Protocol), required=False)


class LossSerializer(serializers.Serializer):
    variant = serializers.ChoiceField(choices=choices(LossVariant), default=setting("RECSYS_LOSS"))
    tau = serializers.FloatField(min_value=0.0, default=setting("RECSYS_TAU"))
    tau_star = serializers.FloatField(min_value=0.0, default=None, allow_null=True)
    recall_levels = serializers.ListField(
        child=serializers.IntegerField(min_value=1), allow_empty=False, default=setting("RECSYS_RECALL_LEVELS")
    )
    negatives_only = serializers.BooleanField(default=False)


class SamplingSerializer(serializers.Serializer):
    strategy = serializers.ChoiceField(choices=choices(SamplingStrategy), default=setting("RECSYS_SAMPLING"))
    n_pos = serializers.IntegerField(min_value=1, default=setting("RECSYS_N_POS"))
    n_neg = serializers.IntegerField(min_value=1, default=setting("RECSYS_N_NEG"))
    top_t = serializers.IntegerField(min_value=1, allow_null=True, default=setting("RECSYS_PPR_TOP_T"))
    scale = serializers.FloatField(default=setting("RECSYS_PPR_SCALE"))
    cache_path = serializers.CharField(default=None, allow_null=True)


class PPRSerializer(serializers.Serializer):
    alpha = serializers.FloatField(min_value=0.0, max_value=1.0, default=setting("RECSYS_PPR_ALPHA"))
    tol = serializers.FloatField(min_value=0.0, default=setting("RECSYS_PPR_TOL"))
    max_iter = serializers.IntegerField(min_value=1, default=setting("RECSYS_PPR_MAX_ITER"))


class OptimizerSerializer(serializers.Serializer):
    lr = serializers.FloatField(min_value=0.0, default=setting("RECSYS_LR"))
    l2 = serializers.FloatField(min_value=0.0, default=setting("RECSYS_L2"))
    beta1 = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.9)
    beta2 = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.999)
    eps = serializers.FloatField(min_value=0.0, default=1e-8)


class TrainingSerializer(serializers.Serializer):
    batch_users = serializers.IntegerField(min_value=1, default=setting("RECSYS_BATCH_USERS"))
    max_epochs = serializers.IntegerField(min_value=1, default=setting("RECSYS_MAX_EPOCHS"))
    eval_every = serializers.IntegerField(min_value=1, default=setting("RECSYS_EVAL_EVERY"))
    patience = serializers.IntegerField(min_value=1, default=setting("RECSYS_PATIENCE"))
    ks = serializers.ListField(
        child=serializers.IntegerField(min_value=1), allow_empty=False, default=setting("RECSYS_KS")
    )
    target_k = serializers.IntegerField(min_value=1, default=setting("RECSYS_TARGET_K"))
    n_jobs = serializers.IntegerField(default=setting("RECSYS_N_JOBS"))


GROUPS = {
    "dataset": DatasetSerializer,
    "split": SplitSerializer,
    "model": ModelSerializer,
    "loss": LossSerializer,
    "sampling": SamplingSerializer,
    "ppr": PPRSerializer,
    "optimizer": OptimizerSerializer,
    "training": TrainingSerializer,
}


class RunConfigSerializer(serializers.Serializer):
    """
    Validates a run configuration file; `save()` returns the RunConfig value object.
    """

    dataset = DatasetSerializer(required=False)
    split = SplitSerializer(required=False)
    model = ModelSerializer(required=False)
    loss = LossSerializer(required=False)
    sampling = SamplingSerializer(required=False)
    ppr = PPRSerializer(required=False)
    optimizer = OptimizerSerializer(required=False)
    training = TrainingSerializer(required=False)
    seed = serializers.IntegerField(min_value=0, default=setting("RECSYS_SEED"))

    def validate(self, attrs):
        for name, group in GROUPS.items():
            if name not in attrs:
                defaults = group(data={})
                defaults.is_valid(raise_exception=True)
                attrs[name] = defaults.validated_data
        try:
            attrs["run_config"] = self._build(attrs)
        except DomainException as e:
            raise serializers.ValidationError({"non_field_errors": [e.message]})
        return attrs

    @staticmethod
    def _build(attrs) -> RunConfig:
        split = SplitConfig(**attrs["split"])
        model = {key: value for key, value in attrs["model"].items() if key != "mode"}
        return RunConfig(
            dataset=DatasetConfig(**attrs["dataset"]),
            split=split,
            model=ModelConfig(mode=split.protocol, **model),
            loss=LossConfig(**{**attrs["loss"], "recall_levels": tuple(attrs["loss"]["recall_levels"])}),
            sampling=SamplingConfig(**attrs["sampling"]),
            ppr=PPRConfig(**attrs["ppr"]),
            optimizer=OptimizerConfig(**attrs["optimizer"]),
            training=TrainingConfig(**{**attrs["training"], "ks": tuple(attrs["training"]["ks"])}),
            seed=attrs["seed"],
        )

    def create(self, validated_data) -> RunConfig:
        return validated_data["run_config"]


def read_config_file(path: Path) -> dict:
    """Parse a TOML or JSON run configuration file."""
    path = Path(path)
    if path.suffix.lower() == ".toml":
        if tomllib is None:
            raise serializers.ValidationError({"config": ["TOML configs need Python 3.11 or newer"]})
        with open(path, "rb") as handle:
            return tomllib.load(handle)
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def parse_run_config(data: dict, seed=None) -> RunConfig:
    """Validate `data` (with an optional seed override) into a RunConfig."""
    if seed is not None:
        data = {**data, "seed": seed}
    serializer = RunConfigSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.save()
