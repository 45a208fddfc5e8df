"""Experiment configuration objects and their JSON form.

A config file looks like::

    {
      "model": {"K": 2, "B": [[0.7, 0.32], [0.32, 0.75]], "pi": [0.4, 0.6]},
      "n": 200, "seed": 7, "replicates": 100,
      "contamination": {"type": "occlusion", "rate": 0.74},
      "embedding": {"d_hat": 2, "ordering": "magnitude"},
      "classifier": {"type": "src", "s": 5, "normalize": true, "variant": "plain"},
      "sweep": {"variable": "s", "grid": [1, 2, 3]},
      "output": "out.csv"
    }

``dataset`` (edge list or GML plus optional label file) replaces ``model``
for real data.
"""
from dataclasses import asdict, dataclass, field
import hashlib
import json

from .sbm import BlockModel

CONTAMINATION_TYPES = ("none", "occlusion", "reversion", "mixed")
CLASSIFIER_TYPES = ("src", "knn", "lda")
SWEEP_VARIABLES = ("s", "d_hat", "k", "rate", "n")


class ConfigError(ValueError):
    """Invalid configuration; ``errors`` lists ``field: message`` strings."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass
class ContaminationSpec:
    type: str = "none"
    rate: float = 0.0


@dataclass
class EmbeddingSpec:
    d_hat: int | str = 2
    ordering: str = "magnitude"
    strict: bool = False


@dataclass
class ClassifierSpec:
    type: str = "src"
    s: int = 5
    k: int = 1
    ridge: float = 1e-6
    normalize: bool = True
    variant: str = "plain"

    def describe(self, embedding=None):
        if self.type == "src":
            norm = "" if self.normalize else ",no-l2"
            return f"SRC(s={self.s},{self.variant}{norm})"
        d = embedding.d_hat if embedding is not None else "?"
        head = f"{self.k}NN" if self.type == "knn" else "LDA"
        return f"{head}∘ASE(d={d})"


@dataclass
class SweepSpec:
    variable: str
    grid: list


@dataclass
class DatasetSpec:
    graph: str
    format: str = "edgelist"
    labels: str | None = None
    index_base: int = 0
    augment_diagonal: bool = False


@dataclass
class ExperimentConfig:
    model: BlockModel | None = None
    dataset: DatasetSpec | None = None
    n: int = 200
    seed: int = 0
    replicates: int = 1
    contamination: ContaminationSpec = field(default_factory=ContaminationSpec)
    embedding: EmbeddingSpec = field(default_factory=EmbeddingSpec)
    classifier: ClassifierSpec = field(default_factory=ClassifierSpec)
    sweep: SweepSpec | None = None
    output: str | None = None

    @classmethod
    def from_dict(cls, d):
        errors = []

        def sub(key, typ):
            raw = d.get(key)
            if raw is None:
                return None
            if not isinstance(raw, dict):
                errors.append(f"{key}: expected an object")
                return None
            try:
                return typ(**raw)
            except TypeError as e:
                errors.append(f"{key}: {e}")
                return None

        known = {"model", "dataset", "n", "seed", "replicates", "contamination",
                 "embedding", "classifier", "sweep", "output"}
        for key in d:
            if key not in known:
                errors.append(f"{key}: unknown field")

        model = None
        if d.get("model") is not None:
            try:
                model = BlockModel.from_dict(d["model"])
            except (KeyError, TypeError, ValueError) as e:
                errors.append(f"model: {e}")
        dataset = sub("dataset", DatasetSpec)
        if ("model" in d) == ("dataset" in d):
            errors.append("model/dataset: exactly one must be given")

        cfg = cls(
            model=model,
            dataset=dataset,
            n=d.get("n", 200),
            seed=d.get("seed", 0),
            replicates=d.get("replicates", 1),
            contamination=sub("contamination", ContaminationSpec) or ContaminationSpec(),
            embedding=sub("embedding", EmbeddingSpec) or EmbeddingSpec(),
            classifier=sub("classifier", ClassifierSpec) or ClassifierSpec(),
            sweep=sub("sweep", SweepSpec),
            output=d.get("output"),
        )
        errors.extend(cfg.problems())
        if errors:
            raise ConfigError(errors)
        return cfg

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError([f"config: invalid JSON ({e})"]) from None
        if not isinstance(d, dict):
            raise ConfigError(["config: expected a JSON object"])
        return cls.from_dict(d)

    def problems(self):
        errs = []
        if not _is_int(self.n) or self.n < 1:
            errs.append("n: must be a positive integer")
        if not _is_int(self.seed) or self.seed < 0:
            errs.append("seed: must be a non-negative integer")
        if not _is_int(self.replicates) or self.replicates < 1:
            errs.append("replicates: must be a positive integer")
        c = self.contamination
        if c.type not in CONTAMINATION_TYPES:
            errs.append(f"contamination.type: must be one of {CONTAMINATION_TYPES}")
        if not isinstance(c.rate, (int, float)) or not 0 <= c.rate <= 1:
            errs.append("contamination.rate: must lie in [0, 1]")
        e = self.embedding
        if not (e.d_hat == "auto" or (_is_int(e.d_hat) and e.d_hat >= 1)):
            errs.append("embedding.d_hat: must be a positive integer or 'auto'")
        if e.ordering not in ("magnitude", "algebraic"):
            errs.append("embedding.ordering: must be 'magnitude' or 'algebraic'")
        k = self.classifier
        if k.type not in CLASSIFIER_TYPES:
            errs.append(f"classifier.type: must be one of {CLASSIFIER_TYPES}")
        if not _is_int(k.s) or k.s < 1:
            errs.append("classifier.s: must be a positive integer")
        if not _is_int(k.k) or k.k < 1:
            errs.append("classifier.k: must be a positive integer")
        if not isinstance(k.ridge, (int, float)) or k.ridge < 0:
            errs.append("classifier.ridge: must be non-negative")
        if k.variant not in ("plain", "nonnegative"):
            errs.append("classifier.variant: must be 'plain' or 'nonnegative'")
        if self.sweep is not None:
            sw = self.sweep
            if sw.variable not in SWEEP_VARIABLES:
                errs.append(f"sweep.variable: must be one of {SWEEP_VARIABLES}")
            if not isinstance(sw.grid, list) or not sw.grid:
                errs.append("sweep.grid: must be a nonempty list")
            elif sw.variable == "rate":
                if not all(isinstance(v, (int, float)) and 0 <= v <= 1 for v in sw.grid):
                    errs.append("sweep.grid: rates must lie in [0, 1]")
            elif not all(_is_int(v) and v >= 1 for v in sw.grid):
                errs.append("sweep.grid: values must be positive integers")
        return errs

    def to_dict(self):
        d = asdict(self)
        d["model"] = self.model.to_dict() if self.model is not None else None
        return {k: v for k, v in d.items() if v is not None}

    def digest(self):
        """Short SHA-256 of the canonical JSON form (output path excluded)."""
        d = self.to_dict()
        d.pop("output", None)
        text = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def _is_int(x):
    return isinstance(x, int) and not isinstance(x, bool)
