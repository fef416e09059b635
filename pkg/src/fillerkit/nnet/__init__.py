"""Minimal tensor/NN core: layers with manual backprop, losses, optimizers,
training loop, gradient checking, and model serialization."""

from .kernels import BACKEND
from .layers import (
    AvgPoolTime,
    BatchNorm,
    Conv1dTemporal,
    Conv2d,
    Dense,
    Lstm,
    MaxPoolFreq,
    NnetError,
    Relu,
    ResidualBlock,
    Sigmoid,
    Softmax,
    ToTimeMajor,
    layer_from_spec,
    sigmoid,
    softmax,
)
from .losses import binary_cross_entropy, cross_entropy
from .model import ModelFileError, ModelGraph, load_model, save_model
from .optim import Adam, Sgd, make_optimizer
from .train import TrainConfig, TrainingError, TrainResult, compute_gradients, evaluate_loss, train

__all__ = [
    "BACKEND",
    "Adam",
    "AvgPoolTime",
    "BatchNorm",
    "Conv1dTemporal",
    "Conv2d",
    "Dense",
    "Lstm",
    "MaxPoolFreq",
    "ModelFileError",
    "ModelGraph",
    "NnetError",
    "Relu",
    "ResidualBlock",
    "Sgd",
    "Sigmoid",
    "Softmax",
    "ToTimeMajor",
    "TrainConfig",
    "TrainResult",
    "TrainingError",
    "binary_cross_entropy",
    "compute_gradients",
    "cross_entropy",
    "evaluate_loss",
    "layer_from_spec",
    "load_model",
    "make_optimizer",
    "save_model",
    "sigmoid",
    "softmax",
    "train",
]
