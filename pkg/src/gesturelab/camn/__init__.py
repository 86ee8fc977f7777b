"""Cascaded multi-modal gesture generator and its training utilities."""

from .config import CamnConfig, config_from_dict
from .losses import adversarial_loss, discriminator_loss, reconstruction_loss, total_loss
from .model import CamnModel, Discriminator, GestureOutput, ModalityBatch
from .training import (
    DROPPABLE,
    TrainResult,
    generator_loss,
    gradient_check,
    make_toy_corpus,
    make_toy_word_table,
    modality_delta,
    synthesize,
    train,
    train_step,
)
from .words import load_word_table, random_word_table

__all__ = [
    "CamnConfig",
    "CamnModel",
    "Discriminator",
    "GestureOutput",
    "ModalityBatch",
    "TrainResult",
    "DROPPABLE",
    "adversarial_loss",
    "config_from_dict",
    "discriminator_loss",
    "generator_loss",
    "gradient_check",
    "load_word_table",
    "make_toy_corpus",
    "make_toy_word_table",
    "modality_delta",
    "random_word_table",
    "reconstruction_loss",
    "synthesize",
    "total_loss",
    "train",
    "train_step",
]
