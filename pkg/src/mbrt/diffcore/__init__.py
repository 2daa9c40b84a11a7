"""Differentiable-numerics kernel: small classifiers, losses, update rules."""

from mbrt.diffcore.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from mbrt.diffcore.loss import grad_logits_ce, loss_ce, softmax
from mbrt.diffcore.net import (
    Batch,
    ClassifierParams,
    Net,
    ParamLayout,
    build_net,
    ce_value_and_grad,
    forward_classifier,
    grad_input,
    grad_input_batch,
    grad_params,
    init_params,
    make_classifier,
    net_backward,
    net_forward,
)
from mbrt.diffcore.optim import OptimState, update_step

PAPER_ARCH_TOKENS = "c32-3,c64-3,p2,c128-3,p2,d0.25,flat,fc128,d0.5,fc10"


def paper_arch(height: int = 32, width: int = 32, channels: int = 3, width_scale: float = 1.0,
               num_classes: int = 10, dropout: bool = True) -> str:
    """The reference architecture, with channel widths scaled for desk runs."""
    c1, c2, c3, fc = (max(1, round(width_scale * n)) for n in (32, 64, 128, 128))
    tokens = [f"in{channels}x{height}x{width}", f"c{c1}-3", f"c{c2}-3", "p2", f"c{c3}-3", "p2"]
    if dropout:
        tokens.append("d0.25")
    tokens += ["flat", f"fc{fc}"]
    if dropout:
        tokens.append("d0.5")
    tokens.append(f"fc{num_classes}")
    return ",".join(tokens)


__all__ = [
    "Batch",
    "Checkpoint",
    "ClassifierParams",
    "Net",
    "OptimState",
    "ParamLayout",
    "PAPER_ARCH_TOKENS",
    "build_net",
    "ce_value_and_grad",
    "forward_classifier",
    "grad_input",
    "grad_input_batch",
    "grad_logits_ce",
    "grad_params",
    "init_params",
    "load_checkpoint",
    "loss_ce",
    "make_classifier",
    "net_backward",
    "net_forward",
    "paper_arch",
    "save_checkpoint",
    "softmax",
    "update_step",
]
