# Loss, optimizer, schedule, loop and checkpoints
from .loss import mse_loss
from .optim import AdamState, adam_step, cosine_lr
from .checkpoint import Checkpoint, decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint
from .loop import (
    TRACE_COLUMNS, TrainResult, Trainer, check_task, evaluator_for, read_trace, sampler_for,
    stream_for, trace_frame, train, write_trace,
)

__all__ = [
    "mse_loss", "AdamState", "adam_step", "cosine_lr",
    "Checkpoint", "decode_checkpoint", "encode_checkpoint", "load_checkpoint", "save_checkpoint",
    "TRACE_COLUMNS", "TrainResult", "Trainer", "check_task", "evaluator_for", "read_trace",
    "sampler_for", "stream_for", "trace_frame", "train", "write_trace",
]
