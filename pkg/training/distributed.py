"""
Data-parallel lifecycle: process group setup/teardown and gradient averaging
"""

import logging
import os

import torch
import torch.distributed as dist

from config import AppConfig

logger = logging.getLogger(__name__)

DEFAULT_BACKEND = "gloo"


def is_distributed():
    return dist.is_available() and dist.is_initialized()


def world_size():
    return dist.get_world_size() if is_distributed() else 1


def rank():
    return dist.get_rank() if is_distributed() else 0


def setup_distributed(worker_rank, size, backend=DEFAULT_BACKEND):
    """Join the process group of size workers"""
    os.environ.setdefault("MASTER_ADDR", AppConfig.MASTER_ADDR)
    os.environ.setdefault("MASTER_PORT", str(AppConfig.MASTER_PORT))
    dist.init_process_group(backend, rank=worker_rank, world_size=size)
    logger.info(f"Worker {worker_rank}/{size} joined process group ({backend})")


def teardown_distributed():
    """Leave the process group and release cached device memory; idempotent"""
    if is_distributed():
        dist.barrier()
        dist.destroy_process_group()
    if torch.cuda.is_available():
        torch.cuda.empty_cache()


def broadcast_parameters(model, source=0):
    """Copy rank source's parameters and buffers to every replica"""
    if not is_distributed():
        return model
    for tensor in list(model.parameters()) + list(model.buffers()):
        dist.broadcast(tensor.data, source)
    return model


def average_gradients(model):
    """All-reduce and average gradients of the trainable parameters"""
    if not is_distributed():
        return model
    size = dist.get_world_size()
    for parameter in model.parameters():
        if parameter.requires_grad and parameter.grad is not None:
            dist.all_reduce(parameter.grad, op=dist.ReduceOp.SUM)
            parameter.grad /= size
    return model


def reduce_mean(value):
    """Mean of a Python scalar over all workers"""
    if not is_distributed():
        return float(value)
    tensor = torch.tensor([float(value)], dtype=torch.float64)
    dist.all_reduce(tensor, op=dist.ReduceOp.SUM)
    return float(tensor.item() / dist.get_world_size())


def any_worker(flag):
    """True when flag is set on at least one worker"""
    if not is_distributed():
        return bool(flag)
    tensor = torch.tensor([1.0 if flag else 0.0], dtype=torch.float64)
    dist.all_reduce(tensor, op=dist.ReduceOp.MAX)
    return bool(tensor.item() > 0)
