"""Reference forecasting network: topology-gated graph convolutions over a GRU."""

from .config import (
    LayerParams,
    ModelConfig,
    ModelParams,
    init_params,
    load_checkpoint,
    save_checkpoint,
    token_config,
    traffic_config,
)
from .layers import (
    adaptive_laplacian,
    gru_cell,
    laplacian_powers,
    spatial_conv,
    temporal_conv,
    zigzag_layer,
    zpi_encoder,
)
from .model import (
    Ablation,
    backward,
    forward,
    grad_check,
    loss_metrics,
    mae_loss_and_grad,
    tiny_config,
)
from .train import (
    Adam,
    Batch,
    Dataset,
    TrainResult,
    TrainingDiverged,
    chronological_split,
    evaluate,
    predict,
    train,
    write_history_csv,
)

__all__ = [
    "Ablation", "Adam", "Batch", "Dataset", "LayerParams", "ModelConfig",
    "ModelParams", "TrainResult", "TrainingDiverged", "adaptive_laplacian",
    "backward", "chronological_split", "evaluate", "forward", "grad_check",
    "gru_cell", "init_params", "laplacian_powers", "load_checkpoint",
    "loss_metrics", "mae_loss_and_grad", "predict", "save_checkpoint",
    "spatial_conv", "temporal_conv", "tiny_config", "token_config",
    "traffic_config", "train", "write_history_csv", "zigzag_layer",
    "zpi_encoder",
]
