"""Forward pass, loss, analytic gradients, and the finite-difference check.

The network stacks recurrent layers.  Within a layer the spatial branch
convolves the snapshot at each window step, the temporal branch
convolves the whole window into one feature map, both are gated
channelwise by the image code of that layer's encoder, and a GRU runs
over the gated sequence; its state sequence is the next layer's input.
The final state is projected linearly to the forecast horizon.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import layers as L
from .config import ModelConfig, ModelParams, init_params

__all__ = [
    "Ablation",
    "forward",
    "backward",
    "loss_metrics",
    "mae_loss_and_grad",
    "grad_check",
    "tiny_config",
]


@dataclass(frozen=True)
class Ablation:
    """Switches: gate to ones, or zero a branch before combination."""

    no_zigzag: bool = False
    no_spatial: bool = False
    no_temporal: bool = False


def _ensure_finite(name: str, arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        raise FloatingPointError(f"non-finite values produced in {name}")


def forward(
    x_win: np.ndarray,
    image: np.ndarray,
    params: ModelParams,
    config: ModelConfig,
    ablation: Ablation = Ablation(),
    z_override: list[np.ndarray] | None = None,
    want_cache: bool = False,
):
    """Predict (horizon, n_nodes, out_features) from a window and its image.

    ``z_override`` injects fixed gate vectors (one per layer) in place of
    the encoder output; the no_zigzag ablation is exactly a ones
    override.  Returns the prediction, or (prediction, cache) when
    ``want_cache`` is set.
    """
    x_win = np.asarray(x_win, dtype=np.float64)
    image = np.asarray(image, dtype=np.float64)
    tau, n, feat = x_win.shape
    if (tau, n, feat) != (config.window, config.n_nodes, config.in_features):
        raise ValueError(f"input window has shape {x_win.shape}, expected "
                         f"({config.window}, {config.n_nodes}, {config.in_features})")
    if image.shape != (config.zpi_resolution, config.zpi_resolution):
        raise ValueError(f"image has shape {image.shape}, expected "
                         f"({config.zpi_resolution}, {config.zpi_resolution})")

    lap, lap_cache = L.adaptive_laplacian(params.embedding)
    _ensure_finite("adaptive_laplacian", lap)
    powers = L.laplacian_powers(lap, config.laplacian_order)

    seq = x_win
    layer_caches = []
    half = config.half_hidden
    for li, lp in enumerate(params.layers):
        if ablation.no_zigzag:
            z, enc_cache = np.ones(half), None
        elif z_override is not None:
            z, enc_cache = np.asarray(z_override[li], dtype=np.float64), None
        else:
            z, enc_cache = L.zpi_encoder(image, lp, config.cnn_stride)
        s_out, s_cache = L.spatial_conv_window(seq, powers, params.embedding, lp.spatial_w)
        t_out, _, t_cache = L.temporal_conv(seq, powers, params.embedding, lp.temporal_w, params.time_mix)
        s_scaled = np.zeros_like(s_out) if ablation.no_spatial else s_out * z
        t_scaled = np.zeros_like(t_out) if ablation.no_temporal else t_out * z
        _ensure_finite(f"layer {li} branches", s_scaled)
        gru_in = np.concatenate(
            [s_scaled, np.broadcast_to(t_scaled, s_scaled.shape)], axis=2
        )
        state = np.zeros((n, config.hidden))
        step_caches = []
        states = np.empty((tau, n, config.hidden))
        for i in range(tau):
            state, c = L.gru_cell(state, gru_in[i], lp)
            states[i] = state
            step_caches.append(c)
        _ensure_finite(f"layer {li} recurrence", states)
        layer_caches.append((enc_cache, s_cache, t_cache, s_out, t_out, z, step_caches))
        seq = states

    final = seq[-1]
    flat = final @ params.out_w + params.out_b
    pred = np.moveaxis(flat.reshape(n, config.horizon, config.out_features), 0, 1)
    _ensure_finite("output projection", pred)
    if not want_cache:
        return pred
    cache = (x_win, params, config, ablation, z_override, lap, lap_cache, powers, layer_caches, final)
    return pred, cache


def backward(cache, dpred: np.ndarray) -> ModelParams:
    """Gradients of a scalar loss w.r.t. every parameter array."""
    (x_win, params, config, ablation, z_override, lap, lap_cache, powers,
     layer_caches, final) = cache
    tau, n = config.window, config.n_nodes
    half = config.half_hidden
    grads = params.zeros_like()

    dflat = np.moveaxis(np.asarray(dpred, dtype=np.float64), 0, 1).reshape(n, -1)
    grads.out_w += final.T @ dflat
    grads.out_b += dflat.sum(axis=0)
    dstates_ext = np.zeros((tau, n, config.hidden))
    dstates_ext[-1] = dflat @ params.out_w.T

    dpowers = np.zeros_like(powers)
    dembed = np.zeros_like(params.embedding)

    for li in range(config.num_layers - 1, -1, -1):
        enc_cache, s_cache, t_cache, s_out, t_out, z, step_caches = layer_caches[li]
        glp = grads.layers[li]

        dgru_in = np.empty((tau, n, config.hidden))
        do_prev = np.zeros((n, config.hidden))
        for i in range(tau - 1, -1, -1):
            do = dstates_ext[i] + do_prev
            do_prev, dh_in, dwz, dwr, dwo, dbz, dbr, dbo = L.gru_cell_backward(step_caches[i], do)
            dgru_in[i] = dh_in
            glp.gru_wz += dwz
            glp.gru_wr += dwr
            glp.gru_wo += dwo
            glp.gru_bz += dbz
            glp.gru_br += dbr
            glp.gru_bo += dbo

        ds_scaled = dgru_in[:, :, :half]
        dt_scaled = dgru_in[:, :, half:].sum(axis=0)

        dz = np.zeros(half)
        if ablation.no_spatial:
            ds_out = np.zeros_like(s_out)
        else:
            ds_out = ds_scaled * z
            dz += np.einsum("ino,ino->o", ds_scaled, s_out)
        if ablation.no_temporal:
            dt_out = np.zeros_like(t_out)
        else:
            dt_out = dt_scaled * z
            dz += np.einsum("no,no->o", dt_scaled, t_out)

        dseq_s, dpow_s, demb_s, dw_s = L.spatial_conv_window_backward(s_cache, ds_out)
        dseq_t, dpow_t, demb_t, dw_t, dq = L.temporal_conv_backward(t_cache, dt_out)
        glp.spatial_w += dw_s
        glp.temporal_w += dw_t
        grads.time_mix += dq
        dpowers += dpow_s + dpow_t
        dembed += demb_s + demb_t

        if enc_cache is not None:
            dk1, db1, dk2, db2, dzw, dzb = L.zpi_encoder_backward(enc_cache, dz)
            glp.conv1_k += dk1
            glp.conv1_b += db1
            glp.conv2_k += dk2
            glp.conv2_b += db2
            glp.zmap_w += dzw
            glp.zmap_b += dzb

        dstates_ext = dseq_s + dseq_t  # gradient on the previous layer's state sequence

    dlap = L.laplacian_powers_backward(powers, dpowers, lap)
    dembed += L.adaptive_laplacian_backward(lap_cache, dlap)
    grads.embedding += dembed
    return grads


def loss_metrics(pred: np.ndarray, target: np.ndarray) -> tuple[float, float, float]:
    """(MAE, RMSE, MAPE%); MAPE skips target entries below 1e-6 magnitude."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch {pred.shape} vs {target.shape}")
    diff = pred - target
    mae = float(np.mean(np.abs(diff)))
    rmse = float(np.sqrt(np.mean(diff * diff)))
    mask = np.abs(target) >= 1e-6
    mape = float(np.mean(np.abs(diff[mask] / target[mask])) * 100.0) if mask.any() else 0.0
    return mae, rmse, mape


def mae_loss_and_grad(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    diff = pred - target
    mae = float(np.mean(np.abs(diff)))
    return mae, np.sign(diff) / diff.size


def tiny_config(seed: int = 0) -> ModelConfig:
    """Desk-size configuration for gradient checking."""
    return ModelConfig(
        n_nodes=6, in_features=2, out_features=1, embed_dim=2, laplacian_order=2,
        window=4, horizon=2, hidden=4, num_layers=2, zpi_resolution=16,
        batch_size=1, epochs=1, seed=seed,
    )


def grad_check(config: ModelConfig | None = None, epsilon: float = 1e-5, seed: int = 0) -> float:
    """Worst relative error between analytic and central-difference gradients.

    Relative error uses max(|analytic|, |numeric|, 1e-3) as denominator
    so near-zero entries compare in absolute terms.
    """
    if config is None:
        config = tiny_config(seed)
    rng = np.random.default_rng(seed)
    params = init_params(config, rng)
    x_win = rng.uniform(0.0, 1.0, (config.window, config.n_nodes, config.in_features))
    image = rng.uniform(0.0, 1.0, (config.zpi_resolution, config.zpi_resolution))
    target = rng.uniform(0.0, 1.0, (config.horizon, config.n_nodes, config.out_features))

    pred, cache = forward(x_win, image, params, config, want_cache=True)
    _, dpred = mae_loss_and_grad(pred, target)
    grads = backward(cache, dpred)

    worst = 0.0
    for name, arr in params.named_arrays():
        analytic = grads.get(name)
        flat = arr.reshape(-1)
        aflat = analytic.reshape(-1)
        for idx in range(flat.size):
            keep = flat[idx]
            flat[idx] = keep + epsilon
            up, _ = mae_loss_and_grad(forward(x_win, image, params, config), target)
            flat[idx] = keep - epsilon
            dn, _ = mae_loss_and_grad(forward(x_win, image, params, config), target)
            flat[idx] = keep
            numeric = (up - dn) / (2.0 * epsilon)
            err = abs(aflat[idx] - numeric) / max(abs(aflat[idx]), abs(numeric), 1e-3)
            worst = max(worst, err)
    return worst
