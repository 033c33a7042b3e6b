"""Network layers with hand-derived backward passes.

Every forward returns its output plus an opaque cache; the matching
backward consumes the cache and the output gradient.  All math is
float64 so the finite-difference gradient check is meaningful.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

__all__ = [
    "adaptive_laplacian",
    "adaptive_laplacian_backward",
    "laplacian_powers",
    "laplacian_powers_backward",
    "spatial_conv",
    "spatial_conv_window",
    "spatial_conv_window_backward",
    "temporal_conv",
    "temporal_conv_backward",
    "zpi_encoder",
    "zpi_encoder_output_size",
    "zpi_encoder_backward",
    "zigzag_layer",
    "gru_cell",
    "gru_cell_backward",
]


def adaptive_laplacian(embedding: np.ndarray):
    """Row-stochastic similarity matrix: softmax(relu(E E^T)) per row."""
    scores = embedding @ embedding.T
    act = np.maximum(scores, 0.0)
    act_max = act.max(axis=1, keepdims=True)
    ex = np.exp(act - act_max)
    lap = ex / ex.sum(axis=1, keepdims=True)
    cache = (embedding, scores > 0.0, lap)
    return lap, cache


def adaptive_laplacian_backward(cache, dlap: np.ndarray) -> np.ndarray:
    embedding, mask, lap = cache
    dact = lap * (dlap - (dlap * lap).sum(axis=1, keepdims=True))
    dscores = dact * mask
    return (dscores + dscores.T) @ embedding


def laplacian_powers(lap: np.ndarray, order: int) -> np.ndarray:
    """Stack [I, L, L^2, ..., L^order], shape (order+1, N, N)."""
    n = lap.shape[0]
    powers = np.empty((order + 1, n, n))
    powers[0] = np.eye(n)
    for k in range(1, order + 1):
        powers[k] = lap @ powers[k - 1]
    return powers


def laplacian_powers_backward(powers: np.ndarray, dpowers: np.ndarray, lap: np.ndarray) -> np.ndarray:
    """Gradient w.r.t. L given gradients for every power slice."""
    dpow = dpowers.copy()
    dlap = np.zeros_like(lap)
    for k in range(dpow.shape[0] - 1, 0, -1):
        dlap += dpow[k] @ powers[k - 1].T
        dpow[k - 1] += lap.T @ dpow[k]
    return dlap


def spatial_conv(h: np.ndarray, powers: np.ndarray, embedding: np.ndarray, weight: np.ndarray) -> np.ndarray:
    """Single-slice graph convolution, out[n,o] = sum_kfe (L^k h)[n,f] E[n,e] W[e,k,f,o]."""
    out, _ = spatial_conv_window(h[None], powers, embedding, weight)
    return out[0]


def spatial_conv_window(h_win, powers, embedding, weight):
    propagated = np.einsum("knm,imf->iknf", powers, h_win)
    out = np.einsum("iknf,ne,ekfo->ino", propagated, embedding, weight)
    cache = (propagated, h_win, powers, embedding, weight)
    return out, cache


def spatial_conv_window_backward(cache, dout):
    propagated, h_win, powers, embedding, weight = cache
    dprop = np.einsum("ino,ne,ekfo->iknf", dout, embedding, weight)
    dembed = np.einsum("ino,iknf,ekfo->ne", dout, propagated, weight)
    dweight = np.einsum("ino,iknf,ne->ekfo", dout, propagated, embedding)
    dh_win = np.einsum("knm,iknf->imf", powers, dprop)
    dpowers = np.einsum("iknf,imf->knm", dprop, h_win)
    return dh_win, dpowers, dembed, dweight


def temporal_conv(h_win, powers, embedding, weight, time_mix):
    """Window graph convolution followed by a learned mix over time slices.

    The per-slice contraction matches the spatial one but the weight has
    no power index (power slices enter uniformly); the result is one
    half-width feature map per window.
    """
    propagated = np.einsum("knm,imf->iknf", powers, h_win)
    slices = np.einsum("iknf,ne,efo->ino", propagated, embedding, weight)
    out = np.einsum("i,ino->no", time_mix, slices)
    cache = (propagated, h_win, powers, embedding, weight, time_mix, slices)
    return out, slices, cache


def temporal_conv_backward(cache, dout):
    propagated, h_win, powers, embedding, weight, time_mix, slices = cache
    dtime_mix = np.einsum("no,ino->i", dout, slices)
    dslices = time_mix[:, None, None] * dout[None]
    dprop_nf = np.einsum("ino,ne,efo->inf", dslices, embedding, weight)
    k_plus_1 = propagated.shape[1]
    dprop = np.broadcast_to(dprop_nf[:, None], (dprop_nf.shape[0], k_plus_1) + dprop_nf.shape[1:])
    dembed = np.einsum("ino,iknf,efo->ne", dslices, propagated, weight)
    dweight = np.einsum("ino,iknf,ne->efo", dslices, propagated, embedding)
    dh_win = np.einsum("knm,iknf->imf", powers, dprop)
    dpowers = np.einsum("iknf,imf->knm", dprop, h_win)
    return dh_win, dpowers, dembed, dweight, dtime_mix


def _conv_forward(x, kernel, bias, stride):
    """Valid-padding strided convolution; x (Cin,H,W) -> (Cout,Ho,Wo)."""
    _, h, w = x.shape
    _, _, kh, kw = kernel.shape
    ho = (h - kh) // stride + 1
    wo = (w - kw) // stride + 1
    out = np.tile(bias[:, None, None], (1, ho, wo))
    for ky in range(kh):
        for kx in range(kw):
            window = x[:, ky : ky + stride * ho : stride, kx : kx + stride * wo : stride]
            out += np.einsum("oc,chw->ohw", kernel[:, :, ky, kx], window)
    return out


def _conv_backward(x, kernel, stride, dout):
    _, _, kh, kw = kernel.shape
    _, ho, wo = dout.shape
    dx = np.zeros_like(x)
    dkernel = np.zeros_like(kernel)
    dbias = dout.sum(axis=(1, 2))
    for ky in range(kh):
        for kx in range(kw):
            window = x[:, ky : ky + stride * ho : stride, kx : kx + stride * wo : stride]
            dkernel[:, :, ky, kx] = np.einsum("ohw,chw->oc", dout, window)
            dx[:, ky : ky + stride * ho : stride, kx : kx + stride * wo : stride] += np.einsum(
                "oc,ohw->chw", kernel[:, :, ky, kx], dout
            )
    return dx, dkernel, dbias


def zpi_encoder_output_size(p: int, kernel: int, stride: int) -> int:
    """Feature-map side length after the two strided convolutions."""
    s1 = (p - kernel) // stride + 1
    if s1 < kernel:
        raise ValueError(f"image side {p} too small for two {kernel}x{kernel} stride-{stride} convolutions")
    return (s1 - kernel) // stride + 1


def zpi_encoder(image, layer, stride: int):
    """Two ReLU convolutions, a global max per channel, and a linear map.

    Max-pooling in 5x5 regions followed by a global max over the pooled
    map collapses to one global max per channel, which is what is
    computed; gradients route to the argmax position.
    """
    zpi_encoder_output_size(image.shape[0], layer.conv1_k.shape[2], stride)
    x0 = image[None]
    pre1 = _conv_forward(x0, layer.conv1_k, layer.conv1_b, stride)
    r1 = np.maximum(pre1, 0.0)
    pre2 = _conv_forward(r1, layer.conv2_k, layer.conv2_b, stride)
    r2 = np.maximum(pre2, 0.0)
    flat = r2.reshape(r2.shape[0], -1)
    arg = flat.argmax(axis=1)
    maxvals = flat[np.arange(flat.shape[0]), arg]
    z = maxvals @ layer.zmap_w + layer.zmap_b
    cache = (image, x0, pre1, r1, pre2, r2, arg, maxvals, layer, stride)
    return z, cache


def zpi_encoder_backward(cache, dz):
    """Returns gradients for (conv1_k, conv1_b, conv2_k, conv2_b, zmap_w, zmap_b)."""
    image, x0, pre1, r1, pre2, r2, arg, maxvals, layer, stride = cache
    dzmap_w = np.outer(maxvals, dz)
    dzmap_b = dz.copy()
    dmax = layer.zmap_w @ dz
    dr2 = np.zeros_like(r2)
    flat = dr2.reshape(dr2.shape[0], -1)
    flat[np.arange(flat.shape[0]), arg] = dmax
    dpre2 = dr2 * (pre2 > 0.0)
    dr1, dconv2_k, dconv2_b = _conv_backward(r1, layer.conv2_k, stride, dpre2)
    dpre1 = dr1 * (pre1 > 0.0)
    _, dconv1_k, dconv1_b = _conv_backward(x0, layer.conv1_k, stride, dpre1)
    return dconv1_k, dconv1_b, dconv2_k, dconv2_b, dzmap_w, dzmap_b


def zigzag_layer(h_spatial, h_temporal, z):
    """Channelwise gate by the image code, then channel concatenation."""
    return np.concatenate([h_spatial * z, h_temporal * z], axis=-1)


def gru_cell(o_prev, h_in, layer):
    """One gated recurrent step on per-node feature rows."""
    cat = np.concatenate([o_prev, h_in], axis=1)
    z = expit(cat @ layer.gru_wz + layer.gru_bz)
    r = expit(cat @ layer.gru_wr + layer.gru_br)
    cat_o = np.concatenate([r * o_prev, h_in], axis=1)
    o_tilde = np.tanh(cat_o @ layer.gru_wo + layer.gru_bo)
    o = z * o_prev + (1.0 - z) * o_tilde
    cache = (o_prev, h_in, cat, z, r, cat_o, o_tilde, layer)
    return o, cache


def gru_cell_backward(cache, do):
    o_prev, h_in, cat, z, r, cat_o, o_tilde, layer = cache
    hidden = o_prev.shape[1]
    dz = do * (o_prev - o_tilde)
    do_tilde = do * (1.0 - z)
    do_prev = do * z

    da_o = do_tilde * (1.0 - o_tilde * o_tilde)
    dw_o = cat_o.T @ da_o
    db_o = da_o.sum(axis=0)
    dcat_o = da_o @ layer.gru_wo.T
    dro = dcat_o[:, :hidden]
    dh_in = dcat_o[:, hidden:].copy()
    dr = dro * o_prev
    do_prev += dro * r

    da_z = dz * z * (1.0 - z)
    da_r = dr * r * (1.0 - r)
    dw_z = cat.T @ da_z
    db_z = da_z.sum(axis=0)
    dw_r = cat.T @ da_r
    db_r = da_r.sum(axis=0)
    dcat = da_z @ layer.gru_wz.T + da_r @ layer.gru_wr.T
    do_prev += dcat[:, :hidden]
    dh_in += dcat[:, hidden:]
    return do_prev, dh_in, dw_z, dw_r, dw_o, db_z, db_r, db_o
