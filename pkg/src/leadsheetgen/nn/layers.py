"""Dense, LSTM, and bidirectional LSTM layers with exact backward passes.

Sequence tensors are time-major: ``(T, B, features)``.  Each layer's
``forward`` returns the output plus an opaque cache; ``backward`` consumes
the output gradient and the cache and returns the input gradient together
with a dict of parameter gradients (keyed like :meth:`params`).

The LSTM gate block order is [input, forget, cell-candidate, output]; the
forget-gate bias block starts at 1.0 so early training does not forget
state wholesale.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from .ops import glorot_uniform, sigmoid


class Dense:
    """Affine map y = x W^T + b with W shaped (out_dim, in_dim)."""

    def __init__(self, in_dim, out_dim, rng=None, dtype=np.float32):
        self.in_dim = in_dim
        self.out_dim = out_dim
        if rng is None:
            self.W = np.zeros((out_dim, in_dim), dtype=dtype)
        else:
            self.W = glorot_uniform(rng, (out_dim, in_dim), dtype)
        self.b = np.zeros(out_dim, dtype=dtype)

    def params(self):
        return {"W": self.W, "b": self.b}

    def forward(self, x):
        if x.shape[-1] != self.in_dim:
            raise ShapeError(f"dense input width {x.shape[-1]}, expected {self.in_dim}")
        return x @ self.W.T + self.b, x

    def backward(self, dy, cache):
        x = cache
        flat_x = x.reshape(-1, self.in_dim)
        flat_dy = dy.reshape(-1, self.out_dim)
        grads = {"W": flat_dy.T @ flat_x, "b": flat_dy.sum(axis=0)}
        return dy @ self.W, grads


def lstm_step(W, U, b, x, h_prev, c_prev):
    """One LSTM cell update; ``x``/``h_prev``/``c_prev`` may carry a batch axis.

    i, f, o are sigmoid gates and g the tanh candidate, in block order
    [i, f, g, o] inside W, U, b:

        c = f * c_prev + i * g
        h = o * tanh(c)
    """
    hidden = U.shape[1]
    if W.shape[0] != 4 * hidden or U.shape[0] != 4 * hidden or b.shape[0] != 4 * hidden:
        raise ShapeError("LSTM parameter blocks are not 4 x hidden")
    if x.shape[-1] != W.shape[1]:
        raise ShapeError(f"LSTM input width {x.shape[-1]}, expected {W.shape[1]}")
    if h_prev.shape[-1] != hidden or c_prev.shape[-1] != hidden:
        raise ShapeError("LSTM state width does not match hidden size")
    z = x @ W.T + h_prev @ U.T + b
    i = sigmoid(z[..., :hidden])
    f = sigmoid(z[..., hidden : 2 * hidden])
    g = np.tanh(z[..., 2 * hidden : 3 * hidden])
    o = sigmoid(z[..., 3 * hidden :])
    c = f * c_prev + i * g
    h = o * np.tanh(c)
    return h, c


class LSTMLayer:
    """A unidirectional LSTM unrolled over full sequences.

    W: (4H, in_dim) input weights, U: (4H, H) recurrent weights, b: (4H,).
    """

    def __init__(self, in_dim, hidden, rng=None, dtype=np.float32):
        self.in_dim = in_dim
        self.hidden = hidden
        if rng is None:
            self.W = np.zeros((4 * hidden, in_dim), dtype=dtype)
            self.U = np.zeros((4 * hidden, hidden), dtype=dtype)
        else:
            self.W = glorot_uniform(rng, (4 * hidden, in_dim), dtype)
            self.U = glorot_uniform(rng, (4 * hidden, hidden), dtype)
        self.b = np.zeros(4 * hidden, dtype=dtype)
        self.b[hidden : 2 * hidden] = 1.0  # forget gate starts open

    def params(self):
        return {"W": self.W, "U": self.U, "b": self.b}

    def zero_state(self, batch):
        dtype = self.W.dtype
        return (
            np.zeros((batch, self.hidden), dtype=dtype),
            np.zeros((batch, self.hidden), dtype=dtype),
        )

    def step(self, x, h_prev, c_prev):
        return lstm_step(self.W, self.U, self.b, x, h_prev, c_prev)

    def forward(self, xs, h0=None, c0=None, mask=None):
        """Run the cell across ``xs`` of shape (T, B, in_dim).

        ``mask`` is an optional (T, B) 0/1 array; at masked-out steps the
        state passes through unchanged and the input never enters, so a
        padded batch behaves exactly like the unpadded sequences would.
        Returns (hs, cache) with hs shaped (T, B, hidden); ``hs`` holds the
        carried state at every step.
        """
        if xs.ndim != 3:
            raise ShapeError(f"expected (T, B, {self.in_dim}) input, got {xs.shape}")
        T, B, width = xs.shape
        if T == 0:
            raise ShapeError("empty sequence")
        if width != self.in_dim:
            raise ShapeError(f"LSTM input width {width}, expected {self.in_dim}")
        H = self.hidden
        dtype = self.W.dtype
        h = np.zeros((B, H), dtype=dtype) if h0 is None else h0
        c = np.zeros((B, H), dtype=dtype) if c0 is None else c0
        c0_saved = c

        # Input contributions for every step in one matmul.
        pre = (xs.reshape(T * B, width) @ self.W.T).reshape(T, B, 4 * H) + self.b

        gates = np.empty((T, B, 4 * H), dtype=dtype)
        cs = np.empty((T, B, H), dtype=dtype)
        tanh_cs = np.empty((T, B, H), dtype=dtype)
        hs = np.empty((T, B, H), dtype=dtype)
        h_prevs = np.empty((T, B, H), dtype=dtype)
        for t in range(T):
            h_prevs[t] = h
            z = pre[t] + h @ self.U.T
            i = sigmoid(z[:, :H])
            f = sigmoid(z[:, H : 2 * H])
            g = np.tanh(z[:, 2 * H : 3 * H])
            o = sigmoid(z[:, 3 * H :])
            c_new = f * c + i * g
            tc = np.tanh(c_new)
            h_new = o * tc
            if mask is None:
                c, h = c_new, h_new
            else:
                keep = mask[t][:, None].astype(dtype)
                c = keep * c_new + (1.0 - keep) * c
                h = keep * h_new + (1.0 - keep) * h
            gates[t, :, :H] = i
            gates[t, :, H : 2 * H] = f
            gates[t, :, 2 * H : 3 * H] = g
            gates[t, :, 3 * H :] = o
            cs[t] = c
            tanh_cs[t] = tc
            hs[t] = h
        cache = (xs, gates, cs, tanh_cs, h_prevs, c0_saved, mask)
        return hs, cache

    def backward(self, dhs, cache, dh_final=None, dc_final=None):
        """Backpropagate through time.

        ``dhs`` is the gradient w.r.t. every step's hidden output; optional
        ``dh_final``/``dc_final`` add gradient flowing into the last state.
        Returns (dxs, grads).
        """
        xs, gates, cs, tanh_cs, h_prevs, c0, mask = cache
        T, B, width = xs.shape
        H = self.hidden
        dtype = self.W.dtype

        dzs = np.empty((T, B, 4 * H), dtype=dtype)
        dh_carry = np.zeros((B, H), dtype=dtype) if dh_final is None else dh_final.copy()
        dc_carry = np.zeros((B, H), dtype=dtype) if dc_final is None else dc_final.copy()
        for t in range(T - 1, -1, -1):
            i = gates[t, :, :H]
            f = gates[t, :, H : 2 * H]
            g = gates[t, :, 2 * H : 3 * H]
            o = gates[t, :, 3 * H :]
            tc = tanh_cs[t]
            c_prev = cs[t - 1] if t > 0 else c0

            dh_total = dhs[t] + dh_carry
            dc_total = dc_carry
            if mask is None:
                dh, dc_in = dh_total, dc_total
                dh_pass = dc_pass = 0.0
            else:
                keep = mask[t][:, None].astype(dtype)
                dh = dh_total * keep
                dc_in = dc_total * keep
                dh_pass = dh_total * (1.0 - keep)
                dc_pass = dc_total * (1.0 - keep)
            do = dh * tc
            dc = dc_in + dh * o * (1.0 - tc * tc)
            dzs[t, :, :H] = dc * g * i * (1.0 - i)
            dzs[t, :, H : 2 * H] = dc * c_prev * f * (1.0 - f)
            dzs[t, :, 2 * H : 3 * H] = dc * i * (1.0 - g * g)
            dzs[t, :, 3 * H :] = do * o * (1.0 - o)
            dc_carry = dc * f + dc_pass
            dh_carry = dzs[t] @ self.U + dh_pass

        flat_dz = dzs.reshape(T * B, 4 * H)
        grads = {
            "W": flat_dz.T @ xs.reshape(T * B, width),
            "U": flat_dz.T @ h_prevs.reshape(T * B, H),
            "b": flat_dz.sum(axis=0),
        }
        dxs = (flat_dz @ self.W).reshape(T, B, width)
        return dxs, grads


class BiLSTM:
    """Two LSTMs over the sequence and its reversal, outputs concatenated.

    Output width is 2 x hidden; at every step the first half has seen the
    past of the sequence and the second half the future.
    """

    def __init__(self, in_dim, hidden, rng=None, dtype=np.float32):
        self.in_dim = in_dim
        self.hidden = hidden
        self.fwd = LSTMLayer(in_dim, hidden, rng, dtype)
        self.bwd = LSTMLayer(in_dim, hidden, rng, dtype)

    def params(self):
        out = {}
        for direction, layer in (("fwd", self.fwd), ("bwd", self.bwd)):
            for name, value in layer.params().items():
                out[f"{direction}.{name}"] = value
        return out

    def forward(self, xs, mask=None):
        if xs.ndim != 3 or xs.shape[0] == 0:
            raise ShapeError("BiLSTM expects a nonempty (T, B, in_dim) sequence")
        hf, cache_f = self.fwd.forward(xs, mask=mask)
        hb_reversed, cache_b = self.bwd.forward(
            xs[::-1].copy(), mask=None if mask is None else mask[::-1].copy()
        )
        out = np.concatenate([hf, hb_reversed[::-1]], axis=-1)
        return out, (cache_f, cache_b)

    def backward(self, dout, cache):
        cache_f, cache_b = cache
        H = self.hidden
        dxf, grads_f = self.fwd.backward(dout[..., :H], cache_f)
        dxb, grads_b = self.bwd.backward(dout[..., H:][::-1].copy(), cache_b)
        dxs = dxf + dxb[::-1]
        grads = {f"fwd.{k}": v for k, v in grads_f.items()}
        grads.update({f"bwd.{k}": v for k, v in grads_b.items()})
        return dxs, grads
