"""Desk-scale translation networks: encoders, decoders, discriminators.

Each network is a fixed 2-3 layer convolutional stack over a flat parameter
vector, with hand-written forward/backward passes built from the diffcore
layer primitives.  Encoders split an image into an unbounded spatial content
code and a low-dimensional style vector; decoders map (content, style) back to
an image through a bounded output nonlinearity; discriminators emit a logit
whose sigmoid is the real-data probability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mbrt.diffcore import layers as L
from mbrt.diffcore.net import ParamLayout
from mbrt.errors import InputError
from mbrt.seeding import substream


def _init(layout: ParamLayout, rng, dtype=np.float64) -> np.ndarray:
    w = np.zeros(layout.total, dtype=dtype)
    for name, shape, offset, size in layout.entries:
        if name.endswith(".b"):
            continue
        fan_in = int(np.prod(shape[1:])) if len(shape) == 4 else shape[0]
        limit = 1.0 / np.sqrt(fan_in)
        w[offset : offset + size] = rng.uniform(-limit, limit, size=size)
    return w


@dataclass(frozen=True)
class NetConfig:
    image_shape: tuple = (3, 8, 8)
    hidden: int = 16
    content_channels: int = 8
    style_dim: int = 2
    output_gain: float = 0.1  # init scale of decoder output layers

    def __post_init__(self):
        c, h, w = self.image_shape
        if h % 4 or w % 4:
            raise InputError(f"discriminator pooling needs H, W divisible by 4, got {h}x{w}")

    def encode_str(self) -> str:
        c, h, w = self.image_shape
        return (f"munit:in{c}x{h}x{w},hidden{self.hidden},content{self.content_channels},"
                f"style{self.style_dim},gain{self.output_gain!r}")

    @staticmethod
    def from_str(text: str) -> "NetConfig":
        if not text.startswith("munit:"):
            raise InputError(f"not a translation-model descriptor: {text!r}")
        fields = text[len("munit:") :].split(",")
        shape = tuple(int(v) for v in fields[0][2:].split("x"))
        vals = {"gain": 0.1}
        for f in fields[1:]:
            for key, conv in (("hidden", int), ("content", int), ("style", int), ("gain", float)):
                if f.startswith(key):
                    vals[key] = conv(f[len(key) :])
        return NetConfig(shape, vals["hidden"], vals["content"], vals["style"], vals["gain"])


class Encoder:
    """x -> (content (N, Cc, H, W), style (N, S)).

    Content branch: conv-relu-conv, full resolution.  Style branch:
    conv-relu-pool-conv-relu-global mean-fc.
    """

    def __init__(self, cfg: NetConfig):
        self.cfg = cfg
        c = cfg.image_shape[0]
        f, f2, cc = cfg.hidden, 2 * cfg.hidden, cfg.content_channels
        self.layout = ParamLayout.build([
            ("cnt0.w", (f, c, 3, 3)), ("cnt0.b", (f,)),
            ("cnt1.w", (cc, f, 3, 3)), ("cnt1.b", (cc,)),
            ("sty0.w", (f, c, 3, 3)), ("sty0.b", (f,)),
            ("sty1.w", (f2, f, 3, 3)), ("sty1.b", (f2,)),
            ("sty2.w", (f2, cfg.style_dim)), ("sty2.b", (cfg.style_dim,)),
        ])

    def forward(self, w, x):
        v = self.layout.view
        h0, c0 = L.conv2d_forward(x, v(w, "cnt0.w"), v(w, "cnt0.b"), 1)
        a0, m0 = L.relu_forward(h0)
        content, c1 = L.conv2d_forward(a0, v(w, "cnt1.w"), v(w, "cnt1.b"), 1)
        s0, sc0 = L.conv2d_forward(x, v(w, "sty0.w"), v(w, "sty0.b"), 1)
        sa0, sm0 = L.relu_forward(s0)
        sp, spc = L.maxpool2_forward(sa0)
        s1, sc1 = L.conv2d_forward(sp, v(w, "sty1.w"), v(w, "sty1.b"), 1)
        sa1, sm1 = L.relu_forward(s1)
        g, gc = L.global_mean_forward(sa1)
        style, fc = L.fc_forward(g, v(w, "sty2.w"), v(w, "sty2.b"))
        cache = (c0, m0, c1, sc0, sm0, spc, sc1, sm1, gc, fc)
        return content, style, cache

    def backward(self, cache, dcontent, dstyle):
        c0, m0, c1, sc0, sm0, spc, sc1, sm1, gc, fc = cache
        dw = np.zeros(self.layout.total, dtype=dcontent.dtype)
        v = self.layout.view
        da0, dw1, db1 = L.conv2d_backward(dcontent, c1)
        v(dw, "cnt1.w")[...] = dw1
        v(dw, "cnt1.b")[...] = db1
        dh0 = L.relu_backward(da0, m0)
        dx_c, dw0, db0 = L.conv2d_backward(dh0, c0)
        v(dw, "cnt0.w")[...] = dw0
        v(dw, "cnt0.b")[...] = db0
        dg, dwf, dbf = L.fc_backward(dstyle, fc)
        v(dw, "sty2.w")[...] = dwf
        v(dw, "sty2.b")[...] = dbf
        dsa1 = L.global_mean_backward(dg, gc)
        ds1 = L.relu_backward(dsa1, sm1)
        dsp, dws1, dbs1 = L.conv2d_backward(ds1, sc1)
        v(dw, "sty1.w")[...] = dws1
        v(dw, "sty1.b")[...] = dbs1
        dsa0 = L.maxpool2_backward(dsp, spc)
        ds0 = L.relu_backward(dsa0, sm0)
        dx_s, dws0, dbs0 = L.conv2d_backward(ds0, sc0)
        v(dw, "sty0.w")[...] = dws0
        v(dw, "sty0.b")[...] = dbs0
        return dw, dx_c + dx_s


class Decoder:
    """(content, style) -> image in (0, 1): broadcast-concat, conv-relu-conv-sigmoid."""

    def __init__(self, cfg: NetConfig):
        self.cfg = cfg
        c = cfg.image_shape[0]
        f, cc, s = cfg.hidden, cfg.content_channels, cfg.style_dim
        self.layout = ParamLayout.build([
            ("dec0.w", (f, cc + s, 3, 3)), ("dec0.b", (f,)),
            ("dec1.w", (c, f, 3, 3)), ("dec1.b", (c,)),
        ])

    def forward(self, w, content, style):
        v = self.layout.view
        z, cb = L.concat_broadcast_forward(content, style)
        h0, c0 = L.conv2d_forward(z, v(w, "dec0.w"), v(w, "dec0.b"), 1)
        a0, m0 = L.relu_forward(h0)
        h1, c1 = L.conv2d_forward(a0, v(w, "dec1.w"), v(w, "dec1.b"), 1)
        img, sg = L.sigmoid_forward(h1)
        return img, (cb, c0, m0, c1, sg)

    def backward(self, cache, dimg):
        cb, c0, m0, c1, sg = cache
        dw = np.zeros(self.layout.total, dtype=dimg.dtype)
        v = self.layout.view
        dh1 = L.sigmoid_backward(dimg, sg)
        da0, dw1, db1 = L.conv2d_backward(dh1, c1)
        v(dw, "dec1.w")[...] = dw1
        v(dw, "dec1.b")[...] = db1
        dh0 = L.relu_backward(da0, m0)
        dz, dw0, db0 = L.conv2d_backward(dh0, c0)
        v(dw, "dec0.w")[...] = dw0
        v(dw, "dec0.b")[...] = db0
        dcontent, dstyle = L.concat_broadcast_backward(dz, cb)
        return dw, dcontent, dstyle


class Discriminator:
    """x -> real-data logit (N,); the probability is sigmoid(logit)."""

    def __init__(self, cfg: NetConfig):
        self.cfg = cfg
        c, h, wd = cfg.image_shape
        f, f2 = cfg.hidden, 2 * cfg.hidden
        self.flat_dim = f2 * (h // 4) * (wd // 4)
        self.layout = ParamLayout.build([
            ("dis0.w", (f, c, 3, 3)), ("dis0.b", (f,)),
            ("dis1.w", (f2, f, 3, 3)), ("dis1.b", (f2,)),
            ("dis2.w", (self.flat_dim, 1)), ("dis2.b", (1,)),
        ])

    def forward(self, w, x):
        v = self.layout.view
        h0, c0 = L.conv2d_forward(x, v(w, "dis0.w"), v(w, "dis0.b"), 1)
        a0, m0 = L.relu_forward(h0)
        p0, pc0 = L.maxpool2_forward(a0)
        h1, c1 = L.conv2d_forward(p0, v(w, "dis1.w"), v(w, "dis1.b"), 1)
        a1, m1 = L.relu_forward(h1)
        p1, pc1 = L.maxpool2_forward(a1)
        flat_shape = p1.shape
        z, fc = L.fc_forward(p1.reshape(len(p1), -1), v(w, "dis2.w"), v(w, "dis2.b"))
        return z[:, 0], (c0, m0, pc0, c1, m1, pc1, flat_shape, fc)

    def backward(self, cache, dz):
        c0, m0, pc0, c1, m1, pc1, flat_shape, fc = cache
        dw = np.zeros(self.layout.total, dtype=dz.dtype)
        v = self.layout.view
        dflat, dwf, dbf = L.fc_backward(dz[:, None], fc)
        v(dw, "dis2.w")[...] = dwf
        v(dw, "dis2.b")[...] = dbf
        dp1 = dflat.reshape(flat_shape)
        da1 = L.maxpool2_backward(dp1, pc1)
        dh1 = L.relu_backward(da1, m1)
        dp0, dw1, db1 = L.conv2d_backward(dh1, c1)
        v(dw, "dis1.w")[...] = dw1
        v(dw, "dis1.b")[...] = db1
        da0 = L.maxpool2_backward(dp0, pc0)
        dh0 = L.relu_backward(da0, m0)
        dx, dw0, db0 = L.conv2d_backward(dh0, c0)
        v(dw, "dis0.w")[...] = dw0
        v(dw, "dis0.b")[...] = db0
        return dw, dx


GEN_PARTS = ("enc_a", "enc_b", "dec_a", "dec_b")
DIS_PARTS = ("dis_a", "dis_b")
ALL_PARTS = GEN_PARTS + DIS_PARTS


class TranslationModel:
    """Encoder/decoder/discriminator pairs for two unpaired image domains."""

    def __init__(self, cfg: NetConfig, params: dict | None = None, seed: int = 0):
        self.cfg = cfg
        self.enc = Encoder(cfg)
        self.dec = Decoder(cfg)
        self.dis = Discriminator(cfg)
        if params is None:
            rng = substream(seed, "munit-init")
            params = {}
            for name in ALL_PARTS:
                net = {"enc": self.enc, "dec": self.dec, "dis": self.dis}[name[:3]]
                params[name] = _init(net.layout, rng)
                if name.startswith("dec"):
                    # scaled-down output layer: fresh decoders emit near-flat
                    # images instead of random projections of their input
                    self.dec.layout.view(params[name], "dec1.w")[...] *= cfg.output_gain
        self.params = params

    def copy(self) -> "TranslationModel":
        return TranslationModel(self.cfg, {k: v.copy() for k, v in self.params.items()})

    @property
    def style_dim(self) -> int:
        return self.cfg.style_dim

    def encode(self, domain: str, x):
        """(content, style) codes for a batch from domain 'a' or 'b'."""
        x = np.asarray(x, dtype=float)
        if x.ndim != 4 or x.shape[1:] != self.cfg.image_shape:
            raise InputError(f"batch shape {x.shape} does not match model input {self.cfg.image_shape}")
        content, style, _ = self.enc.forward(self.params[f"enc_{domain}"], x)
        return content, style

    def decode(self, domain: str, content, style):
        content = np.asarray(content, dtype=float)
        style = np.asarray(style, dtype=float)
        cc, h, w = self.cfg.content_channels, self.cfg.image_shape[1], self.cfg.image_shape[2]
        if content.shape[1:] != (cc, h, w):
            raise InputError(f"content shape {content.shape} does not match ({cc}, {h}, {w})")
        if style.shape[1:] != (self.cfg.style_dim,):
            raise InputError(f"style shape {style.shape} does not match dim {self.cfg.style_dim}")
        img, _ = self.dec.forward(self.params[f"dec_{domain}"], content, style)
        return img

    def discriminate(self, domain: str, x):
        z, _ = self.dis.forward(self.params[f"dis_{domain}"], np.asarray(x, dtype=float))
        return z
