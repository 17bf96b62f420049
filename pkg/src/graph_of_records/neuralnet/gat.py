"""Two-layer multi-head graph attention network with hand-written gradients.

Layer 1 concatenates its heads and applies ELU; layer 2 averages its heads
with an identity output, so final embeddings live in the query-embedding
space. Attention follows the single-vector scoring
``LeakyReLU(a_src . z_j + a_dst . z_i)`` normalized over each destination's
incoming edges. Dropout hits layer inputs and attention coefficients during
training only, with masks drawn from the caller's ``rng_seed``.

All arithmetic is float64. Parameters of layer ``l`` are stored under
``w{l}`` (heads, in, out), ``a{l}_src`` / ``a{l}_dst`` (heads, out) and
``b{l}``.
"""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from graph_of_records.domain.types import FloatArray, GraphOfRecords
from graph_of_records.errors import DimensionMismatchError, NonFiniteError, StaleCacheError

IndexArray = npt.NDArray[np.intp]
BoolArray = npt.NDArray[np.bool_]

PARAMETER_NAMES = ("w1", "a1_src", "a1_dst", "b1", "w2", "a2_src", "a2_dst", "b2")


@dataclass(frozen=True, slots=True, kw_only=True)
class GatConfig:
    """Shape and regularization of a two-layer GAT."""

    in_dim: int = 768
    heads: int = 4
    hidden_per_head: int = 192
    out_dim: int = 768
    leaky_slope: float = 0.2
    dropout: float = 0.2

    def __post_init__(self) -> None:
        """Validate configuration after construction."""
        for name in ("in_dim", "heads", "hidden_per_head", "out_dim"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must be in [0, 1), got {self.dropout}")
        if self.leaky_slope < 0.0:
            raise ValueError(f"leaky_slope must be >= 0, got {self.leaky_slope}")

    @property
    def hidden_dim(self) -> int:
        """Width of the concatenated layer-1 output."""
        return self.heads * self.hidden_per_head

    def parameter_shapes(self) -> dict[str, tuple[int, ...]]:
        h, f, d = self.heads, self.hidden_per_head, self.out_dim
        return {
            "w1": (h, self.in_dim, f),
            "a1_src": (h, f),
            "a1_dst": (h, f),
            "b1": (h * f,),
            "w2": (h, h * f, d),
            "a2_src": (h, d),
            "a2_dst": (h, d),
            "b2": (d,),
        }


class GatModel:
    """Parameters of a GAT plus a version counter bumped on every update.

    The counter ties a forward cache to the parameters it was computed with.
    """

    def __init__(self, config: GatConfig, params: dict[str, FloatArray]) -> None:
        expected = config.parameter_shapes()
        if set(params) != set(expected):
            raise ValueError(f"Parameter names {sorted(params)} != {sorted(expected)}")
        for name, shape in expected.items():
            if params[name].shape != shape:
                raise DimensionMismatchError(
                    f"Parameter '{name}' has shape {params[name].shape}, expected {shape}"
                )
        self.config = config
        self.params = {name: np.asarray(params[name], dtype=np.float64) for name in PARAMETER_NAMES}
        self.version = 0

    def copy(self) -> "GatModel":
        clone = GatModel(self.config, {k: v.copy() for k, v in self.params.items()})
        clone.version = self.version
        return clone

    def mark_updated(self) -> None:
        self.version += 1

    def zero_grads(self) -> dict[str, FloatArray]:
        return {k: np.zeros_like(v) for k, v in self.params.items()}


def _glorot(
    rng: np.random.Generator, shape: tuple[int, ...], fan_in: int, fan_out: int
) -> FloatArray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def initialize_model(config: GatConfig, seed: int) -> GatModel:
    """Seeded Glorot-uniform weights and attention vectors; zero biases."""
    rng = np.random.default_rng(seed)
    h, f, d = config.heads, config.hidden_per_head, config.out_dim
    params = {
        "w1": _glorot(rng, (h, config.in_dim, f), config.in_dim, f),
        "a1_src": _glorot(rng, (h, f), f, 1),
        "a1_dst": _glorot(rng, (h, f), f, 1),
        "b1": np.zeros(h * f),
        "w2": _glorot(rng, (h, h * f, d), h * f, d),
        "a2_src": _glorot(rng, (h, d), d, 1),
        "a2_dst": _glorot(rng, (h, d), d, 1),
        "b2": np.zeros(d),
    }
    return GatModel(config, params)


def identity_model(config: GatConfig) -> GatModel:
    """Model that passes nonnegative features through unchanged.

    Layer-1 heads select disjoint input slices, layer-2 heads are identities
    and attention vectors are zero, so on a self-loop-only graph the output
    equals a nonnegative input.

    Raises:
        ValueError: Unless ``in_dim == heads * hidden_per_head == out_dim``.
    """
    h, f = config.heads, config.hidden_per_head
    if not config.in_dim == config.hidden_dim == config.out_dim:
        raise ValueError("identity_model needs in_dim == heads * hidden_per_head == out_dim")
    eye = np.eye(config.in_dim)
    params = {
        "w1": np.stack([eye[:, i * f : (i + 1) * f] for i in range(h)]),
        "a1_src": np.zeros((h, f)),
        "a1_dst": np.zeros((h, f)),
        "b1": np.zeros(h * f),
        "w2": np.stack([eye] * h),
        "a2_src": np.zeros((h, config.out_dim)),
        "a2_dst": np.zeros((h, config.out_dim)),
        "b2": np.zeros(config.out_dim),
    }
    return GatModel(config, params)


@dataclass(frozen=True, slots=True)
class GraphTensors:
    """Node features and the message-passing edge list of one graph.

    Edges are unique ``(src, dst)`` index pairs, mirrored and self-looped,
    sorted by destination then source.
    """

    features: FloatArray
    src: IndexArray
    dst: IndexArray
    node_ids: tuple[str, ...]

    @property
    def n_nodes(self) -> int:
        return int(self.features.shape[0])


def prepare_tensors(
    features: FloatArray, edges: list[tuple[int, int]], node_ids: tuple[str, ...] | None = None
) -> GraphTensors:
    """Mirror ``edges``, add a self-loop per node and pack everything as arrays."""
    n = features.shape[0]
    pairs = {(i, i) for i in range(n)}
    for s, d in edges:
        if not (0 <= s < n and 0 <= d < n):
            raise ValueError(f"Edge ({s}, {d}) references a node outside 0..{n - 1}")
        pairs.add((s, d))
        pairs.add((d, s))
    ordered = sorted(pairs, key=lambda p: (p[1], p[0]))
    ids = node_ids if node_ids is not None else tuple(str(i) for i in range(n))
    return GraphTensors(
        features=np.asarray(features, dtype=np.float64),
        src=np.array([p[0] for p in ordered], dtype=np.intp),
        dst=np.array([p[1] for p in ordered], dtype=np.intp),
        node_ids=ids,
    )


def prepare_graph(g: GraphOfRecords) -> GraphTensors:
    """GraphTensors for a graph of records, rows in node order."""
    edges = [(g.node_index(e.src), g.node_index(e.dst)) for e in g.edges]
    return prepare_tensors(g.embedding_matrix(), edges, tuple(n.node_id for n in g.nodes))


@dataclass(frozen=True, slots=True)
class _LayerCache:
    x: FloatArray  # layer input after dropout
    input_scale: FloatArray | None  # keep-mask / (1 - p), None when no dropout
    z: FloatArray  # (H, N, F) projected features
    logits: FloatArray  # (H, E) pre-activation attention scores
    alpha: FloatArray  # (H, E) softmax weights
    attention_scale: FloatArray | None
    attention: FloatArray  # (H, N, N) dense, dropout applied; [h, dst, src]


@dataclass(frozen=True, slots=True)
class ForwardCache:
    """Activations of one forward pass, consumed by ``backward``."""

    tensors: GraphTensors
    model_version: int
    layer1: _LayerCache
    layer2: _LayerCache
    pre_activation: FloatArray  # layer-1 concat + bias, before ELU


def _dropout_scale(
    rng: np.random.Generator | None, shape: tuple[int, ...], p: float
) -> FloatArray | None:
    if rng is None or p == 0.0:
        return None
    keep: BoolArray = rng.random(shape) >= p
    return keep / (1.0 - p)


def _attention_layer(
    x_raw: FloatArray,
    w: FloatArray,
    a_src: FloatArray,
    a_dst: FloatArray,
    tensors: GraphTensors,
    slope: float,
    dropout: float,
    rng: np.random.Generator | None,
    layer_name: str,
) -> tuple[FloatArray, _LayerCache]:
    """Per-head attention aggregation; returns (H, N, F) head outputs."""
    if x_raw.shape[1] != w.shape[1]:
        raise DimensionMismatchError(
            f"{layer_name}: input width {x_raw.shape[1]} != weight fan-in {w.shape[1]}"
        )
    src, dst, n = tensors.src, tensors.dst, tensors.n_nodes

    input_scale = _dropout_scale(rng, x_raw.shape, dropout)
    x = x_raw * input_scale if input_scale is not None else x_raw
    z = np.matmul(x[None, :, :], w)
    score_src = np.einsum("hnf,hf->hn", z, a_src)
    score_dst = np.einsum("hnf,hf->hn", z, a_dst)
    logits = score_src[:, src] + score_dst[:, dst]
    activated = np.where(logits > 0.0, logits, slope * logits)

    # softmax over each destination's incoming edges; work in (E, H) for ufunc.at
    group_max = np.full((n, w.shape[0]), -np.inf)
    np.maximum.at(group_max, dst, activated.T)
    exp = np.exp(activated - group_max[dst].T)
    denom = np.zeros((n, w.shape[0]))
    np.add.at(denom, dst, exp.T)
    alpha = exp / denom[dst].T

    attention_scale = _dropout_scale(rng, alpha.shape, dropout)
    dropped = alpha * attention_scale if attention_scale is not None else alpha
    attention = np.zeros((w.shape[0], n, n))
    attention[:, dst, src] = dropped

    out = np.matmul(attention, z)
    cache = _LayerCache(
        x=x,
        input_scale=input_scale,
        z=z,
        logits=logits,
        alpha=alpha,
        attention_scale=attention_scale,
        attention=attention,
    )
    return out, cache


def _check_finite(values: FloatArray, tensors: GraphTensors, where: str) -> None:
    bad_rows = np.flatnonzero(~np.isfinite(values).all(axis=1))
    if bad_rows.size:
        node_id = tensors.node_ids[int(bad_rows[0])]
        raise NonFiniteError(f"Non-finite activation in {where} at node '{node_id}'")


def gat_forward(
    tensors: GraphTensors, model: GatModel, training: bool, rng_seed: int = 0
) -> tuple[FloatArray, ForwardCache]:
    """Node embeddings (N, out_dim) and the cache needed by ``backward``.

    The dropout masks are a pure function of ``rng_seed``, so repeating a
    call reproduces the same forward exactly.

    Raises:
        DimensionMismatchError: Feature width differs from the model input width.
        NonFiniteError: An input feature or activation is NaN or infinite.
    """
    cfg, p = model.config, model.params
    rng = np.random.default_rng(rng_seed) if training and cfg.dropout > 0.0 else None
    n = tensors.n_nodes
    _check_finite(tensors.features, tensors, "input features")

    heads1, cache1 = _attention_layer(
        tensors.features, p["w1"], p["a1_src"], p["a1_dst"], tensors,
        slope=cfg.leaky_slope, dropout=cfg.dropout, rng=rng, layer_name="layer 1",
    )
    pre = heads1.transpose(1, 0, 2).reshape(n, cfg.hidden_dim) + p["b1"]
    hidden = np.where(pre > 0.0, pre, np.expm1(np.minimum(pre, 0.0)))
    _check_finite(hidden, tensors, "layer 1")

    heads2, cache2 = _attention_layer(
        hidden, p["w2"], p["a2_src"], p["a2_dst"], tensors,
        slope=cfg.leaky_slope, dropout=cfg.dropout, rng=rng, layer_name="layer 2",
    )
    out = heads2.mean(axis=0) + p["b2"]
    _check_finite(out, tensors, "layer 2")

    cache = ForwardCache(
        tensors=tensors,
        model_version=model.version,
        layer1=cache1,
        layer2=cache2,
        pre_activation=pre,
    )
    return out, cache


def _attention_layer_backward(
    d_out: FloatArray,
    cache: _LayerCache,
    w: FloatArray,
    a_src: FloatArray,
    a_dst: FloatArray,
    tensors: GraphTensors,
    slope: float,
) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
    """Gradients (d_x_raw, d_w, d_a_src, d_a_dst) given d_out of shape (H, N, F)."""
    src, dst, n = tensors.src, tensors.dst, tensors.n_nodes
    heads = w.shape[0]

    d_attention = np.matmul(d_out, cache.z.transpose(0, 2, 1))
    d_z = np.matmul(cache.attention.transpose(0, 2, 1), d_out)

    d_alpha = d_attention[:, dst, src]
    if cache.attention_scale is not None:
        d_alpha = d_alpha * cache.attention_scale

    weighted = cache.alpha * d_alpha
    group_sum = np.zeros((n, heads))
    np.add.at(group_sum, dst, weighted.T)
    d_activated = cache.alpha * (d_alpha - group_sum[dst].T)
    d_logits = d_activated * np.where(cache.logits > 0.0, 1.0, slope)

    d_score_src = np.zeros((n, heads))
    np.add.at(d_score_src, src, d_logits.T)
    d_score_dst = np.zeros((n, heads))
    np.add.at(d_score_dst, dst, d_logits.T)

    d_a_src = np.einsum("nh,hnf->hf", d_score_src, cache.z)
    d_a_dst = np.einsum("nh,hnf->hf", d_score_dst, cache.z)
    d_z = d_z + d_score_src.T[:, :, None] * a_src[:, None, :]
    d_z = d_z + d_score_dst.T[:, :, None] * a_dst[:, None, :]

    d_w = np.matmul(cache.x.T[None, :, :], d_z)
    d_x = np.einsum("hnf,hdf->nd", d_z, w)
    if cache.input_scale is not None:
        d_x = d_x * cache.input_scale
    return d_x, d_w, d_a_src, d_a_dst


def backward(
    cache: ForwardCache, model: GatModel, upstream_grad: FloatArray
) -> dict[str, FloatArray]:
    """Exact parameter gradients of the cached forward under its dropout masks.

    Raises:
        StaleCacheError: The model changed since the forward pass, or the
            upstream gradient does not match the cached output shape.
    """
    if cache.model_version != model.version:
        raise StaleCacheError(
            f"Forward cache is from model version {cache.model_version}, "
            f"model is at version {model.version}"
        )
    cfg, p = model.config, model.params
    n = cache.tensors.n_nodes
    if upstream_grad.shape != (n, cfg.out_dim):
        raise StaleCacheError(
            f"Upstream gradient shape {upstream_grad.shape} does not match cached "
            f"output shape {(n, cfg.out_dim)}"
        )

    d_b2 = upstream_grad.sum(axis=0)
    d_heads2 = np.broadcast_to(upstream_grad / cfg.heads, (cfg.heads, n, cfg.out_dim))
    d_hidden, d_w2, d_a2_src, d_a2_dst = _attention_layer_backward(
        d_heads2, cache.layer2, p["w2"], p["a2_src"], p["a2_dst"], cache.tensors, cfg.leaky_slope
    )

    pre = cache.pre_activation
    d_pre = d_hidden * np.where(pre > 0.0, 1.0, np.exp(np.minimum(pre, 0.0)))
    d_b1 = d_pre.sum(axis=0)
    d_heads1 = d_pre.reshape(n, cfg.heads, cfg.hidden_per_head).transpose(1, 0, 2)
    _, d_w1, d_a1_src, d_a1_dst = _attention_layer_backward(
        d_heads1, cache.layer1, p["w1"], p["a1_src"], p["a1_dst"], cache.tensors, cfg.leaky_slope
    )

    return {
        "w1": d_w1,
        "a1_src": d_a1_src,
        "a1_dst": d_a1_dst,
        "b1": d_b1,
        "w2": d_w2,
        "a2_src": d_a2_src,
        "a2_dst": d_a2_dst,
        "b2": d_b2,
    }


def attention_weights(cache: ForwardCache, layer: int) -> FloatArray:
    """Softmax weights (heads, edges) of layer 1 or 2, before attention dropout."""
    if layer not in (1, 2):
        raise ValueError(f"layer must be 1 or 2, got {layer}")
    return cache.layer1.alpha if layer == 1 else cache.layer2.alpha
