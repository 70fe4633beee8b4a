"""Hierarchical wiretap coding over block-fading binary symmetric channels.

A frame is ``b`` polar blocks of length ``n``.  Per-block input positions are
split into six classes by decoding reliability, and the classes that are only
reliable in some channel states are protected across blocks by length-``b``
erasure polar codes (a degraded block behaves as an erasure of that block's
entry in the row).  Encoding therefore runs in two phases: first the
cross-block rows, then the per-block columns.

Position classes
----------------
block_random        decodable by everyone in every state; carries fresh
                    uniform randomness per block to saturate the
                    eavesdropper's channel.
crossblock_secret   decodable by the intended receiver in both states, by the
                    eavesdropper only in its superior state; rows mix message
                    bits with enough randomness to cover what the
                    eavesdropper can resolve.
perblock_message    decodable by the receiver in both states, never by the
                    eavesdropper; carries fresh message bits per block
                    (strong orderings only).
crossblock_message  decodable only in the superior main state; message rows
                    are erasure-coded across blocks so degraded blocks can be
                    filled back in.
crossblock_random   decodable in the superior state of either party only;
                    rows carry randomness (plus a residual message slice
                    under independent weak coupling).
frozen              reliable for no one; pinned to zero.

All index arrays are sorted, 0-based and refer to decoder order within a
block (classes) or to decoder order within a cross-block row (the erasure
code information sets ``bec_info_main`` / ``bec_info_eve``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import (
    ChannelLaw,
    FadingTrace,
    ScenarioTag,
    UnsupportedScenarioError,
    WiretapParams,
    bec,
    bsc,
    classify_scenario,
)
from .polar import (
    SoftObservation,
    _as_bits,
    polar_transform,
    polar_transform_inverse,
    reliability_profile,
    sc_decode_batch,
    select_good_set,
)
from .rates import binary_entropy

__all__ = [
    "BitMatrix",
    "ConstructionInfeasibleError",
    "DecodeStatus",
    "HierarchicalCode",
    "IndexPartition",
    "MessageBundle",
    "RandomBundle",
    "bob_decode",
    "build_code",
    "build_partition",
    "bundle_shapes",
    "designed_rate",
    "encode",
    "eve_genie_decode",
    "target_fractions",
    "total_message_bits",
    "total_random_bits",
]

CONSTRUCTIONS = ("bhattacharyya-bound", "genie-mc")

_STRONG_LAYOUT = (ScenarioTag.SIM_A, ScenarioTag.IND_STRONG)
_WEAK_LAYOUT = (ScenarioTag.SIM_B, ScenarioTag.IND_WEAK)


class ConstructionInfeasibleError(Exception):
    """The requested partition cannot be built consistently."""


@dataclass(frozen=True)
class IndexPartition:
    """Disjoint per-block position classes plus the cross-block erasure-code
    information sets.  See the module docstring for class semantics."""

    n: int
    b: int
    block_random: np.ndarray
    crossblock_secret: np.ndarray
    perblock_message: np.ndarray
    crossblock_message: np.ndarray
    crossblock_random: np.ndarray
    frozen: np.ndarray
    bec_info_main: np.ndarray
    bec_info_eve: np.ndarray
    delta: float

    def __post_init__(self) -> None:
        classes = [
            self.block_random,
            self.crossblock_secret,
            self.perblock_message,
            self.crossblock_message,
            self.crossblock_random,
            self.frozen,
        ]
        norm = [np.unique(np.asarray(c, dtype=np.int64)) for c in classes]
        total = np.concatenate(norm) if norm else np.empty(0, np.int64)
        if total.size != self.n or np.unique(total).size != self.n:
            raise ValueError("classes must partition the n per-block positions")
        if total.size and (total.min() < 0 or total.max() >= self.n):
            raise ValueError("class indices out of range")
        for name, arr in zip(
            (
                "block_random",
                "crossblock_secret",
                "perblock_message",
                "crossblock_message",
                "crossblock_random",
                "frozen",
            ),
            norm,
        ):
            object.__setattr__(self, name, arr)
        for name in ("bec_info_main", "bec_info_eve"):
            arr = np.unique(np.asarray(getattr(self, name), dtype=np.int64))
            if arr.size and (arr.min() < 0 or arr.max() >= self.b):
                raise ValueError(f"{name} indices out of range")
            object.__setattr__(self, name, arr)
        if not (0.0 < self.delta < 1.0):
            raise ValueError("delta must lie in (0, 1)")

    def sizes(self) -> dict:
        return {
            "block_random": int(self.block_random.size),
            "crossblock_secret": int(self.crossblock_secret.size),
            "perblock_message": int(self.perblock_message.size),
            "crossblock_message": int(self.crossblock_message.size),
            "crossblock_random": int(self.crossblock_random.size),
            "frozen": int(self.frozen.size),
            "bec_info_main": int(self.bec_info_main.size),
            "bec_info_eve": int(self.bec_info_eve.size),
        }


@dataclass(frozen=True)
class HierarchicalCode:
    """A constructed code: parameters, scenario tag and index partition."""

    params: WiretapParams
    scenario: ScenarioTag
    partition: IndexPartition
    construction: str

    @property
    def n(self) -> int:
        return self.partition.n

    @property
    def b(self) -> int:
        return self.partition.b

    @property
    def secret_info(self) -> np.ndarray:
        """Positions of the random fill inside crossblock_secret rows: the
        erasure-code information set matched to whoever must *fail* to infer
        the message, i.e. the eavesdropper's erasure rate."""
        if self.params.coupling == "simultaneous":
            return self.partition.bec_info_main
        return self.partition.bec_info_eve

    @property
    def secret_msg_positions(self) -> np.ndarray:
        return np.setdiff1d(np.arange(self.b), self.secret_info)

    @property
    def weak_extra_positions(self) -> np.ndarray:
        """Message slice inside crossblock_random rows (independent weak
        coupling): main info set minus the eavesdropper info set."""
        if self.scenario is ScenarioTag.IND_WEAK:
            return np.setdiff1d(self.partition.bec_info_main, self.partition.bec_info_eve)
        return np.empty(0, dtype=np.int64)


def _good_mask(z: np.ndarray, threshold: float) -> np.ndarray:
    return z <= threshold


def build_partition(
    params: WiretapParams,
    n: int,
    b: int | None = None,
    delta: float = 0.25,
    construction: str = "bhattacharyya-bound",
    *,
    construction_trials: int = 2048,
    rng: np.random.Generator | None = None,
) -> IndexPartition:
    """Construct the index partition for ``params`` at block length ``n`` with
    ``b`` blocks per frame (default n/8).

    Per-block classes come from good-set differences of the four flip laws at
    the single threshold ``delta / (2n)``.  The cross-block erasure codes use
    exact erasure-probability profiles at threshold ``delta / (2b)`` with the
    design erasure rate inflated by ``(1 + delta)`` as the reliability margin.
    ``construction`` picks the flip-law profile method: the Bhattacharyya
    bound recursion (conservative, deterministically nested) or genie-aided
    Monte Carlo (tighter rates; nesting is enforced by intersecting down the
    reliability chain).
    """
    tag = classify_scenario(params)
    if tag is ScenarioTag.UNSUPPORTED:
        raise UnsupportedScenarioError(
            "independent fading with p1s <= p2 and q1 < q1s has no supported scheme"
        )
    if construction not in CONSTRUCTIONS:
        raise ValueError(f"construction must be one of {CONSTRUCTIONS}")
    if b is None:
        b = max(2, n // 8)
    if not (0.0 < delta < 1.0):
        raise ValueError("delta must lie in (0, 1)")

    t_block = delta / (2.0 * n)
    if construction == "genie-mc" and rng is None:
        rng = np.random.default_rng(0)
    masks = {}
    for name in ("p1", "p2", "p1s", "p2s"):
        law = bsc(getattr(params, name))
        prof = reliability_profile(
            law, n, method=construction, trials=construction_trials, rng=rng
        )
        masks[name] = _good_mask(prof.z, t_block)

    strong = tag in _STRONG_LAYOUT
    # reliability chain, most exclusive first
    chain = ("p2s", "p1s", "p2", "p1") if strong else ("p2s", "p2", "p1s", "p1")
    if construction == "genie-mc":
        # Monte Carlo estimates need not nest; intersect down the chain
        for outer, inner in zip(chain[::-1], chain[-2::-1]):
            masks[inner] &= masks[outer]
    for outer, inner in zip(chain[::-1], chain[-2::-1]):
        if (masks[inner] & ~masks[outer]).any():
            raise ConstructionInfeasibleError("good sets failed to nest")

    def idx(mask: np.ndarray) -> np.ndarray:
        return np.nonzero(mask)[0].astype(np.int64)

    if strong:
        block_random = idx(masks["p2s"])
        crossblock_secret = idx(masks["p1s"] & ~masks["p2s"])
        perblock_message = idx(masks["p2"] & ~masks["p1s"])
        crossblock_message = idx(masks["p1"] & ~masks["p2"])
        crossblock_random = np.empty(0, dtype=np.int64)
    else:
        block_random = idx(masks["p2s"])
        crossblock_secret = idx(masks["p2"] & ~masks["p2s"])
        crossblock_random = idx(masks["p1s"] & ~masks["p2"])
        crossblock_message = idx(masks["p1"] & ~masks["p1s"])
        perblock_message = np.empty(0, dtype=np.int64)
    frozen = idx(~masks["p1"])

    t_row = delta / (2.0 * b)
    q_main = min(1.0, params.q2 * (1.0 + delta))
    q_eve = min(1.0, params.q2s * (1.0 + delta))
    prof_main = reliability_profile(bec(q_main), b, method="exact-bec")
    info_main = select_good_set(prof_main, t_row)
    if params.coupling == "simultaneous":
        info_eve = info_main.copy()
    else:
        prof_eve = reliability_profile(bec(q_eve), b, method="exact-bec")
        info_eve = select_good_set(prof_eve, t_row)
    if tag is ScenarioTag.IND_WEAK and not np.isin(info_eve, info_main).all():
        raise ConstructionInfeasibleError(
            "eavesdropper erasure-code information set escapes the main one"
        )

    return IndexPartition(
        n=n,
        b=b,
        block_random=block_random,
        crossblock_secret=crossblock_secret,
        perblock_message=perblock_message,
        crossblock_message=crossblock_message,
        crossblock_random=crossblock_random,
        frozen=frozen,
        bec_info_main=info_main,
        bec_info_eve=info_eve,
        delta=delta,
    )


def build_code(
    params: WiretapParams,
    n: int,
    b: int | None = None,
    delta: float = 0.25,
    construction: str = "bhattacharyya-bound",
    *,
    construction_trials: int = 2048,
    rng: np.random.Generator | None = None,
) -> HierarchicalCode:
    """Classify the scenario and build the matching partition."""
    partition = build_partition(
        params,
        n,
        b,
        delta,
        construction,
        construction_trials=construction_trials,
        rng=rng,
    )
    return HierarchicalCode(
        params=params,
        scenario=classify_scenario(params),
        partition=partition,
        construction=construction,
    )


def bundle_shapes(code: HierarchicalCode) -> tuple[dict, dict]:
    """Shapes of the message and randomness arrays for ``code``.

    Flat packing order (used by ``to_flat``/``from_flat``) is the key order
    of the returned dicts.
    """
    P = code.partition
    info = code.secret_info
    extra = code.weak_extra_positions
    if code.scenario is ScenarioTag.SIM_B:
        t_cols = P.bec_info_main.size
    elif code.scenario is ScenarioTag.IND_WEAK:
        t_cols = P.bec_info_eve.size
    else:
        t_cols = 0
    msg_shapes = {
        "crossblock_secret": (P.crossblock_secret.size, P.b - info.size),
        "crossblock_message": (P.crossblock_message.size, P.bec_info_main.size),
        "per_block": (P.b, P.perblock_message.size),
        "crossblock_random_extra": (P.crossblock_random.size, extra.size),
    }
    rnd_shapes = {
        "crossblock_secret": (P.crossblock_secret.size, info.size),
        "block_random": (P.b, P.block_random.size),
        "crossblock_random": (P.crossblock_random.size, t_cols),
    }
    return msg_shapes, rnd_shapes


class _Bundle:
    """Shared helpers for bit bundles stored as dicts of uint8 arrays."""

    _fields: tuple[str, ...] = ()

    def _arrays(self) -> list[np.ndarray]:
        return [getattr(self, f) for f in self._fields]

    def to_flat(self) -> np.ndarray:
        parts = [a.reshape(-1) for a in self._arrays()]
        return np.concatenate(parts) if parts else np.empty(0, np.uint8)

    def total_bits(self) -> int:
        return int(sum(a.size for a in self._arrays()))

    def bit_errors(self, other: "_Bundle") -> int:
        return int((self.to_flat() ^ other.to_flat()).sum())

    def same_bits(self, other: "_Bundle") -> bool:
        return self.bit_errors(other) == 0


@dataclass(frozen=True)
class MessageBundle(_Bundle):
    """Message bits split by carrying class (rows x per-row bits)."""

    crossblock_secret: np.ndarray
    crossblock_message: np.ndarray
    per_block: np.ndarray
    crossblock_random_extra: np.ndarray

    _fields = ("crossblock_secret", "crossblock_message", "per_block", "crossblock_random_extra")

    @classmethod
    def random(cls, code: HierarchicalCode, rng: np.random.Generator) -> "MessageBundle":
        shapes, _ = bundle_shapes(code)
        return cls(**{k: rng.integers(0, 2, size=v, dtype=np.uint8) for k, v in shapes.items()})

    @classmethod
    def zeros(cls, code: HierarchicalCode) -> "MessageBundle":
        shapes, _ = bundle_shapes(code)
        return cls(**{k: np.zeros(v, dtype=np.uint8) for k, v in shapes.items()})

    @classmethod
    def from_flat(cls, code: HierarchicalCode, flat: np.ndarray) -> "MessageBundle":
        shapes, _ = bundle_shapes(code)
        return cls(**_unflatten(flat, shapes))


@dataclass(frozen=True)
class RandomBundle(_Bundle):
    """Uniform random fill split by carrying class."""

    crossblock_secret: np.ndarray
    block_random: np.ndarray
    crossblock_random: np.ndarray

    _fields = ("crossblock_secret", "block_random", "crossblock_random")

    @classmethod
    def random(cls, code: HierarchicalCode, rng: np.random.Generator) -> "RandomBundle":
        _, shapes = bundle_shapes(code)
        return cls(**{k: rng.integers(0, 2, size=v, dtype=np.uint8) for k, v in shapes.items()})

    @classmethod
    def zeros(cls, code: HierarchicalCode) -> "RandomBundle":
        _, shapes = bundle_shapes(code)
        return cls(**{k: np.zeros(v, dtype=np.uint8) for k, v in shapes.items()})

    @classmethod
    def from_flat(cls, code: HierarchicalCode, flat: np.ndarray) -> "RandomBundle":
        _, shapes = bundle_shapes(code)
        return cls(**_unflatten(flat, shapes))


def _unflatten(flat: np.ndarray, shapes: dict) -> dict:
    flat = _as_bits(flat).reshape(-1)
    out = {}
    pos = 0
    for k, shp in shapes.items():
        count = int(np.prod(shp))
        out[k] = flat[pos : pos + count].reshape(shp).astype(np.uint8)
        pos += count
    if pos != flat.size:
        raise ValueError("flat bit vector length does not match bundle shapes")
    return out


def total_message_bits(code: HierarchicalCode) -> int:
    shapes, _ = bundle_shapes(code)
    return int(sum(int(np.prod(s)) for s in shapes.values()))


def total_random_bits(code: HierarchicalCode) -> int:
    _, shapes = bundle_shapes(code)
    return int(sum(int(np.prod(s)) for s in shapes.values()))


def designed_rate(code: HierarchicalCode) -> float:
    """Message bits per channel use; exactly total_message_bits / (n b)."""
    return total_message_bits(code) / float(code.n * code.b)


@dataclass(frozen=True)
class BitMatrix:
    """A frame of codewords, one block per row."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = _as_bits(self.bits)
        if bits.ndim != 2:
            raise ValueError("BitMatrix holds (blocks, n)")
        object.__setattr__(self, "bits", bits)


def _check_shapes(actual: "_Bundle", expected: dict, what: str) -> None:
    for k, shp in expected.items():
        arr = getattr(actual, k)
        if tuple(arr.shape) != tuple(shp):
            raise ValueError(f"{what}.{k} must have shape {tuple(shp)}, got {tuple(arr.shape)}")


def _phase_one_rows(
    code: HierarchicalCode, msg: MessageBundle, rnd: RandomBundle
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cross-block row codewords: (secret_rows, message_rows, random_rows),
    each (class size, b)."""
    P = code.partition
    b = code.b
    info = code.secret_info
    comp = code.secret_msg_positions

    secret = np.zeros((P.crossblock_secret.size, b), dtype=np.uint8)
    if secret.size:
        secret[:, info] = rnd.crossblock_secret
        secret[:, comp] = msg.crossblock_secret
        secret = polar_transform(secret)

    message = np.zeros((P.crossblock_message.size, b), dtype=np.uint8)
    if message.size:
        message[:, P.bec_info_main] = msg.crossblock_message
        message = polar_transform(message)

    random_rows = np.zeros((P.crossblock_random.size, b), dtype=np.uint8)
    if random_rows.size:
        if code.scenario is ScenarioTag.SIM_B:
            random_rows[:, P.bec_info_main] = rnd.crossblock_random
        else:
            random_rows[:, P.bec_info_eve] = rnd.crossblock_random
            random_rows[:, code.weak_extra_positions] = msg.crossblock_random_extra
        random_rows = polar_transform(random_rows)

    return secret, message, random_rows


def encode(code: HierarchicalCode, msg: MessageBundle, rnd: RandomBundle) -> BitMatrix:
    """Two-phase encoder: cross-block rows first, then each block's column
    layout, then the per-block polar transform."""
    msg_shapes, rnd_shapes = bundle_shapes(code)
    _check_shapes(msg, msg_shapes, "msg")
    _check_shapes(rnd, rnd_shapes, "rnd")
    P = code.partition
    secret, message, random_rows = _phase_one_rows(code, msg, rnd)

    pre = np.zeros((code.b, code.n), dtype=np.uint8)
    pre[:, P.block_random] = rnd.block_random
    if P.crossblock_secret.size:
        pre[:, P.crossblock_secret] = secret.T
    if P.perblock_message.size:
        pre[:, P.perblock_message] = msg.per_block
    if P.crossblock_message.size:
        pre[:, P.crossblock_message] = message.T
    if P.crossblock_random.size:
        pre[:, P.crossblock_random] = random_rows.T
    return BitMatrix(bits=polar_transform(pre))


@dataclass(frozen=True)
class DecodeStatus:
    """Outcome of a frame decode; ``failed_phase`` names the first phase that
    hit an unresolvable erasure (only the cross-block erasure phase can
    detect its own failure)."""

    ok: bool
    failed_phase: str | None = None


def _stack_observations(
    observations, code: HierarchicalCode
) -> np.ndarray:
    if len(observations) != code.b:
        raise ValueError(f"need {code.b} block observations, got {len(observations)}")
    rows = []
    for obs in observations:
        if len(obs) != code.n:
            raise ValueError("observation length does not match block length")
        rows.append(obs.llr)
    return np.stack(rows)


def _mask_of(n: int, *index_sets: np.ndarray) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    for s in index_sets:
        mask[s] = True
    return mask


def _row_erasure_decode(
    values: np.ndarray,
    known_cols: np.ndarray,
    unfrozen: np.ndarray,
    frozen_values: np.ndarray,
    b: int,
) -> tuple[np.ndarray, bool]:
    """Decode cross-block rows whose entries at ``known_cols`` are certain and
    elsewhere erased.  Returns (decoder-order decisions, ambiguity flag)."""
    if values.shape[0] == 0:
        return np.zeros((0, b), dtype=np.uint8), False
    llr = (1.0 - 2.0 * values.astype(np.float64)) * np.inf
    llr[:, ~known_cols] = 0.0
    frozen_mask = ~_mask_of(b, unfrozen)
    decisions, ambiguous = sc_decode_batch(llr, frozen_mask, frozen_values, erasure_law=True)
    return decisions, bool(ambiguous.any())


def bob_decode(
    code: HierarchicalCode, observations, trace: FadingTrace
) -> tuple[MessageBundle, RandomBundle, DecodeStatus]:
    """Intended-receiver decoder (knows the trace, not the sent bits).

    Phase one: successive cancellation on superior blocks with only the
    frozen class pinned.  Phase two: erasure decoding of the cross-block
    message/random rows, whose degraded-block entries are erasures.  Phase
    three: degraded blocks with the phase-two rows pinned.  The
    crossblock_secret rows are then fully known and inverted to split message
    from randomness.
    """
    P = code.partition
    b, n = code.b, code.n
    if trace.blocks != b:
        raise ValueError("trace length does not match frame")
    llr = _stack_observations(observations, code)
    sup = trace.main_superior
    deg = ~sup

    pre_hat = np.zeros((b, n), dtype=np.uint8)

    mask_frozen = _mask_of(n, P.frozen)
    dec_sup, _ = sc_decode_batch(
        llr[sup], mask_frozen, np.zeros(n, dtype=np.uint8), erasure_law=False
    )
    pre_hat[sup] = dec_sup

    # cross-block rows Bob only sees on superior blocks; both row kinds use
    # the main information set with zero frozen fill
    row_classes = np.concatenate([P.crossblock_message, P.crossblock_random])
    row_vals = pre_hat[:, row_classes].T
    dec_rows, ambiguous = _row_erasure_decode(
        row_vals, sup, P.bec_info_main, np.zeros(b, dtype=np.uint8), b
    )
    if dec_rows.shape[0]:
        pre_hat[:, row_classes] = polar_transform(dec_rows).T

    mask_deg = _mask_of(n, P.frozen, P.crossblock_message, P.crossblock_random)
    dec_deg, _ = sc_decode_batch(llr[deg], mask_deg, pre_hat[deg], erasure_law=False)
    pre_hat[deg] = dec_deg

    n_msg = P.crossblock_message.size
    msg_rows = dec_rows[:n_msg]
    rnd_rows = dec_rows[n_msg:]

    secret_vals = pre_hat[:, P.crossblock_secret].T
    secret_pre = polar_transform_inverse(secret_vals) if secret_vals.size else secret_vals.reshape(
        (P.crossblock_secret.size, b)
    )

    if code.scenario is ScenarioTag.SIM_B:
        t_hat = rnd_rows[:, P.bec_info_main]
    elif code.scenario is ScenarioTag.IND_WEAK:
        t_hat = rnd_rows[:, P.bec_info_eve]
    else:
        t_hat = rnd_rows[:, np.empty(0, dtype=np.int64)]

    msg_hat = MessageBundle(
        crossblock_secret=secret_pre[:, code.secret_msg_positions],
        crossblock_message=msg_rows[:, P.bec_info_main],
        per_block=pre_hat[:, P.perblock_message],
        crossblock_random_extra=rnd_rows[:, code.weak_extra_positions],
    )
    rnd_hat = RandomBundle(
        crossblock_secret=secret_pre[:, code.secret_info],
        block_random=pre_hat[:, P.block_random],
        crossblock_random=t_hat,
    )
    status = DecodeStatus(ok=not ambiguous, failed_phase="phase2" if ambiguous else None)
    return msg_hat, rnd_hat, status


def eve_genie_decode(
    code: HierarchicalCode, observations, trace: FadingTrace, msg: MessageBundle
) -> tuple[RandomBundle, DecodeStatus]:
    """Genie-aided eavesdropper decoder: receives every message bit and must
    recover all random fill.  Measures how completely the randomness
    saturates the eavesdropper's observation (the leakage proxy).

    Mirrors the receiver's three phases with the eavesdropper's flip laws and
    its own state trace; message-bearing classes are pinned from the genie
    instead of decoded.
    """
    P = code.partition
    b, n = code.b, code.n
    if trace.blocks != b:
        raise ValueError("trace length does not match frame")
    msg_shapes, _ = bundle_shapes(code)
    _check_shapes(msg, msg_shapes, "msg")
    llr = _stack_observations(observations, code)
    sup = trace.eve_superior
    deg = ~sup
    strong = code.scenario in _STRONG_LAYOUT

    # re-encode the genie-known crossblock message rows
    message_rows = np.zeros((P.crossblock_message.size, b), dtype=np.uint8)
    if message_rows.size:
        message_rows[:, P.bec_info_main] = msg.crossblock_message
        message_rows = polar_transform(message_rows)

    pre_hat = np.zeros((b, n), dtype=np.uint8)
    if P.crossblock_message.size:
        pre_hat[:, P.crossblock_message] = message_rows.T
    if strong and P.perblock_message.size:
        pre_hat[:, P.perblock_message] = msg.per_block

    if strong:
        mask_sup = _mask_of(n, P.frozen, P.perblock_message, P.crossblock_message)
    else:
        mask_sup = _mask_of(n, P.frozen, P.crossblock_message)
    dec_sup, _ = sc_decode_batch(llr[sup], mask_sup, pre_hat[sup], erasure_law=False)
    pre_hat[sup] = dec_sup

    # secret rows: genie pins the message slice, the random fill is decoded
    # across this trace's erasures
    info = code.secret_info
    comp = code.secret_msg_positions
    frozen_fill = np.zeros((P.crossblock_secret.size, b), dtype=np.uint8)
    if frozen_fill.size:
        frozen_fill[:, comp] = msg.crossblock_secret
    secret_vals = pre_hat[:, P.crossblock_secret].T
    dec_secret, amb_secret = _row_erasure_decode(secret_vals, sup, info, frozen_fill, b)
    if dec_secret.shape[0]:
        pre_hat[:, P.crossblock_secret] = polar_transform(dec_secret).T

    amb_random = False
    t_hat = np.zeros((P.crossblock_random.size, 0), dtype=np.uint8)
    if P.crossblock_random.size:
        if code.scenario is ScenarioTag.SIM_B:
            unfrozen = P.bec_info_main
            fill = np.zeros(b, dtype=np.uint8)
        else:
            unfrozen = P.bec_info_eve
            fill = np.zeros((P.crossblock_random.size, b), dtype=np.uint8)
            fill[:, code.weak_extra_positions] = msg.crossblock_random_extra
        random_vals = pre_hat[:, P.crossblock_random].T
        dec_random, amb_random = _row_erasure_decode(random_vals, sup, unfrozen, fill, b)
        pre_hat[:, P.crossblock_random] = polar_transform(dec_random).T
        t_hat = dec_random[:, unfrozen]

    mask_deg = np.ones(n, dtype=bool)
    mask_deg[P.block_random] = False
    dec_deg, _ = sc_decode_batch(llr[deg], mask_deg, pre_hat[deg], erasure_law=False)
    pre_hat[deg] = dec_deg

    rnd_hat = RandomBundle(
        crossblock_secret=dec_secret[:, info],
        block_random=pre_hat[:, P.block_random],
        crossblock_random=t_hat,
    )
    ambiguous = amb_secret or amb_random
    status = DecodeStatus(ok=not ambiguous, failed_phase="phase2" if ambiguous else None)
    return rnd_hat, status


def target_fractions(params: WiretapParams) -> dict:
    """Limiting class fractions (of n) and erasure-info fractions (of b) as
    block length and frame size grow, for the scenario of ``params``."""
    tag = classify_scenario(params)
    if tag is ScenarioTag.UNSUPPORTED:
        raise UnsupportedScenarioError("no partition targets in the unsupported regime")
    h1, h2, h1s, h2s = (
        binary_entropy(v) for v in (params.p1, params.p2, params.p1s, params.p2s)
    )
    if tag in _STRONG_LAYOUT:
        parts = {
            "block_random": 1.0 - h2s,
            "crossblock_secret": h2s - h1s,
            "perblock_message": h1s - h2,
            "crossblock_message": h2 - h1,
            "crossblock_random": 0.0,
            "frozen": h1,
        }
    else:
        parts = {
            "block_random": 1.0 - h2s,
            "crossblock_secret": h2s - h2,
            "crossblock_random": h2 - h1s,
            "crossblock_message": h1s - h1,
            "perblock_message": 0.0,
            "frozen": h1,
        }
    parts["bec_info_main"] = params.q1
    parts["bec_info_eve"] = params.q1s
    return parts
