"""Polar-code primitives: transform, reliability profiles, successive cancellation.

Bit vectors are numpy ``uint8`` arrays with values in {0, 1} whose length is a
power of two.  The encoder map is ``x = u @ (B_n F^k) (mod 2)`` where ``F`` is
the 2x2 kernel [[1, 0], [1, 1]], ``F^k`` its k-fold Kronecker power and ``B_n``
the bit-reversal permutation matrix.  The map is an involution over GF(2), so
the inverse transform is the transform itself.

Index convention
----------------
All index sets (unfrozen sets, reliability profiles, good sets) refer to the
position of a bit in the *decoder* order, i.e. the order in which successive
cancellation decides bits.  Indices are 0-based.  The reliability recursion
``z_minus = 2z - z^2``, ``z_plus = z^2`` emits values in exactly this order.

Log-likelihood ratios are ``log(P(y|bit=0) / P(y|bit=1))``: positive favours
bit 0.  ``+inf`` / ``-inf`` encode certainty, 0 encodes a structural erasure
or a likelihood tie.  Ties on unfrozen decisions decode to bit 1.  For erasure
laws a zero LLR at an unfrozen decision is a genuine ambiguity and is reported
as a decode failure, never silently guessed.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Mapping

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .channels import ChannelLaw

__all__ = [
    "DecodeFailure",
    "PolarCodeSpec",
    "ReliabilityProfile",
    "SoftObservation",
    "bit_reversal_permutation",
    "polar_transform",
    "polar_transform_inverse",
    "reliability_profile",
    "sc_decode",
    "sc_decode_batch",
    "select_good_set",
]

PROFILE_METHODS = ("exact-bec", "bhattacharyya-bound", "genie-mc")

# tanh saturates near 19; this keeps arctanh finite unless an input was
# genuinely infinite, in which case the exact certainty algebra takes over.
_ATANH_LIMIT = 1.0 - 1e-15


class DecodeFailure(Exception):
    """Successive cancellation met an unresolvable erasure at an unfrozen bit."""


def _require_block_length(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or n < 1 or (n & (n - 1)) != 0:
        raise ValueError(f"block length must be a power of two >= 1, got {n!r}")
    return int(n)


def _as_bits(v: np.ndarray | Iterable[int]) -> np.ndarray:
    arr = np.asarray(v)
    if arr.dtype != np.uint8:
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("bit vectors may only contain 0 and 1")
        arr = arr.astype(np.uint8)
    return arr


@functools.lru_cache(maxsize=None)
def _cached_bit_reversal(n: int) -> np.ndarray:
    k = n.bit_length() - 1
    perm = np.zeros(n, dtype=np.int64)
    for i in range(n):
        r = 0
        x = i
        for _ in range(k):
            r = (r << 1) | (x & 1)
            x >>= 1
        perm[i] = r
    perm.setflags(write=False)
    return perm


def bit_reversal_permutation(n: int) -> np.ndarray:
    """Involutive permutation of ``{0, .., n-1}`` reversing each index's bits.

    ``n`` must be a power of two.  Entry ``i`` holds the index whose binary
    expansion (over log2(n) digits) is the reverse of ``i``'s.
    """
    return _cached_bit_reversal(_require_block_length(n))


def _kernel_power_inplace(x: np.ndarray) -> None:
    # butterfly for v -> v @ F^k over GF(2), operating on the last axis
    n = x.shape[-1]
    d = 1
    while d < n:
        v = x.reshape(x.shape[:-1] + (n // (2 * d), 2, d))
        v[..., 0, :] ^= v[..., 1, :]
        d *= 2


def polar_transform(u: np.ndarray | Iterable[int]) -> np.ndarray:
    """Encode ``u`` (last axis = block) through the bit-reversed polar map.

    Accepts a single vector or a batch with the block on the last axis.
    Runs in O(n log n) per block and agrees bit-for-bit with the dense
    matrix product against ``B_n F^k``.
    """
    u = _as_bits(u)
    n = _require_block_length(u.shape[-1])
    x = np.ascontiguousarray(u[..., bit_reversal_permutation(n)])
    _kernel_power_inplace(x)
    return x


def polar_transform_inverse(x: np.ndarray | Iterable[int]) -> np.ndarray:
    """Invert :func:`polar_transform`.  The map is an involution, so this is
    the same butterfly; kept as its own entry point for call-site clarity."""
    return polar_transform(x)


@dataclass(frozen=True)
class ReliabilityProfile:
    """Per-index channel quality in decoder order.

    ``z`` holds, depending on ``method``: exact erasure probabilities
    (``exact-bec``), Bhattacharyya upper bounds (``bhattacharyya-bound``)
    or Monte Carlo genie-aided decision error estimates (``genie-mc``).
    Lower is better in every case.
    """

    n: int
    z: np.ndarray
    method: str
    law: "ChannelLaw"

    def __post_init__(self) -> None:
        _require_block_length(self.n)
        if self.method not in PROFILE_METHODS:
            raise ValueError(f"unknown profile method {self.method!r}")
        z = np.asarray(self.z, dtype=np.float64)
        if z.shape != (self.n,):
            raise ValueError("profile length must match n")
        if (z < 0).any() or (z > 1).any():
            raise ValueError("profile values must lie in [0, 1]")
        object.__setattr__(self, "z", z)


def _doubling_recursion(z0: float, n: int) -> np.ndarray:
    z = np.array([z0], dtype=np.float64)
    while z.size < n:
        out = np.empty(z.size * 2, dtype=np.float64)
        out[0::2] = 2.0 * z - z * z
        out[1::2] = z * z
        z = out
    return np.clip(z, 0.0, 1.0)


def _channel_llrs(x: np.ndarray, law: "ChannelLaw", rng: np.random.Generator) -> np.ndarray:
    # sampling mirror of channels.transmit for profile estimation
    if law.kind == "bsc":
        flips = rng.random(x.shape) < law.param
        y = x ^ flips
        with np.errstate(divide="ignore"):
            mag = np.log((1.0 - law.param) / law.param) if law.param > 0 else np.inf
        return (1.0 - 2.0 * y) * mag
    erased = rng.random(x.shape) < law.param
    llr = (1.0 - 2.0 * x.astype(np.float64)) * np.inf
    llr[erased] = 0.0
    return llr


def _genie_mc_profile(law: "ChannelLaw", n: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    bad = np.zeros(n, dtype=np.float64)
    done = 0
    chunk = max(1, min(trials, (1 << 22) // n))
    while done < trials:
        m = min(chunk, trials - done)
        u = rng.integers(0, 2, size=(m, n), dtype=np.uint8)
        x = polar_transform(u)
        llr = _channel_llrs(x, law, rng)
        leaf = _genie_leaf_llrs(llr, u)
        if law.kind == "bsc":
            decisions = (leaf <= 0.0).astype(np.uint8)
            bad += (decisions != u).sum(axis=0)
        else:
            bad += (leaf == 0.0).sum(axis=0)
        done += m
    return bad / float(trials)


def reliability_profile(
    law: "ChannelLaw",
    n: int,
    method: str = "bhattacharyya-bound",
    *,
    trials: int = 10_000,
    rng: np.random.Generator | None = None,
) -> ReliabilityProfile:
    """Compute a per-index reliability profile for ``law`` at block length ``n``.

    Parameters
    ----------
    law:
        Binary symmetric or binary erasure channel law.
    n:
        Block length, a power of two.
    method:
        ``exact-bec`` evolves exact erasure probabilities (erasure laws only).
        ``bhattacharyya-bound`` runs the same recursion from the Bhattacharyya
        parameter: ``2 sqrt(p(1-p))`` for a flip law (upper bounds), the
        erasure probability for an erasure law (exact there).
        ``genie-mc`` estimates per-index decision error rates from ``trials``
        genie-aided successive cancellation runs.
    """
    n = _require_block_length(n)
    if method == "exact-bec":
        if law.kind != "bec":
            raise ValueError("exact-bec profiles require an erasure law")
        z = _doubling_recursion(float(law.param), n)
    elif method == "bhattacharyya-bound":
        if law.kind == "bsc":
            p = float(law.param)
            z0 = 2.0 * np.sqrt(p * (1.0 - p))
        else:
            z0 = float(law.param)
        z = _doubling_recursion(z0, n)
    elif method == "genie-mc":
        if trials < 1:
            raise ValueError("genie-mc needs a positive trial count")
        if rng is None:
            rng = np.random.default_rng(0)
        z = _genie_mc_profile(law, n, int(trials), rng)
    else:
        raise ValueError(f"unknown profile method {method!r}")
    return ReliabilityProfile(n=n, z=z, method=method, law=law)


def select_good_set(profile: ReliabilityProfile, threshold: float) -> np.ndarray:
    """Indices whose profile value is at or below ``threshold``, sorted ascending."""
    if not (0.0 < threshold <= 1.0):
        raise ValueError(f"threshold must lie in (0, 1], got {threshold!r}")
    return np.nonzero(profile.z <= threshold)[0].astype(np.int64)


@dataclass(frozen=True)
class SoftObservation:
    """Channel output in LLR form plus a structural erasure mask.

    ``llr[i] == +inf`` means position i is certainly 0, ``-inf`` certainly 1,
    finite values are soft evidence and entries flagged in ``erased`` carry no
    information (their LLR is pinned to 0).
    """

    llr: np.ndarray
    erased: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        llr = np.asarray(self.llr, dtype=np.float64)
        _require_block_length(llr.shape[-1])
        if llr.ndim != 1:
            raise ValueError("a SoftObservation holds a single block")
        erased = self.erased
        if erased is None:
            erased = np.zeros(llr.shape, dtype=bool)
        else:
            erased = np.asarray(erased, dtype=bool)
            if erased.shape != llr.shape:
                raise ValueError("erasure mask shape must match llr shape")
        if (llr[erased] != 0.0).any():
            raise ValueError("erased positions must carry zero LLR")
        object.__setattr__(self, "llr", llr)
        object.__setattr__(self, "erased", erased)

    @classmethod
    def certain(cls, bits: np.ndarray | Iterable[int]) -> "SoftObservation":
        """Observation of a perfectly known bit vector."""
        bits = _as_bits(bits)
        return cls(llr=(1.0 - 2.0 * bits.astype(np.float64)) * np.inf)

    @classmethod
    def with_erasures(
        cls, bits: np.ndarray | Iterable[int], erased: np.ndarray | Iterable[bool]
    ) -> "SoftObservation":
        """Known bits except at flagged positions, which are structural erasures."""
        bits = _as_bits(bits)
        erased = np.asarray(list(erased) if not isinstance(erased, np.ndarray) else erased, dtype=bool)
        llr = (1.0 - 2.0 * bits.astype(np.float64)) * np.inf
        llr[erased] = 0.0
        return cls(llr=llr, erased=erased)

    def __len__(self) -> int:
        return int(self.llr.shape[0])


@dataclass(frozen=True)
class PolarCodeSpec:
    """Block length, unfrozen index set and (optional) frozen bit values.

    ``frozen_values`` maps frozen indices to bits; omitted means all zero.
    When provided it must cover exactly the complement of ``unfrozen``.
    """

    n: int
    unfrozen: np.ndarray
    frozen_values: Mapping[int, int] | None = None

    def __post_init__(self) -> None:
        n = _require_block_length(self.n)
        unfrozen = np.unique(np.asarray(self.unfrozen, dtype=np.int64))
        if unfrozen.size and (unfrozen[0] < 0 or unfrozen[-1] >= n):
            raise ValueError("unfrozen indices out of range")
        object.__setattr__(self, "unfrozen", unfrozen)
        if self.frozen_values is not None:
            frozen = set(range(n)) - set(unfrozen.tolist())
            if set(self.frozen_values) != frozen:
                raise ValueError("frozen_values must be keyed exactly by the frozen set")
            if any(v not in (0, 1) for v in self.frozen_values.values()):
                raise ValueError("frozen values must be bits")

    def frozen_mask(self) -> np.ndarray:
        mask = np.ones(self.n, dtype=bool)
        mask[self.unfrozen] = False
        return mask

    def frozen_vector(self) -> np.ndarray:
        vec = np.zeros(self.n, dtype=np.uint8)
        if self.frozen_values:
            for idx, bit in self.frozen_values.items():
                vec[idx] = bit
        return vec


def _f_combine(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # exact check-node update, 2 atanh(tanh(a/2) tanh(b/2)), with the
    # certainty algebra restored for genuinely infinite inputs
    m = np.tanh(a * 0.5) * np.tanh(b * 0.5)
    out = 2.0 * np.arctanh(np.clip(m, -_ATANH_LIMIT, _ATANH_LIMIT))
    inf_a = np.isinf(a)
    inf_b = np.isinf(b)
    if inf_a.any() or inf_b.any():
        sa = np.sign(a)
        sb = np.sign(b)
        # the unselected branch may evaluate 0 * inf; the where masks it out
        with np.errstate(invalid="ignore"):
            out = np.where(inf_a & inf_b, sa * sb * np.inf, out)
            out = np.where(inf_a & ~inf_b, sa * b, out)
            out = np.where(~inf_a & inf_b, sb * a, out)
    return out


def _g_combine(a: np.ndarray, b: np.ndarray, u_left: np.ndarray) -> np.ndarray:
    # exact variable-node update; conflicting certainties (inf - inf) carry
    # no information and collapse to an erasure
    with np.errstate(invalid="ignore"):
        out = b + (1.0 - 2.0 * u_left.astype(np.float64)) * a
    bad = np.isnan(out)
    if bad.any():
        out = np.where(bad, 0.0, out)
    return out


def sc_decode_batch(
    llr: np.ndarray,
    frozen_mask: np.ndarray,
    frozen_values: np.ndarray,
    erasure_law: bool,
) -> tuple[np.ndarray, np.ndarray]:
    """Successive cancellation over a batch of blocks sharing one frozen set.

    Parameters
    ----------
    llr:
        (batch, n) channel LLRs in codeword order.
    frozen_mask:
        (n,) True where the decoder-order position is frozen.
    frozen_values:
        (n,) or (batch, n) pinned bits for frozen positions.
    erasure_law:
        When True a zero LLR at an unfrozen decision marks the block ambiguous.

    Returns
    -------
    (decisions, ambiguous):
        decisions is (batch, n) uint8 in decoder order; ambiguous is a
        (batch,) bool mask of blocks that hit an unresolvable erasure.
    """
    llr = np.asarray(llr, dtype=np.float64)
    if llr.ndim != 2:
        raise ValueError("llr must be (batch, n)")
    batch, n = llr.shape
    _require_block_length(n)
    frozen_mask = np.asarray(frozen_mask, dtype=bool)
    if frozen_mask.shape != (n,):
        raise ValueError("frozen_mask must be (n,)")
    frozen_values = np.asarray(frozen_values, dtype=np.uint8)
    if frozen_values.ndim == 1:
        frozen_values = np.broadcast_to(frozen_values, (batch, n))
    if frozen_values.shape != (batch, n):
        raise ValueError("frozen_values must be (n,) or (batch, n)")

    decisions = np.empty((batch, n), dtype=np.uint8)
    ambiguous = np.zeros(batch, dtype=bool)
    if batch == 0:
        return decisions, ambiguous

    work = np.ascontiguousarray(llr[:, bit_reversal_permutation(n)])

    def descend(seg: np.ndarray, lo: int) -> np.ndarray:
        width = seg.shape[1]
        if width == 1:
            col = seg[:, 0]
            if frozen_mask[lo]:
                u = frozen_values[:, lo]
            else:
                u = (col <= 0.0).astype(np.uint8)
                if erasure_law:
                    np.logical_or(ambiguous, col == 0.0, out=ambiguous)
            decisions[:, lo] = u
            return u[:, None]
        half = width // 2
        a = seg[:, :half]
        b = seg[:, half:]
        x_left = descend(_f_combine(a, b), lo)
        x_right = descend(_g_combine(a, b, x_left), lo + half)
        out = np.empty((batch, width), dtype=np.uint8)
        out[:, :half] = x_left ^ x_right
        out[:, half:] = x_right
        return out

    descend(work, 0)
    return decisions, ambiguous


def _genie_leaf_llrs(llr: np.ndarray, u_true: np.ndarray) -> np.ndarray:
    # decision LLRs when every partial sum uses the true bit (genie aided);
    # used for Monte Carlo reliability estimation
    batch, n = llr.shape
    work = np.ascontiguousarray(llr[:, bit_reversal_permutation(n)])
    leaves = np.empty((batch, n), dtype=np.float64)

    def descend(seg: np.ndarray, lo: int) -> np.ndarray:
        width = seg.shape[1]
        if width == 1:
            leaves[:, lo] = seg[:, 0]
            return u_true[:, lo][:, None]
        half = width // 2
        a = seg[:, :half]
        b = seg[:, half:]
        x_left = descend(_f_combine(a, b), lo)
        x_right = descend(_g_combine(a, b, x_left), lo + half)
        out = np.empty((batch, width), dtype=np.uint8)
        out[:, :half] = x_left ^ x_right
        out[:, half:] = x_right
        return out

    descend(work, 0)
    return leaves


def sc_decode(obs: SoftObservation, spec: PolarCodeSpec, law: "ChannelLaw") -> np.ndarray:
    """Decode one block under ``law`` with the given frozen structure.

    Frozen positions are copied from the spec, unfrozen positions follow the
    likelihood rule with ties deciding bit 1.  For erasure laws an unfrozen
    decision at LLR exactly 0 raises :class:`DecodeFailure` (frame erasure).
    """
    if len(obs) != spec.n:
        raise ValueError("observation length does not match code spec")
    if obs.erased.any() and law.kind != "bec":
        raise ValueError("erased symbols are only meaningful for erasure laws")
    decisions, ambiguous = sc_decode_batch(
        obs.llr[None, :],
        spec.frozen_mask(),
        spec.frozen_vector(),
        erasure_law=(law.kind == "bec"),
    )
    if ambiguous[0]:
        raise DecodeFailure("unfrozen decision hit an unresolved erasure")
    return decisions[0]
