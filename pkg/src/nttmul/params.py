"""Ring validation and transform-table derivation.

A transform instance is pinned down by a prime modulus M and a power-of-two
length N with 2N | M - 1.  From the smallest generator of the multiplicative
group this module derives, deterministically:

* ``phi``   - primitive 2N-th root of unity (negacyclic weighting factor),
* ``omega`` - primitive N-th root, ``omega = phi**2``,
* per-coefficient weight tables ``phi**i`` and ``N**-1 * phi**-i`` (the
  inverse-transform scaling is folded into the unweighting table so the
  final step is a single multiply per coefficient),
* per-stage twiddle tables in the exact order a streaming pipeline consumes
  them, forward and inverse, plus a register/memory storage annotation.

Tables round-trip through JSON with all integers as decimal strings; loading
re-validates every invariant so a tampered file is rejected.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from functools import lru_cache

from .modarith import ModulusContext

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all n < 2**64."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        x = rng.randrange(2, n - 1)
        y = x
        c = rng.randrange(1, n - 1)
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation by trial division plus Pollard rho for the tail."""
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    factors: dict[int, int] = {}
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    rng = random.Random(0xC0FFEE)
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        d = m
        while d == m:
            d = _pollard_rho(m, rng)
        stack.append(d)
        stack.append(m // d)
    return factors


def ring_problem(M: int, N: int) -> str | None:
    """None when (M, N) supports a length-N negacyclic NTT, else the reason."""
    if N < 2 or N & (N - 1):
        return f"N={N} is not a power of two >= 2"
    if M < 3:
        return f"M={M} is too small"
    if not is_prime(M):
        return f"M={M} is not prime"
    if (M - 1) % (2 * N):
        return f"M-1 = {M - 1} is not divisible by 2N = {2 * N}"
    return None


def validate_ring(M: int, N: int) -> bool:
    """True iff M is prime, N a power of two, and 2N divides M - 1."""
    return ring_problem(M, N) is None


def bit_reverse_index(i: int, bits: int) -> int:
    """Reverse the low ``bits`` bits of i."""
    r = 0
    for _ in range(bits):
        r = (r << 1) | (i & 1)
        i >>= 1
    return r


def _smallest_generator(M: int) -> int:
    exps = [(M - 1) // p for p in factorize(M - 1)]
    g = 2
    while True:
        if all(pow(g, e, M) != 1 for e in exps):
            return g
        g += 1


def derive_roots(M: int, N: int) -> tuple[int, int]:
    """Deterministic (omega, phi) for the ring: phi = g**((M-1)/2N), omega = phi**2.

    g is the smallest generator of the multiplicative group, so repeated runs
    and independent implementations agree on the exact root values.
    """
    problem = ring_problem(M, N)
    if problem:
        raise ValueError(problem)
    g = _smallest_generator(M)
    phi = pow(g, (M - 1) // (2 * N), M)
    omega = phi * phi % M
    assert pow(phi, N, M) == M - 1, "phi**N must be -1"
    assert pow(omega, N, M) == 1 and pow(omega, N // 2, M) != 1
    return omega, phi


@dataclass(frozen=True)
class NttParams:
    """Complete table set for one (M, N) transform instance.

    ``stage_twiddles_fwd[s-1]`` holds the distinct twiddles stage s consumes,
    in feed order, one per butterfly block; counts double per forward stage
    (1, 2, 4, ...) and halve per inverse stage.  ``storage_kind_*`` marks
    whether a stage's twiddles fit a register bank ("regs", up to 4 values)
    or need a memory ("mem").
    """

    n: int
    ctx: ModulusContext
    omega: int
    phi: int
    omega_inv: int
    phi_inv: int
    n_inv: int
    weights_fwd: tuple[int, ...]
    weights_inv_scaled: tuple[int, ...]
    stage_twiddles_fwd: tuple[tuple[int, ...], ...]
    stage_twiddles_inv: tuple[tuple[int, ...], ...]
    storage_kind_fwd: tuple[str, ...]
    storage_kind_inv: tuple[str, ...]

    @property
    def M(self) -> int:
        return self.ctx.M

    @property
    def num_stages(self) -> int:
        return self.n.bit_length() - 1

    def validate(self) -> None:
        """Re-check every structural invariant; raises ValueError on any failure."""
        M, N = self.M, self.n
        problem = ring_problem(M, N)
        if problem:
            raise ValueError(problem)
        m = self.num_stages

        def fail(msg: str):
            raise ValueError(f"invalid transform tables for (M={M}, N={N}): {msg}")

        for name, val in (("omega", self.omega), ("phi", self.phi),
                          ("omega_inv", self.omega_inv), ("phi_inv", self.phi_inv),
                          ("n_inv", self.n_inv)):
            if not (0 < val < M):
                fail(f"{name}={val} out of range")
        if pow(self.phi, N, M) != M - 1:
            fail("phi**N != -1")
        if self.phi * self.phi % M != self.omega:
            fail("omega != phi**2")
        if pow(self.omega, N, M) != 1 or (N > 1 and pow(self.omega, N // 2, M) == 1):
            fail("omega is not a primitive N-th root")
        if self.omega * self.omega_inv % M != 1:
            fail("omega_inv is wrong")
        if self.phi * self.phi_inv % M != 1:
            fail("phi_inv is wrong")
        if N % M == 0 or N * self.n_inv % M != 1:
            fail("n_inv is wrong")
        if len(self.weights_fwd) != N or len(self.weights_inv_scaled) != N:
            fail("weight tables must have N entries")
        w = 1
        for i in range(N):
            if self.weights_fwd[i] != w:
                fail(f"weights_fwd[{i}] != phi**{i}")
            if self.weights_inv_scaled[i] != self.n_inv * pow(self.phi_inv, i, M) % M:
                fail(f"weights_inv_scaled[{i}] != n_inv * phi**-{i}")
            w = w * self.phi % M
        if len(self.stage_twiddles_fwd) != m or len(self.stage_twiddles_inv) != m:
            fail("need one twiddle table per stage")
        for s in range(1, m + 1):
            exp_fwd = _forward_stage_table(self.omega, N, M, s)
            if self.stage_twiddles_fwd[s - 1] != exp_fwd:
                fail(f"forward stage {s} twiddles do not match the schedule")
            exp_inv = _inverse_stage_table(self.omega_inv, N, M, s)
            if self.stage_twiddles_inv[s - 1] != exp_inv:
                fail(f"inverse stage {s} twiddles do not match the schedule")
        if self.storage_kind_fwd != _storage_kinds(self.stage_twiddles_fwd):
            fail("forward storage kinds inconsistent with table sizes")
        if self.storage_kind_inv != _storage_kinds(self.stage_twiddles_inv):
            fail("inverse storage kinds inconsistent with table sizes")


def _forward_stage_table(omega: int, N: int, M: int, s: int) -> tuple[int, ...]:
    # Stage s pairs lanes at distance N/2**s; each block of size N/2**(s-1)
    # shares one twiddle omega**(dist * bitrev(block)).
    dist = N >> s
    return tuple(pow(omega, dist * bit_reverse_index(t, s - 1), M)
                 for t in range(1 << (s - 1)))


def _inverse_stage_table(omega_inv: int, N: int, M: int, s: int) -> tuple[int, ...]:
    # Inverse stage s pairs lanes at distance 2**(s-1); block twiddles are
    # omega**-(dist * bitrev(block)) over N/2**s blocks.
    m = N.bit_length() - 1
    dist = 1 << (s - 1)
    return tuple(pow(omega_inv, dist * bit_reverse_index(t, m - s), M)
                 for t in range(1 << (m - s)))


def _storage_kinds(tables: tuple[tuple[int, ...], ...]) -> tuple[str, ...]:
    return tuple("regs" if len(t) <= 4 else "mem" for t in tables)


@lru_cache(maxsize=32)
def _cached_context(M: int) -> ModulusContext:
    return ModulusContext.create(M)


def build_params(M: int, N: int) -> NttParams:
    """Derive the full table set for (M, N); every invariant holds on return."""
    problem = ring_problem(M, N)
    if problem:
        raise ValueError(problem)
    ctx = _cached_context(M)
    omega, phi = derive_roots(M, N)
    omega_inv = pow(omega, -1, M)
    phi_inv = pow(phi, -1, M)
    n_inv = pow(N, -1, M)
    weights_fwd = []
    weights_inv_scaled = []
    w = 1
    wi = n_inv
    for _ in range(N):
        weights_fwd.append(w)
        weights_inv_scaled.append(wi)
        w = w * phi % M
        wi = wi * phi_inv % M
    m = N.bit_length() - 1
    fwd = tuple(_forward_stage_table(omega, N, M, s) for s in range(1, m + 1))
    inv = tuple(_inverse_stage_table(omega_inv, N, M, s) for s in range(1, m + 1))
    params = NttParams(
        n=N, ctx=ctx, omega=omega, phi=phi, omega_inv=omega_inv,
        phi_inv=phi_inv, n_inv=n_inv,
        weights_fwd=tuple(weights_fwd),
        weights_inv_scaled=tuple(weights_inv_scaled),
        stage_twiddles_fwd=fwd, stage_twiddles_inv=inv,
        storage_kind_fwd=_storage_kinds(fwd), storage_kind_inv=_storage_kinds(inv))
    params.validate()
    return params


def params_to_dict(params: NttParams) -> dict:
    """JSON-ready dict; every integer is a decimal string."""
    return {
        "M": str(params.M),
        "N": str(params.n),
        "omega": str(params.omega),
        "phi": str(params.phi),
        "omega_inv": str(params.omega_inv),
        "phi_inv": str(params.phi_inv),
        "n_inv": str(params.n_inv),
        "weights_fwd": [str(v) for v in params.weights_fwd],
        "weights_inv_scaled": [str(v) for v in params.weights_inv_scaled],
        "stage_twiddles_fwd": [[str(v) for v in t]
                               for t in params.stage_twiddles_fwd],
        "stage_twiddles_inv": [[str(v) for v in t]
                               for t in params.stage_twiddles_inv],
        "storage_kind_fwd": list(params.storage_kind_fwd),
        "storage_kind_inv": list(params.storage_kind_inv),
    }


def emit_tables(params: NttParams, path) -> None:
    """Write the table file.  Deterministic byte-for-byte for equal params."""
    with open(path, "w") as fh:
        json.dump(params_to_dict(params), fh, indent=2, sort_keys=True)
        fh.write("\n")


def params_from_dict(obj: dict) -> NttParams:
    """Rebuild params from a table-file dict, re-checking every invariant."""
    try:
        M = int(obj["M"])
        N = int(obj["N"])
        fwd = tuple(tuple(int(v) for v in t) for t in obj["stage_twiddles_fwd"])
        inv = tuple(tuple(int(v) for v in t) for t in obj["stage_twiddles_inv"])
        params = NttParams(
            n=N, ctx=_cached_context(M),
            omega=int(obj["omega"]), phi=int(obj["phi"]),
            omega_inv=int(obj["omega_inv"]), phi_inv=int(obj["phi_inv"]),
            n_inv=int(obj["n_inv"]),
            weights_fwd=tuple(int(v) for v in obj["weights_fwd"]),
            weights_inv_scaled=tuple(int(v) for v in obj["weights_inv_scaled"]),
            stage_twiddles_fwd=fwd, stage_twiddles_inv=inv,
            storage_kind_fwd=tuple(obj["storage_kind_fwd"]),
            storage_kind_inv=tuple(obj["storage_kind_inv"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed table file: {exc}") from exc
    params.validate()
    return params


def load_tables(path) -> NttParams:
    with open(path) as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError("malformed table file: expected a JSON object")
    return params_from_dict(obj)
