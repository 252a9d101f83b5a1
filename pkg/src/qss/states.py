"""Three-qubit pure states in the canonical five-coefficient form.

Basis ordering is |q_A q_B q_C> -> 4*q_A + 2*q_B + q_C, with A the dealer,
B the assistant and C the reconstructor.  A pure state is a plain complex
numpy array of length 8.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import qmath

NORM_TOL = 1e-10
TWO_PI = 2.0 * math.pi

# amplitude slots of lambda0..lambda4
ACIN_INDEX = (0, 4, 5, 6, 7)


class ParameterError(ValueError):
    pass


class ChannelRole(enum.Enum):
    """Bipartite channel, identified by the pair of parties it keeps."""

    DealerAssistant = (0, 1)
    DealerReconstructor = (0, 2)
    AssistantReconstructor = (1, 2)

    @property
    def keep(self) -> tuple[int, int]:
        return self.value

    @property
    def label(self) -> str:
        return {"DealerAssistant": "AB", "DealerReconstructor": "AC",
                "AssistantReconstructor": "BC"}[self.name]


AB = ChannelRole.DealerAssistant
AC = ChannelRole.DealerReconstructor
BC = ChannelRole.AssistantReconstructor


@dataclass(frozen=True)
class AcinParams:
    """Coefficients of l0|000> + l1 e^{i phi}|100> + l2|101> + l3|110> + l4|111>."""

    lambda0: float
    lambda1: float
    lambda2: float
    lambda3: float
    lambda4: float
    phi: float = 0.0

    def __post_init__(self):
        lam = self.lambdas
        if not np.all(np.isfinite(lam)) or not math.isfinite(self.phi):
            raise ParameterError("non-finite parameter")
        if np.any(lam < 0):
            raise ParameterError(f"coefficients must be nonnegative: {lam}")
        total = float(np.sum(lam * lam))
        if abs(total - 1.0) > NORM_TOL:
            raise ParameterError(f"sum of squared coefficients is {total!r}, not 1")
        object.__setattr__(self, "phi", float(self.phi) % TWO_PI)

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([self.lambda0, self.lambda1, self.lambda2,
                         self.lambda3, self.lambda4], dtype=float)

    @classmethod
    def from_lambdas(cls, lambdas, phi: float = 0.0) -> "AcinParams":
        l0, l1, l2, l3, l4 = (float(x) for x in lambdas)
        return cls(l0, l1, l2, l3, l4, phi)


@dataclass(frozen=True)
class MsrParams:
    theta: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi / 2):
            raise ParameterError(f"theta={self.theta!r} outside [0, pi/2]")


def check_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (8,):
        raise qmath.DimensionError(f"expected 8 amplitudes, got shape {psi.shape}")
    norm = float(np.vdot(psi, psi).real)
    if abs(norm - 1.0) > NORM_TOL:
        raise ParameterError(f"state norm^2 is {norm!r}, not 1")
    return psi


def normalize(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    n = np.linalg.norm(psi)
    if n == 0:
        raise ParameterError("cannot normalize the zero vector")
    return psi / n


def from_acin(p: AcinParams) -> np.ndarray:
    psi = np.zeros(8, dtype=complex)
    lam = p.lambdas
    psi[list(ACIN_INDEX)] = lam
    psi[4] = lam[1] * np.exp(1j * p.phi)
    return psi


def acin_from_amplitudes(psi) -> AcinParams:
    """Read the canonical coefficients back out of a state in canonical form."""
    psi = check_state(psi)
    other = [i for i in range(8) if i not in ACIN_INDEX]
    if np.max(np.abs(psi[other])) > NORM_TOL:
        raise ParameterError("state is not in canonical form (stray amplitudes)")
    real_slots = psi[[0, 5, 6, 7]]
    if np.max(np.abs(real_slots.imag)) > NORM_TOL or np.any(real_slots.real < -NORM_TOL):
        raise ParameterError("canonical coefficients must be real and nonnegative")
    l1 = abs(psi[4])
    phi = float(np.angle(psi[4])) % TWO_PI if l1 > NORM_TOL else 0.0
    l0, l2, l3, l4 = np.clip(real_slots.real, 0.0, None)
    return AcinParams(l0, l1, l2, l3, l4, phi)


def msr_params(theta: float) -> AcinParams:
    MsrParams(theta)
    r = 1.0 / math.sqrt(2.0)
    return AcinParams(math.cos(theta) * r, math.sin(theta) * r, 0.0, 0.0, r, 0.0)


def from_msr(p: MsrParams | float) -> np.ndarray:
    """One-parameter family cos(t)|000> + sin(t)|100> + |111>, all over sqrt 2."""
    theta = p.theta if isinstance(p, MsrParams) else float(p)
    return from_acin(msr_params(theta))


def ghz() -> np.ndarray:
    return from_msr(0.0)


def density(psi) -> np.ndarray:
    psi = check_state(psi)
    return np.outer(psi, psi.conj())


def reduced_pair(psi, channel: ChannelRole) -> np.ndarray:
    """Two-qubit reduced state of ``psi`` on the given channel."""
    return qmath.partial_trace(density(psi), channel.keep)


def stream_seed(seed: int, index: int) -> np.random.SeedSequence:
    """Independent seed for sample ``index`` of a stream rooted at ``seed``."""
    return np.random.SeedSequence([int(seed) & (2**64 - 1), int(index)])


def sample_acin(seed, include_phase: bool = False) -> AcinParams:
    """Draw canonical coefficients with squares flat on the 4-simplex.

    ``seed`` is an integer or a ``SeedSequence``; equal seeds give equal draws.
    """
    rng = np.random.default_rng(seed)
    cuts = np.sort(rng.random(4))
    w = np.diff(np.concatenate(([0.0], cuts, [1.0])))
    lam = np.sqrt(w)
    # sqrt of the spacings can miss unit norm by an ulp or two
    lam = lam / math.sqrt(float(np.sum(lam * lam)))
    phi = float(rng.uniform(0.0, TWO_PI)) if include_phase else 0.0
    return AcinParams.from_lambdas(lam, phi)


# ---------------------------------------------------------------------------
# state files


class StateFileError(ValueError):
    pass


def parse_state_text(text: str) -> tuple[np.ndarray, AcinParams | None]:
    """Parse the tagged state format.

    ``acin`` is followed by one line ``l0 l1 l2 l3 l4 phi``; ``amplitudes`` by
    eight lines ``re im``.  Blank lines and ``#`` comments are skipped.
    """
    lines = []
    for raw in text.splitlines():
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        lines.append(s)
    if not lines:
        raise StateFileError("empty state file")
    tag, body = lines[0].lower(), lines[1:]
    try:
        if tag == "acin":
            if len(body) != 1:
                raise StateFileError("acin state needs exactly one data line")
            vals = [float(x) for x in body[0].split()]
            if len(vals) != 6:
                raise StateFileError("acin line needs six numbers")
            params = AcinParams.from_lambdas(vals[:5], vals[5])
            return from_acin(params), params
        if tag == "amplitudes":
            if len(body) != 8:
                raise StateFileError("amplitudes state needs eight lines")
            amps = []
            for line in body:
                parts = line.split()
                if len(parts) != 2:
                    raise StateFileError(f"bad amplitude line: {line!r}")
                amps.append(complex(float(parts[0]), float(parts[1])))
            return check_state(np.array(amps)), None
    except ParameterError as exc:
        raise StateFileError(str(exc)) from exc
    except ValueError as exc:
        if isinstance(exc, StateFileError):
            raise
        raise StateFileError(f"unparseable number: {exc}") from exc
    raise StateFileError(f"unknown state tag {lines[0]!r}")


def read_state_file(path) -> tuple[np.ndarray, AcinParams | None]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise StateFileError(f"cannot read {path}: {exc}") from exc
    return parse_state_text(text)


def format_state_text(psi=None, params: AcinParams | None = None) -> str:
    if params is not None:
        vals = list(params.lambdas) + [params.phi]
        return "acin\n" + " ".join(repr(float(v)) for v in vals) + "\n"
    psi = check_state(psi)
    rows = "\n".join(f"{float(a.real)!r} {float(a.imag)!r}" for a in psi)
    return "amplitudes\n" + rows + "\n"
