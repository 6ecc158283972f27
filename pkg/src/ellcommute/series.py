"""Truncated Laurent/power series over a pluggable coefficient ring.

A series stores the coefficients ``c_k`` for ``order_min <= k <= order_max``
in powers of ``(z - center)`` (or of ``λ^{-1}`` / ``q``).  Coefficients below
``order_min`` are known to vanish; coefficients above ``order_max`` are
*unknown*, and asking for one raises :class:`PrecisionError`.  Every operation
returns the largest window on which its result is fully determined by known
inputs.

Two coefficient rings are provided: :data:`SCALAR` (complex doubles) and
:class:`QRing` (power series in ``q`` truncated at ``q^k_max``), so the same
recursion code runs pointwise in Ω or over q-expansions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.signal import convolve2d

from .config import DEFAULT_TOL
from .errors import PrecisionError, SingularSeriesError, UsageError

VARIABLES = ("z", "lambda_inv", "q")


# --------------------------------------------------------------------------
# coefficient rings
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarRing:
    """Complex numbers; elements are 0-d arrays."""

    shape = ()
    kind = "scalar"

    def zeros(self, n: int) -> np.ndarray:
        return np.zeros((n,), dtype=complex)

    def element(self, value) -> np.ndarray:
        arr = np.asarray(value, dtype=complex)
        if arr.shape != ():
            raise UsageError(f"scalar ring element must be a number, got shape {arr.shape}")
        return arr

    def one(self) -> np.ndarray:
        return np.asarray(1.0 + 0j)

    def mul(self, a, b):
        return np.asarray(a) * np.asarray(b)

    def conv(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.convolve(a, b)

    def scale_rows(self, a: np.ndarray, e) -> np.ndarray:
        return a * np.asarray(e)

    def inv(self, e) -> np.ndarray:
        e = complex(e)
        if abs(e) <= DEFAULT_TOL.atol:
            raise SingularSeriesError("leading coefficient is zero")
        return np.asarray(1.0 / e)

    def is_zero(self, e, atol: float) -> bool:
        return abs(complex(e)) <= atol

    def norm(self, e) -> float:
        return float(np.max(np.abs(e))) if np.size(e) else 0.0

    def evaluate(self, e, omega=None) -> complex:
        return complex(e)


@dataclass(frozen=True)
class QRing:
    """Power series in ``q^{1/level_divisor}`` truncated after ``k_max``.

    Elements are complex arrays of length ``k_max + 1``.  There is no way to
    represent a negative power, so anything computed without inversion of a
    non-unit is automatically holomorphic at the cusp.
    """

    k_max: int
    level_divisor: int = 1
    kind = "q"

    @property
    def shape(self):
        return (self.k_max + 1,)

    def zeros(self, n: int) -> np.ndarray:
        return np.zeros((n, self.k_max + 1), dtype=complex)

    def element(self, value) -> np.ndarray:
        arr = np.asarray(value, dtype=complex)
        if arr.shape == ():
            out = np.zeros(self.k_max + 1, dtype=complex)
            out[0] = arr
            return out
        if arr.ndim != 1:
            raise UsageError("q-ring element must be 1-d")
        out = np.zeros(self.k_max + 1, dtype=complex)
        m = min(len(arr), self.k_max + 1)
        out[:m] = arr[:m]
        return out

    def one(self) -> np.ndarray:
        return self.element(1.0)

    def mul(self, a, b):
        return np.convolve(a, b)[: self.k_max + 1]

    def conv(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return convolve2d(a, b)[:, : self.k_max + 1]

    def scale_rows(self, a: np.ndarray, e) -> np.ndarray:
        e = np.asarray(e)
        if e.shape == ():
            return a * e
        return convolve2d(a, e[None, :])[:, : self.k_max + 1]

    def inv(self, e) -> np.ndarray:
        e = np.asarray(e, dtype=complex)
        if abs(e[0]) <= DEFAULT_TOL.atol:
            raise SingularSeriesError("q-series with vanishing constant term is not a unit")
        out = np.zeros_like(e)
        out[0] = 1.0 / e[0]
        for n in range(1, len(e)):
            out[n] = -np.dot(e[1 : n + 1], out[n - 1 :: -1][:n]) / e[0]
        return out

    def is_zero(self, e, atol: float) -> bool:
        return bool(np.all(np.abs(e) <= atol))

    def norm(self, e) -> float:
        return float(np.max(np.abs(e))) if np.size(e) else 0.0

    def evaluate(self, e, omega) -> complex:
        """Sum the q-series at Ω (q = exp(2πiΩ/level_divisor))."""
        q = np.exp(2j * np.pi * complex(omega) / self.level_divisor)
        return complex(np.polynomial.polynomial.polyval(q, np.asarray(e)))


SCALAR = ScalarRing()
Ring = Union[ScalarRing, QRing]


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------


def nth_roots(x: complex, n: int) -> np.ndarray:
    """All N-th roots in the fixed order λ_j = |x|^{1/N} e^{i(arg x + 2πj)/N}."""
    x = complex(x)
    r = abs(x) ** (1.0 / n)
    arg = math.atan2(x.imag, x.real)
    if arg == -math.pi:
        arg = math.pi
    return np.array([r * np.exp(1j * (arg + 2 * math.pi * j) / n) for j in range(n)])


def _is_ring_element(ring: Ring, value) -> bool:
    return isinstance(value, np.ndarray) and value.shape == ring.shape and value.shape != ()


# --------------------------------------------------------------------------
# the series type
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    coeffs: np.ndarray
    order_min: int = 0
    variable: str = "z"
    center: complex = 0j
    ring: Ring = SCALAR

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=complex)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        ring_shape = tuple(self.ring.shape)
        if arr.shape[1:] != ring_shape:
            if ring_shape and arr.ndim == 1:
                # scalars promoted into the q-ring
                arr = np.stack([self.ring.element(c) for c in arr]) if len(arr) else self.ring.zeros(0)
            else:
                raise UsageError(f"coefficient array shape {arr.shape} does not match ring shape {ring_shape}")
        if arr.shape[0] < 1:
            raise PrecisionError("empty precision window")
        if self.variable not in VARIABLES:
            raise UsageError(f"unknown variable tag {self.variable!r}")
        if not np.all(np.isfinite(arr)):
            raise UsageError("series coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "order_min", int(self.order_min))
        object.__setattr__(self, "center", complex(self.center))

    # ---- construction -----------------------------------------------------

    @classmethod
    def constant(cls, value, order_max: int, variable="z", center=0j, ring: Ring = SCALAR):
        if order_max < 0:
            raise PrecisionError("constant series needs order_max >= 0")
        arr = ring.zeros(order_max + 1)
        arr[0] = ring.element(value)
        return cls(arr, 0, variable, center, ring)

    @classmethod
    def monomial(cls, k: int, order_max: int, value=1.0, variable="z", center=0j, ring: Ring = SCALAR):
        if order_max < k:
            raise PrecisionError(f"monomial z^{k} outside window ending at {order_max}")
        arr = ring.zeros(order_max - k + 1)
        arr[0] = ring.element(value)
        return cls(arr, k, variable, center, ring)

    @classmethod
    def from_coeffs(cls, coeffs, order_min=0, variable="z", center=0j, ring: Ring = SCALAR):
        return cls(np.asarray(coeffs), order_min, variable, center, ring)

    def _new(self, coeffs, order_min):
        return TruncatedSeries(coeffs, order_min, self.variable, self.center, self.ring)

    # ---- window -----------------------------------------------------------

    @property
    def order_max(self) -> int:
        return self.order_min + self.coeffs.shape[0] - 1

    @property
    def window(self) -> tuple[int, int]:
        return self.order_min, self.order_max

    def coeff(self, k: int):
        """Coefficient of the k-th power; zero below the window, error above it."""
        if k > self.order_max:
            raise PrecisionError(f"coefficient {k} requested but series is only known up to {self.order_max}")
        if k < self.order_min:
            return np.zeros(self.ring.shape, dtype=complex)
        return self.coeffs[k - self.order_min]

    def __getitem__(self, k: int):
        return self.coeff(k)

    def truncate(self, order_max: int) -> "TruncatedSeries":
        if order_max > self.order_max:
            raise PrecisionError(f"cannot extend window from {self.order_max} to {order_max}")
        return self._new(self.coeffs[: order_max - self.order_min + 1], self.order_min)

    def extend_down(self, order_min: int) -> "TruncatedSeries":
        """Same series with explicit zero coefficients down to ``order_min``."""
        if order_min >= self.order_min:
            return self
        pad = self.ring.zeros(self.order_min - order_min)
        return self._new(np.concatenate([pad, self.coeffs]), order_min)

    def trim(self, atol: float = 0.0) -> "TruncatedSeries":
        """Drop leading coefficients with norm <= atol (keeps at least one entry)."""
        i = 0
        while i < self.coeffs.shape[0] - 1 and self.ring.norm(self.coeffs[i]) <= atol:
            i += 1
        return self._new(self.coeffs[i:], self.order_min + i)

    def _check_compatible(self, other: "TruncatedSeries"):
        if self.variable != other.variable:
            raise UsageError(f"variable mismatch: {self.variable} vs {other.variable}")
        if self.variable == "z" and abs(self.center - other.center) > 1e-14 * max(1.0, abs(self.center)):
            raise UsageError(f"center mismatch: {self.center} vs {other.center}")
        if self.ring != other.ring:
            raise UsageError("coefficient ring mismatch")

    # ---- arithmetic ---------------------------------------------------------

    def __neg__(self):
        return self._new(-self.coeffs, self.order_min)

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            self._check_compatible(other)
            lo = min(self.order_min, other.order_min)
            hi = min(self.order_max, other.order_max)
            if hi < lo:
                raise PrecisionError("sum has an empty precision window")
            out = self.ring.zeros(hi - lo + 1)
            for s in (self, other):
                top = min(s.order_max, hi)
                if top >= s.order_min:
                    out[s.order_min - lo : top - lo + 1] += s.coeffs[: top - s.order_min + 1]
            return self._new(out, lo)
        return self + self._constant_like(other)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _constant_like(self, value) -> "TruncatedSeries":
        if self.order_max < 0:
            # a constant lies beyond the known window: it contributes nothing visible
            return self._new(self.ring.zeros(1), self.order_max)
        return TruncatedSeries.constant(value, self.order_max, self.variable, self.center, self.ring)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            self._check_compatible(other)
            lo = self.order_min + other.order_min
            hi = min(self.order_max + other.order_min, other.order_max + self.order_min)
            full = self.ring.conv(self.coeffs, other.coeffs)
            return self._new(full[: hi - lo + 1], lo)
        if _is_ring_element(self.ring, other):
            return self._new(self.ring.scale_rows(self.coeffs, other), self.order_min)
        return self._new(self.coeffs * complex(other), self.order_min)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.invert()
        if _is_ring_element(self.ring, other):
            return self * self.ring.inv(other)
        return self * (1.0 / complex(other))

    def __pow__(self, n: int):
        if n < 0:
            return self.invert() ** (-n)
        if n == 0:
            top = max(self.order_max - self.order_min, 0)
            return TruncatedSeries.constant(1.0, top, self.variable, self.center, self.ring)
        result = self
        for _ in range(n - 1):
            result = result * self
        return result

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by the k-th power of the variable."""
        return self._new(self.coeffs, self.order_min + k)

    # ---- calculus -----------------------------------------------------------

    def derivative(self, times: int = 1) -> "TruncatedSeries":
        out = self
        for _ in range(times):
            out = out._derivative_once()
        return out

    def _derivative_once(self):
        ks = np.arange(self.order_min, self.order_max + 1)
        new = self.coeffs * ks.reshape((-1,) + (1,) * len(self.ring.shape))
        if self.order_min == 0:
            # the constant term differentiates away; nothing new becomes known
            if len(ks) == 1:
                raise PrecisionError("derivative of a series known only to order 0")
            return self._new(new[1:], 0)
        return self._new(new, self.order_min - 1)

    def integrate_from_center(self) -> "TruncatedSeries":
        """Term-wise antiderivative vanishing at the center."""
        if self.variable != "z":
            raise UsageError("integration is only defined for z-series")
        s = self
        if self.order_min < 0:
            neg = self.coeffs[: min(-self.order_min, self.coeffs.shape[0])]
            if any(not self.ring.is_zero(c, 0.0) for c in neg):
                raise UsageError("cannot integrate across a pole: series has negative exponents")
            if self.order_max < 0:
                return TruncatedSeries.constant(0.0, 0, "z", self.center, self.ring)
            s = self._new(self.coeffs[-self.order_min :], 0)
        return s._antiderivative_regular()

    def _antiderivative_regular(self):
        ks = np.arange(self.order_min, self.order_max + 1)
        body = self.coeffs / (ks + 1).reshape((-1,) + (1,) * len(self.ring.shape))
        if self.order_min > 0:
            pad = self.ring.zeros(self.order_min + 1)
            return self._new(np.concatenate([pad, body]), 0)
        return self._new(np.concatenate([self.ring.zeros(1), body]), 0)

    def antiderivative(self, rtol: float | None = None) -> "TruncatedSeries":
        """Laurent antiderivative with zero constant term.

        Allowed across a pole provided the residue (coefficient of z^{-1})
        vanishes to tolerance; otherwise a logarithm would be needed.
        """
        if self.order_min >= 0:
            return self.integrate_from_center()
        rtol = DEFAULT_TOL.rtol if rtol is None else rtol
        scale = max(self.max_abs(), 1.0)
        res = self.coeff(-1) if self.order_max >= -1 else None
        if res is not None and self.ring.norm(res) > rtol * scale:
            raise SingularSeriesError(f"nonzero residue {self.ring.norm(res):.3e}: antiderivative is logarithmic")
        hi = self.order_max + 1
        out = self.ring.zeros(hi - (self.order_min + 1) + 1)
        for k in range(self.order_min, self.order_max + 1):
            if k == -1:
                continue
            out[k + 1 - (self.order_min + 1)] = self.coeff(k) / (k + 1)
        return self._new(out, self.order_min + 1)

    # ---- inversion / exponential -------------------------------------------

    def invert(self, atol: float | None = None) -> "TruncatedSeries":
        atol = DEFAULT_TOL.atol if atol is None else atol
        s = self.trim(atol * max(1.0, self.max_abs()))
        lead = s.coeffs[0]
        if s.ring.norm(lead) <= atol * max(1.0, self.max_abs()):
            raise SingularSeriesError("cannot invert a series with zero leading coefficient")
        inv_lead = s.ring.inv(lead)
        n = s.coeffs.shape[0]
        out = s.ring.zeros(n)
        out[0] = inv_lead
        for m in range(1, n):
            acc = np.zeros(s.ring.shape, dtype=complex)
            for k in range(1, m + 1):
                acc = acc + s.ring.mul(s.coeffs[k], out[m - k])
            out[m] = -s.ring.mul(inv_lead, acc)
        return s._new(out, -s.order_min)

    def exp(self) -> "TruncatedSeries":
        """exp of a power series (constant term must vanish outside the scalar ring)."""
        if self.order_min < 0:
            raise UsageError("exp of a series with a pole")
        s = self.extend_down(0)
        c0 = s.coeffs[0]
        if self.ring.kind == "scalar":
            e0 = np.exp(complex(c0))
        else:
            if not self.ring.is_zero(c0, 0.0):
                raise UsageError("exp over the q-ring requires zero constant term")
            e0 = self.ring.one()
        n = s.coeffs.shape[0]
        out = s.ring.zeros(n)
        out[0] = e0
        for m in range(1, n):
            acc = np.zeros(s.ring.shape, dtype=complex)
            for k in range(1, m + 1):
                acc = acc + k * s.ring.mul(s.coeffs[k], out[m - k])
            out[m] = acc / m
        return s._new(out, 0)

    # ---- substitutions / evaluation ----------------------------------------

    def rescale(self, c: complex) -> "TruncatedSeries":
        """Substitute z = c·z'; the result is a series in z' centered at center/c."""
        c = complex(c)
        if c == 0:
            raise UsageError("rescale factor must be nonzero")
        ks = np.arange(self.order_min, self.order_max + 1)
        factors = c ** ks.astype(float)
        new = self.coeffs * factors.reshape((-1,) + (1,) * len(self.ring.shape))
        return TruncatedSeries(new, self.order_min, self.variable, self.center / c, self.ring)

    def evaluate(self, x, omega=None):
        """Sum the truncated series at the point x (absolute coordinate for z-series)."""
        t = complex(x) - (self.center if self.variable == "z" else 0.0)
        ks = np.arange(self.order_min, self.order_max + 1)
        if t == 0 and self.order_min < 0:
            raise UsageError("evaluating a Laurent series at its pole")
        powers = t ** ks.astype(float) if t != 0 else (ks == 0).astype(complex)
        val = np.tensordot(powers, self.coeffs, axes=(0, 0))
        if omega is not None and self.ring.kind == "q":
            return self.ring.evaluate(val, omega)
        return val if self.ring.shape else complex(val)

    def map_ring(self, fn, ring: Ring) -> "TruncatedSeries":
        """Apply fn to every coefficient, producing a series over another ring."""
        arr = np.stack([np.asarray(fn(c), dtype=complex) for c in self.coeffs])
        return TruncatedSeries(arr, self.order_min, self.variable, self.center, ring)

    def at_omega(self, omega) -> "TruncatedSeries":
        """Evaluate every q-series coefficient at Ω (q-ring → scalar ring)."""
        if self.ring.kind != "q":
            return self
        return self.map_ring(lambda c: self.ring.evaluate(c, omega), SCALAR)

    # ---- comparisons --------------------------------------------------------

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def disk_norm(self, rho: float) -> float:
        """Σ |c_k| ρ^k, a bound for the sup of the series on the circle |z - center| = ρ."""
        ks = np.arange(self.order_min, self.order_max + 1, dtype=float)
        mags = np.abs(self.coeffs).reshape(len(ks), -1).max(axis=1)
        return float(np.sum(mags * rho ** ks))

    def max_abs_diff(self, other: "TruncatedSeries") -> float:
        """Largest coefficient difference over the common known window."""
        self._check_compatible(other)
        lo = min(self.order_min, other.order_min)
        hi = min(self.order_max, other.order_max)
        if hi < lo:
            raise PrecisionError("no common window")
        return max(self.ring.norm(self.coeff(k) - other.coeff(k)) for k in range(lo, hi + 1))

    def approx_eq(self, other: "TruncatedSeries", rtol: float | None = None, atol: float | None = None) -> bool:
        rtol = DEFAULT_TOL.rtol if rtol is None else rtol
        atol = DEFAULT_TOL.atol if atol is None else atol
        scale = max(self.max_abs(), other.max_abs())
        return self.max_abs_diff(other) <= max(rtol * scale, atol)

    def is_zero(self, tol: float, scale: float = 1.0) -> bool:
        return self.max_abs() <= tol * scale

    def __repr__(self):
        return (f"TruncatedSeries({self.variable}, center={self.center}, "
                f"window=[{self.order_min},{self.order_max}], ring={self.ring.kind})")

    # ---- JSON -----------------------------------------------------------------

    def to_json(self) -> dict:
        def enc(c):
            c = np.asarray(c)
            if c.shape == ():
                return [float(c.real), float(c.imag)]
            return [[float(v.real), float(v.imag)] for v in c]

        out = {
            "variable": self.variable,
            "center": [self.center.real, self.center.imag],
            "order_min": self.order_min,
            "coeffs": [enc(c) for c in self.coeffs],
        }
        if self.ring.kind == "q":
            out["ring"] = {"kind": "q", "k_max": self.ring.k_max, "level_divisor": self.ring.level_divisor}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "TruncatedSeries":
        ring_info = data.get("ring")
        ring: Ring = SCALAR
        if ring_info and ring_info.get("kind") == "q":
            ring = QRing(int(ring_info["k_max"]), int(ring_info.get("level_divisor", 1)))
        raw = np.asarray(data["coeffs"], dtype=float)
        coeffs = raw[..., 0] + 1j * raw[..., 1]
        center = complex(*data.get("center", [0.0, 0.0]))
        return cls(coeffs, int(data["order_min"]), data.get("variable", "z"), center, ring)
