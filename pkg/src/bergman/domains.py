"""Model domains in C^n and their Bergman kernels.

Closed-form kernels are available for the unit disc, the unit ball, polydiscs,
the upper half plane, the punctured disc and the Hartogs triangle.  General
Reinhardt domains are handled by a monomial series engine driven by declared
radial asymptotics.

All integrals use unnormalized Lebesgue volume, so the disc kernel carries the
1/pi factor explicitly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.integrate

from .errors import (
    NonpositiveDiagonal,
    PointOutsideDomain,
    SeriesDivergenceSuspected,
    UndeclaredAsymptotics,
    UnsupportedKind,
)

# Relative slack used by all strict membership inequalities.  Points this close
# to the boundary would put kernel denominators inside their rounding noise.
BOUNDARY_MARGIN = 1e-12

CPoint = tuple[complex, ...]


def as_point(z, dim: int) -> CPoint:
    """Coerce a scalar / sequence into a tuple of ``dim`` complex coordinates."""
    if np.isscalar(z) or isinstance(z, complex):
        coords = (complex(z),)
    else:
        coords = tuple(complex(c) for c in z)
    if len(coords) != dim:
        raise ValueError(f"expected a point in C^{dim}, got {len(coords)} coordinates")
    return coords


@dataclass(frozen=True)
class ReinhardtProfile:
    """Rotation-invariant domain described in modulus space.

    The region is {0 <= r1 < r1_max, 0 <= r2 < bound(r1)} for dim 2 and
    {0 <= r1 < r1_max} for dim 1.  ``exponent_at_zero`` / ``exponent_at_inf``
    declare the power-law behavior of ``bound`` as r1 -> 0 and r1 -> infinity;
    the latter is required whenever r1_max is infinite.  ``allows_negative[i]``
    states whether monomials may carry negative powers of z_i (true only when
    the domain omits the coordinate hyperplane z_i = 0).
    """

    name: str
    dim: int
    r1_max: float
    bound: Optional[Callable[[float], float]] = None
    exponent_at_zero: Optional[float] = None
    exponent_at_inf: Optional[float] = None
    allows_negative: tuple[bool, ...] = (False, False)
    _norm_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def contains_moduli(self, radii: Sequence[float]) -> bool:
        r1 = radii[0]
        if not 0.0 <= r1 < self.r1_max * (1.0 - BOUNDARY_MARGIN):
            return False
        if self.allows_negative[0] and r1 <= 0.0:
            return False
        if self.dim == 1:
            return True
        cap = self.bound(r1)
        return radii[1] < cap * (1.0 - BOUNDARY_MARGIN)


def validate_profile(profile: ReinhardtProfile, rel_tol: float = 0.01) -> None:
    """Probe the bound function at radii 1e-3 and 1e3 against the declared exponents.

    The probed quantity is the local log-log slope of ``bound``; it must match
    the declared exponent to ``rel_tol``.  Raises UndeclaredAsymptotics when the
    data is missing or inconsistent.
    """
    if profile.dim == 1:
        return
    if profile.bound is None:
        raise UndeclaredAsymptotics(f"profile {profile.name!r} has no bound function")

    def slope_at(r):
        h = 1.0 + 1e-6
        return math.log(profile.bound(r * h) / profile.bound(r)) / math.log(h)

    checks = []
    if profile.exponent_at_zero is not None:
        checks.append((1e-3, profile.exponent_at_zero))
    elif profile.r1_max > 1e-3:
        raise UndeclaredAsymptotics(f"profile {profile.name!r}: exponent at 0 undeclared")
    if math.isinf(profile.r1_max):
        if profile.exponent_at_inf is None:
            raise UndeclaredAsymptotics(f"profile {profile.name!r}: exponent at infinity undeclared")
        checks.append((1e3, profile.exponent_at_inf))
    for r, declared in checks:
        if r >= profile.r1_max:
            continue
        got = slope_at(r)
        if abs(got - declared) > rel_tol * max(1.0, abs(declared)):
            raise UndeclaredAsymptotics(
                f"profile {profile.name!r}: declared exponent {declared} at r={r} "
                f"but probed slope {got:.6f}"
            )


def boas_profile() -> ReinhardtProfile:
    """Unbounded log-convex Reinhardt domain with bound |z2| < (1+|z1|)^(-1)."""
    p = ReinhardtProfile(
        name="boas",
        dim=2,
        r1_max=math.inf,
        bound=lambda r: 1.0 / (1.0 + r),
        exponent_at_zero=0.0,
        exponent_at_inf=-1.0,
        allows_negative=(False, False),
    )
    validate_profile(p)
    return p


def hartogs_profile() -> ReinhardtProfile:
    """The Hartogs triangle |z2| < |z1| < 1 as a Reinhardt profile."""
    p = ReinhardtProfile(
        name="hartogs",
        dim=2,
        r1_max=1.0,
        bound=lambda r: r,
        exponent_at_zero=1.0,
        allows_negative=(True, False),
    )
    validate_profile(p)
    return p


def disc_profile() -> ReinhardtProfile:
    """The unit disc as a one-dimensional Reinhardt profile."""
    return ReinhardtProfile(name="disc", dim=1, r1_max=1.0, allows_negative=(False,))


@dataclass(frozen=True)
class DomainSpec:
    """A model domain tag with dimension and optional Reinhardt profile."""

    kind: str
    dim: int
    profile: Optional[ReinhardtProfile] = None

    def __str__(self):
        return f"{self.kind}({self.dim})"


def disc() -> DomainSpec:
    return DomainSpec("disc", 1)


def ball(n: int = 2) -> DomainSpec:
    if n < 1:
        raise ValueError("ball dimension must be >= 1")
    return DomainSpec("ball", n)


def polydisc(n: int = 2) -> DomainSpec:
    if n < 1:
        raise ValueError("polydisc dimension must be >= 1")
    return DomainSpec("polydisc", n)


def upper_half_plane() -> DomainSpec:
    return DomainSpec("half-plane", 1)


def punctured_disc() -> DomainSpec:
    return DomainSpec("punctured-disc", 1)


def hartogs_triangle() -> DomainSpec:
    return DomainSpec("hartogs", 2)


def reinhardt(profile: ReinhardtProfile) -> DomainSpec:
    return DomainSpec("reinhardt", profile.dim, profile)


_BY_NAME = {
    "disc": disc,
    "ball2": lambda: ball(2),
    "bidisc": lambda: polydisc(2),
    "halfplane": upper_half_plane,
    "punctured-disc": punctured_disc,
    "hartogs": hartogs_triangle,
}


def domain_by_name(name: str) -> DomainSpec:
    try:
        return _BY_NAME[name]()
    except KeyError:
        raise UnsupportedKind(f"unknown domain name {name!r}; choose from {sorted(_BY_NAME)}")


def volume(domain: DomainSpec) -> float:
    """Lebesgue volume of the domain (may be infinite)."""
    if domain.kind in ("disc", "punctured-disc"):
        return math.pi
    if domain.kind == "polydisc":
        return math.pi ** domain.dim
    if domain.kind == "ball":
        return math.pi ** domain.dim / math.factorial(domain.dim)
    if domain.kind == "hartogs":
        return math.pi ** 2 / 2.0
    if domain.kind == "half-plane":
        return math.inf
    if domain.kind == "reinhardt":
        prof = domain.profile
        if prof.dim == 1:
            return math.pi * prof.r1_max ** 2
        val, _ = scipy.integrate.quad(
            lambda r: 2.0 * math.pi * r * math.pi * prof.bound(r) ** 2,
            0.0, prof.r1_max, limit=200,
        )
        return val
    raise UnsupportedKind(domain.kind)


def contains(domain: DomainSpec, z) -> bool:
    """Strict membership; inequalities carry a relative slack of 1e-12."""
    p = as_point(z, domain.dim)
    m = 1.0 - BOUNDARY_MARGIN
    if domain.kind == "disc":
        return abs(p[0]) < m
    if domain.kind == "punctured-disc":
        return 0.0 < abs(p[0]) < m
    if domain.kind == "polydisc":
        return all(abs(c) < m for c in p)
    if domain.kind == "ball":
        return sum(abs(c) ** 2 for c in p) < m
    if domain.kind == "half-plane":
        return p[0].imag > BOUNDARY_MARGIN * max(1.0, abs(p[0]))
    if domain.kind == "hartogs":
        r1, r2 = abs(p[0]), abs(p[1])
        return r1 < m and r2 < r1 * m
    if domain.kind == "reinhardt":
        return domain.profile.contains_moduli([abs(c) for c in p])
    raise UnsupportedKind(domain.kind)


def require_inside(domain: DomainSpec, z) -> CPoint:
    p = as_point(z, domain.dim)
    if not contains(domain, p):
        raise PointOutsideDomain(f"{p} is not strictly inside {domain}")
    return p


# ---------------------------------------------------------------------------
# closed-form kernels
# ---------------------------------------------------------------------------

def kernel(domain: DomainSpec, z, w) -> complex:
    """Bergman kernel K(z, w) of a closed-form domain.

    Both arguments must lie strictly inside the domain.  Reinhardt domains are
    served by :func:`reinhardt_kernel` instead.
    """
    if domain.kind == "reinhardt":
        raise UnsupportedKind("use reinhardt_kernel for profile-based domains")
    zp = require_inside(domain, z)
    wp = require_inside(domain, w)
    return _kernel_point(domain, zp, wp)


def _kernel_point(domain: DomainSpec, z: CPoint, w: CPoint) -> complex:
    if domain.kind in ("disc", "punctured-disc"):
        return 1.0 / (math.pi * (1.0 - z[0] * w[0].conjugate()) ** 2)
    if domain.kind == "polydisc":
        out = 1.0 + 0.0j
        for a, b in zip(z, w):
            out *= 1.0 / (math.pi * (1.0 - a * b.conjugate()) ** 2)
        return out
    if domain.kind == "ball":
        n = domain.dim
        inner = sum(a * b.conjugate() for a, b in zip(z, w))
        return math.factorial(n) / (math.pi ** n * (1.0 - inner) ** (n + 1))
    if domain.kind == "half-plane":
        return -1.0 / (math.pi * (z[0] - w[0].conjugate()) ** 2)
    if domain.kind == "hartogs":
        a = z[0] * w[0].conjugate()
        b = z[1] * w[1].conjugate()
        return a / (math.pi ** 2 * (a - b) ** 2 * (1.0 - a) ** 2)
    raise UnsupportedKind(domain.kind)


def kernel_diag(domain: DomainSpec, z) -> float:
    """K(z, z), evaluated in a cancellation-safe form.

    On the Hartogs triangle the factor |z1|^2 - |z2|^2 is computed as
    (|z1| - |z2|)(|z1| + |z2|) so accuracy survives near the singular edge.
    """
    zp = require_inside(domain, z)
    if domain.kind == "hartogs":
        r1, r2 = abs(zp[0]), abs(zp[1])
        d = (r1 - r2) * (r1 + r2)
        val = r1 * r1 / (math.pi ** 2 * d * d * (1.0 - r1 * r1) ** 2)
    else:
        val = _kernel_point(domain, zp, zp).real
    if not (val > 0.0 and math.isfinite(val)):
        raise NonpositiveDiagonal(f"K(z,z)={val} at z={zp} on {domain}")
    return val


def kernel_values(domain: DomainSpec, z, nodes: np.ndarray) -> np.ndarray:
    """Vectorized K(w_j, z) over an (N, dim) array of nodes.

    Membership of the nodes is the caller's responsibility (they normally come
    from a quadrature rule).
    """
    zp = as_point(z, domain.dim)
    W = np.asarray(nodes)
    if W.ndim == 1:
        W = W[:, None]
    if domain.kind in ("disc", "punctured-disc"):
        return 1.0 / (np.pi * (1.0 - W[:, 0] * np.conj(zp[0])) ** 2)
    if domain.kind == "polydisc":
        out = np.ones(W.shape[0], dtype=complex)
        for i, c in enumerate(zp):
            out /= np.pi * (1.0 - W[:, i] * np.conj(c)) ** 2
        return out
    if domain.kind == "ball":
        n = domain.dim
        inner = np.zeros(W.shape[0], dtype=complex)
        for i, c in enumerate(zp):
            inner += W[:, i] * np.conj(c)
        return math.factorial(n) / (np.pi ** n * (1.0 - inner) ** (n + 1))
    if domain.kind == "half-plane":
        return -1.0 / (np.pi * (W[:, 0] - np.conj(zp[0])) ** 2)
    if domain.kind == "hartogs":
        a = W[:, 0] * np.conj(zp[0])
        b = W[:, 1] * np.conj(zp[1])
        return a / (np.pi ** 2 * (a - b) ** 2 * (1.0 - a) ** 2)
    raise UnsupportedKind(domain.kind)


def kernel_diag_values(domain: DomainSpec, nodes: np.ndarray) -> np.ndarray:
    """Vectorized K(w_j, w_j) with the same stabilized Hartogs form as kernel_diag."""
    W = np.asarray(nodes)
    if W.ndim == 1:
        W = W[:, None]
    if domain.kind == "hartogs":
        r1 = np.abs(W[:, 0])
        r2 = np.abs(W[:, 1])
        d = (r1 - r2) * (r1 + r2)
        return r1 * r1 / (np.pi ** 2 * d * d * (1.0 - r1 * r1) ** 2)
    if domain.kind in ("disc", "punctured-disc"):
        x = np.abs(W[:, 0]) ** 2
        return 1.0 / (np.pi * (1.0 - x) ** 2)
    if domain.kind == "polydisc":
        out = np.ones(W.shape[0])
        for i in range(domain.dim):
            out /= np.pi * (1.0 - np.abs(W[:, i]) ** 2) ** 2
        return out
    if domain.kind == "ball":
        n = domain.dim
        x = np.sum(np.abs(W) ** 2, axis=1)
        return math.factorial(n) / (np.pi ** n * (1.0 - x) ** (n + 1))
    if domain.kind == "half-plane":
        return 1.0 / (4.0 * np.pi * W[:, 0].imag ** 2)
    raise UnsupportedKind(domain.kind)


def kernel_ratio(domain: DomainSpec, z, w) -> float:
    """|K(w, z)| / K(z, z); a domain has a bounded kernel ratio when its supremum is finite."""
    zp = require_inside(domain, z)
    wp = require_inside(domain, w)
    diag = kernel_diag(domain, zp)
    return abs(_kernel_point(domain, wp, zp)) / diag


def normalized_kernel(domain: DomainSpec, z) -> Callable:
    """Return w -> K(w, z)/sqrt(K(z, z)), a unit vector of A^2 for each z.

    The returned callable accepts a single point or an (N, dim) node array.
    """
    zp = require_inside(domain, z)
    root = math.sqrt(kernel_diag(domain, zp))

    def k_z(w):
        if isinstance(w, np.ndarray) and w.ndim >= 1 and w.size > domain.dim:
            return kernel_values(domain, zp, w) / root
        wp = as_point(w, domain.dim)
        return _kernel_point(domain, wp, zp) / root

    return k_z


# ---------------------------------------------------------------------------
# Reinhardt monomial machinery
# ---------------------------------------------------------------------------

def _as_profile(domain_or_profile) -> ReinhardtProfile:
    if isinstance(domain_or_profile, ReinhardtProfile):
        return domain_or_profile
    d = domain_or_profile
    if d.kind == "reinhardt":
        return d.profile
    if d.kind in ("disc", "punctured-disc"):
        return disc_profile()
    if d.kind == "hartogs":
        return hartogs_profile()
    raise UnsupportedKind(f"no Reinhardt profile for {d.kind}")


def monomial_l2_norm2(domain_or_profile, exponents) -> float:
    """Squared L^2 norm of the monomial z^alpha, or ``inf`` when divergent.

    Convergence is decided by power comparison on the declared asymptotics of
    the radial bound; the finite value is then computed by quadrature of the
    reduced radial integral.
    """
    from .quadrature import tail_exponent_classify  # deferred: quadrature imports this module

    profile = _as_profile(domain_or_profile)
    alpha = tuple(int(a) for a in (exponents if not np.isscalar(exponents) else (exponents,)))
    if len(alpha) != profile.dim:
        raise ValueError(f"expected {profile.dim} exponents, got {len(alpha)}")
    cached = profile._norm_cache.get(alpha)
    if cached is not None:
        return cached

    for i, a in enumerate(alpha):
        if a < 0 and not profile.allows_negative[i]:
            profile._norm_cache[alpha] = math.inf
            return math.inf

    if profile.dim == 1:
        a1 = alpha[0]
        if not tail_exponent_classify([(2 * a1 + 1, "zero")]):
            profile._norm_cache[alpha] = math.inf
            return math.inf
        val, _ = scipy.integrate.quad(lambda r: 2.0 * math.pi * r ** (2 * a1 + 1),
                                      0.0, profile.r1_max, limit=200)
        profile._norm_cache[alpha] = val
        return val

    a1, a2 = alpha
    # inner r2 integral: r2^(2 a2 + 1) near 0
    if not tail_exponent_classify([(2 * a2 + 1, "zero")]):
        profile._norm_cache[alpha] = math.inf
        return math.inf
    # outer integrand after the inner integral: r1^(2 a1 + 1) * bound(r1)^(2 a2 + 2)
    if profile.exponent_at_zero is None:
        raise UndeclaredAsymptotics(f"profile {profile.name!r}: exponent at 0 undeclared")
    pairs = [(2 * a1 + 1 + profile.exponent_at_zero * (2 * a2 + 2), "zero")]
    if math.isinf(profile.r1_max):
        if profile.exponent_at_inf is None:
            raise UndeclaredAsymptotics(f"profile {profile.name!r}: exponent at infinity undeclared")
        pairs.append((2 * a1 + 1 + profile.exponent_at_inf * (2 * a2 + 2), "infinity"))
    if not tail_exponent_classify(pairs):
        profile._norm_cache[alpha] = math.inf
        return math.inf

    def outer(r):
        return 4.0 * math.pi ** 2 / (2 * a2 + 2) * r ** (2 * a1 + 1) * profile.bound(r) ** (2 * a2 + 2)

    val, _ = scipy.integrate.quad(outer, 0.0, profile.r1_max,
                                  limit=400, epsabs=0.0, epsrel=1e-11)
    profile._norm_cache[alpha] = val
    return val


def monomial_admissible(domain_or_profile, exponents) -> bool:
    return math.isfinite(monomial_l2_norm2(domain_or_profile, exponents))


@dataclass(frozen=True)
class SeriesKernelValue:
    """Partial kernel series with a geometric tail estimate."""

    value: complex
    tail_estimate: float
    degree_used: int
    capped: bool


def _admissible_indices_of_degree(profile: ReinhardtProfile, degree: int):
    """All admissible multi-indices with sum of |alpha_i| equal to ``degree``."""
    out = []
    if profile.dim == 1:
        rng = [degree] if degree >= 0 else []
        for a in rng:
            if monomial_admissible(profile, (a,)):
                out.append((a,))
        if degree > 0 and profile.allows_negative[0] and monomial_admissible(profile, (-degree,)):
            out.append((-degree,))
        return out
    for a2 in range(0, degree + 1):
        rest = degree - a2
        cands = {rest} if rest == 0 else {rest, -rest}
        for a1 in sorted(cands):
            if a1 < 0 and not profile.allows_negative[0]:
                continue
            if monomial_admissible(profile, (a1, a2)):
                out.append((a1, a2))
    return out


def reinhardt_kernel(profile: ReinhardtProfile, z, w, truncation: int = 80) -> SeriesKernelValue:
    """Kernel of a Reinhardt domain by monomial series, summed in total-degree order.

    Terms are z^alpha conj(w^alpha) / ||z^alpha||^2 over admissible alpha with
    sum |alpha_i| <= truncation.  Summation stops early once the estimated
    geometric tail falls below 1e-10 of the partial sum; if the per-degree
    contributions keep growing, SeriesDivergenceSuspected is raised.
    """
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    zp = as_point(z, profile.dim)
    wp = as_point(w, profile.dim)
    if not profile.contains_moduli([abs(c) for c in zp]):
        raise PointOutsideDomain(f"{zp} not in profile {profile.name!r}")
    if not profile.contains_moduli([abs(c) for c in wp]):
        raise PointOutsideDomain(f"{wp} not in profile {profile.name!r}")

    total = 0.0 + 0.0j
    degree_mags = []
    degree = 0
    for degree in range(truncation + 1):
        mag = 0.0
        for alpha in _admissible_indices_of_degree(profile, degree):
            n2 = monomial_l2_norm2(profile, alpha)
            term = 1.0 + 0.0j
            for c, cw, a in zip(zp, wp, alpha):
                term *= c ** a * (cw ** a).conjugate()
            term /= n2
            total += term
            mag += abs(term)
        degree_mags.append(mag)
        scale = max(abs(total), 1e-300)
        recent = max(degree_mags[-3:])
        if degree >= 2 and recent <= 1e-12 * scale:
            # remaining terms are below roundoff of the partial sum
            return SeriesKernelValue(total, recent, degree, capped=False)
        tail = _geometric_tail(degree_mags)
        if tail is not None and tail <= 1e-10 * scale:
            return SeriesKernelValue(total, tail, degree, capped=False)
    tail = _geometric_tail(degree_mags)
    if tail is None:
        raise SeriesDivergenceSuspected(
            f"per-degree terms are not decaying after degree {degree} "
            f"(last magnitudes {degree_mags[-3:]})"
        )
    return SeriesKernelValue(total, tail, degree, capped=True)


def _geometric_tail(mags):
    """Tail estimate from the decay ratio of the last few per-degree magnitudes."""
    if len(mags) >= 2 and mags[-1] == 0.0 and mags[-2] == 0.0:
        # a zero coordinate kills every remaining term exactly
        return 0.0
    nz = [(i, m) for i, m in enumerate(mags) if m > 0.0]
    if not nz:
        return None
    if len(nz) < 3:
        return None
    recent = nz[-4:]
    ratios = []
    for (i0, m0), (i1, m1) in zip(recent[:-1], recent[1:]):
        ratios.append((m1 / m0) ** (1.0 / (i1 - i0)))
    rho = max(ratios)
    if rho >= 1.0:
        return None
    return nz[-1][1] * rho / (1.0 - rho)


# ---------------------------------------------------------------------------
# deterministic interior sampling (shared by tests and the CLI harness)
# ---------------------------------------------------------------------------

def sample_interior(domain: DomainSpec, n: int, seed: int = 0) -> list[CPoint]:
    """Draw ``n`` seeded points from the bulk of the domain.

    Radii stay away from the boundary (and from the singular loci of the
    Hartogs triangle) so kernel-peak integrands remain resolvable at the
    default quadrature resolutions.
    """
    rng = np.random.default_rng(seed)
    pts: list[CPoint] = []
    while len(pts) < n:
        if domain.kind in ("disc", "punctured-disc"):
            r = 0.05 + 0.75 * math.sqrt(rng.random())
            pts.append((r * cmath.exp(2j * math.pi * rng.random()),))
        elif domain.kind == "polydisc":
            pts.append(tuple(
                (0.05 + 0.60 * math.sqrt(rng.random())) * cmath.exp(2j * math.pi * rng.random())
                for _ in range(domain.dim)
            ))
        elif domain.kind == "ball":
            v = rng.normal(size=2 * domain.dim)
            v /= np.linalg.norm(v)
            rad = 0.7 * rng.random() ** (1.0 / (2 * domain.dim))
            pts.append(tuple(complex(rad * v[2 * i], rad * v[2 * i + 1]) for i in range(domain.dim)))
        elif domain.kind == "hartogs":
            r1 = 0.15 + 0.55 * rng.random()
            t = (0.05 + 0.65 * rng.random()) * cmath.exp(2j * math.pi * rng.random())
            z1 = r1 * cmath.exp(2j * math.pi * rng.random())
            pts.append((z1, z1 * t))
        elif domain.kind == "half-plane":
            pts.append((complex(rng.uniform(-2, 2), 10.0 ** rng.uniform(-1.5, 1.5)),))
        else:
            raise UnsupportedKind(domain.kind)
    return pts
