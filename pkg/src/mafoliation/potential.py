"""Sparse polynomials in z and conj(z) with exact Wirtinger calculus.

A polynomial is stored as a map from exponent pairs ``(alpha, beta)`` to a
complex coefficient, representing ``sum c[alpha,beta] * z**alpha * zbar**beta``.
Exponent arithmetic is exact integer arithmetic; only point evaluation rounds.
Coefficients that become exactly zero are pruned, never epsilon-pruned, so the
term structure stays exact under differentiation and bidegree splitting.
"""

from __future__ import annotations

import re

import numpy as np

MultiExponent = tuple[int, ...]
TermKey = tuple[MultiExponent, MultiExponent]


class PotentialFormatError(ValueError):
    """Raised for malformed potential files; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def _normalize_terms(dim, terms):
    out = {}
    for (alpha, beta), coeff in terms.items():
        alpha = tuple(int(e) for e in alpha)
        beta = tuple(int(e) for e in beta)
        if len(alpha) != dim or len(beta) != dim:
            raise ValueError(
                f"exponent vectors must have length {dim}, got {alpha} / {beta}"
            )
        if any(e < 0 for e in alpha) or any(e < 0 for e in beta):
            raise ValueError(f"negative exponent in {(alpha, beta)}")
        coeff = complex(coeff)
        if coeff != 0:
            out[(alpha, beta)] = out.get((alpha, beta), 0j) + coeff
    return {k: c for k, c in out.items() if c != 0}


class PolyExpr:
    """Complex-valued polynomial in z and zbar as a sparse monomial map.

    Parameters
    ----------
    dim : int
        Ambient complex dimension n.
    terms : mapping
        ``{(alpha, beta): coefficient}`` with ``alpha``/``beta`` length-n
        integer tuples. Zero coefficients are dropped.
    """

    __slots__ = ("dim", "terms", "_hash", "_packed")

    def __init__(self, dim, terms):
        dim = int(dim)
        if dim < 1:
            raise ValueError("dimension must be a positive integer")
        self.dim = dim
        self.terms = _normalize_terms(dim, terms)
        self._hash = None
        self._packed = None

    # -- structure ---------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def conjugate(self):
        """Complex conjugate polynomial: swaps alpha/beta, conjugates coefficients."""
        return PolyExpr(
            self.dim, {(b, a): c.conjugate() for (a, b), c in self.terms.items()}
        )

    def __add__(self, other):
        if not isinstance(other, PolyExpr):
            return NotImplemented
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        merged = dict(self.terms)
        for k, c in other.terms.items():
            merged[k] = merged.get(k, 0j) + c
        return PolyExpr(self.dim, merged)

    def __eq__(self, other):
        return (
            isinstance(other, PolyExpr)
            and self.dim == other.dim
            and self.terms == other.terms
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, {len(self.terms)} terms)"

    # -- evaluation --------------------------------------------------------

    def evaluate(self, z):
        """Evaluate at a single point, returning a complex number."""
        z = [complex(v) for v in np.asarray(z).ravel()]
        if len(z) != self.dim:
            raise ValueError(f"point has length {len(z)}, expected {self.dim}")
        return self._evaluate_prepped(z, [v.conjugate() for v in z])

    def _evaluate_prepped(self, z, zc):
        # hot path for jet evaluation: z, zc are python-complex lists
        total = 0j
        for (alpha, beta), coeff in self.terms.items():
            m = coeff
            for j in range(self.dim):
                if alpha[j]:
                    m *= z[j] ** alpha[j]
                if beta[j]:
                    m *= zc[j] ** beta[j]
            total += m
        return total

    def _pack(self):
        if self._packed is None:
            keys = sorted(self.terms)
            alphas = np.array([k[0] for k in keys], dtype=np.intp).reshape(
                len(keys), self.dim
            )
            betas = np.array([k[1] for k in keys], dtype=np.intp).reshape(
                len(keys), self.dim
            )
            coeffs = np.array([self.terms[k] for k in keys], dtype=complex)
            self._packed = (alphas, betas, coeffs)
        return self._packed

    def evaluate_many(self, points):
        """Evaluate at an (N, n) array of points, returning an (N,) complex array.

        Uses per-coordinate power tables so repeated exponents cost one
        multiplication each; intended for grid scans.
        """
        pts = np.asarray(points, dtype=complex)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError(f"expected an (N, {self.dim}) array, got {pts.shape}")
        count = pts.shape[0]
        if not self.terms or count == 0:
            return np.zeros(count, dtype=complex)
        alphas, betas, coeffs = self._pack()
        max_e = int(max(alphas.max(), betas.max()))
        pow_z = np.empty((max_e + 1, count, self.dim), dtype=complex)
        pow_z[0] = 1.0
        for e in range(1, max_e + 1):
            pow_z[e] = pow_z[e - 1] * pts
        pow_zc = pow_z.conj()
        acc = np.ones((alphas.shape[0], count), dtype=complex)
        for j in range(self.dim):
            acc *= pow_z[alphas[:, j], :, j]
            acc *= pow_zc[betas[:, j], :, j]
        return coeffs @ acc

    # -- Wirtinger derivatives ----------------------------------------------

    def diff_z(self, mu):
        """Formal derivative with respect to z^mu (0-based index)."""
        if not 0 <= mu < self.dim:
            raise IndexError(f"index {mu} out of range for dimension {self.dim}")
        out = {}
        for (alpha, beta), coeff in self.terms.items():
            e = alpha[mu]
            if e:
                na = alpha[:mu] + (e - 1,) + alpha[mu + 1 :]
                key = (na, beta)
                out[key] = out.get(key, 0j) + coeff * e
        return PolyExpr(self.dim, out)

    def diff_zbar(self, nu):
        """Formal derivative with respect to zbar^nu (0-based index)."""
        if not 0 <= nu < self.dim:
            raise IndexError(f"index {nu} out of range for dimension {self.dim}")
        out = {}
        for (alpha, beta), coeff in self.terms.items():
            e = beta[nu]
            if e:
                nb = beta[:nu] + (e - 1,) + beta[nu + 1 :]
                key = (alpha, nb)
                out[key] = out.get(key, 0j) + coeff * e
        return PolyExpr(self.dim, out)


class PolyPotential(PolyExpr):
    """Real-valued polynomial in z, zbar: the Hermitian-symmetric case.

    The constructor enforces ``coeff(alpha, beta) == conj(coeff(beta, alpha))``
    exactly; this guarantees real values up to roundoff. Positivity and
    plurisubharmonicity are deliberately *not* invariants (counterexamples are
    first-class inputs) and are checked by downstream operations.
    """

    __slots__ = ()

    def __init__(self, dim, terms):
        super().__init__(dim, terms)
        bad = []
        for (alpha, beta), coeff in self.terms.items():
            mirror = self.terms.get((beta, alpha))
            if mirror is None or mirror != coeff.conjugate():
                bad.append((alpha, beta))
        if bad:
            raise ValueError(
                "non-Hermitian term set: missing or mismatched conjugates for "
                + ", ".join(f"a={a} b={b}" for a, b in sorted(bad))
            )


# -- module-level operations -------------------------------------------------


def evaluate(p, z):
    """Value of a potential at z as a real number.

    Hermitian symmetry makes the accumulated imaginary part roundoff-small
    (below 1e-12 of the magnitude); it is discarded here.
    """
    return p.evaluate(z).real


def wirtinger_z(p, mu):
    """Exact coefficient-level d/dz^mu. Term c z^a zbar^b maps to c*a_mu z^(a-e_mu) zbar^b."""
    return p.diff_z(mu)


def wirtinger_zbar(p, nu):
    """Exact coefficient-level d/dzbar^nu, acting on the beta exponents."""
    return p.diff_zbar(nu)


def bidegree_decompose(p):
    """Split into homogeneous bidegree components.

    Returns ``{(l, m): PolyExpr}`` where component (l, m) collects exactly the
    terms with |alpha| = l and |beta| = m; the components sum back to the
    input term-by-term.
    """
    buckets = {}
    for (alpha, beta), coeff in p.terms.items():
        key = (sum(alpha), sum(beta))
        buckets.setdefault(key, {})[(alpha, beta)] = coeff
    return {key: PolyExpr(p.dim, terms) for key, terms in sorted(buckets.items())}


def homogeneous_degree(p):
    """Common total degree |alpha|+|beta| of all terms, or None if degrees mix.

    Returns None for the zero polynomial as well (no witness degree).
    """
    degrees = {sum(a) + sum(b) for (a, b) in p.terms}
    if len(degrees) != 1:
        return None
    return degrees.pop()


# -- text format --------------------------------------------------------------

_DIM_RE = re.compile(r"^n\s*=\s*(\d+)$")
_MONO_RE = re.compile(
    r"^(?:monomial\s*:\s*)?a\s*=\s*\[([^\]]*)\]\s*b\s*=\s*\[([^\]]*)\]\s*c\s*=\s*(\S+)$"
)
_LONE_J_RE = re.compile(r"(?<![0-9.])j")


def parse_complex(token):
    """Parse ``<re><sign><im>i`` style complex literals (also bare reals)."""
    s = token.strip().lower().replace(" ", "")
    if s.endswith("i"):
        s = s[:-1] + "j"
    s = _LONE_J_RE.sub("1j", s)
    return complex(s)


def _parse_exponents(text, dim, lineno):
    entries = [e.strip() for e in text.split(",")] if text.strip() else []
    try:
        exps = tuple(int(e) for e in entries)
    except ValueError:
        raise PotentialFormatError(f"bad exponent list [{text}]", lineno) from None
    if len(exps) != dim:
        raise PotentialFormatError(
            f"expected {dim} exponents, got {len(exps)}", lineno
        )
    if any(e < 0 for e in exps):
        raise PotentialFormatError("negative exponent", lineno)
    return exps


def parse_potential(text):
    """Parse the potential text format into a PolyPotential.

    Format, one declaration per line (``;`` also separates declarations,
    ``#`` starts a comment, blank lines are ignored)::

        n = 2
        monomial: a=[1,0] b=[1,0] c=1+0i

    The ``monomial:`` prefix is optional. Repeated keys accumulate. The
    Hermitian-symmetry requirement is enforced, not silently repaired.
    """
    dim = None
    acc = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        code = raw.split("#", 1)[0]
        for stmt in code.split(";"):
            stmt = stmt.strip()
            if not stmt:
                continue
            m = _DIM_RE.match(stmt)
            if m:
                if dim is not None:
                    raise PotentialFormatError("duplicate dimension line", lineno)
                dim = int(m.group(1))
                if dim < 1:
                    raise PotentialFormatError("dimension must be >= 1", lineno)
                continue
            if dim is None:
                raise PotentialFormatError(
                    "dimension line 'n = <int>' must come first", lineno
                )
            m = _MONO_RE.match(stmt)
            if m is None:
                raise PotentialFormatError(f"cannot parse declaration {stmt!r}", lineno)
            alpha = _parse_exponents(m.group(1), dim, lineno)
            beta = _parse_exponents(m.group(2), dim, lineno)
            try:
                coeff = parse_complex(m.group(3))
            except ValueError:
                raise PotentialFormatError(
                    f"bad coefficient {m.group(3)!r}", lineno
                ) from None
            acc[(alpha, beta)] = acc.get((alpha, beta), 0j) + coeff
    if dim is None:
        raise PotentialFormatError("missing dimension line 'n = <int>'")
    try:
        return PolyPotential(dim, acc)
    except ValueError as exc:
        raise PotentialFormatError(str(exc)) from None


def parse_potential_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_potential(fh.read())


def format_complex(c):
    re_part = repr(float(c.real))
    im_part = repr(float(c.imag))
    sign = "+" if not im_part.startswith("-") else ""
    return f"{re_part}{sign}{im_part}i"


def format_potential(p):
    """Render a potential back into the text format (round-trips exactly)."""
    lines = [f"n = {p.dim}"]
    for (alpha, beta) in sorted(p.terms):
        coeff = p.terms[(alpha, beta)]
        a = ",".join(str(e) for e in alpha)
        b = ",".join(str(e) for e in beta)
        lines.append(f"monomial: a=[{a}] b=[{b}] c={format_complex(coeff)}")
    return "\n".join(lines) + "\n"
