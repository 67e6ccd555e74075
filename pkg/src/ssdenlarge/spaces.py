"""Finite-dimensional SSD spaces.

A space is ``R^dim`` with a symmetric bilinear form ``[b, c] = b^T G c``.
The norm is always Euclidean, the dual is identified with ``R^dim`` through
the standard inner product, and ``iota`` is multiplication by ``G``.
"""

import re

import numpy as np

from ._checks import as_matrix, as_points, as_vector, frozen
from .errors import InputError

SYMMETRY_TOL = 1e-12
BANACH_TOL = 1e-10


class SsdSpace:
    """Real coordinate space with a symmetric Gram matrix.

    Parameters
    ----------
    gram : array_like, shape (dim, dim)
        Symmetric matrix of the bilinear form. Asymmetric input is rejected,
        not symmetrized.
    preset_tag : str, optional
        Label such as ``"hilbert:3"`` or ``"product:1"``.
    """

    __slots__ = ("_gram", "_tag")

    def __init__(self, gram, preset_tag=None):
        G = as_matrix(gram, name="gram")
        if G.shape[0] != G.shape[1] or G.shape[0] == 0:
            raise InputError(f"gram must be a nonempty square matrix, got {G.shape}")
        if np.max(np.abs(G - G.T)) > SYMMETRY_TOL:
            raise InputError("gram matrix is not symmetric")
        self._gram = frozen(G)
        self._tag = preset_tag

    @property
    def gram(self):
        return self._gram

    @property
    def dim(self):
        return self._gram.shape[0]

    @property
    def preset_tag(self):
        return self._tag

    def __repr__(self):
        tag = self._tag or "custom"
        return f"SsdSpace({tag}, dim={self.dim})"

    def __eq__(self, other):
        return isinstance(other, SsdSpace) and np.array_equal(self._gram, other._gram)

    def __hash__(self):
        return hash((self.dim, self._gram.tobytes()))

    # -- the form ---------------------------------------------------------

    def bracket(self, b, c):
        b = as_vector(b, self.dim, "b")
        c = as_vector(c, self.dim, "c")
        return float(b @ self._gram @ c)

    def q(self, b):
        b = as_vector(b, self.dim, "b")
        return 0.5 * float(b @ self._gram @ b)

    def q_many(self, B):
        B = as_points(B, self.dim)
        return 0.5 * np.einsum("ij,jk,ik->i", B, self._gram, B)

    def bracket_many(self, B, C):
        B = as_points(B, self.dim)
        C = as_points(C, self.dim)
        return np.einsum("ij,jk,ik->i", B, self._gram, C)

    def iota(self, c):
        """Map ``c`` to the dual vector ``G c`` so that ``<b, iota(c)> = [b, c]``."""
        c = as_vector(c, self.dim, "c")
        return self._gram @ c

    def iota_many(self, C):
        return as_points(C, self.dim) @ self._gram

    def calculus_residual(self, alpha, gamma, b, c):
        """``q(alpha b + gamma c) - (alpha^2 q(b) + gamma^2 q(c) + alpha gamma [b, c])``."""
        b = as_vector(b, self.dim, "b")
        c = as_vector(c, self.dim, "c")
        lhs = self.q(alpha * b + gamma * c)
        rhs = alpha * alpha * self.q(b) + gamma * gamma * self.q(c) + alpha * gamma * self.bracket(b, c)
        return lhs - rhs

    def banach_ssd_margin(self):
        """Smallest eigenvalue of ``I + G``.

        The Euclidean norm satisfies ``0.5 |b|^2 + q(b) >= 0`` exactly when this
        is nonnegative (up to ``BANACH_TOL``).
        """
        return float(np.linalg.eigvalsh(np.eye(self.dim) + self._gram)[0])

    def is_banach_ssd(self):
        return self.banach_ssd_margin() >= -BANACH_TOL

    def is_involutive(self, tol=1e-12):
        """Whether ``G @ G == I``; conjugation identities that apply iota twice rely on it."""
        return bool(np.max(np.abs(self._gram @ self._gram - np.eye(self.dim))) <= tol)

    @property
    def operator_norm(self):
        return float(np.linalg.norm(self._gram, 2))


def hilbert(n):
    return SsdSpace(np.eye(n), preset_tag=f"hilbert:{n}")


def anti_hilbert(n):
    return SsdSpace(-np.eye(n), preset_tag=f"anti_hilbert:{n}")


def r3():
    G = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    return SsdSpace(G, preset_tag="r3")


def product(n):
    """``X x X*`` with ``X = R^n``; coordinates are ``(x, x*)``."""
    n = int(n)
    if n < 1:
        raise InputError("product space needs n >= 1")
    Z = np.zeros((n, n))
    I = np.eye(n)
    return SsdSpace(np.block([[Z, I], [I, Z]]), preset_tag=f"product:{n}")


_PRESET_RE = re.compile(r"^(hilbert|anti_hilbert|product):(\d+)$")


def space_from_spec(spec):
    """Build a space from ``"hilbert:<n>"``, ``"anti_hilbert:<n>"``, ``"r3"``,
    ``"product:<n>"`` or a dense symmetric matrix (nested lists)."""
    if isinstance(spec, SsdSpace):
        return spec
    if isinstance(spec, str):
        if spec == "r3":
            return r3()
        m = _PRESET_RE.match(spec)
        if not m:
            raise InputError(f"unknown space preset {spec!r}")
        kind, n = m.group(1), int(m.group(2))
        if n < 1:
            raise InputError("space dimension must be positive")
        return {"hilbert": hilbert, "anti_hilbert": anti_hilbert, "product": product}[kind](n)
    if isinstance(spec, dict) and "gram" in spec:
        return SsdSpace(spec["gram"])
    return SsdSpace(spec)


def space_to_spec(space):
    if space.preset_tag is not None:
        return space.preset_tag
    return {"gram": space.gram.tolist()}


def product_dim(space):
    """Return ``n`` when ``space`` is the product ``R^n x R^n``, else raise."""
    n2 = space.dim
    if n2 % 2 == 0 and space == product(n2 // 2):
        return n2 // 2
    raise InputError(f"{space!r} is not a product space X x X*")


# -- checks -----------------------------------------------------------------


def calculus_identity_report(space, trials=1000, seed=0, instance=None, expect="pass"):
    """``q(a b + g c) = a^2 q(b) + g^2 q(c) + a g [b, c]`` on random inputs,
    to ``1e-9 (1 + |terms|)``."""
    from ._checks import rng_from
    from .reports import Tally
    rng = rng_from(seed)
    t = Tally(1e-9)
    scale = 10.0 ** rng.uniform(-2, 2, size=(trials, 1))
    B = rng.normal(size=(trials, space.dim)) * scale
    C = rng.normal(size=(trials, space.dim)) * scale[::-1]
    al = rng.normal(size=trials) * 3
    ga = rng.normal(size=trials) * 3
    for k in range(trials):
        qb, qc, bc = space.q(B[k]), space.q(C[k]), space.bracket(B[k], C[k])
        terms = abs(al[k] ** 2 * qb) + abs(ga[k] ** 2 * qc) + abs(al[k] * ga[k] * bc)
        res = space.calculus_residual(al[k], ga[k], B[k], C[k])
        t.add(abs(res), tol=1e-9 * (1.0 + terms))
    return t.report("calculus_identity", instance or (space.preset_tag or "custom"), seed, expect)


def space_properties_report(space, trials=1000, seed=0, instance=None, expect="pass"):
    """Symmetry, iota adjointness, the operator-norm bound and the Banach SSD margin."""
    from ._checks import rng_from
    from .reports import Tally
    rng = rng_from(seed)
    t = Tally(1e-12)
    norm = space.operator_norm
    for _ in range(trials):
        b, c = rng.normal(size=space.dim), rng.normal(size=space.dim)
        bc = space.bracket(b, c)
        mag = 1.0 + abs(bc)
        t.add(abs(bc - space.bracket(c, b)), tol=1e-12 * mag)
        t.add(abs(float(b @ space.iota(c)) - bc), tol=1e-12 * mag)
        t.add(abs(bc) - norm * np.linalg.norm(b) * np.linalg.norm(c), tol=1e-12 * mag)
    t.add(-space.banach_ssd_margin(), tol=BANACH_TOL)
    t.notes["banach_margin"] = space.banach_ssd_margin()
    return t.report("space_properties", instance or (space.preset_tag or "custom"), seed, expect)
