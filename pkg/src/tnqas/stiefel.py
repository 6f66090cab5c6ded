"""Compiling an MPS into a brickwork of 2-qubit unitaries.

The stack {U_k} is optimized by Riemannian Adam on the unitary manifold:
euclidean gradients of the overlap come from an environment ("hole")
contraction, are projected to the tangent space, and steps are taken with
the Cayley retraction; momentum is carried along by vector transport.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .tensornet import MPS
from .simulator import zero_state, _apply_u2q

_ABS_FLOOR = 1e-12  # |z| floor when differentiating the absolute value


@dataclass(frozen=True)
class BrickworkLayout:
    """Nearest-neighbor pairs, even bonds then odd bonds, per layer."""

    n_qubits: int
    layers: int = 1

    def __post_init__(self):
        if self.n_qubits < 2:
            raise ValueError("brickwork needs at least 2 qubits")
        if self.layers < 1:
            raise ValueError("layers must be >= 1")

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        out = []
        for _ in range(self.layers):
            out.extend((i, i + 1) for i in range(0, self.n_qubits - 1, 2))
            out.extend((i, i + 1) for i in range(1, self.n_qubits - 1, 2))
        return tuple(out)


class UnitaryStack:
    """Ordered 4x4 unitaries on a brickwork layout."""

    def __init__(self, layout: BrickworkLayout, unitaries):
        self.layout = layout
        self.unitaries = [np.asarray(u, dtype=complex) for u in unitaries]
        if len(self.unitaries) != len(layout.pairs):
            raise ValueError("one unitary per layout pair required")
        for u in self.unitaries:
            check_unitary(u)

    @classmethod
    def identity(cls, layout: BrickworkLayout) -> "UnitaryStack":
        return cls(layout, [np.eye(4, dtype=complex) for _ in layout.pairs])

    def copy(self) -> "UnitaryStack":
        return UnitaryStack(self.layout, [u.copy() for u in self.unitaries])

    def state(self) -> np.ndarray:
        """Action on |0...0>."""
        n = self.layout.n_qubits
        psi = zero_state(n)
        for (q1, q2), u in zip(self.layout.pairs, self.unitaries):
            psi = _apply_u2q(psi, u, q1, q2, n)
        return psi

    def max_unitarity_defect(self) -> float:
        return max(
            float(np.linalg.norm(u.conj().T @ u - np.eye(4))) for u in self.unitaries
        )


def check_unitary(u: np.ndarray, tol: float = 1e-9) -> None:
    if u.shape != (4, 4) and u.shape != (2, 2):
        raise ValueError(f"expected a 2x2 or 4x4 matrix, got {u.shape}")
    defect = np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]))
    if defect > tol:
        raise ValueError(f"matrix is not unitary (defect {defect:.2e})")


def _target_vector(target: MPS, n: int) -> np.ndarray:
    if target.n_sites != n:
        raise ValueError("layout qubit count differs from MPS site count")
    # dense contraction of the MPS side of the overlap network; kept
    # unnormalized so gradients scale with the target's amplitude scale
    acc = target.tensors[0].reshape(2, -1)
    for t in target.tensors[1:]:
        acc = np.tensordot(acc, t, axes=([-1], [0])).reshape(-1, t.shape[2])
    return acc.reshape(-1)


def overlap_amplitude(stack: UnitaryStack, target: MPS) -> complex:
    """z = <target| U |0...0> (target not normalized here)."""
    n = stack.layout.n_qubits
    psi = stack.state()
    return complex(np.vdot(_target_vector(target, n), psi))


def overlap_loss(stack: UnitaryStack, target: MPS) -> float:
    """|<target|U|0>| in [0, 1] for normalized targets."""
    return float(abs(overlap_amplitude(stack, target)))


def euclid_gradients(stack: UnitaryStack, target: MPS) -> list[np.ndarray]:
    """Gradient of the overlap w.r.t. each U_k, conjugated for complex descent.

    Returned matrices G satisfy dL = 2 Re <G, dU> with <A,B> = tr(A^dag B);
    they match central finite differences over the 32 real components.
    Computed by removing U_k from the network: prefix states below, adjoint
    suffix states above the hole.
    """
    n = stack.layout.n_qubits
    pairs = stack.layout.pairs
    m = len(pairs)
    psi_t = _target_vector(target, n)

    prefixes = [zero_state(n)]
    for (q1, q2), u in zip(pairs, stack.unitaries):
        prefixes.append(_apply_u2q(prefixes[-1], u, q1, q2, n))
    suffix = psi_t
    suffixes = [None] * m
    for k in range(m - 1, -1, -1):
        suffixes[k] = suffix
        q1, q2 = pairs[k]
        suffix = _apply_u2q(suffix, stack.unitaries[k].conj().T, q1, q2, n)

    z = complex(np.vdot(psi_t, prefixes[-1]))
    scale = z / (2.0 * max(abs(z), _ABS_FLOOR))

    grads = []
    for k, (q1, q2) in enumerate(pairs):
        l = suffixes[k].reshape([2] * n)
        r = prefixes[k].reshape([2] * n)
        l4 = np.moveaxis(l, (q1, q2), (0, 1)).reshape(4, -1)
        r4 = np.moveaxis(r, (q1, q2), (0, 1)).reshape(4, -1)
        hole = l4.conj() @ r4.T  # dz/dU_k
        grads.append(scale * hole.conj())
    return grads


def riemannian_gradient(u: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Project a euclidean gradient to the tangent space at u: G - U G^dag U."""
    return g - u @ g.conj().T @ u


def cayley_retract(u: np.ndarray, v: np.ndarray, eta: float) -> np.ndarray:
    """Step from u along -eta*v, back onto the manifold.

    First-order consistent with u - eta*v; exact unitarity for any step
    because W is anti-Hermitian by construction.
    """
    step = -eta * v
    w = 0.5 * (step @ u.conj().T - u @ step.conj().T)
    eye = np.eye(u.shape[0], dtype=complex)
    lhs = eye - 0.5 * w
    if abs(np.linalg.det(lhs)) < 1e-300:
        raise FloatingPointError("Cayley retraction hit a singular (I - W/2)")
    return np.linalg.solve(lhs, (eye + 0.5 * w) @ u)


def transport(u_new: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Vector transport P_U(V) = (V - U V^dag U) / 2 into the tangent space at u_new."""
    return 0.5 * (m - u_new @ m.conj().T @ u_new)


@dataclass
class RiemannianAdamState:
    n_blocks: int
    lr: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    momenta: list[np.ndarray] = field(default_factory=list)
    velocities: list[float] = field(default_factory=list)

    def __post_init__(self):
        if not self.momenta:
            self.momenta = [np.zeros((4, 4), dtype=complex) for _ in range(self.n_blocks)]
        if not self.velocities:
            self.velocities = [0.0] * self.n_blocks


def riemannian_adam_step(
    state: RiemannianAdamState, stack: UnitaryStack, grads: list[np.ndarray]
) -> tuple[RiemannianAdamState, UnitaryStack]:
    """One ascent step on the overlap (descent on 1 - L), in place.

    `grads` are the euclid_gradients of the overlap at the current stack.
    """
    state.t += 1
    bias = np.sqrt(1.0 - state.beta2**state.t) / (1.0 - state.beta1**state.t)
    lr_t = state.lr * bias
    for k, u in enumerate(stack.unitaries):
        g = -grads[k]  # minimize 1 - L
        rg = riemannian_gradient(u, g)
        m_t = state.beta1 * state.momenta[k] + (1.0 - state.beta1) * rg
        v_t = state.beta2 * state.velocities[k] + (1.0 - state.beta2) * float(
            np.real(np.trace(rg.conj().T @ rg))
        )
        direction = m_t / (np.sqrt(v_t) + state.eps)
        u_new = cayley_retract(u, direction, lr_t)
        stack.unitaries[k] = u_new
        state.momenta[k] = transport(u_new, m_t)
        state.velocities[k] = v_t
    return state, stack


def perturbed_identity_stack(
    layout: BrickworkLayout, rng: np.random.Generator, scale: float = 0.01
) -> UnitaryStack:
    """Identity blocks nudged by a retracted random tangent of norm `scale`.

    Keeps the start near |0...0>-preserving while breaking the symmetry
    lock of an exact identity initialization.
    """
    unitaries = []
    for _ in layout.pairs:
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        anti = 0.5 * (a - a.conj().T)
        nrm = np.linalg.norm(anti)
        if nrm > 0:
            anti = anti * (scale / nrm)
        unitaries.append(cayley_retract(np.eye(4, dtype=complex), anti, -1.0))
    return UnitaryStack(layout, unitaries)


@dataclass
class FitConfig:
    lr: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    max_iters: int = 1000
    tol: float = 1e-9
    patience: int = 100
    init_scale: float = 0.01


@dataclass
class FitResult:
    stack: UnitaryStack
    loss: float
    history: list[float] = field(default_factory=list)


def fit_mps_to_circuit(
    target: MPS,
    layout: BrickworkLayout,
    cfg: FitConfig | None = None,
    rng: np.random.Generator | None = None,
    initial: UnitaryStack | None = None,
) -> FitResult:
    """Maximize |<target|U|0>| over the stack; returns the best-seen stack.

    A low final overlap is a valid outcome: the stack only warm-starts the
    downstream architecture search.
    """
    cfg = cfg or FitConfig()
    rng = rng if rng is not None else np.random.default_rng(0)
    target = _normalized_copy(target)
    stack = initial.copy() if initial is not None else perturbed_identity_stack(
        layout, rng, cfg.init_scale
    )
    state = RiemannianAdamState(
        n_blocks=len(layout.pairs), lr=cfg.lr, beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.eps
    )
    best_stack = stack.copy()
    best_loss = overlap_loss(stack, target)
    history = [best_loss]
    since_improvement = 0
    for _ in range(cfg.max_iters):
        grads = euclid_gradients(stack, target)
        state, stack = riemannian_adam_step(state, stack, grads)
        loss = overlap_loss(stack, target)
        history.append(loss)
        if loss > best_loss + cfg.tol:
            best_loss = loss
            best_stack = stack.copy()
            since_improvement = 0
        else:
            since_improvement += 1
            if since_improvement >= cfg.patience:
                break
    return FitResult(stack=best_stack, loss=overlap_loss(best_stack, target), history=history)


def _normalized_copy(target: MPS) -> MPS:
    nrm = target.norm()
    if abs(nrm - 1.0) < 1e-12:
        return target
    return target.normalized()


class CircuitFitter(BaseEstimator):
    """MPS-to-brickwork compilation, scikit-learn style.

    After fit: stack_, loss_, history_.
    """

    def __init__(
        self,
        layers=1,
        lr=0.01,
        beta1=0.9,
        beta2=0.999,
        eps=1e-8,
        max_iters=1000,
        tol=1e-9,
        patience=100,
        init_scale=0.01,
        seed=0,
    ):
        self.layers = layers
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.max_iters = max_iters
        self.tol = tol
        self.patience = patience
        self.init_scale = init_scale
        self.seed = seed

    def fit(self, target: MPS, y=None):
        if not isinstance(target, MPS):
            raise TypeError("CircuitFitter.fit expects an MPS")
        layout = BrickworkLayout(target.n_sites, layers=self.layers)
        cfg = FitConfig(
            lr=self.lr,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
            max_iters=self.max_iters,
            tol=self.tol,
            patience=self.patience,
            init_scale=self.init_scale,
        )
        res = fit_mps_to_circuit(target, layout, cfg, rng=np.random.default_rng(self.seed))
        self.stack_ = res.stack
        self.loss_ = res.loss
        self.history_ = res.history
        return self

    def transform(self, target: MPS) -> np.ndarray:
        if not hasattr(self, "stack_"):
            raise NotFittedError("CircuitFitter is not fitted")
        return self.stack_.state()
