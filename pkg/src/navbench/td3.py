"""Twin-delayed deterministic policy-gradient learner.

Twin critics regress toward a shared min-of-two Bellman target with smoothed
target actions; the actor and all target nets update every ``policy_delay``
critic steps. Exploration mixes an epsilon-gated uniform action with
Gaussian noise around the deterministic policy.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .nn import (
    AdamState,
    Mlp,
    adam_init,
    adam_step,
    backward,
    clone_mlp,
    forward,
    init_mlp,
    mlp_from_dict,
    mlp_to_dict,
    soft_update,
)

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class Transition:
    """(s, a, r, s', done); done marks collision or goal, never a timeout."""
    obs: np.ndarray
    action: np.ndarray
    reward: float
    next_obs: np.ndarray
    done: bool


@dataclass
class Batch:
    obs: np.ndarray       # (n, obs_dim)
    actions: np.ndarray   # (n, act_dim)
    rewards: np.ndarray   # (n,)
    next_obs: np.ndarray  # (n, obs_dim)
    dones: np.ndarray     # (n,) float 0/1


class ReplayBuffer:
    """Fixed-capacity ring buffer with uniform sampling."""

    def __init__(self, capacity: int, obs_dim: int, act_dim: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_dim))
        self.actions = np.zeros((capacity, act_dim))
        self.rewards = np.zeros(capacity)
        self.next_obs = np.zeros((capacity, obs_dim))
        self.dones = np.zeros(capacity)
        self.size = 0
        self._next = 0

    def __len__(self) -> int:
        return self.size

    def push(self, obs, action, reward: float, next_obs, done: bool) -> None:
        i = self._next
        self.obs[i] = obs
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_obs[i] = next_obs
        self.dones[i] = 1.0 if done else 0.0
        self._next = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch:
        if self.size == 0:
            raise ValueError("cannot sample from an empty buffer")
        idx = rng.integers(0, self.size, size=batch_size)
        return Batch(self.obs[idx], self.actions[idx], self.rewards[idx],
                     self.next_obs[idx], self.dones[idx])


@dataclass(frozen=True)
class Td3Config:
    gamma: float = 0.99
    tau: float = 0.005
    policy_delay: int = 2
    smoothing_sigma: float = 0.2
    smoothing_clip: float = 0.5
    explore_sigma: float = 0.1
    batch_size: int = 128
    lr_actor: float = 3e-4
    lr_critic: float = 3e-4
    eps0: float = 1.0
    eps_decay: float = 0.992
    eps_min: float = 0.05
    capacity: int = 100_000
    hidden_sizes: tuple[int, ...] = (64, 64)


def validate_td3_config(config: Td3Config) -> None:
    if not 0.0 <= config.gamma < 1.0:
        raise ValueError("gamma must be in [0, 1)")
    if not 0.0 < config.tau <= 1.0:
        raise ValueError("tau must be in (0, 1]")
    if config.policy_delay < 1:
        raise ValueError("policy_delay must be >= 1")
    if config.batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    if config.capacity < 1:
        raise ValueError("capacity must be >= 1")
    if config.smoothing_sigma < 0.0 or config.smoothing_clip < 0.0 or config.explore_sigma < 0.0:
        raise ValueError("noise scales must be non-negative")
    if not (config.lr_actor > 0.0 and config.lr_critic > 0.0):
        raise ValueError("learning rates must be positive")
    if not 0.0 <= config.eps_min <= config.eps0 <= 1.0:
        raise ValueError("need 0 <= eps_min <= eps0 <= 1")
    if not 0.0 < config.eps_decay <= 1.0:
        raise ValueError("eps_decay must be in (0, 1]")
    if len(config.hidden_sizes) < 1 or any(n < 1 for n in config.hidden_sizes):
        raise ValueError("hidden_sizes must be positive")


@dataclass(frozen=True)
class EpsilonState:
    """Current uniform-action probability of the exploration schedule."""
    current: float


def decay_epsilon(eps: EpsilonState, config: Td3Config) -> EpsilonState:
    return EpsilonState(max(config.eps_min, eps.current * config.eps_decay))


def select_action(actor: Mlp, obs, eps: EpsilonState, config: Td3Config,
                  rng: np.random.Generator, explore: bool) -> np.ndarray:
    """Policy action in [-1, 1]^k.

    When exploring: with probability eps a uniform random action, otherwise
    the actor's output plus clipped Gaussian noise. When not exploring the
    actor output is returned verbatim (tanh already bounds it) and no
    random draws are consumed.
    """
    act_dim = actor.layer_sizes[-1]
    if explore and rng.random() < eps.current:
        return rng.uniform(-1.0, 1.0, size=act_dim)
    action, _ = forward(actor, obs)
    if explore:
        action = action + rng.normal(0.0, config.explore_sigma, size=act_dim)
    return np.clip(action, -1.0, 1.0)


def compute_td_target(critic1_t: Mlp, critic2_t: Mlp, actor_t: Mlp, batch: Batch,
                      config: Td3Config, rng: np.random.Generator) -> np.ndarray:
    """One-step targets y = r + gamma * (1 - done) * min(Q1', Q2') with
    clipped Gaussian smoothing noise on the target action."""
    next_action, _ = forward(actor_t, batch.next_obs)
    noise = rng.normal(0.0, config.smoothing_sigma, size=next_action.shape)
    noise = np.clip(noise, -config.smoothing_clip, config.smoothing_clip)
    next_action = np.clip(next_action + noise, -1.0, 1.0)
    x = np.concatenate([batch.next_obs, next_action], axis=1)
    q1, _ = forward(critic1_t, x)
    q2, _ = forward(critic2_t, x)
    q_min = np.minimum(q1[:, 0], q2[:, 0])
    return batch.rewards + config.gamma * (1.0 - batch.dones) * q_min


class Td3Agent:
    """Actor, twin critics, their targets, and the optimizers."""

    def __init__(self, obs_dim: int, act_dim: int, config: Td3Config,
                 rng: np.random.Generator):
        hidden = config.hidden_sizes
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        self.actor = init_mlp((obs_dim, *hidden, act_dim), "tanh", rng)
        self.critic1 = init_mlp((obs_dim + act_dim, *hidden, 1), "identity", rng)
        self.critic2 = init_mlp((obs_dim + act_dim, *hidden, 1), "identity", rng)
        self.actor_target = clone_mlp(self.actor)
        self.critic1_target = clone_mlp(self.critic1)
        self.critic2_target = clone_mlp(self.critic2)
        self.actor_adam = adam_init(self.actor, config.lr_actor)
        self.critic1_adam = adam_init(self.critic1, config.lr_critic)
        self.critic2_adam = adam_init(self.critic2, config.lr_critic)
        self.update_count = 0

    def act(self, obs) -> np.ndarray:
        """Deterministic policy output."""
        action, _ = forward(self.actor, obs)
        return action


def _critic_regression(critic: Mlp, adam: AdamState, x: np.ndarray,
                       y: np.ndarray) -> float:
    """One MSE gradient step of Q(x) toward y; returns the pre-update loss."""
    q, cache = forward(critic, x)
    err = q[:, 0] - y
    loss = float(np.mean(err * err))
    grad_out = (2.0 / err.size) * err[:, np.newaxis]
    grads, _ = backward(critic, cache, grad_out)
    adam_step(critic, grads, adam)
    return loss


def update_step(agent: Td3Agent, buffer: ReplayBuffer, config: Td3Config,
                rng: np.random.Generator) -> dict | None:
    """One learner step: critics every call, actor and targets every
    policy_delay-th call. Returns diagnostics, or None while the buffer is
    shorter than a batch."""
    if buffer.size < config.batch_size:
        return None
    batch = buffer.sample(config.batch_size, rng)
    y = compute_td_target(agent.critic1_target, agent.critic2_target,
                          agent.actor_target, batch, config, rng)
    x = np.concatenate([batch.obs, batch.actions], axis=1)
    diag = {
        "critic1_loss": _critic_regression(agent.critic1, agent.critic1_adam, x, y),
        "critic2_loss": _critic_regression(agent.critic2, agent.critic2_adam, x, y),
    }
    agent.update_count += 1
    if agent.update_count % config.policy_delay == 0:
        action, actor_cache = forward(agent.actor, batch.obs)
        xa = np.concatenate([batch.obs, action], axis=1)
        q1, critic_cache = forward(agent.critic1, xa)
        # ascend Q1 through the actor: dLoss/dQ1 = -1/n
        n = batch.obs.shape[0]
        grad_q = np.full((n, 1), -1.0 / n)
        _, grad_x = backward(agent.critic1, critic_cache, grad_q)
        grad_action = grad_x[:, agent.obs_dim:]
        actor_grads, _ = backward(agent.actor, actor_cache, grad_action)
        adam_step(agent.actor, actor_grads, agent.actor_adam)
        soft_update(agent.actor_target, agent.actor, config.tau)
        soft_update(agent.critic1_target, agent.critic1, config.tau)
        soft_update(agent.critic2_target, agent.critic2, config.tau)
        diag["actor_loss"] = float(-np.mean(q1[:, 0]))
    return diag


def save_checkpoint(path, agent: Td3Agent, config: Td3Config,
                    eps: EpsilonState) -> None:
    """Versioned JSON: all six networks plus the config echo and epsilon."""
    payload = {
        "version": CHECKPOINT_VERSION,
        "config": asdict(config),
        "epsilon": eps.current,
        "networks": {
            "actor": mlp_to_dict(agent.actor),
            "critic1": mlp_to_dict(agent.critic1),
            "critic2": mlp_to_dict(agent.critic2),
            "actor_target": mlp_to_dict(agent.actor_target),
            "critic1_target": mlp_to_dict(agent.critic1_target),
            "critic2_target": mlp_to_dict(agent.critic2_target),
        },
    }
    Path(path).write_text(json.dumps(payload))


def load_checkpoint(path) -> tuple[Td3Agent, Td3Config, EpsilonState]:
    """Rebuild an agent from a checkpoint; optimizer state restarts at zero."""
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read checkpoint {path}: {exc}") from exc
    if payload.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {payload.get('version')!r}")
    cfg_data = dict(payload["config"])
    cfg_data["hidden_sizes"] = tuple(cfg_data["hidden_sizes"])
    config = Td3Config(**cfg_data)
    nets = payload["networks"]
    actor = mlp_from_dict(nets["actor"])
    obs_dim = actor.layer_sizes[0]
    act_dim = actor.layer_sizes[-1]
    agent = Td3Agent(obs_dim, act_dim, config, np.random.default_rng(0))
    agent.actor = actor
    agent.critic1 = mlp_from_dict(nets["critic1"])
    agent.critic2 = mlp_from_dict(nets["critic2"])
    agent.actor_target = mlp_from_dict(nets["actor_target"])
    agent.critic1_target = mlp_from_dict(nets["critic1_target"])
    agent.critic2_target = mlp_from_dict(nets["critic2_target"])
    agent.actor_adam = adam_init(agent.actor, config.lr_actor)
    agent.critic1_adam = adam_init(agent.critic1, config.lr_critic)
    agent.critic2_adam = adam_init(agent.critic2, config.lr_critic)
    return agent, config, EpsilonState(float(payload["epsilon"]))
