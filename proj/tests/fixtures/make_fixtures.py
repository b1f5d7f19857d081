"""Regenerates the committed weight fixtures used by the test suites.

Each fixture is a one-hidden-layer tanh network trained so that h <= 0 on a
core of a fixed safe set and h >= 0 on its complement, with a hinge on the Lie
derivative near the zero level. Adversarial mode perturbs the Lie samples
with PGD before each step. Runs are seeded and single threaded.

    python make_fixtures.py            # all fixtures
    python make_fixtures.py dubins_adv_h64
"""

import json
import math
import sys
from dataclasses import asdict, dataclass, field
from itertools import product
from pathlib import Path

import torch

torch.set_num_threads(1)
torch.use_deterministic_algorithms(True)
DTYPE = torch.float64
HERE = Path(__file__).resolve().parent


@dataclass
class TrainSpec:
    name: str
    system: str
    hidden: int
    mode: str  # "regular" or "adversarial"
    seed: int
    epochs: int = 3000
    batch: int = 2048
    lr: float = 3e-3
    margin_label: float = 0.05
    margin_lie: float = 0.2
    lie_weight: float = 1.0
    band: float = 0.3
    pgd_steps: int = 7
    pgd_radius_frac: float = 0.05
    weight_decay: float = 1e-5
    notes: dict = field(default_factory=dict)


# ---------------------------------------------------------------- systems


def pendulum_system():
    m, g, l, j, b = 1.0, 9.81, 0.5, 0.25, 0.1
    lo = torch.tensor([-math.pi, -4.0], dtype=DTYPE)
    hi = torch.tensor([math.pi, 4.0], dtype=DTYPE)
    controls = torch.tensor([[-8.0], [8.0]], dtype=DTYPE)

    def f(x, u):
        th, om = x[:, 0], x[:, 1]
        return torch.stack([om, (m * g * l * torch.sin(th) + u[:, 0] - b * om) / j], dim=1)

    def safe(x):
        return (x[:, 0].abs() <= math.pi / 3) & (x[:, 1].abs() <= 2.0)

    # The full box is not control invariant: from (pi/3, 2) maximal braking still
    # overshoots by about 0.13 rad, so only this inner box is pushed to h <= -m.
    def core(x):
        return (x[:, 0].abs() <= math.pi / 4) & (x[:, 1].abs() <= 1.5)

    return lo, hi, controls, f, safe, core, "|theta| <= pi/3 and |theta_dot| <= 2"


def dubins_system():
    lo = torch.tensor([-2.0, -2.0, -math.pi], dtype=DTYPE)
    hi = torch.tensor([2.0, 2.0, math.pi], dtype=DTYPE)
    controls = torch.tensor(list(product([-1.0, 1.0], repeat=3)), dtype=DTYPE)

    def f(x, u):
        return torch.stack([torch.cos(x[:, 2]) + u[:, 0], torch.sin(x[:, 2]) + u[:, 1], u[:, 2]], dim=1)

    def safe(x):
        return x[:, 0] ** 2 + x[:, 1] ** 2 >= 0.25

    return lo, hi, controls, f, safe, safe, "p_x^2 + p_y^2 >= 0.25"


def quadrotor_system():
    m, j, g, arm = 0.5, 0.01, 9.81, 0.3
    lo = torch.tensor([-1.0, -1.0, -math.pi / 4, -2.0, -2.0, -2.0], dtype=DTYPE)
    hi = -lo
    controls = torch.tensor(list(product([0.0, 1.5 * m * g], repeat=2)), dtype=DTYPE)

    def f(x, u):
        thrust = u[:, 0] + u[:, 1]
        return torch.stack(
            [
                x[:, 3],
                x[:, 4],
                x[:, 5],
                thrust * torch.sin(x[:, 2]) / m,
                thrust * torch.cos(x[:, 2]) / m - g,
                arm * (u[:, 1] - u[:, 0]) / (2 * j),
            ],
            dim=1,
        )

    def safe(x):
        return (x[:, 2].abs() <= math.pi / 6) & (x[:, 1] >= -0.5)

    def core(x):
        return (x[:, 2].abs() <= math.pi / 8) & (x[:, 1] >= -0.25)

    return lo, hi, controls, f, safe, core, "|theta| <= pi/6 and p_y >= -0.5"


SYSTEMS = {"pendulum": pendulum_system, "dubins": dubins_system, "quadrotor": quadrotor_system}

# ---------------------------------------------------------------- training


def lie_min(net, f, controls, x):
    """min over control vertices of grad h(x)^T f(x, u)."""
    if not x.requires_grad:
        x = x.requires_grad_(True)
    h = net(x).squeeze(1)
    (grad,) = torch.autograd.grad(h.sum(), x, create_graph=True)
    vals = [(grad * f(x, u.expand(x.shape[0], -1))).sum(1) for u in controls]
    return torch.stack(vals, 1).min(1).values, h


def train(spec: TrainSpec):
    torch.manual_seed(spec.seed)
    lo, hi, controls, f, safe, core, geometry = SYSTEMS[spec.system]()
    n = lo.numel()
    net = torch.nn.Sequential(torch.nn.Linear(n, spec.hidden), torch.nn.Tanh(), torch.nn.Linear(spec.hidden, 1)).to(DTYPE)
    opt = torch.optim.Adam(net.parameters(), lr=spec.lr, weight_decay=spec.weight_decay)
    sched = torch.optim.lr_scheduler.CosineAnnealingLR(opt, spec.epochs)
    width = hi - lo
    radius = spec.pgd_radius_frac * width

    def sample(k):
        return lo + width * torch.rand(k, n, dtype=DTYPE)

    def lie_loss(x):
        lie, h = lie_min(net, f, controls, x)
        near = (h.detach().abs() <= spec.band).to(DTYPE)
        return (torch.relu(lie + spec.margin_lie) * near).sum() / near.sum().clamp(min=1.0)

    losses = {}
    for epoch in range(spec.epochs):
        x = sample(spec.batch)
        inner, unsafe = core(x), ~safe(x)
        h = net(x).squeeze(1)
        label_loss = torch.relu(h[inner] + spec.margin_label).mean() + torch.relu(spec.margin_label - h[unsafe]).mean()

        xl = sample(spec.batch)
        if spec.mode == "adversarial":
            step = radius / 4
            xa = xl.clone()
            for _ in range(spec.pgd_steps):
                xa.requires_grad_(True)
                lie, _ = lie_min(net, f, controls, xa)
                (g,) = torch.autograd.grad(torch.relu(lie + spec.margin_lie).sum(), xa)
                with torch.no_grad():
                    xa = xa + step * g.sign()
                    xa = torch.max(torch.min(xa, xl + radius), xl - radius)
                    xa = torch.max(torch.min(xa, hi), lo)
            xl = xa.detach()
        loss = label_loss + spec.lie_weight * lie_loss(xl)
        opt.zero_grad()
        loss.backward()
        opt.step()
        sched.step()
        if epoch % 500 == 0 or epoch == spec.epochs - 1:
            losses = {"epoch": epoch, "label": label_loss.item(), "total": loss.item()}
            print(f"[{spec.name}] epoch {epoch}: {losses}", file=sys.stderr)
    return net, geometry, losses


def export(spec: TrainSpec, net, geometry, losses):
    lin1, lin2 = net[0], net[2]
    doc = {
        "activation": "tanh",
        "input_dim": lin1.in_features,
        "layers": [
            {"weight": lin1.weight.detach().tolist(), "bias": lin1.bias.detach().tolist()},
            {"weight": lin2.weight.detach().tolist(), "bias": lin2.bias.detach().tolist()},
        ],
        "metadata": {"train_spec": asdict(spec), "safe_set": geometry},
    }
    (HERE / f"{spec.name}.json").write_text(json.dumps(doc, indent=1) + "\n")
    meta = {"train_spec": asdict(spec), "safe_set": geometry, "final_losses": losses}
    (HERE / f"{spec.name}.meta.json").write_text(json.dumps(meta, indent=1) + "\n")


# Steeper networks (no weight decay, larger steps) with a firm label margin.
DUBINS_HPARAMS = dict(lr=0.03, epochs=4000, weight_decay=0.0, margin_label=0.5, margin_lie=0.05)

FIXTURES = [
    TrainSpec("pendulum_adv_h16", "pendulum", 16, "adversarial", seed=1, lie_weight=10.0),
    TrainSpec("dubins_adv_h64", "dubins", 64, "adversarial", seed=5, **DUBINS_HPARAMS),
    TrainSpec("dubins_reg_h64", "dubins", 64, "regular", seed=5, **DUBINS_HPARAMS),
]


def main(argv):
    wanted = set(argv) or {s.name for s in FIXTURES}
    for spec in FIXTURES:
        if spec.name in wanted:
            export(spec, *train(spec))


if __name__ == "__main__":
    main(sys.argv[1:])
