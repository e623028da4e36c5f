#!/usr/bin/env python3
"""Generate the bundled quarterly fixture dataset.

Builds a synthetic 112-quarter (1992Q1-2019Q4) macro table whose data-
generating process mirrors the estimation problem: four policy-growth
classes assigned by a logit on lagged covariates, class effects on next-
quarter output, a confounding covariate channel that attenuates the
unweighted estimates, and an assignment-surprisal component in the output
level that the realized-growth (A1) response picks up but the forecast-
based (A2) response does not.

Searches seeds until the estimated tables show the target pattern:
  - WLS(A2): class-1 coefficient negative (p < .05), classes 3-4 positive
    (p < .05)
  - OLS(A2): nothing significant at 5%
  - WLS(A1): every coefficient above its WLS(A2) counterpart

Usage: make_fixture.py <path-to-fiscal-ipw-binary> <output-csv>
"""

import json
import math
import subprocess
import sys
import tempfile

import numpy as np

T = 112  # 1992Q1 .. 2019Q4

# knobs
DRIFT = 0.006
EPS_SD = 0.0034
U_SD = 0.0008
LAM = 0.002           # surprisal loading in the output level
SURP_CAP = 8.0
RHO_STD = -0.0022     # outcome loading on the assignment covariate (confounder)
G_SCALE = 0.012
PROP_SLOPES = np.array([1.266, 2.532, 3.798])  # on standardized dlc, classes 2-4
PROP_INTERCEPTS = np.array([-0.112, -0.187, -0.382])

DLC_SD = 0.04
DLU_SD = 0.03
TED_MEAN, TED_AR, TED_SD = 0.45, 0.8, 0.08
G_CLASS = np.array([-2.0, -0.5, 0.5, 2.0])

def _setup():
    """Precompute surprisal and covariate moments of the assignment logit."""
    rng = np.random.default_rng(12345)
    xs = np.clip(rng.normal(size=200000), -2.5, 2.5)
    a = PROP_INTERCEPTS
    scores = np.column_stack([np.zeros_like(xs)] + [a[j] + PROP_SLOPES[j] * xs for j in range(3)])
    e = np.exp(scores - scores.max(axis=1, keepdims=True))
    p = e / e.sum(axis=1, keepdims=True)
    surp = np.minimum(1.0 / p, SURP_CAP)
    e_inv_p = surp.mean(axis=0)
    e_x_given_j = (p * xs[:, None]).mean(axis=0) / p.mean(axis=0)
    return e_inv_p, e_x_given_j

E_INV_P, E_X_GIVEN_J = _setup()
TARGET_A2 = np.array([-0.0028, -0.0006, 0.0004, 0.0007])
MU = TARGET_A2 - DRIFT



def softmax(v):
    e = np.exp(v - v.max())
    return e / e.sum()


def gen(seed):
    rng = np.random.default_rng(seed)
    dlc = rng.normal(0.0, DLC_SD, T)
    dlu = rng.normal(0.0, DLU_SD, T)
    ted = np.empty(T)
    ted[0] = TED_MEAN
    for t in range(1, T):
        ted[t] = TED_MEAN + TED_AR * (ted[t - 1] - TED_MEAN) + rng.normal(0, TED_SD)
    ted = np.clip(ted, 0.05, None)

    # Assignment is driven by lagged commodity growth (iid), so classes are
    # serially independent; the same covariate feeds the outcome (RHO_STD)
    # to confound the unweighted column, and the assignment surprisal sits
    # transitorily in the output level so the realized-growth response
    # inherits it while the forecast-based response does not.
    y = np.empty(T)
    g = np.empty(T)
    q = np.zeros(T, dtype=int)
    y[0] = math.log(10000.0)
    g[0] = 0.0
    q[0] = 3
    perm = y[0]
    v_prev = 0.0
    eps_prev = 0.0
    mu_prev = 0.0
    conf_prev = 0.0
    for t in range(1, T):
        x2 = np.clip(dlc[t - 1] / DLC_SD, -2.5, 2.5)
        scores = np.concatenate(([0.0], PROP_INTERCEPTS + PROP_SLOPES * x2))
        p = softmax(scores)
        q[t] = rng.choice(4, p=p) + 1
        g[t] = G_SCALE * (G_CLASS[q[t] - 1] + rng.uniform(-0.2, 0.2))
        surp = min(1.0 / p[q[t] - 1], SURP_CAP)
        v = -LAM * (surp - 4.0) + rng.normal(0.0, U_SD)
        perm = perm + DRIFT + mu_prev + conf_prev + eps_prev
        y[t] = perm + v
        mu_prev = MU[q[t] - 1]
        conf_prev = RHO_STD * x2
        eps_prev = rng.normal(0.0, EPS_SD)
        v_prev = v

    rgdp = np.exp(y)
    gov = np.exp(math.log(3000.0) + np.cumsum(g))
    commodity = np.exp(math.log(100.0) + np.cumsum(dlc))
    unemp = np.exp(math.log(6.0) + np.cumsum(dlu))
    return rgdp, gov, ted, commodity, unemp


def write_csv(path, series):
    rgdp, gov, ted, commodity, unemp = series
    with open(path, "w") as f:
        f.write("date,rgdp,gov_spend,ted,commodity,unemp\n")
        for t in range(T):
            year, quarter = 1992 + t // 4, t % 4 + 1
            f.write(
                f"{year}Q{quarter},{rgdp[t]:.6f},{gov[t]:.6f},"
                f"{ted[t]:.6f},{commodity[t]:.6f},{unemp[t]:.6f}\n"
            )


def evaluate(binary, csv_path):
    proc = subprocess.run(
        [binary, "estimate", "--data", csv_path, "--format", "json",
         "--quiet", "--param", "ref"],
        capture_output=True, text=True)
    if proc.returncode != 0:
        return None
    results = {r["variant"]: r for r in json.loads(proc.stdout)}
    a2, ols, a1 = results["WLS (A2)"], results["OLS (A2)"], results["WLS (A1)"]
    ok = (
        a2["n"] == 109
        and a2["betas"][0] < 0 and a2["p_values"][0] < 0.05
        and a2["betas"][2] > 0 and a2["p_values"][2] < 0.05
        and a2["betas"][3] > 0 and a2["p_values"][3] < 0.05
        and all(p >= 0.05 for p in ols["p_values"])
        and all(b1 > b2 for b1, b2 in zip(a1["betas"], a2["betas"]))
    )
    if not ok:
        return None
    # prefer tables close to the calibration targets
    target = np.array([-0.0028, 0.0022, 0.0032, 0.0035])
    return float(np.abs(np.array(a2["betas"]) - target).sum()), a2, ols, a1


def main():
    binary, out_path = sys.argv[1], sys.argv[2]
    best = None
    with tempfile.NamedTemporaryFile(suffix=".csv") as tmp:
        for seed in range(4000):
            series = gen(seed)
            write_csv(tmp.name, series)
            scored = evaluate(binary, tmp.name)
            if scored is None:
                continue
            if best is None or scored[0] < best[0]:
                best = (*scored, seed, series)
                print(f"seed {seed}: score {scored[0]:.5f}")
    if best is None:
        sys.exit("no seed satisfied the pattern")
    score, a2, ols, a1, seed, series = best
    write_csv(out_path, series)
    print(f"frozen seed {seed} -> {out_path}")
    print("WLS(A2):", [round(b, 4) for b in a2["betas"]], "R2", round(a2["r_squared"], 4))
    print("OLS(A2):", [round(b, 4) for b in ols["betas"]], "R2", round(ols["r_squared"], 4))
    print("WLS(A1):", [round(b, 4) for b in a1["betas"]], "R2", round(a1["r_squared"], 4))


if __name__ == "__main__":
    main()
