"""The halving claim var0c(L f) <= var0c(f)/2 on quarantined components.

This is the one step of the cone-invariance argument that is *false* in
general (fold counterexample, see test_quarantine): components carrying
mass on the cells containing the turning points +-1/2 only satisfy the
weaker bound with the fold terms added.  Per the stated open question the
suite measures the ratio on sampled cone components, logs the violations of
1/2, and asserts only the fold-corrected bound."""

import warnings
from fractions import Fraction as F

import tentcocycle.densities as dn
import tentcocycle.quarantine as qa
from tentcocycle.interval_maps import PairedTentMap

HALF = F(1, 2)


def _fold_values(f):
    tot = F(0)
    for x in (HALF, -HALF):
        left = None
        right = None
        for b0, b1, v in zip(f.breakpoints, f.breakpoints[1:], f.values):
            if b0 < x <= b1:
                left = v
            if b0 <= x < b1:
                right = v
        tot += abs((left if left is not None else 0) + (right if right is not None else 0))
    return tot


def test_variation_halving_on_cone_samples(tmp_path):
    eps = F(1, 2500)
    p = qa.ConeParams.from_epsilon(eps)
    m = PairedTentMap(eps, eps)
    logged = []
    checked = 0
    for seed in range(60):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            t = qa.sample_cone_element(seed, p)
        for j, fj in enumerate(t.components[1:], start=1):
            v = dn.var0c(fj)
            if v == 0:
                continue
            checked += 1
            lv = dn.var0c(dn.transfer_pc(m, fj))
            if lv > v / 2:
                logged.append((seed, j, float(lv / v)))
            # fold-corrected bound: 1/2 var + the exposed turning-point values
            assert lv <= v / 2 + _fold_values(fj)
    assert checked > 100
    log = tmp_path / "halving_violations.log"
    log.write_text(
        "\n".join(f"seed={s} component={j} ratio={r:.6f}" for s, j, r in logged) + "\n"
    )
    # violations of the bare 1/2 exist (this is the documented counterexample
    # mechanism); they are logged, not failed
    print(f"\nvariation halving: {len(logged)} / {checked} component pushes "
          f"exceeded the bare 1/2 (log: {log})")
