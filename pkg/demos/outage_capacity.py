"""
Rate supported at a given non-outage probability
================================================
"""
import numpy as np

from conoma.model import PowerAllocation, RateTargets, Scheme
from conoma.simulate import ExperimentConfig, outage_capacity_curve

rates = np.round(np.arange(0.1, 3.0, 0.05), 10)
dummy = RateTargets.uniform(1.0, 2)


def rate_at(curve, level=0.9):
    ok = [r for r, q in curve if q >= level]
    return max(ok) if ok else 0.0


conf = ExperimentConfig(Scheme.CNPA, PowerAllocation.two_user(0.2), (15,), dummy, 200_000, seed=3)
pa = outage_capacity_curve(conf, rates, reoptimize=True)
conf = ExperimentConfig(Scheme.CNSA, PowerAllocation.two_user(0.2, scheme=Scheme.CNSA), (15,), dummy, 200_000, seed=3)
sa = outage_capacity_curve(conf, rates)
conf = ExperimentConfig(Scheme.OMA, None, (15,), dummy, 200_000, seed=3)
oma = outage_capacity_curve(conf, rates)

for name, curve in (("CN-PA (re-optimized)", pa), ("CN-SA p1^2=0.8", sa), ("OMA", oma)):
    print(f"{name:>22}: largest grid rate with 90% non-outage = {rate_at(curve):.2f}")
