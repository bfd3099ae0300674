"""
Two-user mutual outage: closed form against simulation
======================================================
"""
from conoma.analytic import MopK2Params, mop_closed_form_k2
from conoma.model import PowerAllocation, RateTargets, Scheme
from conoma.simulate import ExperimentConfig, db_to_linear, run_experiment

p_strong = 0.795
rates = RateTargets.uniform(1.0, 2)
grid = (0, 6, 12, 18)

conf = ExperimentConfig(Scheme.CNPA, PowerAllocation.two_user(1 - p_strong, p_strong), grid, rates,
                        trials=1_000_000, seed=1)
print(f"{'rho_db':>6} {'closed form':>12} {'simulated':>12} {'z':>6}")
for db, st in run_experiment(conf):
    exact = mop_closed_form_k2(MopK2Params.from_rates(p_strong, float(db_to_linear(db)), 1.0))
    print(f"{db:6.0f} {exact:12.6f} {st.mop:12.6f} {(st.mop - exact) / st.mop_se:6.2f}")

# the variant with the dropped factor in the cooperative exponent goes negative
prm = MopK2Params.from_rates(p_strong, float(db_to_linear(12)), 1.0)
print("variant form at 12 dB:", mop_closed_form_k2(prm, form="printed"))
