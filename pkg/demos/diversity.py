"""
Diversity order from the closed-form user outages
=================================================
"""
import numpy as np

from conoma.analytic import HypoExpParams, asymptotic_weak_cdf, diversity_order_fit, strong_user_outage, weak_user_outage
from conoma.model import PowerAllocation
from conoma.simulate import db_to_linear

alloc = PowerAllocation.two_user(0.2)
rho = db_to_linear(np.arange(18, 31))
weak = [(r, weak_user_outage(HypoExpParams.from_allocation(alloc, r), 1.0)) for r in rho]
strong = [(r, strong_user_outage(alloc.p_sq, r, 2, 1.0)) for r in rho]
bound = [(r, asymptotic_weak_cdf(2, r, 0.2, [1.0], 1.0)) for r in rho]

print("weak user slope  ", round(diversity_order_fit(weak), 3))
print("strong user slope", round(diversity_order_fit(strong), 3))
print("ratio of high-SNR bound to exact outage at 30 dB:", bound[-1][1] / weak[-1][1])
