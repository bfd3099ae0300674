"""
SINR of each user under the two cooperative allocations
=======================================================

Unit channel gains make the numbers easy to follow by hand.
"""
import numpy as np

from conoma.model import NetworkRealization, PowerAllocation, Scheme, decode_schedule, relay_pairs, sinr

rho = 10.0
net = NetworkRealization(np.ones(2), {(2, 1): 1.0})

# proposed: the strong user (index 2) gets the larger share
proposed = PowerAllocation.two_user(0.2)
print("CN-PA  p^2 =", proposed.p_sq, " gamma =", sinr(Scheme.CNPA, proposed, net, rho).gamma)

# conventional: the weak user gets the larger share
conventional = PowerAllocation.two_user(0.2, scheme=Scheme.CNSA)
print("CN-SA  p^2 =", conventional.p_sq, " gamma =", sinr(Scheme.CNSA, conventional, net, rho).gamma)
print("OMA    gamma =", sinr(Scheme.OMA, None, net, rho).gamma)

# three users: the middle user combines the direct copy with one relayed copy
alloc3 = PowerAllocation(np.array([0.1, 0.3, 0.6]), {3: np.array([0.25, 0.75])})
net3 = NetworkRealization(np.ones(3), {pair: 1.0 for pair in relay_pairs(3)})
print("K=3    gamma =", sinr(Scheme.CNPA, alloc3, net3, 100.0).gamma)

for slot in decode_schedule(3):
    acts = ", ".join(f"user {a.user}: {a.action} {a.messages}" for a in slot.actions)
    print(f"slot {slot.index} from {slot.transmitter} carrying {slot.messages}: {acts}")
