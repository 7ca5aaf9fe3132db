"""
Repairing a delivery plan
=========================

A delivery plan is a chain of per-segment services. When one segment
fails before the drone reaches it, the broken service is replaced by the
services along a bridging path and later services are shifted in time.
"""

from skyway.network import GenParams, generate_network
from skyway.reactive import Algorithm
from skyway.service import CustomerDeliveryRequest, compose_initial, handle_failure, make_failure

net = generate_network(GenParams(1000, 8, 2000.0, 0.1, seed=4))
ids = net.ids.tolist()
request = CustomerDeliveryRequest(source=ids[0], destination=ids[-1], start_time=0.0)
plan = compose_initial(net, request, speed=15.0)
print(f"initial plan: {len(plan.services)} services, {plan.total_length:.1f} m, "
      f"arrives at t={plan.services[-1].end_time:.1f}")

# Break the third segment and repair with two strategies.
target = plan.services[2]
failure = make_failure(net, plan, target.service_id)
print("failure on", failure.failed_edge, "at", failure.location)

for strategy in (Algorithm.TWO_PHASED, Algorithm.GLOBAL_DIJKSTRA):
    new, result = handle_failure(net, plan, failure, strategy)
    new.validate()
    print(f"{strategy.value:16s} -> {len(new.services)} services, {new.total_length:.1f} m, "
          f"arrives at t={new.services[-1].end_time:.1f}")
    print("   replaced by:", [s.service_id for s in new.services[2:2 + len(result.path.nodes) - 1]])
