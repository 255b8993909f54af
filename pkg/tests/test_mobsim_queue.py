import math
import random

import pytest

from modeshift.mobsim.queueing import ChargerQueueState, ServicePool, charger_queue_step


def erlang_c_mean_wait(arrival_per_hr: float, service_mean_min: float, servers: int) -> float:
    """Closed-form M/M/c mean queue wait in minutes (independent oracle)."""
    mu = 60.0 / service_mean_min  # per hour
    a = arrival_per_hr / mu
    rho = a / servers
    assert rho < 1
    p0_inv = sum(a**k / math.factorial(k) for k in range(servers))
    p0_inv += a**servers / (math.factorial(servers) * (1 - rho))
    p_wait = (a**servers / (math.factorial(servers) * (1 - rho))) / p0_inv
    wq_hours = p_wait / (servers * mu - arrival_per_hr)
    return wq_hours * 60.0


class TestChargerQueueStep:
    def test_no_arrivals_state_unchanged(self):
        state = ChargerQueueState(ports=2)
        before = (state.pool.started, state.now)
        stats = charger_queue_step(state, [], 60.0)
        assert stats["arrivals"] == 0
        assert state.pool.started == before[0]
        assert state.now == 60.0

    def test_critically_loaded_deterministic_no_wait(self):
        # 1 port, deterministic 30-minute service, arrivals every 30 minutes
        state = ChargerQueueState(ports=1)
        for tick in range(20):
            charger_queue_step(state, [(0.0, 30.0), (30.0, 30.0)], 60.0)
        assert state.pool.max_wait() == 0.0

    def test_fifo_wait_when_saturated(self):
        state = ChargerQueueState(ports=1)
        stats = charger_queue_step(state, [(0.0, 30.0), (0.0, 30.0)], 60.0)
        assert stats["waits"] == [0.0, 30.0]

    def test_utilization_half(self):
        state = ChargerQueueState(ports=1)
        charger_queue_step(state, [(0.0, 30.0)], 60.0)
        assert state.utilization(0.0, 60.0) == pytest.approx(0.5)

    def test_conservation(self):
        state = ChargerQueueState(ports=2)
        charger_queue_step(state, [(0.0, 45.0), (5.0, 45.0), (10.0, 45.0)], 60.0)
        pool = state.pool
        assert pool.started == pool.completed(60.0) + pool.in_progress(60.0)

    def test_arrivals_must_be_ordered(self):
        pool = ServicePool(1)
        pool.arrive(10.0, 5.0)
        with pytest.raises(ValueError):
            pool.arrive(5.0, 5.0)


class TestMM2Oracle:
    def test_mean_wait_matches_erlang_c(self):
        # lambda = 4/hr, 2 ports, exp(20 min) service, >= 10,000 hours
        rng = random.Random(20140704)
        lam_per_min = 4.0 / 60.0
        state = ChargerQueueState(ports=2)
        horizon_min = 10_000 * 60.0
        t = 0.0
        arrivals = []
        while True:
            t += rng.expovariate(lam_per_min)
            if t >= horizon_min:
                break
            arrivals.append(t)
        now = 0.0
        i = 0
        while now < horizon_min:
            batch = []
            while i < len(arrivals) and arrivals[i] < now + 60.0:
                batch.append((arrivals[i] - now, rng.expovariate(1.0 / 20.0)))
                i += 1
            charger_queue_step(state, batch, 60.0)
            now += 60.0
        simulated = state.pool.mean_wait()
        analytic = erlang_c_mean_wait(4.0, 20.0, 2)
        assert simulated == pytest.approx(analytic, rel=0.15)

    def test_littles_law_consistency(self):
        rng = random.Random(77)
        state = ChargerQueueState(ports=2)
        horizon_min = 4_000 * 60.0
        t = 0.0
        while True:
            t += rng.expovariate(4.0 / 60.0)
            if t >= horizon_min:
                break
            state.arrive(t, rng.expovariate(1.0 / 20.0))
        mean_wait = state.pool.mean_wait()
        arrivals_per_min = state.pool.started / horizon_min
        l_queue = state.queue_length_integral(0.0, horizon_min) / horizon_min
        assert l_queue == pytest.approx(arrivals_per_min * mean_wait, rel=0.10)

    def test_more_ports_weakly_reduce_waits(self):
        rng = random.Random(5)
        arrivals = []
        t = 0.0
        while t < 2_000 * 60.0:
            t += rng.expovariate(5.0 / 60.0)
            arrivals.append((t, rng.expovariate(1.0 / 25.0)))
        waits = {}
        for ports in (2, 3):
            state = ChargerQueueState(ports=ports)
            for at, service in arrivals:
                state.arrive(at, service)
            waits[ports] = state.pool.mean_wait()
        assert waits[3] <= waits[2]
