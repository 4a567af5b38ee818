#!/usr/bin/env python3
"""Test cases for in-process pipes and bandwidth-capped transports"""

import asyncio
import math
import time
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
import sys
sys.path.insert(0, str(project_root))

from deskml_dist import (
    ConnectionClosedError,
    LinkLimiter,
    Shutdown,
    StepAck,
    ThrottledTransport,
    WeightsBroadcast,
    memory_pipe,
    throttle,
)

CAP_BPS = 8e6
PAYLOAD = 256 * 1024


def expected_seconds(nbytes: int, cap_bps: float = CAP_BPS) -> float:
    return nbytes * 8.0 / cap_bps


class TestMemoryPipe:
    """In-process transport pairs"""

    @pytest.mark.asyncio
    async def test_messages_both_ways(self):
        left, right = memory_pipe("coordinator", "worker-0")
        assert left.peer == "worker-0"
        assert right.peer == "coordinator"
        sent = await left.send(StepAck(4))
        message, frame = await right.recv()
        assert message == StepAck(4)
        assert sent == frame.wire_size == 13
        await right.send(Shutdown("bye"))
        assert await left.recv_message() == Shutdown("bye")
        assert left.bytes_sent == 13
        assert left.bytes_received == right.bytes_sent

    @pytest.mark.asyncio
    async def test_close(self):
        left, right = memory_pipe()
        await left.send(StepAck(1))
        await left.close()
        await left.close()
        assert await right.recv_message() == StepAck(1)
        with pytest.raises(ConnectionClosedError):
            await right.recv_message()
        with pytest.raises(ConnectionResetError):
            await right.send(StepAck(2))
        with pytest.raises(ConnectionResetError):
            await left.send(StepAck(2))


class TestThrottle:
    """Bandwidth caps"""

    async def test_uncapped_is_unwrapped(self):
        left, _ = memory_pipe()
        assert throttle(left, None) is left
        assert throttle(left, math.inf) is left
        assert isinstance(throttle(left, CAP_BPS), ThrottledTransport)

    def test_cap_must_be_positive(self):
        with pytest.raises(ValueError):
            LinkLimiter(0)

    @pytest.mark.asyncio
    async def test_send_takes_at_least_the_wire_time(self):
        left, right = memory_pipe()
        capped = throttle(left, CAP_BPS)
        message = WeightsBroadcast(0, b"\x00" * PAYLOAD)
        started = time.perf_counter()
        size = await capped.send(message)
        elapsed = time.perf_counter() - started
        assert elapsed >= 0.8 * expected_seconds(size)
        assert capped.bytes_sent == size
        assert await right.recv_message() == message

    @pytest.mark.asyncio
    async def test_receive_is_paced(self):
        left, right = memory_pipe()
        capped = throttle(right, CAP_BPS)
        size = await left.send(WeightsBroadcast(0, b"\x01" * PAYLOAD))
        started = time.perf_counter()
        await capped.recv_message()
        assert time.perf_counter() - started >= 0.8 * expected_seconds(size)
        assert capped.bytes_received == size

    @pytest.mark.asyncio
    async def test_shared_link_serializes_senders(self):
        shared = LinkLimiter(CAP_BPS)
        pipes = [memory_pipe() for _ in range(2)]
        senders = [throttle(left, CAP_BPS, link=shared) for left, _ in pipes]
        half = WeightsBroadcast(0, b"\x00" * (PAYLOAD // 2))

        started = time.perf_counter()
        sizes = await asyncio.gather(*(s.send(half) for s in senders))
        shared_elapsed = time.perf_counter() - started
        assert shared_elapsed >= 0.8 * expected_seconds(sum(sizes))
        assert shared.bytes_total == sum(sizes)

        separate = [throttle(left, CAP_BPS) for left, _ in pipes]
        started = time.perf_counter()
        await asyncio.gather(*(s.send(half) for s in separate))
        separate_elapsed = time.perf_counter() - started
        assert separate_elapsed >= 0.8 * expected_seconds(sizes[0])
        assert separate_elapsed < shared_elapsed


class SteppingClock:
    """Fake clock whose sleeps always overrun by a fixed amount"""

    def __init__(self, overshoot_s: float = 0.0):
        self.now = 0.0
        self.overshoot_s = overshoot_s
        self.sleeps = []

    def __call__(self) -> float:
        return self.now

    async def sleep(self, delay: float) -> None:
        self.sleeps.append(delay)
        wake_at = self.now + delay + self.overshoot_s
        await asyncio.sleep(0)
        self.now = max(self.now, wake_at)


class TestLinkLimiterTimeline:
    """Reservation timeline with a fake clock"""

    @pytest.mark.asyncio
    async def test_sleep_overshoot_is_credited(self):
        cap = 400e6
        clock = SteppingClock(overshoot_s=0.001)
        limiter = LinkLimiter(cap, clock=clock, sleep=clock.sleep)
        chunk = 64 * 1024
        for _ in range(160):
            await limiter.reserve(chunk)

        rate = limiter.bytes_total * 8.0 / clock.now
        assert limiter.bytes_total == 10 * 1024 * 1024
        assert rate == pytest.approx(cap, rel=0.1)

    @pytest.mark.asyncio
    async def test_idle_gap_restarts_the_timeline(self):
        clock = SteppingClock()
        limiter = LinkLimiter(CAP_BPS, clock=clock, sleep=clock.sleep)
        await limiter.reserve(PAYLOAD)
        clock.now += 1.0
        await limiter.reserve(PAYLOAD)
        assert clock.sleeps == pytest.approx([expected_seconds(PAYLOAD)] * 2)

    @pytest.mark.asyncio
    async def test_back_to_back_reservations_queue(self):
        clock = SteppingClock()
        limiter = LinkLimiter(CAP_BPS, clock=clock, sleep=clock.sleep)
        await asyncio.gather(limiter.reserve(PAYLOAD), limiter.reserve(PAYLOAD))
        assert clock.sleeps == pytest.approx([expected_seconds(PAYLOAD), 2 * expected_seconds(PAYLOAD)])


@pytest.mark.benchmark
class TestThrottleRate:
    """Achieved rate against the cap on the wall clock"""

    CAP = 80e6
    TEN_MIB = 10 * 1024 * 1024

    @pytest.mark.asyncio
    async def test_single_sender_hits_the_cap(self):
        left, right = memory_pipe()
        capped = throttle(left, self.CAP)
        started = time.perf_counter()
        size = await capped.send(WeightsBroadcast(0, b"\x00" * self.TEN_MIB))
        elapsed = time.perf_counter() - started
        assert size * 8.0 / elapsed == pytest.approx(self.CAP, rel=0.1)
        assert (await right.recv_message()).step == 0

    @pytest.mark.asyncio
    async def test_shared_link_halves_each_sender(self):
        shared = LinkLimiter(self.CAP)
        pipes = [memory_pipe() for _ in range(2)]
        senders = [throttle(left, self.CAP, link=shared) for left, _ in pipes]
        message = WeightsBroadcast(0, b"\x00" * (self.TEN_MIB // 2))

        async def timed_send(sender):
            started = time.perf_counter()
            size = await sender.send(message)
            return size * 8.0 / (time.perf_counter() - started)

        rates = await asyncio.gather(*(timed_send(s) for s in senders))
        for rate in rates:
            assert rate == pytest.approx(self.CAP / 2, rel=0.1)
