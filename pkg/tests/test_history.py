"""Ring buffers, delay grids, and the transport-resolvent kernel."""

import math

import numpy as np
import pytest

from ddesplit.errors import InsufficientHistoryError, ParameterError
from ddesplit.history import (
    DelayGrid,
    HistorySegment,
    RingBuffer,
    delay_kernel_integral,
    delayed_value,
    init_from_history,
    l2_norm_trapezoid,
    trace_at_tau,
    transport_resolvent_apply,
)
from ddesplit.oracle import poly_history


class TestDelayGrid:
    def test_integer_lag_snaps_to_exact_depth(self):
        # 0.257/0.001 lands at 256.99999999999997 in floating point.
        grid = DelayGrid(h=0.001, tau=-0.257)
        assert grid.m == 257
        assert grid.delta == 0.0
        assert grid.is_integer_lag

    def test_fractional_lag_splits_into_depth_and_offset(self):
        grid = DelayGrid(h=0.1, tau=-0.257)
        assert grid.m == 2
        assert grid.delta == pytest.approx(0.057, abs=1e-12)
        assert not grid.is_integer_lag

    @pytest.mark.parametrize("h,tau", [(0.0, -1.0), (-0.1, -1.0),
                                       (0.1, 0.0), (0.1, 0.5)])
    def test_invalid_parameters_rejected(self, h, tau):
        with pytest.raises(ParameterError):
            DelayGrid(h, tau)

    def test_delay_shorter_than_step_rejected(self):
        with pytest.raises(ParameterError):
            DelayGrid(h=0.5, tau=-0.3)

    def test_depth_and_offset_reconstruct_the_delay(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            h = float(rng.uniform(0.01, 0.5))
            tau = -float(rng.uniform(h, 20.0 * h))
            grid = DelayGrid(h, tau)
            assert grid.m >= 1
            assert 0.0 <= grid.delta < h
            assert grid.m * h + grid.delta == pytest.approx(-tau, rel=1e-9)


class TestRingBuffer:
    def test_push_discards_oldest(self):
        buf = RingBuffer([1, 2, 3])
        buf.push(4)
        assert buf.contents() == [2, 3, 4]
        assert buf.oldest == 2

    def test_capacity_two_full_overwrite(self):
        buf = RingBuffer(["x1", "x2"])
        buf.push("y1")
        buf.push("y2")
        assert buf.contents() == ["y1", "y2"]

    def test_capacity_one_degenerate(self):
        buf = RingBuffer([5])
        buf.push(7)
        assert buf.contents() == [7]
        assert buf.oldest == 7

    def test_empty_initializer_rejected(self):
        with pytest.raises(ParameterError):
            RingBuffer([])

    @pytest.mark.parametrize("idx", [-1, 3, 10])
    def test_peek_out_of_range_rejected(self, idx):
        with pytest.raises(ParameterError):
            RingBuffer([1, 2, 3]).peek(idx)

    def test_len_is_capacity(self):
        assert len(RingBuffer([0.0] * 7)) == 7

    def test_fifo_shift_equivalence_on_random_sequences(self):
        # Oldest entry after k >= capacity pushes is the value pushed exactly
        # capacity steps earlier; delayed_value with delta = 0 reads it.
        rng = np.random.default_rng(314)
        for _ in range(25):
            cap = int(rng.integers(1, 12))
            grid = DelayGrid(h=1.0, tau=-float(cap))
            seq = rng.standard_normal(cap + int(rng.integers(5, 40)))
            buf = RingBuffer(list(seq[:cap]))
            for i in range(cap, seq.size):
                assert delayed_value(buf, grid) == seq[i - cap]
                buf.push(seq[i])


class TestInitFromHistory:
    def test_constant_history_fills_all_slots(self):
        grid = DelayGrid(h=0.25, tau=-1.0)
        buf = init_from_history(lambda t: 3.5, grid, capacity=4)
        assert buf.contents() == [3.5] * 4

    def test_oldest_slot_samples_the_left_endpoint(self):
        grid = DelayGrid(h=0.25, tau=-1.0)
        buf = init_from_history(lambda t: t, grid, capacity=4)
        assert buf.oldest == -1.0
        assert buf.contents() == pytest.approx([-1.0, -0.75, -0.5, -0.25])

    def test_polynomial_history_newest_slot_is_its_constant_term(self):
        grid = DelayGrid(h=1.0, tau=-8.0)
        buf = init_from_history(poly_history, grid, capacity=9)
        assert buf.peek(8) == pytest.approx(0.14815, abs=1e-12)

    def test_sample_beyond_zero_rejected(self):
        grid = DelayGrid(h=0.25, tau=-1.0)
        with pytest.raises(ParameterError):
            init_from_history(lambda t: t, grid, capacity=6)


class TestDelayedValue:
    def test_integer_lag_returns_oldest(self):
        grid = DelayGrid(h=0.1, tau=-0.3)
        buf = RingBuffer([2.5, 0.0, 0.0])
        assert delayed_value(buf, grid) == 2.5

    def test_half_step_offset_is_the_midpoint(self):
        grid = DelayGrid(h=0.2, tau=-0.3)  # m = 1, delta = h/2
        assert grid.delta == pytest.approx(0.1)
        buf = RingBuffer([1.0, 3.0])
        assert delayed_value(buf, grid) == pytest.approx(2.0)

    def test_constant_buffer_invariant_under_offset(self):
        rng = np.random.default_rng(99)
        for _ in range(50):
            h = 0.2
            delta = float(rng.uniform(0.02, 0.18))
            m = int(rng.integers(1, 6))
            grid = DelayGrid(h, -(m * h + delta))
            buf = RingBuffer([4.2] * (m + 1))
            assert delayed_value(buf, grid) == pytest.approx(4.2, rel=1e-14)

    @pytest.mark.parametrize("frac", [0.1, 0.25, 0.5, 0.75, 0.9])
    def test_affine_contents_interpolate_exactly(self, frac):
        # Slots hold an affine function of time, spacing h, oldest first;
        # the read sits delta before the second slot.
        h, m = 0.2, 3
        delta = frac * h
        grid = DelayGrid(h, -(m * h + delta))
        c0, c1 = 0.7, -1.3
        buf = RingBuffer([c0 + c1 * (j * h) for j in range(m + 1)])
        expected = c0 + c1 * (h - delta)
        assert delayed_value(buf, grid) == pytest.approx(expected, rel=1e-13)

    def test_fractional_lag_needs_one_extra_slot(self):
        grid = DelayGrid(h=0.2, tau=-0.5)  # m = 2, delta > 0
        with pytest.raises(InsufficientHistoryError):
            delayed_value(RingBuffer([1.0, 2.0]), grid)


class TestHistorySegment:
    def test_newest_sample_is_the_inflow(self):
        seg = HistorySegment([1.0, 2.0, 3.0], h=0.5)
        assert seg.m == 2
        assert seg.inflow == 3.0

    def test_from_history_samples_the_sigma_grid(self):
        grid = DelayGrid(h=0.5, tau=-2.0)
        seg = HistorySegment.from_history(lambda t: 2.0 * t, grid)
        assert seg.values == pytest.approx([-4.0, -3.0, -2.0, -1.0, 0.0])
        assert seg.inflow == 0.0

    def test_from_history_rejects_fractional_lag(self):
        with pytest.raises(ParameterError):
            HistorySegment.from_history(lambda t: t, DelayGrid(0.2, -0.5))

    @pytest.mark.parametrize("values,h", [([1.0], 0.5), ([[1.0, 2.0]], 0.5),
                                          ([1.0, 2.0], 0.0)])
    def test_invalid_construction_rejected(self, values, h):
        with pytest.raises(ParameterError):
            HistorySegment(values, h)


class TestTransportResolvent:
    def test_homogeneous_case_is_the_exponential(self):
        # g = 0, f = 1: rho(sigma) = e^{sigma/h} on the grid.
        m, h = 5, 0.3
        rho = transport_resolvent_apply(1.0, np.zeros(m + 1), h)
        assert rho.values == pytest.approx(np.exp(np.arange(-m, 1)), rel=1e-14)

    @pytest.mark.parametrize("c,m", [(1.0, 1), (2.5, 4), (-0.7, 9)])
    def test_constant_history_closed_form(self, c, m):
        h = 0.25
        rho = transport_resolvent_apply(0.0, np.full(m + 1, c), h)
        sigma_over_h = np.arange(-m, 1, dtype=float)
        assert rho.values == pytest.approx(c * (1.0 - np.exp(sigma_over_h)),
                                           rel=1e-13, abs=1e-15)

    def test_trace_of_constant_history(self):
        rho = transport_resolvent_apply(0.0, np.full(4, 2.0), 0.5)
        assert trace_at_tau(rho) == pytest.approx(2.0 * (1.0 - math.exp(-3.0)),
                                                  rel=1e-13)

    def test_present_value_is_always_the_inflow(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            f = float(rng.standard_normal())
            g = rng.standard_normal(int(rng.integers(2, 30)))
            rho = transport_resolvent_apply(f, g, float(rng.uniform(0.05, 2.0)))
            assert rho.inflow == f

    def test_maximum_principle_on_random_inputs(self):
        rng = np.random.default_rng(8)
        for _ in range(300):
            f = float(3.0 * rng.standard_normal())
            g = 3.0 * rng.standard_normal(int(rng.integers(2, 40)))
            rho = transport_resolvent_apply(f, g, float(rng.uniform(0.01, 1.5)))
            bound = max(abs(f), float(np.abs(g).max()))
            assert np.abs(rho.values).max() <= bound + 1e-12

    def test_accepts_segment_input(self):
        seg = HistorySegment([1.0, 1.0, 1.0], h=0.5)
        rho = transport_resolvent_apply(0.0, seg, 0.5)
        assert rho.values[-1] == 0.0

    def test_nonpositive_step_rejected(self):
        with pytest.raises(ParameterError):
            transport_resolvent_apply(1.0, np.zeros(3), 0.0)


class TestTraceAtTau:
    def test_pure_inflow_trace_is_exponentially_small(self):
        m = 6
        rho = transport_resolvent_apply(1.0, np.zeros(m + 1), 0.1)
        assert trace_at_tau(rho) == pytest.approx(math.exp(-m), rel=1e-13)

    def test_constant_segment_traces_to_its_value(self):
        assert trace_at_tau(HistorySegment([3.3, 3.3, 3.3], 0.1)) == 3.3

    def test_unit_history_single_cell(self):
        # f = 0, g = 1, h = 1, tau = -1: rho(tau) = 1 - e^{-1}.
        rho = transport_resolvent_apply(0.0, np.ones(2), 1.0)
        assert trace_at_tau(rho) == pytest.approx(1.0 - math.exp(-1.0),
                                                  rel=1e-14)
        assert trace_at_tau(rho) == pytest.approx(0.632121, abs=5e-7)


class TestKernelIntegral:
    @pytest.mark.parametrize("m", [1, 3, 10])
    def test_constant_integrand_closed_form(self, m):
        # int_tau^0 e^{(tau-s)/h} c ds = c h (1 - e^{tau/h}).
        h, c = 0.4, 1.7
        val = delay_kernel_integral(np.full(m + 1, c), h)
        assert val == pytest.approx(c * h * (1.0 - math.exp(-m)), rel=1e-13)

    def test_single_cell_unit_value(self):
        assert delay_kernel_integral(np.ones(2), 1.0) == pytest.approx(
            1.0 - math.exp(-1.0), rel=1e-14)


class TestL2Trapezoid:
    def test_constant_segment(self):
        # |c| sqrt(|tau|) over m cells of width h.
        assert l2_norm_trapezoid(np.full(5, -2.0), 0.25) == pytest.approx(
            2.0 * math.sqrt(1.0), rel=1e-14)

    def test_linear_ramp_hand_value(self):
        assert l2_norm_trapezoid(np.array([0.0, 1.0]), 1.0) == pytest.approx(
            math.sqrt(0.5), rel=1e-14)


def test_trace_bound_on_random_triples():
    """|rho(tau)| <= |f| + (2h)^{-1/2} ||g||_L2 on random inputs."""
    rng = np.random.default_rng(1203)
    for _ in range(300):
        h = float(rng.uniform(0.005, 2.0))
        f = float(5.0 * rng.standard_normal())
        g = 5.0 * rng.standard_normal(int(rng.integers(2, 50)))
        rho = transport_resolvent_apply(f, g, h)
        bound = abs(f) + l2_norm_trapezoid(g, h) / math.sqrt(2.0 * h)
        assert abs(trace_at_tau(rho)) <= bound + 1e-12
