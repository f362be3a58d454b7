"""Plant dynamics tests: DC behavior, frequency response against the
closed form, invariants, and config I/O."""

import io
import math

import numpy as np
import pytest

from maglaser.control import CurrentCommand, I_MAX_A
from maglaser.errors import (
    ConfigError,
    SaturationError,
    WorkspaceExceededError,
)
from maglaser.plant import (
    PlantParams,
    PlantSim,
    PlantState,
    dc_response,
    load_params,
    project_to_target,
    save_params,
    step,
    with_calibration,
)

GAIN = 2.0 / I_MAX_A


def drive_sinusoid(params: PlantParams, f_hz: float, amps: float,
                   settle_s: float = 0.8, measure_periods: int = None):
    """Return the demodulated steady-state amplitude of axis x."""
    sim = PlantSim(params)
    dt = params.dt_s
    if measure_periods is None:
        measure_periods = max(2, int(math.ceil(0.5 * f_hz)))
    n_settle = int(round(settle_s / dt))
    n_measure = int(round(measure_periods / f_hz / dt))
    acc_s = acc_c = 0.0
    w = 2 * math.pi * f_hz
    for k in range(n_settle + n_measure):
        t = k * dt
        sim.tick(amps * math.sin(w * t), 0.0)
        if k >= n_settle:
            acc_s += sim.dx * math.sin(w * t)
            acc_c += sim.dx * math.cos(w * t)
    return 2.0 * math.hypot(acc_s, acc_c) / n_measure


class TestDcResponse:
    def test_full_scale(self):
        assert dc_response(0.165, PlantParams()) == pytest.approx(2.0, rel=1e-12)

    def test_zero(self):
        assert dc_response(0.0, PlantParams()) == 0.0

    def test_half_scale_negative(self):
        assert dc_response(-0.0825, PlantParams()) == pytest.approx(-1.0,
                                                                    rel=1e-12)

    def test_overcurrent_carries_clamp(self):
        with pytest.raises(SaturationError) as exc:
            dc_response(0.3, PlantParams())
        assert exc.value.clamped == pytest.approx(2.0, rel=1e-12)
        with pytest.raises(SaturationError) as exc:
            dc_response(-0.2, PlantParams())
        assert exc.value.clamped == pytest.approx(-2.0, rel=1e-12)


class TestStep:
    def test_rest_stays_at_rest(self):
        params = PlantParams()
        state = PlantState.rest()
        for _ in range(100):
            state = step(params, state, CurrentCommand(0, 0))
        assert np.all(state.d == 0.0) and np.all(state.v == 0.0)

    def test_steady_state_full_current(self):
        # approach quasi-statically: a raw step would overshoot the clamp
        params = PlantParams()
        sim = PlantSim(params)
        n_ramp = 800
        for k in range(n_ramp):
            sim.tick(0.165 * (k + 1) / n_ramp, 0.0)
        for _ in range(4000):
            sim.tick(0.165, 0.0)
        assert sim.dx == pytest.approx(2.0, abs=1e-6)

    def test_resonant_magnification(self):
        params = PlantParams()   # zeta = 0.05
        amps = 0.1 * I_MAX_A
        measured = drive_sinusoid(params, params.natural_frequency_hz, amps,
                                  settle_s=50 / params.natural_frequency_hz,
                                  measure_periods=30)
        dc = GAIN * amps
        assert measured / dc == pytest.approx(1.0 / (2 * 0.05), rel=0.02)

    @pytest.mark.parametrize("f_hz", [1.0, 5.0, 10.0, 20.0, 48.0, 63.0, 100.0])
    def test_frequency_response_matches_closed_form(self, f_hz):
        params = PlantParams()
        amps = 0.08 * I_MAX_A
        measured = drive_sinusoid(params, f_hz, amps)
        expected = GAIN * amps * params.magnitude_response(f_hz)
        assert measured == pytest.approx(expected, rel=0.02)

    def test_axis_decoupling_exact(self):
        params = PlantParams()
        state = PlantState(d=np.array([0.5, 0.0]), v=np.array([3.0, 0.0]))
        for _ in range(500):
            state = step(params, state, CurrentCommand(700, 0))
            assert state.d[1] == 0.0 and state.v[1] == 0.0

    def test_linearity_in_current(self):
        params = PlantParams()
        alpha = 3.0
        a, b = PlantSim(params), PlantSim(params)
        rng = np.random.default_rng(5)
        drive = rng.uniform(-0.02, 0.02, size=2000)
        for i in drive:
            a.tick(i, 0.0)
            b.tick(alpha * i, 0.0)
            if a.dx != 0.0:
                assert abs(b.dx - alpha * a.dx) <= 1e-9 * abs(alpha * a.dx)

    def test_energy_decay_with_zero_current(self):
        params = PlantParams()
        sim = PlantSim(params)
        sim.dx, sim.dy, sim.vx, sim.vy = 1.0, -0.5, 0.0, 200.0
        w2 = params.omega_n ** 2
        prev = w2 * (sim.dx ** 2 + sim.dy ** 2) + sim.vx ** 2 + sim.vy ** 2
        for _ in range(8000):
            sim.tick(0.0, 0.0)
            e = w2 * (sim.dx ** 2 + sim.dy ** 2) + sim.vx ** 2 + sim.vy ** 2
            assert e <= prev * (1 + 1e-12)
            prev = e

    def test_determinism_bit_identical(self):
        params = with_calibration(PlantParams(), current_noise_a=2e-3)
        runs = []
        for _ in range(2):
            sim = PlantSim(params, np.random.default_rng(99))
            trace = []
            for k in range(2000):
                sim.tick(0.01 * math.sin(0.01 * k), 0.0)
                trace.append((sim.dx, sim.dy, sim.vx, sim.vy))
            runs.append(trace)
        assert runs[0] == runs[1]

    def test_soft_clamp_raises(self):
        params = PlantParams()
        sim = PlantSim(params)
        with pytest.raises(WorkspaceExceededError):
            for _ in range(4000):
                sim.tick(0.165, 0.165)   # raw full-scale step overshoots

    def test_bad_dt_rejected(self):
        params = PlantParams()
        with pytest.raises(ConfigError):
            step(params, PlantState.rest(), CurrentCommand(0, 0), dt=2e-3)

    def test_cross_coupling_inert_at_rest_and_dc(self):
        params = with_calibration(PlantParams(), cross_coupling_mm2=1.0)
        sim = PlantSim(params)
        n = 800
        for k in range(n):
            sim.tick(0.1 * (k + 1) / n, 0.0)
        for _ in range(6000):
            sim.tick(0.1, 0.0)
        # steady state: velocity is zero, so the coupling vanishes
        assert abs(sim.dy) < 1e-9
        assert sim.dx == pytest.approx(GAIN * 0.1, abs=1e-6)


class TestProjection:
    def test_identity_scaling(self):
        state = PlantState(d=np.array([2.0, 0.0]))
        spot = project_to_target(state, PlantParams())
        assert (spot.x_mm, spot.y_mm) == (2.0, 0.0)
        assert spot.diameter_mm == 0.57

    def test_reference_point(self):
        spot = project_to_target(PlantState.rest(), PlantParams())
        assert (spot.x_mm, spot.y_mm) == (0.0, 0.0)

    def test_optics_scale(self):
        params = with_calibration(PlantParams(), optics_scale=1.2)
        state = PlantState(d=np.array([1.0, 1.0]))
        spot = project_to_target(state, params)
        assert spot.x_mm == pytest.approx(1.2, rel=1e-12)
        assert spot.y_mm == pytest.approx(1.2, rel=1e-12)

    def test_beyond_clamp_rejected(self):
        state = PlantState(d=np.array([2.3, 0.0]))
        with pytest.raises(WorkspaceExceededError):
            project_to_target(state, PlantParams())


class TestGainAsymmetry:
    def test_per_sign_gains(self):
        params = with_calibration(PlantParams(), gain_asym_x_pos=1.05,
                                  gain_asym_x_neg=0.97)
        pos = PlantSim(params)
        neg = PlantSim(params)
        n = 800
        for k in range(n):
            pos.tick(0.1 * (k + 1) / n, 0.0)
            neg.tick(-0.1 * (k + 1) / n, 0.0)
        for _ in range(6000):
            pos.tick(0.1, 0.0)
            neg.tick(-0.1, 0.0)
        assert pos.dx == pytest.approx(GAIN * 0.1 * 1.05, abs=1e-5)
        assert neg.dx == pytest.approx(-GAIN * 0.1 * 0.97, abs=1e-5)


class TestConfigIO:
    def test_round_trip(self, tmp_path):
        params = with_calibration(PlantParams(), damping_ratio=0.1522,
                                  cross_coupling_mm2=1.077,
                                  current_noise_a=0.004)
        path = tmp_path / "plant.cfg"
        save_params(params, str(path), header="calibrated twin")
        loaded = load_params(str(path))
        assert loaded == params
        assert loaded.config_hash() == params.config_hash()

    def test_comments_and_whitespace(self):
        text = "# comment\n gain_mm_per_a = 10.0  # inline\n\n" \
               "damping_ratio=0.2\n"
        params = load_params(io.StringIO(text))
        assert params.gain_mm_per_a == 10.0
        assert params.damping_ratio == 0.2

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            load_params(io.StringIO("nope=1.0\n"))

    def test_bad_value_rejected(self):
        with pytest.raises(ConfigError):
            load_params(io.StringIO("gain_mm_per_a=abc\n"))

    def test_invalid_params_rejected(self):
        with pytest.raises(ConfigError):
            PlantParams(damping_ratio=1.5)
        with pytest.raises(ConfigError):
            PlantParams(gain_mm_per_a=-1.0)
