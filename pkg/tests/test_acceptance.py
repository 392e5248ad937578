"""Acceptance criteria, one test per criterion, each self-contained and timed.

Run with ``pytest -s tests/test_acceptance.py`` to see the PASS lines as the
criteria execute; any tolerance or runtime violation fails the corresponding
test.
"""
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

CRITERIA_RUNTIME_LIMITS = {1: 1.0, 2: 1.0, 3: 10.0, 4: 60.0, 5: 5.0, 6: 60.0}


class _Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        return False


def _report(number: int, label: str, elapsed: float | None = None) -> None:
    timing = f" [{elapsed:.2f} s]" if elapsed is not None else ""
    print(f"PASS: criterion {number} ({label}){timing}", flush=True)
    if elapsed is not None and number in CRITERIA_RUNTIME_LIMITS:
        assert elapsed < CRITERIA_RUNTIME_LIMITS[number], (
            f"criterion {number} exceeded its runtime limit")


def test_criterion_1_poling_period_reproduction():
    from qpmspdc.dispersion import KtpIndexModel
    from qpmspdc.phasematch import design_poling_period

    with _Timer() as timer:
        period = design_poling_period(
            413e-9, 826e-9, 826e-9, pump_axis="y", signal_axis="y",
            idler_axis="z", temperature_c=40.0, qpm_order=1,
            model=KtpIndexModel())
    assert abs(period - 11.4617e-6) / 11.4617e-6 < 0.05
    _report(1, f"poling period {period * 1e6:.4f} um within 5% of 11.4617 um",
            timer.elapsed)


def test_criterion_2_near_collinear_efficiency():
    from qpmspdc.core import CrystalSpec, FrequencyPair, angular_frequency
    from qpmspdc.dispersion import KtpIndexModel
    from qpmspdc.phasematch import (design_poling_period,
                                    efficiency_drop_over_scan,
                                    maker_efficiency)

    with _Timer() as timer:
        model = KtpIndexModel()
        period = design_poling_period(
            413e-9, 826e-9, 826e-9, pump_axis="y", signal_axis="y",
            idler_axis="z", temperature_c=40.0, qpm_order=1, model=model)
        crystal = CrystalSpec(length=9.6e-3, poling_period=period,
                              duty_cycle=0.5, qpm_order=1, temperature_c=40.0,
                              pump_axis="y", signal_axis="y", idler_axis="z",
                              type_ii=True)
        freqs = FrequencyPair.degenerate(angular_frequency(413e-9))
        drop = efficiency_drop_over_scan(3e-3, 1.0, freqs, crystal, model,
                                         convention="external")
        half_degree = math.radians(0.5)
        eff_external = maker_efficiency(half_degree, freqs, crystal, model,
                                        convention="external")
        eff_internal = maker_efficiency(half_degree, freqs, crystal, model,
                                        convention="internal")
    assert drop < 0.01
    assert eff_external < 0.5
    assert eff_internal < 0.5
    _report(2, f"drop over 3 mm at 1 m = {drop:.2%} < 1%; eff(0.5 deg) = "
               f"{eff_external:.3f} (external) / {eff_internal:.3f} (internal), both < 50%",
            timer.elapsed)


def test_criterion_3_pump_transfer_law():
    from qpmspdc.biphoton import normalized_cross_correlation
    from qpmspdc.config import load_scenario
    from qpmspdc.scenarios import pump_profile, run_coincidence

    with _Timer() as timer:
        correlations = {}
        for preset in ("paper-config-1", "paper-config-2"):
            config = load_scenario(preset)
            scan = run_coincidence(config, method="analytic").analytic
            profile = pump_profile(config)
            intensity = np.interp(scan.positions, profile.x, profile.intensity)
            correlations[preset] = normalized_cross_correlation(
                scan.rates, intensity / intensity.max())
    for preset, value in correlations.items():
        assert value >= 0.99, f"{preset}: correlation {value:.4f} < 0.99"
    summary = ", ".join(f"{k}: {v:.4f}" for k, v in correlations.items())
    _report(3, f"scan vs pump intensity correlation >= 0.99 ({summary})",
            timer.elapsed)


def test_criterion_4_oracle_equivalence():
    from qpmspdc.config import load_scenario
    from qpmspdc.scenarios import estimate_fringe_period, run_coincidence

    with _Timer() as timer:
        correlations = {}
        period = None
        for preset in ("paper-config-1", "paper-config-2"):
            output = run_coincidence(load_scenario(preset), method="both")
            correlations[preset] = output.correlation
            if preset == "paper-config-2":
                period = estimate_fringe_period(output.oracle.positions,
                                                output.oracle.rates)
    for preset, value in correlations.items():
        assert value >= 0.98, f"{preset}: correlation {value:.4f} < 0.98"
    expected = 1.0532e-3
    assert abs(period - expected) / expected < 0.03
    summary = ", ".join(f"{k}: {v:.4f}" for k, v in correlations.items())
    _report(4, f"analytic vs oracle >= 0.98 ({summary}); fringe period "
               f"{period * 1e3:.4f} mm within 3% of 1.053 mm", timer.elapsed)


def test_criterion_5_propagator_correctness():
    from qpmspdc.fields import ThinLens, apply_element, gaussian_source, propagate

    wavelength = 413e-9
    waist = 0.5e-3
    rayleigh = math.pi * waist**2 / wavelength

    def width(field):
        intensity = field.intensity
        return 2.0 * math.sqrt(float(np.sum(intensity * field.x**2)
                                     / np.sum(intensity)))

    with _Timer() as timer:
        source = gaussian_source(waist, wavelength, grid_extent=0.02,
                                 sample_count=4096)
        for factor in (0.5, 1.0, 2.0):
            z = factor * rayleigh
            measured = width(propagate(source, z))
            expected = waist * math.sqrt(1.0 + (z / rayleigh) ** 2)
            assert abs(measured - expected) / expected < 1e-4
        focal = 0.5
        focused = propagate(apply_element(source, ThinLens(focal)), focal)
        q = 1j * rayleigh
        q = q / (1.0 - q / focal) + focal
        inv = 1.0 / q
        abcd_width = math.sqrt(-wavelength / (math.pi * inv.imag))
        assert abs(width(focused) - abcd_width) / abcd_width < 1e-3
    _report(5, "Gaussian w(z) law to 1e-4 at z_R/2, z_R, 2 z_R; lens+flight "
               "width matches ABCD oracle to 1e-3", timer.elapsed)


def test_criterion_6_amplitude_invariants():
    from qpmspdc.biphoton import (build_joint_amplitude,
                                  coincidence_scan_oracle,
                                  sample_pump_spectrum)
    from qpmspdc.config import load_scenario
    from qpmspdc.core import (CrystalSpec, FrequencyPair, PumpSpec,
                              angular_frequency)
    from qpmspdc.dispersion import ConstantIndexModel
    from qpmspdc.fields import (MultiSlitAperture, apply_element,
                                gaussian_source, to_angular_spectrum)
    from qpmspdc.scenarios import joint_amplitude, pump_spectrum

    with _Timer() as timer:
        pump = PumpSpec(center_wavelength=413e-9, waist_radius=0.5e-3,
                        pulse_duration=200e-15)
        freqs = FrequencyPair.degenerate(angular_frequency(413e-9))
        model = ConstantIndexModel(1.7)
        thin = CrystalSpec(length=1e-6, poling_period=math.inf, duty_cycle=0.5,
                           qpm_order=1, temperature_c=25.0, pump_axis="y",
                           signal_axis="y", idler_axis="y")
        field = gaussian_source(0.5e-3, 413e-9, grid_extent=0.02,
                                sample_count=4096)
        spectrum = to_angular_spectrum(field)

        # Parseval conservation.
        assert abs(spectrum.power - field.power) / field.power < 1e-10

        # Thin-crystal factorization to 1e-6.
        amplitude = build_joint_amplitude(spectrum, pump, thin, freqs, model,
                                          q_extent=2e5, samples=256)
        pump_part = sample_pump_spectrum(
            spectrum, amplitude.q_signal[:, None] + amplitude.q_idler[None, :])
        expected = np.abs(pump_part) / np.max(np.abs(pump_part))
        assert np.max(np.abs(np.abs(amplitude.values) - expected)) < 1e-6

        # Pump-swap factorization to 1e-10.
        slit_field = apply_element(field, MultiSlitAperture(
            slit_width=1e-4, center_separation=2e-4, slit_count=2))
        spectrum_b = to_angular_spectrum(slit_field)
        thick = CrystalSpec(length=9.6e-3, poling_period=math.inf,
                            duty_cycle=0.5, qpm_order=1, temperature_c=25.0)
        amp_a = build_joint_amplitude(spectrum, pump, thick, freqs, model,
                                      q_extent=2e5, samples=192)
        amp_b = build_joint_amplitude(spectrum_b, pump, thick, freqs, model,
                                      q_extent=2e5, samples=192)
        q_sum = amp_a.q_signal[:, None] + amp_a.q_idler[None, :]
        cross_ab = amp_a.values * sample_pump_spectrum(spectrum_b, q_sum)
        cross_ba = amp_b.values * sample_pump_spectrum(spectrum, q_sum)
        peak_ab = np.max(np.abs(cross_ab))
        peak_ba = np.max(np.abs(cross_ba))
        mask = np.abs(cross_ab) > 1e-8 * peak_ab
        assert np.max(np.abs(cross_ab[mask] / peak_ab
                             - cross_ba[mask] / peak_ba)) < 1e-10

        # Phase-factor irrelevance: bitwise-equal normalized scans.
        preset = load_scenario("paper-config-1")
        preset_spectrum = pump_spectrum(preset)
        with_phase = joint_amplitude(preset, include_phase=True,
                                     spectrum=preset_spectrum)
        without = joint_amplitude(preset, include_phase=False,
                                  spectrum=preset_spectrum)
        for mode in ("both-together", "signal-only", "idler-only"):
            scan_a = coincidence_scan_oracle(with_phase, preset.detection, mode)
            scan_b = coincidence_scan_oracle(without, preset.detection, mode)
            assert np.array_equal(scan_a.rates, scan_b.rates)
    _report(6, "thin-crystal 1e-6, pump-swap 1e-10, phase bitwise, Parseval "
               "1e-10", timer.elapsed)


@pytest.mark.parametrize("preset", ["paper-config-1", "paper-config-2"])
def test_criterion_7_determinism(tmp_path, preset):
    commands = {
        "pump": ["pump-propagate"],
        "scan": ["coincidence-scan", "--mode", "both"],
        "maker": ["maker-fringes", "--alpha-step-deg", "0.02"],
        "design": ["design-poling"],
    }
    outputs: dict[str, list[bytes]] = {name: [] for name in commands}
    for threads in ("1", "4"):
        env = dict(os.environ, OMP_NUM_THREADS=threads,
                   OPENBLAS_NUM_THREADS=threads)
        for name, args in commands.items():
            out = tmp_path / f"{preset}-{name}-{threads}.csv"
            result = subprocess.run(
                [sys.executable, "-m", "qpmspdc.cli", args[0], "--config",
                 preset, "--out", str(out), *args[1:]],
                capture_output=True, text=True, env=env)
            assert result.returncode == 0, result.stderr
            outputs[name].append(out.read_bytes())
    for name, blobs in outputs.items():
        assert blobs[0] == blobs[1], f"{preset} {name}: output differs across thread counts"
    _report(7, f"{preset}: byte-identical CSVs across thread counts")
