//! Delay-Doppler channel simulation, dechirping, and pulse-train models.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::doppler::DopplerLaw;
use crate::error::{DdtError, Result};
use crate::grid::{TimeGrid, LATTICE_REL_TOL};
use crate::signal::ComplexSignal;
use crate::transforms::ddt_general;
use crate::window::WindowSpec;

/// A discrete multipath tap: delayed, scaled copy with its own Doppler shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tap {
    pub delay: f64,
    pub gain_re: f64,
    pub gain_im: f64,
    pub doppler: f64,
}

impl Tap {
    pub fn gain(&self) -> Complex64 {
        Complex64::new(self.gain_re, self.gain_im)
    }
}

/// Channel description: either discrete taps or the continuous separable
/// response h(tau, t) = g(tau) e^{-j W(tau) t} integrated over a tau grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelSpec {
    Taps(Vec<Tap>),
    Continuous {
        window: WindowSpec,
        law: DopplerLaw,
        tau_grid: TimeGrid,
    },
}

/// Additive complex white Gaussian noise: std `sigma` per sample, split
/// equally across real and imaginary parts, derived counter-style from the
/// seed so realizations are independent of evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        NoiseSpec { sigma: 0.0, seed: 0 }
    }

    /// Noise value for sample index `m`, independent of any other index.
    pub fn sample(&self, m: u64) -> Complex64 {
        if self.sigma == 0.0 {
            return Complex64::ZERO;
        }
        let a = splitmix64(self.seed ^ m.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let b = splitmix64(a);
        // Box-Muller on two uniforms in (0, 1]
        let u1 = ((a >> 11) as f64 + 1.0) / (1u64 << 53) as f64;
        let u2 = (b >> 11) as f64 / (1u64 << 53) as f64;
        let r = self.sigma / 2f64.sqrt() * (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        Complex64::new(r * theta.cos(), r * theta.sin())
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A tap whose delay was off-lattice and got rounded to the nearest sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundedTap {
    pub tap_index: usize,
    pub requested_delay: f64,
    pub used_delay: f64,
}

/// Channel output plus diagnostics about any delay rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutput {
    pub signal: ComplexSignal,
    pub rounded_taps: Vec<RoundedTap>,
}

/// Pass a signal through a delay-Doppler channel and add seeded noise.
pub fn apply_channel(
    s: &ComplexSignal,
    ch: &ChannelSpec,
    noise: &NoiseSpec,
    out: &TimeGrid,
) -> Result<ChannelOutput> {
    if s.is_empty() {
        return Err(DdtError::invalid("signal must be nonempty"));
    }
    let (mut samples, rounded_taps) = match ch {
        ChannelSpec::Taps(taps) => {
            if taps.is_empty() {
                return Err(DdtError::invalid("tap channel must have at least one tap"));
            }
            let step = s.grid().step();
            let mut rounded = Vec::new();
            let aligned: Vec<(f64, Complex64, f64)> = taps
                .iter()
                .enumerate()
                .map(|(i, tap)| {
                    let steps = tap.delay / step;
                    let snapped = steps.round();
                    let used = if (steps - snapped).abs() > LATTICE_REL_TOL {
                        let used_delay = snapped * step;
                        rounded.push(RoundedTap {
                            tap_index: i,
                            requested_delay: tap.delay,
                            used_delay,
                        });
                        used_delay
                    } else {
                        tap.delay
                    };
                    (used, tap.gain(), tap.doppler)
                })
                .collect();
            let samples: Vec<Complex64> = (0..out.count())
                .into_par_iter()
                .map(|m| {
                    let t = out.point(m);
                    let mut acc = Complex64::ZERO;
                    for &(delay, gain, doppler) in &aligned {
                        let v = s.value_at_lattice(t - delay);
                        acc += gain * v * Complex64::from_polar(1.0, -doppler * t);
                    }
                    acc
                })
                .collect();
            (samples, rounded)
        }
        ChannelSpec::Continuous { window, law, tau_grid } => {
            if !out.is_commensurate(s.grid()) {
                return Err(DdtError::invalid(
                    "output grid must be commensurate with the signal grid",
                ));
            }
            let dtau = tau_grid.step();
            let taus: Vec<f64> = tau_grid.points().collect();
            let gains: Vec<Complex64> = taus.iter().map(|&tau| window.eval(tau)).collect();
            let omegas: Vec<f64> = taus.iter().map(|&tau| law.eval(tau)).collect();
            let samples: Vec<Complex64> = (0..out.count())
                .into_par_iter()
                .map(|m| {
                    let t = out.point(m);
                    let mut acc = Complex64::ZERO;
                    for n in 0..taus.len() {
                        let v = s.value_at_lattice(t - taus[n]);
                        if v != Complex64::ZERO {
                            acc += gains[n] * v * Complex64::from_polar(1.0, -omegas[n] * t);
                        }
                    }
                    acc * dtau
                })
                .collect();
            (samples, Vec::new())
        }
    };
    for (m, z) in samples.iter_mut().enumerate() {
        *z += noise.sample(m as u64);
    }
    Ok(ChannelOutput {
        signal: ComplexSignal::new(*out, samples)?,
        rounded_taps,
    })
}

/// Multiply by e^{+j omega t^2}: strips the quadratic phase a linear-rate
/// delay-Doppler channel imposes. Unitary per sample.
pub fn dechirp(y: &ComplexSignal, omega: f64) -> ComplexSignal {
    y.map_with_time(|t, z| z * Complex64::from_polar(1.0, omega * t * t))
}

/// Noise-free received-signal model: DDT_s(t, -omega) e^{-j omega t^2},
/// the transform route to the same waveform the channel produces.
pub fn ddt_receive_model(
    s: &ComplexSignal,
    g: &WindowSpec,
    omega: f64,
    out: &TimeGrid,
) -> Result<ComplexSignal> {
    if !out.is_commensurate(s.grid()) {
        return Err(DdtError::invalid("output grid must be commensurate with the signal grid"));
    }
    let d = ddt_general(s, g, &DopplerLaw::LinearRate { rate: -omega }, out)?;
    Ok(d.map_with_time(|t, z| z * Complex64::from_polar(1.0, -omega * t * t)))
}

/// Max absolute difference between the channel route and the transform route
/// to the received signal.
pub fn verify_channel_identity(
    s: &ComplexSignal,
    g: &WindowSpec,
    omega: f64,
    out: &TimeGrid,
) -> Result<f64> {
    let ch = ChannelSpec::Continuous {
        window: g.clone(),
        law: DopplerLaw::LinearRate { rate: omega },
        tau_grid: *s.grid(),
    };
    let via_channel = apply_channel(s, &ch, &NoiseSpec::none(), out)?.signal;
    let via_ddt = ddt_receive_model(s, g, omega, out)?;
    let mut max_err = 0.0f64;
    for (a, b) in via_channel.samples().iter().zip(via_ddt.samples()) {
        max_err = max_err.max((a - b).norm());
    }
    Ok(max_err)
}

/// A symbol train: sum_n s_n p(t - nT).
#[derive(Debug, Clone, PartialEq)]
pub struct PulseTrainSpec {
    pub symbols: Vec<Complex64>,
    pub pulse: ComplexSignal,
    pub symbol_duration: f64,
}

impl PulseTrainSpec {
    pub fn new(symbols: Vec<Complex64>, pulse: ComplexSignal, symbol_duration: f64) -> Result<Self> {
        if symbols.is_empty() {
            return Err(DdtError::invalid("symbol sequence must be nonempty"));
        }
        if !(symbol_duration > 0.0) {
            return Err(DdtError::invalid("symbol duration must be positive"));
        }
        let steps = symbol_duration / pulse.grid().step();
        if (steps - steps.round()).abs() > LATTICE_REL_TOL {
            return Err(DdtError::invalid(
                "symbol duration must be an integer multiple of the pulse step",
            ));
        }
        Ok(PulseTrainSpec { symbols, pulse, symbol_duration })
    }

    fn steps_per_symbol(&self) -> i64 {
        (self.symbol_duration / self.pulse.grid().step()).round() as i64
    }
}

fn check_train_grid(spec: &PulseTrainSpec, out: &TimeGrid) -> Result<()> {
    if !out.is_commensurate(spec.pulse.grid()) {
        return Err(DdtError::invalid("output grid must be commensurate with the pulse grid"));
    }
    Ok(())
}

/// Synthesize the train on an output grid; the pulse is zero outside its grid.
pub fn pulse_train(spec: &PulseTrainSpec, out: &TimeGrid) -> Result<ComplexSignal> {
    check_train_grid(spec, out)?;
    let big_t = spec.symbol_duration;
    let samples: Vec<Complex64> = (0..out.count())
        .map(|m| {
            let t = out.point(m);
            let mut acc = Complex64::ZERO;
            for (n, &sym) in spec.symbols.iter().enumerate() {
                acc += sym * spec.pulse.value_at_lattice(t - n as f64 * big_t);
            }
            acc
        })
        .collect();
    ComplexSignal::new(*out, samples)
}

/// The train's DDT assembled term by term from single-pulse transforms:
/// out[m] = sum_n s_n DDT_{p_n}(t_m - nT, omega) e^{-j n T t_m omega} with
/// p_n(tau) = p(tau) e^{-j n T omega tau}.
pub fn ddt_pulse_train_sum(
    spec: &PulseTrainSpec,
    g: &WindowSpec,
    omega: f64,
    out: &TimeGrid,
) -> Result<ComplexSignal> {
    decomposed_train_ddt(spec, g, omega, out, 1.0)
}

/// Shared core for the transmit-side decomposition and the receive model; the
/// receive model uses the negated rate with conjugated per-term phases.
fn decomposed_train_ddt(
    spec: &PulseTrainSpec,
    g: &WindowSpec,
    omega: f64,
    out: &TimeGrid,
    sign: f64,
) -> Result<ComplexSignal> {
    check_train_grid(spec, out)?;
    let big_t = spec.symbol_duration;
    let k_t = spec.steps_per_symbol();
    let law = DopplerLaw::LinearRate { rate: sign * omega };
    let mut acc = vec![Complex64::ZERO; out.count()];
    for (n, &sym) in spec.symbols.iter().enumerate() {
        // p_n(tau) = p(tau) e^{-j sign n T omega tau}
        let modulated = spec.pulse.map_with_time(|tau, z| {
            z * Complex64::from_polar(1.0, -sign * n as f64 * big_t * omega * tau)
        });
        // inner DDT evaluated at t - nT via a shifted output lattice
        let inner = ddt_general(&modulated, g, &law, &out.shifted_by(-(n as i64) * k_t))?;
        for (m, cell) in acc.iter_mut().enumerate() {
            let t = out.point(m);
            let phase = Complex64::from_polar(1.0, -sign * n as f64 * big_t * t * omega);
            *cell += sym * inner.samples()[m] * phase;
        }
    }
    ComplexSignal::new(*out, acc)
}

/// Receive-side pulse-train model: the decomposed transform evaluated at
/// -omega with conjugated per-term phases, plus dechirped noise. For
/// sigma = 0 this equals dechirp(apply_channel(pulse_train(spec), ...), omega).
pub fn received_pulse_train_model(
    spec: &PulseTrainSpec,
    g: &WindowSpec,
    omega: f64,
    noise: &NoiseSpec,
    out: &TimeGrid,
) -> Result<ComplexSignal> {
    let clean = decomposed_train_ddt(spec, g, omega, out, -1.0)?;
    let samples: Vec<Complex64> = clean
        .samples()
        .iter()
        .enumerate()
        .map(|(m, &z)| {
            let t = out.point(m);
            z + noise.sample(m as u64) * Complex64::from_polar(1.0, omega * t * t)
        })
        .collect();
    ComplexSignal::new(*out, samples)
}

/// Read a channel description from JSON: `{"taps": [...]}` or
/// `{"continuous": {"window": ..., "law": ..., "tau_grid": ...}}`.
pub fn read_channel_json(path: &Path) -> Result<ChannelSpec> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| DdtError::format(format!("channel file: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::signal::{synthesize, SignalExpr};
    use crate::transforms::convolve;

    fn section_iv_grid() -> TimeGrid {
        make_grid(-10.0, 20.0 / 512.0, 512).unwrap()
    }

    fn gaussian() -> WindowSpec {
        WindowSpec::gaussian(1.0).unwrap()
    }

    fn s1(grid: &TimeGrid) -> ComplexSignal {
        synthesize(&SignalExpr::LinearChirp { alpha: 1.0 }, grid).unwrap()
    }

    #[test]
    fn identity_tap_channel() {
        let grid = section_iv_grid();
        let s = s1(&grid);
        let ch = ChannelSpec::Taps(vec![Tap { delay: 0.0, gain_re: 1.0, gain_im: 0.0, doppler: 0.0 }]);
        let y = apply_channel(&s, &ch, &NoiseSpec::none(), &grid).unwrap();
        assert!(y.rounded_taps.is_empty());
        assert_eq!(y.signal.samples(), s.samples());
    }

    #[test]
    fn two_tap_manual_oracle() {
        let step = 0.5;
        let grid = make_grid(0.0, step, 16).unwrap();
        let s = s1(&grid);
        let ch = ChannelSpec::Taps(vec![
            Tap { delay: 0.0, gain_re: 1.0, gain_im: 0.0, doppler: 0.0 },
            Tap { delay: step, gain_re: 0.0, gain_im: 0.5, doppler: 2.0 },
        ]);
        let y = apply_channel(&s, &ch, &NoiseSpec::none(), &grid).unwrap();
        let t = 3.0 * step;
        let expected = s.samples()[3]
            + Complex64::new(0.0, 0.5) * s.samples()[2] * Complex64::from_polar(1.0, -2.0 * t);
        assert!((y.signal.samples()[3] - expected).norm() < 1e-15);
    }

    #[test]
    fn off_grid_delay_is_rounded_and_reported() {
        let grid = make_grid(0.0, 0.5, 8).unwrap();
        let s = s1(&grid);
        let ch = ChannelSpec::Taps(vec![Tap { delay: 0.6, gain_re: 1.0, gain_im: 0.0, doppler: 0.0 }]);
        let y = apply_channel(&s, &ch, &NoiseSpec::none(), &grid).unwrap();
        assert_eq!(y.rounded_taps.len(), 1);
        assert!((y.rounded_taps[0].used_delay - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_tap_list_is_invalid() {
        let grid = make_grid(0.0, 0.5, 8).unwrap();
        let s = s1(&grid);
        assert!(apply_channel(&s, &ChannelSpec::Taps(vec![]), &NoiseSpec::none(), &grid).is_err());
    }

    #[test]
    fn continuous_constant_law_factors_out() {
        let grid = section_iv_grid();
        let s = synthesize(&SignalExpr::GaussianPulse { a: 1.0 }, &grid).unwrap();
        let c = 1.7;
        let ch = ChannelSpec::Continuous {
            window: gaussian(),
            law: DopplerLaw::Constant { omega0: c },
            tau_grid: grid,
        };
        let y = apply_channel(&s, &ch, &NoiseSpec::none(), &grid).unwrap().signal;
        // magnitude must equal the plain convolution of g(tau) with s
        for (m, t) in grid.points().enumerate() {
            let unrotated = y.samples()[m] * Complex64::from_polar(1.0, c * t);
            assert!(unrotated.im.abs() < 1e-9, "residual phase at t={t}");
        }
    }

    #[test]
    fn noise_is_reproducible_and_order_independent() {
        let noise = NoiseSpec { sigma: 0.5, seed: 42 };
        let a: Vec<Complex64> = (0..64).map(|m| noise.sample(m)).collect();
        let b: Vec<Complex64> = (0..64).rev().map(|m| noise.sample(m)).collect();
        for m in 0..64 {
            assert_eq!(a[m], b[63 - m]);
        }
        let other = NoiseSpec { sigma: 0.5, seed: 43 };
        assert_ne!(a[0], other.sample(0));
    }

    #[test]
    fn noise_statistics_roughly_match_sigma() {
        let noise = NoiseSpec { sigma: 2.0, seed: 7 };
        let n = 200_000u64;
        let power: f64 = (0..n).map(|m| noise.sample(m).norm_sqr()).sum::<f64>() / n as f64;
        assert!((power - 4.0).abs() < 0.1, "mean power {power}");
    }

    #[test]
    fn dechirp_round_trip_and_unitarity() {
        let grid = section_iv_grid();
        let s = s1(&grid);
        let omega = 1.3;
        let d = dechirp(&s, omega);
        let back = dechirp(&d, -omega);
        for m in 0..s.len() {
            assert!((back.samples()[m] - s.samples()[m]).norm() < 1e-15);
            assert!((d.samples()[m].norm() - s.samples()[m].norm()).abs() < 1e-15);
        }
        assert_eq!(dechirp(&s, 0.0).samples(), s.samples());
    }

    #[test]
    fn receive_model_omega_zero_is_convolution() {
        let grid = section_iv_grid();
        let s = synthesize(&SignalExpr::GaussianPulse { a: 1.0 }, &grid).unwrap();
        let model = ddt_receive_model(&s, &gaussian(), 0.0, &grid).unwrap();
        let conv = convolve(&s, &gaussian(), &grid).unwrap();
        assert_eq!(model.samples(), conv.samples());
    }

    #[test]
    fn channel_identity_small_cases() {
        let grid = section_iv_grid();
        let impulse = synthesize(&SignalExpr::UnitImpulse { at: 0.0 }, &grid).unwrap();
        let peak = ddt_receive_model(&impulse, &gaussian(), 2.0, &grid).unwrap().peak_abs();
        let err = verify_channel_identity(&impulse, &gaussian(), 2.0, &grid).unwrap();
        assert!(err <= 1e-12 * peak, "impulse err {err}");

        let s = s1(&grid);
        let peak = ddt_receive_model(&s, &gaussian(), 0.0, &grid).unwrap().peak_abs();
        let err = verify_channel_identity(&s, &gaussian(), 0.0, &grid).unwrap();
        assert!(err <= 1e-12 * peak, "omega=0 err {err}");
    }

    #[test]
    fn channel_identity_chirp() {
        let grid = section_iv_grid();
        let s = s1(&grid);
        let peak = ddt_receive_model(&s, &gaussian(), 1.0, &grid).unwrap().peak_abs();
        let err = verify_channel_identity(&s, &gaussian(), 1.0, &grid).unwrap();
        assert!(err <= 1e-9 * peak, "err {err}, peak {peak}");
    }

    #[test]
    fn channel_linearity_in_signal() {
        let grid = make_grid(-4.0, 0.125, 65).unwrap();
        let a = s1(&grid);
        let b = synthesize(&SignalExpr::GaussianPulse { a: 1.0 }, &grid).unwrap();
        let (ca, cb) = (Complex64::new(1.5, -0.25), Complex64::new(-0.5, 2.0));
        let mixed = ComplexSignal::new(
            grid,
            a.samples()
                .iter()
                .zip(b.samples())
                .map(|(x, y)| ca * x + cb * y)
                .collect(),
        )
        .unwrap();
        let ch = ChannelSpec::Continuous {
            window: gaussian(),
            law: DopplerLaw::LinearRate { rate: 0.8 },
            tau_grid: grid,
        };
        let ya = apply_channel(&a, &ch, &NoiseSpec::none(), &grid).unwrap().signal;
        let yb = apply_channel(&b, &ch, &NoiseSpec::none(), &grid).unwrap().signal;
        let ym = apply_channel(&mixed, &ch, &NoiseSpec::none(), &grid).unwrap().signal;
        let peak = ym.peak_abs();
        for m in 0..grid.count() {
            let expect = ca * ya.samples()[m] + cb * yb.samples()[m];
            assert!((ym.samples()[m] - expect).norm() <= 1e-12 * peak);
        }
    }

    fn qpsk_train() -> (PulseTrainSpec, TimeGrid) {
        let pulse_grid = make_grid(-10.0, 20.0 / 512.0, 512).unwrap();
        let pulse = synthesize(&SignalExpr::GaussianPulse { a: 1.0 }, &pulse_grid).unwrap();
        let step = pulse_grid.step();
        let big_t = 64.0 * step;
        let symbols = vec![
            Complex64::new(1.0, 1.0),
            Complex64::new(-1.0, 1.0),
            Complex64::new(-1.0, -1.0),
            Complex64::new(1.0, -1.0),
        ];
        let spec = PulseTrainSpec::new(symbols, pulse, big_t).unwrap();
        let out = make_grid(-10.0, step, 512 + 3 * 64).unwrap();
        (spec, out)
    }

    #[test]
    fn single_symbol_train_is_the_pulse() {
        let pulse_grid = make_grid(-2.0, 0.25, 17).unwrap();
        let pulse = synthesize(&SignalExpr::GaussianPulse { a: 1.0 }, &pulse_grid).unwrap();
        let spec = PulseTrainSpec::new(vec![Complex64::new(1.0, 0.0)], pulse.clone(), 1.0).unwrap();
        let train = pulse_train(&spec, &pulse_grid).unwrap();
        assert_eq!(train.samples(), pulse.samples());
    }

    #[test]
    fn overlapping_pulses_hand_expanded() {
        let pulse_grid = make_grid(-2.0, 0.25, 17).unwrap();
        let pulse = synthesize(&SignalExpr::GaussianPulse { a: 1.0 }, &pulse_grid).unwrap();
        let big_t = 0.5;
        let j = Complex64::new(0.0, 1.0);
        let spec = PulseTrainSpec::new(vec![Complex64::new(1.0, 0.0), j], pulse.clone(), big_t).unwrap();
        let out = make_grid(-2.0, 0.25, 20).unwrap();
        let train = pulse_train(&spec, &out).unwrap();
        // overlap point t = 0: p(0) + j p(-0.5)
        let idx = out.lattice_index(0.0).unwrap();
        let expected = pulse.value_at_lattice(0.0) + j * pulse.value_at_lattice(-0.5);
        assert!((train.samples()[idx] - expected).norm() < 1e-15);
    }

    #[test]
    fn non_integer_symbol_duration_rejected() {
        let pulse_grid = make_grid(-2.0, 0.25, 17).unwrap();
        let pulse = synthesize(&SignalExpr::GaussianPulse { a: 1.0 }, &pulse_grid).unwrap();
        assert!(PulseTrainSpec::new(vec![Complex64::new(1.0, 0.0)], pulse, 0.3).is_err());
    }

    #[test]
    fn train_ddt_decomposition_matches_direct() {
        let (spec, out) = qpsk_train();
        let omega = 1.0;
        let direct = ddt_general(
            &pulse_train(&spec, &out).unwrap(),
            &gaussian(),
            &DopplerLaw::LinearRate { rate: omega },
            &out,
        )
        .unwrap();
        let decomposed = ddt_pulse_train_sum(&spec, &gaussian(), omega, &out).unwrap();
        let peak = direct.peak_abs();
        let mut max_err = 0.0f64;
        for m in 0..out.count() {
            max_err = max_err.max((direct.samples()[m] - decomposed.samples()[m]).norm());
        }
        assert!(max_err <= 1e-9 * peak, "err {max_err}, peak {peak}");
    }

    #[test]
    fn train_ddt_omega_zero_is_windowed_convolution() {
        let (spec, out) = qpsk_train();
        let train = pulse_train(&spec, &out).unwrap();
        let conv = convolve(&train, &gaussian(), &out).unwrap();
        let sum = ddt_pulse_train_sum(&spec, &gaussian(), 0.0, &out).unwrap();
        let peak = conv.peak_abs();
        for m in 0..out.count() {
            assert!((sum.samples()[m] - conv.samples()[m]).norm() <= 1e-9 * peak);
        }
    }

    #[test]
    fn receive_model_matches_dechirped_channel() {
        let (spec, out) = qpsk_train();
        let omega = 0.7;
        let train = pulse_train(&spec, &out).unwrap();
        let ch = ChannelSpec::Continuous {
            window: gaussian(),
            law: DopplerLaw::LinearRate { rate: omega },
            tau_grid: out,
        };
        let y = apply_channel(&train, &ch, &NoiseSpec::none(), &out).unwrap().signal;
        let reference = dechirp(&y, omega);
        let model = received_pulse_train_model(&spec, &gaussian(), omega, &NoiseSpec::none(), &out).unwrap();
        let peak = reference.peak_abs();
        let mut max_err = 0.0f64;
        for m in 0..out.count() {
            max_err = max_err.max((model.samples()[m] - reference.samples()[m]).norm());
        }
        assert!(max_err <= 1e-9 * peak, "err {max_err}, peak {peak}");
    }

    #[test]
    fn receive_model_noise_only_is_dechirped_awgn() {
        let pulse_grid = make_grid(-2.0, 0.25, 17).unwrap();
        let pulse = synthesize(&SignalExpr::GaussianPulse { a: 1.0 }, &pulse_grid).unwrap();
        let spec = PulseTrainSpec::new(vec![Complex64::ZERO, Complex64::ZERO], pulse, 1.0).unwrap();
        let out = make_grid(-2.0, 0.25, 24).unwrap();
        let noise = NoiseSpec { sigma: 1.0, seed: 99 };
        let omega = 2.0;
        let rx = received_pulse_train_model(&spec, &gaussian(), omega, &noise, &out).unwrap();
        for (m, t) in out.points().enumerate() {
            let w = noise.sample(m as u64);
            assert!((rx.samples()[m].norm() - w.norm()).abs() < 1e-15);
            let expected = w * Complex64::from_polar(1.0, omega * t * t);
            assert!((rx.samples()[m] - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn channel_json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ch.json");
        fs::write(
            &path,
            r#"{"taps": [{"delay": 0.5, "gain_re": 1.0, "gain_im": -0.25, "doppler": 2.0}]}"#,
        )
        .unwrap();
        let ch = read_channel_json(&path).unwrap();
        match &ch {
            ChannelSpec::Taps(taps) => {
                assert_eq!(taps.len(), 1);
                assert_eq!(taps[0].gain(), Complex64::new(1.0, -0.25));
            }
            _ => panic!("expected taps"),
        }

        let cont = ChannelSpec::Continuous {
            window: WindowSpec::gaussian(1.0).unwrap(),
            law: DopplerLaw::LinearRate { rate: 1.0 },
            tau_grid: make_grid(-1.0, 0.5, 5).unwrap(),
        };
        let text = serde_json::to_string(&cont).unwrap();
        fs::write(&path, &text).unwrap();
        assert_eq!(read_channel_json(&path).unwrap(), cont);
    }
}
