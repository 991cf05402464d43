// SPDX-License-Identifier: MIT OR Apache-2.0

//! Direct real-input DFT and its continuous inverse.
//!
//! Coefficients are normalized so that, in normalized time `t = n / N`,
//!
//! ```text
//! x(t) = Σ_{k=0}^{⌊N/2⌋} R_k cos(2πk t) - I_k sin(2πk t)
//! ```
//!
//! passes exactly through the samples. That places the `1/N` factor and the
//! doubling of the paired bins inside `R_k` and `I_k`; the DC bin and, for
//! even `N`, the Nyquist bin are not doubled. The transform is the plain
//! `O(N²)` sum, so any `N ≥ 2` works.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{initial_frequency, initial_phase, Activation, NdModel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    n: usize,
    real: Vec<f64>,
    imag: Vec<f64>,
}

/// Number of retained bins for a length-`n` real signal.
pub fn bin_count(n: usize) -> usize {
    n / 2 + 1
}

impl Spectrum {
    pub fn new(n: usize, real: Vec<f64>, imag: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Size(format!("spectrum needs N >= 2, got {n}")));
        }
        let bins = bin_count(n);
        if real.len() != bins || imag.len() != bins {
            return Err(Error::Size(format!(
                "N = {n} needs {bins} bins, got {} real and {} imaginary",
                real.len(),
                imag.len()
            )));
        }
        if real.iter().chain(&imag).any(|x| !x.is_finite()) {
            return Err(Error::Size("spectrum entries must be finite".into()));
        }
        Ok(Self { n, real, imag })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn real(&self) -> &[f64] {
        &self.real
    }

    pub fn imag(&self) -> &[f64] {
        &self.imag
    }

    /// `sqrt(R_k² + I_k²)` per bin.
    pub fn amplitudes(&self) -> Vec<f64> {
        self.real
            .iter()
            .zip(&self.imag)
            .map(|(r, i)| r.hypot(*i))
            .collect()
    }

    /// Continuous reconstruction at normalized time `t`; period 1.
    pub fn eval(&self, t: f64) -> f64 {
        self.real
            .iter()
            .zip(&self.imag)
            .enumerate()
            .map(|(k, (r, i))| {
                let (s, c) = (TAU * k as f64 * t).sin_cos();
                r * c - i * s
            })
            .sum()
    }

    /// `k,frequency,amplitude` rows, frequency in radians per unit of
    /// normalized time (the same units as a sinusoid unit's input weight).
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("k,frequency,amplitude\n");
        for (k, a) in self.amplitudes().into_iter().enumerate() {
            let _ = writeln!(out, "{k},{},{a}", TAU * k as f64);
        }
        out
    }
}

pub fn dft_real(values: &[f64]) -> Result<Spectrum> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Size(format!(
            "DFT needs at least 2 samples, got {n}"
        )));
    }
    let bins = bin_count(n);
    let mut real = Vec::with_capacity(bins);
    let mut imag = Vec::with_capacity(bins);
    for k in 0..bins {
        let (mut re, mut im) = (0.0, 0.0);
        for (j, &x) in values.iter().enumerate() {
            // Reduce k*j modulo n so the angle stays in [0, 2π).
            let angle = TAU * ((k * j) % n) as f64 / n as f64;
            let (s, c) = angle.sin_cos();
            re += x * c;
            im -= x * s;
        }
        let self_conjugate = k == 0 || 2 * k == n;
        if self_conjugate {
            // Real input makes these bins exactly real.
            im = 0.0;
        }
        let scale = if self_conjugate { 1.0 } else { 2.0 } / n as f64;
        real.push(re * scale);
        imag.push(im * scale);
    }
    Ok(Spectrum { n, real, imag })
}

pub fn idft_eval(spectrum: &Spectrum, t: f64) -> f64 {
    spectrum.eval(t)
}

/// Turns `model` into an exact copy of the spectrum's continuous inverse.
///
/// Sinusoid units get the initial frequency/phase layout and amplitudes
/// from the spectrum (`R_j` on the cosine unit `2j`, `I_j` on the `-sin`
/// unit `2j+1`); the DC term moves to the output bias and augmentation
/// weights are zeroed. Unit 1 starts as `sin(0·t + π) = 0`, so it carries
/// the one top-bin term that `N` units cannot otherwise reach: the Nyquist
/// cosine for even `N`, the last sine for odd `N`.
pub fn idft_configure(model: &mut NdModel, spectrum: &Spectrum) -> Result<()> {
    let n = spectrum.n();
    if model.n_sinusoids() != n {
        return Err(Error::Config(format!(
            "model has {} sinusoid units but the spectrum has N = {n}",
            model.n_sinusoids()
        )));
    }
    let (hidden, weights, bias) = model.layers_mut();
    for (k, unit) in hidden.iter_mut().enumerate().take(n) {
        debug_assert_eq!(unit.kind, Activation::Sinusoid);
        unit.input_weight = initial_frequency(k);
        unit.bias = initial_phase(k);
    }
    weights.iter_mut().for_each(|w| *w = 0.0);
    *bias = spectrum.real[0];

    for j in 1..bin_count(n) {
        if 2 * j < n {
            weights[2 * j] = spectrum.real[j];
        }
        if 2 * j + 1 < n {
            weights[2 * j + 1] = spectrum.imag[j];
        }
    }
    let top = n / 2;
    hidden[1].input_weight = TAU * top as f64;
    if n.is_multiple_of(2) {
        hidden[1].bias = FRAC_PI_2;
        weights[1] = spectrum.real[top];
    } else {
        hidden[1].bias = PI;
        weights[1] = spectrum.imag[top];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AugmentationSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Textbook complex DFT, then the complex inverse over the symmetric bin
    /// range `-(N-1)/2..=N/2` evaluated at a continuous position (real part).
    fn complex_oracle(x: &[f64], t: f64) -> f64 {
        let n = x.len() as i64;
        let mut total = 0.0;
        let lo = -(n - 1) / 2;
        let hi = n / 2;
        for k in lo..=hi {
            let (mut re, mut im) = (0.0, 0.0);
            for (j, &v) in x.iter().enumerate() {
                let a = -TAU * (k * j as i64) as f64 / n as f64;
                re += v * a.cos();
                im += v * a.sin();
            }
            let a = TAU * k as f64 * t;
            total += re * a.cos() - im * a.sin();
        }
        total / n as f64
    }

    fn random_series(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect()
    }

    #[test]
    fn constant_series_is_dc_only() {
        let s = dft_real(&[3.0; 9]).unwrap();
        assert!((s.real()[0] - 3.0).abs() < 1e-14);
        assert!(s.real()[1..].iter().all(|r| r.abs() < 1e-14));
        assert!(s.imag().iter().all(|i| i.abs() < 1e-14));
    }

    #[test]
    fn single_cosine_lands_in_bin_one() {
        let n = 12;
        let x: Vec<f64> = (0..n).map(|j| (TAU * j as f64 / n as f64).cos()).collect();
        let s = dft_real(&x).unwrap();
        assert!((s.real()[1] - 1.0).abs() < 1e-14);
        for k in 0..s.real().len() {
            if k != 1 {
                assert!(s.real()[k].abs() < 1e-14, "bin {k}");
            }
            assert!(s.imag()[k].abs() < 1e-14, "bin {k}");
        }
    }

    #[test]
    fn reconstruction_at_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for n in 2..=64 {
            let x = random_series(&mut rng, n);
            let s = dft_real(&x).unwrap();
            for (j, &v) in x.iter().enumerate() {
                let r = s.eval(j as f64 / n as f64);
                assert!((r - v).abs() < 1e-10, "n={n} j={j}: {r} vs {v}");
            }
        }
    }

    #[test]
    fn matches_complex_oracle_at_odd_n_off_grid() {
        // For odd N the symmetric complex inverse is the same trigonometric
        // polynomial, so the two agree between samples as well.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [3, 5, 11, 17] {
            let x = random_series(&mut rng, n);
            let s = dft_real(&x).unwrap();
            for _ in 0..50 {
                let t: f64 = rng.gen_range(-2.0..3.0);
                assert!((s.eval(t) - complex_oracle(&x, t)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn periodic_with_period_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in [2, 7, 16] {
            let bins = bin_count(n);
            let s = Spectrum::new(
                n,
                (0..bins).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                (0..bins).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            )
            .unwrap();
            for _ in 0..100 {
                let t: f64 = rng.gen_range(-5.0..5.0);
                assert!((s.eval(t + 1.0) - s.eval(t)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn size_errors() {
        assert!(matches!(dft_real(&[1.0]), Err(Error::Size(_))));
        assert!(Spectrum::new(4, vec![0.0; 3], vec![0.0; 2]).is_err());
        assert!(Spectrum::new(1, vec![0.0], vec![0.0]).is_err());
    }

    #[test]
    fn configured_model_matches_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in [2, 3, 4, 5, 8, 13] {
            let x = random_series(&mut rng, n);
            let s = dft_real(&x).unwrap();
            let mut m = NdModel::init(n, AugmentationSpec::new(1, 1, 1), 0).unwrap();
            idft_configure(&mut m, &s).unwrap();
            for _ in 0..200 {
                let t: f64 = rng.gen_range(-2.0..3.0);
                assert!((m.forward(t) - s.eval(t)).abs() < 1e-9, "n={n}");
            }
        }
    }

    #[test]
    fn ramp_of_eight_is_reproduced() {
        let x: Vec<f64> = (0..8).map(f64::from).collect();
        let s = dft_real(&x).unwrap();
        let mut m = NdModel::init(8, AugmentationSpec::default(), 4).unwrap();
        idft_configure(&mut m, &s).unwrap();
        for (j, &v) in x.iter().enumerate() {
            assert!((m.forward(j as f64 / 8.0) - v).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_spectrum_gives_zero_model() {
        let s = Spectrum::new(6, vec![0.0; 4], vec![0.0; 4]).unwrap();
        let mut m = NdModel::init(6, AugmentationSpec::default(), 4).unwrap();
        idft_configure(&mut m, &s).unwrap();
        for t in [0.0, 0.3, 1.9] {
            assert_eq!(m.forward(t), 0.0);
        }
    }

    #[test]
    fn configure_rejects_unit_mismatch() {
        let s = dft_real(&[1.0, 2.0, 3.0]).unwrap();
        let mut m = NdModel::init(4, AugmentationSpec::NONE, 0).unwrap();
        assert!(matches!(idft_configure(&mut m, &s), Err(Error::Config(_))));
    }

    #[test]
    fn spectrum_csv_layout() {
        let s = dft_real(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        let csv = s.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("k,frequency,amplitude"));
        assert_eq!(lines.next(), Some("0,0,1"));
        assert_eq!(csv.lines().count(), 4);
    }
}
