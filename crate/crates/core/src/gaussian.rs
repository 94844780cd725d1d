//! Power of the Gaussian CDF surrogate and the bounds built on it.
//!
//! If `L ~ N(D, V)` under `P`, the optimal threshold at type-I budget `ε` is
//! `R = D + sqrt(V) Φ^{-1}(ε)` and completing the square in the tail integral
//! gives `β = e^{-D + V/2} Φ^C(Φ^{-1}(ε) + sqrt(V))`. A discrete spectrum whose
//! CDF stays within additive gaps of such a `G` has its power pinned between
//! two shifted evaluations of that closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal::{ln_phi_c, phi_inv};
use crate::np_exact::{PowerResult, Threshold};
use crate::quad::integrate;
use crate::spectrum::LlrSpectrum;

/// Best published Berry–Esseen constant for i.i.d. sums.
pub const BERRY_ESSEEN_C: f64 = 0.4748;

/// Normal law for the log-likelihood ratio with optional additive CDF gaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianModel {
    pub mean: f64,
    pub variance: f64,
    pub gap_low: f64,
    pub gap_high: f64,
}

impl GaussianModel {
    pub fn new(mean: f64, variance: f64) -> Self {
        GaussianModel {
            mean,
            variance,
            gap_low: 0.0,
            gap_high: 0.0,
        }
    }

    pub fn with_gaps(mut self, gap_low: f64, gap_high: f64) -> Self {
        self.gap_low = gap_low;
        self.gap_high = gap_high;
        self
    }

    pub fn std_dev(&self) -> Result<f64> {
        if self.variance > 0.0 && self.variance.is_finite() {
            Ok(self.variance.sqrt())
        } else {
            Err(Error::DegenerateVariance(self.variance))
        }
    }
}

fn check_open_budget(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange {
            name: "epsilon",
            value: epsilon,
        })
    }
}

/// Optimal log-likelihood threshold `D + sqrt(V) Φ^{-1}(ε)`.
pub fn gaussian_r(model: &GaussianModel, epsilon: f64) -> Result<f64> {
    let sd = model.std_dev()?;
    check_open_budget(epsilon)?;
    Ok(model.mean + sd * phi_inv(epsilon)?)
}

/// `ln β_{1-ε}(G)`.
pub fn gaussian_log_beta(model: &GaussianModel, epsilon: f64) -> Result<f64> {
    let sd = model.std_dev()?;
    check_open_budget(epsilon)?;
    Ok(-model.mean + 0.5 * model.variance + ln_phi_c(phi_inv(epsilon)? + sd))
}

/// Closed-form power of the Gaussian surrogate at type-I budget `ε`.
pub fn gaussian_beta(model: &GaussianModel, epsilon: f64) -> Result<PowerResult> {
    let log_beta = gaussian_log_beta(model, epsilon)?;
    let r = gaussian_r(model, epsilon)?;
    Ok(PowerResult {
        beta: log_beta.exp(),
        log_beta,
        alpha_accept: 1.0 - epsilon,
        threshold: Threshold::LogLikelihood(r),
    })
}

/// `∫_R^∞ e^{-z} N(z; D, V) dz` at `R = gaussian_r(ε)` by adaptive quadrature.
pub fn gaussian_beta_quadrature(model: &GaussianModel, epsilon: f64) -> Result<f64> {
    let sd = model.std_dev()?;
    let r = gaussian_r(model, epsilon)?;
    let (d, v) = (model.mean, model.variance);
    let log_integrand = |z: f64| -z - (z - d) * (z - d) / (2.0 * v) - 0.5 * (2.0 * std::f64::consts::PI * v).ln();
    // Stationary point of the log-integrand; used only to split and rescale.
    let peak = d - v;
    let log_scale = log_integrand(peak.max(r));
    let density = |z: f64| (log_integrand(z) - log_scale).exp();
    let hi = peak.max(r) + 40.0 * sd;
    let mut total = 0.0;
    let mut lo = r;
    // split at the peak so a narrow bump is never straddled blindly
    if peak > r {
        total += integrate(density, r, peak, 0.0, 1e-14, 2000).value;
        lo = peak;
    }
    total += integrate(density, lo, hi, 0.0, 1e-14, 2000).value;
    Ok(log_scale.exp() * total)
}

/// Constant-factor approximation `ln(e^{-D - sqrt(V) Φ^{-1}(ε)} / sqrt(V))`,
/// meaningful when `Φ^{-1}(ε) + sqrt(V) >> 0`.
pub fn gaussian_beta_asymptotic(model: &GaussianModel, epsilon: f64) -> Result<f64> {
    let sd = model.std_dev()?;
    check_open_budget(epsilon)?;
    let a = phi_inv(epsilon)?;
    if a + sd <= 0.0 {
        return Err(Error::OutOfRange(format!(
            "asymptotic form needs Φ^-1(ε) + sqrt(V) > 0, got {}",
            a + sd
        )));
    }
    Ok(-model.mean - sd * a - 0.5 * model.variance.ln())
}

/// Two-sided bounds on the exact power from a Gaussian surrogate with gaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichResult {
    pub lower: f64,
    pub upper: f64,
    pub epsilon: f64,
    /// `ε + d_l >= 1`: the lower side collapsed to 0.
    pub lower_degenerate: bool,
    /// `ε - d_h <= 0`: the upper side collapsed to 1.
    pub upper_degenerate: bool,
}

impl SandwichResult {
    pub fn contains(&self, beta: f64) -> bool {
        self.lower <= beta && beta <= self.upper
    }
}

/// Bounds `β_{1-ε}(F)` between `β(G)` at budgets `ε + d_l` and `ε - d_h`.
///
/// `F <= G + d_h` raises the tail integral by at most `d_h e^{-R}`, which is
/// the same as spending `d_h` less budget; symmetrically for `d_l`.
pub fn sandwich(model: &GaussianModel, epsilon: f64) -> Result<SandwichResult> {
    model.std_dev()?;
    crate::error::check_unit("epsilon", epsilon)?;
    let low_budget = epsilon + model.gap_low;
    let high_budget = epsilon - model.gap_high;
    let lower_degenerate = low_budget >= 1.0;
    let upper_degenerate = high_budget <= 0.0;
    let lower = if lower_degenerate {
        0.0
    } else if low_budget <= 0.0 {
        1.0
    } else {
        gaussian_log_beta(model, low_budget)?.exp()
    };
    let upper = if upper_degenerate {
        1.0
    } else if high_budget >= 1.0 {
        0.0
    } else {
        gaussian_log_beta(model, high_budget)?.exp()
    };
    Ok(SandwichResult {
        lower,
        upper,
        epsilon,
        lower_degenerate,
        upper_degenerate,
    })
}

/// Mean, variance and third absolute central moment of `L` under `P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub third_abs: f64,
}

impl Moments {
    pub fn model(&self) -> GaussianModel {
        GaussianModel::new(self.mean, self.variance)
    }
}

pub fn moments(spectrum: &LlrSpectrum) -> Result<Moments> {
    if spectrum.p_inf() > 0.0 {
        return Err(Error::InfiniteLlr(spectrum.p_inf()));
    }
    let atoms = spectrum.atoms();
    let mean: f64 = atoms.iter().map(|a| a.p * a.z).sum();
    let (variance, third_abs) = atoms.iter().fold((0.0, 0.0), |(v, t), a| {
        let d = a.z - mean;
        (v + a.p * d * d, t + a.p * d.abs().powi(3))
    });
    Ok(Moments {
        mean,
        variance,
        third_abs,
    })
}

/// Uniform Berry–Esseen gap `C T / (V^{3/2} sqrt(n))` between the CDF of the
/// `n`-block log-likelihood ratio and its matched normal, with
/// [`BERRY_ESSEEN_C`].
pub fn berry_esseen_gap(base: &LlrSpectrum, n: usize) -> Result<f64> {
    berry_esseen_gap_with(base, n, BERRY_ESSEEN_C)
}

pub fn berry_esseen_gap_with(base: &LlrSpectrum, n: usize, constant: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroBlockLength);
    }
    let m = moments(base)?;
    if m.third_abs == 0.0 {
        // point mass: nothing to approximate
        return Ok(0.0);
    }
    if !(m.variance > 0.0) {
        return Err(Error::DegenerateVariance(m.variance));
    }
    Ok(constant * m.third_abs / (m.variance.powf(1.5) * (n as f64).sqrt()))
}

/// Matched normal for the `n`-block sum, carrying the Berry–Esseen gap.
pub fn block_model(base: &LlrSpectrum, n: usize) -> Result<GaussianModel> {
    let m = moments(base)?;
    let gap = berry_esseen_gap(base, n)?;
    let nf = n as f64;
    Ok(GaussianModel::new(nf * m.mean, nf * m.variance).with_gaps(gap, gap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{iid_product, llr_spectrum, DiscretePair};

    fn worked() -> LlrSpectrum {
        llr_spectrum(&DiscretePair::from_masses(vec![0.5, 0.5], vec![0.9, 0.1]).unwrap())
    }

    #[test]
    fn threshold_examples() {
        let m = GaussianModel::new(0.7, 2.0);
        assert!((gaussian_r(&m, 0.5).unwrap() - 0.7).abs() < 1e-15);
        let unit = GaussianModel::new(0.0, 1.0);
        assert!((gaussian_r(&unit, crate::normal::phi(1.0)).unwrap() - 1.0).abs() < 1e-12);
        let m = GaussianModel::new(1.0, 4.0);
        let expect = 1.0 + 2.0 * phi_inv(0.1).unwrap();
        assert!((gaussian_r(&m, 0.1).unwrap() - expect).abs() < 1e-15);
        assert!(matches!(
            gaussian_r(&GaussianModel::new(0.0, 0.0), 0.5),
            Err(Error::DegenerateVariance(_))
        ));
    }

    #[test]
    fn closed_form_worked_value() {
        // mpmath quadrature of the tail integral: 0.0962292758339220230067
        let b = gaussian_beta(&GaussianModel::new(1.0, 1.0), 0.5).unwrap();
        assert!((b.beta - 0.096_229_275_833_922_02).abs() < 1e-15);
    }

    #[test]
    fn small_variance_limit() {
        let b = gaussian_beta(&GaussianModel::new(1.3, 1e-6), 0.5).unwrap();
        let q = gaussian_beta_quadrature(&GaussianModel::new(1.3, 1e-6), 0.5).unwrap();
        assert!((b.beta - 0.5 * (-1.3f64).exp()).abs() < 1e-3);
        assert!(((b.beta - q) / q).abs() < 1e-9);
    }

    #[test]
    fn budget_near_one_kills_power() {
        let b = gaussian_beta(&GaussianModel::new(0.0, 1.0), 1.0 - 1e-12).unwrap();
        assert!(b.beta < 1e-12);
    }

    #[test]
    fn asymptotic_at_median() {
        let m = GaussianModel::new(3.0, 9.0);
        let a = gaussian_beta_asymptotic(&m, 0.5).unwrap();
        assert!((a - (-3.0 - 0.5 * 9f64.ln())).abs() < 1e-15);
        let big = gaussian_beta_asymptotic(&GaussianModel::new(50.0, 100.0), 0.25).unwrap();
        assert!(big.is_finite());
    }

    #[test]
    fn sandwich_degenerate_sides() {
        let m = GaussianModel::new(0.5, 1.0).with_gaps(0.95, 0.4);
        let r = sandwich(&m, 0.3).unwrap();
        assert!(r.upper_degenerate && r.upper == 1.0);
        assert!(r.lower_degenerate && r.lower == 0.0);
        let m = GaussianModel::new(0.5, 1.0).with_gaps(0.01, 0.02);
        let r = sandwich(&m, 0.3).unwrap();
        assert!(!r.upper_degenerate && !r.lower_degenerate);
        assert!(r.lower <= r.upper);
    }

    #[test]
    fn worked_moments_equal_kl() {
        let m = moments(&worked()).unwrap();
        let kl = 0.5 * (5.0f64 / 9.0).ln() + 0.5 * 5f64.ln();
        assert!((m.mean - kl).abs() < 1e-15);
        assert!((m.mean - (5.0f64 / 3.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn moments_of_point_mass() {
        let s = llr_spectrum(&DiscretePair::from_masses(vec![0.3, 0.7], vec![0.3, 0.7]).unwrap());
        let m = moments(&s).unwrap();
        assert_eq!((m.mean, m.variance, m.third_abs), (0.0, 0.0, 0.0));
        assert_eq!(berry_esseen_gap(&s, 10).unwrap(), 0.0);
    }

    #[test]
    fn moments_scale_with_block_length() {
        let base = worked();
        let m1 = moments(&base).unwrap();
        let m7 = moments(&iid_product(&base, 7).unwrap()).unwrap();
        assert!((m7.mean - 7.0 * m1.mean).abs() < 1e-12);
        assert!((m7.variance - 7.0 * m1.variance).abs() < 1e-12);
    }

    #[test]
    fn moments_reject_infinite_llr() {
        let s = llr_spectrum(&DiscretePair::from_masses(vec![0.5, 0.5], vec![1.0, 0.0]).unwrap());
        assert!(matches!(moments(&s), Err(Error::InfiniteLlr(_))));
    }

    #[test]
    fn berry_esseen_scaling() {
        let g16 = berry_esseen_gap(&worked(), 16).unwrap();
        let g64 = berry_esseen_gap(&worked(), 64).unwrap();
        assert!((g16 / g64 - 2.0).abs() < 1e-12);
        // symmetric two-point law: T / V^{3/2} = 1
        assert!((g16 - BERRY_ESSEEN_C / 4.0).abs() < 1e-12);
    }
}
