//! Lower-tail large deviations of the log-likelihood ratio and the block
//! error exponents built on them.
//!
//! For the i.i.d. block of length `n`, `F_n(nz)` decays like `e^{-n E_1(z)}`
//! with `E_1(z) = sup_{t<=0} t z - Λ(t)` and `Λ(t) = ln E_P[e^{tL}]`.
//! Replacing `F_n` by this approximation in the CDF form of the power gives
//!
//! `f_n(r, R) = n ∫_R^∞ e^{-n E_1(z)} e^{-nz} dz - e^{-n(R + r)}`,
//! `E_{2,n}(r) = -(1/n) ln max_R f_n(r, R)`,
//!
//! to be compared with the exact `E_n(r) = -(1/n) ln β_{1-e^{-nr}}`.
//!
//! Everything is parametrized by the tilt `t`: the tilted mean `z(t)` sweeps
//! the lower branch `(min L, D]` as `t` runs over `(-inf, 0]`, and
//! `E_1(z(t)) = t z(t) - Λ(t)`, `dz/dt = Var_t(L)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal::ln_phi_c;
use crate::np_exact::beta_exact_budget;
use crate::numeric::{golden_section_max, log1m_exp, log_add_exp, log_sum_exp};
use crate::quad::integrate;
use crate::spectrum::{cdf, iid_product_with_cap, LlrSpectrum, DEFAULT_ATOM_CAP};

const T_TOL: f64 = 1e-15;
const QUAD_REL_TOL: f64 = 1e-10;
const QUAD_PANELS: usize = 4000;
const R_REFINE_TOL: f64 = 1e-10;

/// Rate function and cumulant generating function of `L` under `P`.
#[derive(Debug, Clone)]
pub struct RateModel {
    // (z - min_z, ln p), shifted so the tilt never multiplies a large offset
    shifted: Vec<(f64, f64)>,
    min_z: f64,
    mean: f64,
    ln_p_min: f64,
}

/// Tilted distribution of `L` at tilt `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tilt {
    pub t: f64,
    pub cgf: f64,
    pub mean: f64,
    pub variance: f64,
}

impl Tilt {
    /// `E_1` at the tilted mean: `t z(t) - Λ(t)`.
    pub fn rate(&self) -> f64 {
        self.t * self.mean - self.cgf
    }
}

impl RateModel {
    /// Requires `p_inf = 0`: with `P`-mass where `Q = 0` the lower tail is
    /// still finite but `Λ` is `+inf` for every `t > 0` and the block CDF
    /// never reaches 1 on finite atoms.
    pub fn new(spectrum: &LlrSpectrum) -> Result<Self> {
        if spectrum.p_inf() > 0.0 {
            return Err(Error::InfiniteLlr(spectrum.p_inf()));
        }
        let atoms = spectrum.atoms();
        let first = atoms.first().ok_or(Error::EmptySupport)?;
        let min_z = first.z;
        let shifted = atoms.iter().map(|a| (a.z - min_z, a.ln_p)).collect();
        let mean = atoms.iter().map(|a| a.p * a.z).sum::<f64>();
        Ok(RateModel {
            shifted,
            min_z,
            mean: mean.max(min_z),
            ln_p_min: first.ln_p,
        })
    }

    /// `D = E_P[L]`, where the rate vanishes.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Smallest atom of `L`; below it the rate is `+inf`.
    pub fn min_z(&self) -> f64 {
        self.min_z
    }

    /// `E_1(min L) = -ln P{L = min L}`, the largest finite rate.
    pub fn max_rate(&self) -> f64 {
        -self.ln_p_min
    }

    /// Finite domain `[min L, +inf)` of `E_1`.
    pub fn z_range(&self) -> (f64, f64) {
        (self.min_z, f64::INFINITY)
    }

    fn degenerate(&self) -> bool {
        self.shifted.len() == 1
    }

    /// `Λ(t) = ln Σ p e^{tz}`.
    pub fn cgf(&self, t: f64) -> f64 {
        let terms: Vec<f64> = self.shifted.iter().map(|&(u, lp)| lp + t * u).collect();
        t * self.min_z + log_sum_exp(&terms)
    }

    /// Moments of `L` under the tilted law `p e^{tz - Λ(t)}`.
    pub fn tilt(&self, t: f64) -> Tilt {
        let (m, e, v) = self.shifted_mean_and_rate(t);
        Tilt {
            t,
            cgf: t * (self.min_z + m) - e,
            mean: self.min_z + m,
            variance: v,
        }
    }

    // (z(t) - min_z, E_1(z(t)), Var_t), free of the t * min_z cancellation.
    fn shifted_mean_and_rate(&self, t: f64) -> (f64, f64, f64) {
        let terms: Vec<f64> = self.shifted.iter().map(|&(u, lp)| lp + t * u).collect();
        let c = log_sum_exp(&terms);
        let weights: Vec<f64> = terms.iter().map(|x| (x - c).exp()).collect();
        let m: f64 = self.shifted.iter().zip(&weights).map(|(&(u, _), w)| w * u).sum();
        let v: f64 = self
            .shifted
            .iter()
            .zip(&weights)
            .map(|(&(u, _), w)| w * (u - m) * (u - m))
            .sum();
        (m, t * m - c, v)
    }

    /// The tilt `t <= 0` whose tilted mean is `z`, for `min L < z <= D`.
    fn tilt_for_mean(&self, z: f64) -> f64 {
        let target = z - self.min_z;
        if z >= self.mean {
            return 0.0;
        }
        let mut lo = -1.0;
        while self.shifted_mean_and_rate(lo).0 >= target && lo > -1e300 {
            lo *= 2.0;
        }
        let mut hi = 0.0;
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= T_TOL * lo.abs().max(1.0) || mid <= lo || mid >= hi {
                break;
            }
            if self.shifted_mean_and_rate(mid).0 >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `E_1(z)`: `0` for `z >= D`, `+inf` below the smallest atom.
    pub fn rate(&self, z: f64) -> f64 {
        if z >= self.mean {
            return 0.0;
        }
        let slack = 1e-12 * self.min_z.abs().max(1.0);
        if z < self.min_z - slack {
            return f64::INFINITY;
        }
        if z <= self.min_z || self.degenerate() {
            return self.max_rate();
        }
        let t = self.tilt_for_mean(z);
        let (m, e, _) = self.shifted_mean_and_rate(t);
        // t z - Λ(t) at the located tilt; the sup is flat there, so the
        // bracket error enters only at second order.
        let e = e + t * (z - self.min_z - m);
        e.max(0.0).min(self.max_rate())
    }

    /// `R` on the branch `min L < R <= D` with `E_1(R) = r`.
    pub fn optimal_r(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::OutOfRange(format!("rate must be >= 0, got {r}")));
        }
        if r == 0.0 {
            return Ok(self.mean);
        }
        if self.degenerate() || r >= self.max_rate() {
            return Err(Error::OutOfRange(format!(
                "rate {r} is not attained above the smallest atom (largest finite rate {})",
                self.max_rate()
            )));
        }
        // E_1(z(t)) decreases in t on t <= 0.
        let mut lo = -1.0;
        while self.shifted_mean_and_rate(lo).1 <= r && lo > -1e300 {
            lo *= 2.0;
        }
        let mut hi = 0.0;
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let (m_lo, _, _) = self.shifted_mean_and_rate(lo);
            let (m_hi, _, _) = self.shifted_mean_and_rate(hi);
            if m_hi - m_lo <= 1e-13 * self.min_z.abs().max(1.0) {
                break;
            }
            if self.shifted_mean_and_rate(mid).1 <= r {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        Ok(self.min_z + self.shifted_mean_and_rate(t).0)
    }

    /// `n e^{-nR} (e^{-nr} - e^{-n E_1(R)})`, the derivative of `f_n` in `R`.
    pub fn f_n_derivative(&self, r: f64, big_r: f64, n: usize) -> f64 {
        let nf = n as f64;
        let e = self.rate(big_r);
        nf * (-nf * big_r).exp() * ((-nf * r).exp() - (-nf * e).exp())
    }

    /// `ln(n ∫_R^∞ e^{-n(E_1(z) + z)} dz)` by adaptive quadrature in the tilt.
    pub fn ln_integral(&self, big_r: f64, n: usize) -> Result<f64> {
        check_block(n)?;
        let nf = n as f64;
        // Beyond D the rate vanishes: n ∫_{max(R,D)}^∞ e^{-nz} dz.
        let tail = -nf * big_r.max(self.mean);
        if big_r >= self.mean || self.degenerate() {
            return Ok(tail);
        }
        let t_hi = 0.0;
        let t_lo = if big_r > self.min_z {
            self.tilt_for_mean(big_r)
        } else {
            // Below the smallest atom the integrand vanishes; the tilted
            // variance decays like e^{t Δ} with Δ the smallest atom spacing.
            let gap = self.shifted.get(1).map_or(1.0, |&(u, _)| u);
            -(80.0 / gap).max(1.0)
        };
        // ψ(t) = E_1(z(t)) + z(t) is smallest at t = -1.
        let t_peak = t_lo.max(-1.0);
        let psi = |t: f64| {
            let (m, e, v) = self.shifted_mean_and_rate(t);
            (e + m, v)
        };
        let (psi_ref, _) = psi(t_peak);
        let f = |t: f64| {
            let (p, v) = psi(t);
            (-nf * (p - psi_ref)).exp() * v
        };
        let q = if t_peak > t_lo && t_peak < t_hi {
            let a = integrate(f, t_lo, t_peak, 0.0, QUAD_REL_TOL, QUAD_PANELS);
            let b = integrate(f, t_peak, t_hi, 0.0, QUAD_REL_TOL, QUAD_PANELS);
            a.value + b.value
        } else {
            integrate(f, t_lo, t_hi, 0.0, QUAD_REL_TOL, QUAD_PANELS).value
        };
        let body = nf.ln() - nf * (psi_ref + self.min_z) + q.ln();
        Ok(log_add_exp(body, tail))
    }

    /// `ln(n ∫_R^∞ e^{-n(E_1(z) + z)} dz)` by a second-order Laplace
    /// expansion of `ψ(z) = E_1(z) + z`.
    ///
    /// `ψ` has its minimum at `z_0 = z(-1)`, the mean of `L` under `Q`. When
    /// `z_0 > R` the expansion is interior at `z_0`; otherwise the minimum on
    /// `[R, ∞)` sits at the boundary and the expansion keeps the linear term.
    pub fn ln_integral_laplace(&self, big_r: f64, n: usize) -> Result<f64> {
        check_block(n)?;
        let nf = n as f64;
        if big_r >= self.mean || self.degenerate() {
            return Ok(-nf * big_r.max(self.mean));
        }
        let r_eff = big_r.max(self.min_z);
        let t_r = if r_eff > self.min_z {
            self.tilt_for_mean(r_eff)
        } else {
            f64::NEG_INFINITY
        };
        let half_ln_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
        if t_r < -1.0 {
            let (m0, e0, v0) = self.shifted_mean_and_rate(-1.0);
            let z0 = self.min_z + m0;
            let b = 1.0 / v0;
            let psi0 = e0 + z0;
            let scale = (nf * b).sqrt();
            Ok(nf.ln() - nf * psi0 + half_ln_2pi - 0.5 * (nf * b).ln() + ln_phi_c((r_eff - z0) * scale))
        } else {
            let (m, e, v) = self.shifted_mean_and_rate(t_r);
            let psi_r = e + self.min_z + m;
            let a = 1.0 + t_r;
            let b = 1.0 / v;
            Ok(nf.ln() - nf * psi_r + half_ln_2pi - 0.5 * (nf * b).ln()
                + nf * a * a / (2.0 * b)
                + ln_phi_c(a * (nf / b).sqrt()))
        }
    }

    /// `f_n(r, R)` by adaptive quadrature.
    pub fn f_n(&self, r: f64, big_r: f64, n: usize) -> Result<FnValue> {
        let ln_integral = self.ln_integral(big_r, n)?;
        Ok(FnValue::new(ln_integral, -(n as f64) * (big_r + r)))
    }

    /// `f_n(r, R)` with the integral from [`RateModel::ln_integral_laplace`].
    pub fn f_n_laplace(&self, r: f64, big_r: f64, n: usize) -> Result<FnValue> {
        let ln_integral = self.ln_integral_laplace(big_r, n)?;
        Ok(FnValue::new(ln_integral, -(n as f64) * (big_r + r)))
    }
}

fn check_block(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::ZeroBlockLength)
    } else {
        Ok(())
    }
}

/// `f_n = I - e^{-n(R+r)}` in both domains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FnValue {
    pub value: f64,
    /// `ln f_n`; `-inf` when `f_n <= 0`.
    pub ln_value: f64,
    /// `ln I`, the integral term alone.
    pub ln_integral: f64,
}

impl FnValue {
    fn new(ln_integral: f64, ln_subtracted: f64) -> Self {
        let d = ln_subtracted - ln_integral;
        let ln_value = if d < 0.0 {
            ln_integral + log1m_exp(d)
        } else {
            f64::NEG_INFINITY
        };
        let value = if d < 0.0 {
            ln_value.exp()
        } else {
            ln_integral.exp() - ln_subtracted.exp()
        };
        FnValue {
            value,
            ln_value,
            ln_integral,
        }
    }
}

/// How the integral in `f_n` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Quadrature,
    Laplace,
}

/// `E_{2,n}(r)` with the maximizing `R`, and the exact exponent if known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentResult {
    pub r: f64,
    pub n: usize,
    pub e2n: f64,
    pub en_exact: Option<f64>,
    pub r_star: f64,
    pub method: Method,
}

/// `E_{2,n}(r) = -(1/n) ln max_R f_n(r, R)`.
///
/// For `r <= 0` every `f_n(r, ·)` is `<= 0` with supremum `0` as `R -> ∞`,
/// so the exponent is `+inf` with `R* = +inf`. For `r > 0` the maximizer is
/// the root of `E_1(R) = r`; the quadrature method also polishes it with a
/// golden-section search on `ln f_n`.
pub fn e2n(rate: &RateModel, r: f64, n: usize, method: Method) -> Result<ExponentResult> {
    check_block(n)?;
    if r.is_nan() {
        return Err(Error::OutOfRange("r is NaN".into()));
    }
    let nf = n as f64;
    let mut out = ExponentResult {
        r,
        n,
        e2n: f64::INFINITY,
        en_exact: None,
        r_star: f64::INFINITY,
        method,
    };
    if r <= 0.0 {
        return Ok(out);
    }
    let r_star = rate.optimal_r(r)?;
    let (r_best, ln_best) = match method {
        Method::Laplace => (r_star, rate.f_n_laplace(r, r_star, n)?.ln_value),
        Method::Quadrature => {
            let at = rate.f_n(r, r_star, n)?.ln_value;
            let width = 1e-3 * (rate.mean() - rate.min_z()).max(1e-12);
            let lo = (r_star - width).max(rate.min_z());
            let hi = r_star + width;
            let (r_ref, ln_ref) = golden_section_max(
                |x| rate.f_n(r, x, n).map_or(f64::NEG_INFINITY, |v| v.ln_value),
                lo,
                hi,
                R_REFINE_TOL,
            );
            if ln_ref > at {
                (r_ref, ln_ref)
            } else {
                (r_star, at)
            }
        }
    };
    out.e2n = -ln_best / nf;
    out.r_star = r_best;
    Ok(out)
}

/// `E_n(r) = -(1/n) ln β_{1-e^{-nr}}` on the `n`-fold product spectrum.
pub fn en_exact(base: &LlrSpectrum, r: f64, n: usize) -> Result<f64> {
    en_exact_with_cap(base, r, n, DEFAULT_ATOM_CAP)
}

/// [`en_exact`] with an explicit cap on the product's atom count.
pub fn en_exact_with_cap(base: &LlrSpectrum, r: f64, n: usize, cap: usize) -> Result<f64> {
    let product = iid_product_with_cap(base, n, cap)?;
    en_exact_on_product(&product, r, n)
}

/// [`en_exact`] on an already built `n`-fold product.
pub fn en_exact_on_product(product: &LlrSpectrum, r: f64, n: usize) -> Result<f64> {
    check_block(n)?;
    if !(r >= 0.0) {
        return Err(Error::OutOfRange(format!("r must be >= 0, got {r}")));
    }
    let nf = n as f64;
    let epsilon = (-nf * r).exp();
    let b = beta_exact_budget(product, epsilon)?;
    Ok(-b.log_beta / nf)
}

/// Additive slack, per symbol, between `ln F_n(nz)` and `-n E_1(z)`:
/// `e^{-n(E_1(z) + low)} <= F_n(nz) <= e^{-n(E_1(z) - high)}` for every `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deltas {
    pub low: f64,
    pub high: f64,
}

/// Smallest `(δ_l, δ_h)` for which the two-sided bound holds on `product`.
///
/// `F_n` is a step function and `E_1` is nonincreasing, so on each flat
/// `[z_j, z_{j+1})` the upper slack peaks at `z_j` and the lower slack as
/// `z -> z_{j+1}`; past the last atom `F_n = 1` and `E_1 = 0`.
pub fn measure_deltas(rate: &RateModel, product: &LlrSpectrum, n: usize) -> Result<Deltas> {
    check_block(n)?;
    let nf = n as f64;
    let f = cdf(product);
    let jumps = f.jumps();
    let ln_values = f.ln_values();
    let mut high = 0.0f64;
    let mut low = 0.0f64;
    for j in 0..jumps.len() {
        let e_here = rate.rate(jumps[j] / nf);
        if e_here.is_finite() {
            high = high.max((ln_values[j] + nf * e_here) / nf);
        }
        let e_next = if j + 1 < jumps.len() {
            rate.rate(jumps[j + 1] / nf)
        } else {
            0.0
        };
        if e_next.is_finite() {
            low = low.max(-(ln_values[j] + nf * e_next) / nf);
        }
    }
    Ok(Deltas { low, high })
}

/// The exponent sandwich
/// `E_{2,n}(r + δ_h) - δ_h <= E_n(r) <= E_{2,n}(r - δ_l) + δ_l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentSandwich {
    pub r: f64,
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    pub en_exact: f64,
    pub deltas: Deltas,
}

impl ExponentSandwich {
    pub fn holds(&self, tol: f64) -> bool {
        self.lower <= self.en_exact + tol && self.en_exact <= self.upper + tol
    }
}

/// Measures `δ_l, δ_h` on `product` (the `n`-fold product of the rate
/// model's base) and evaluates both sides of the sandwich.
pub fn exponent_sandwich(
    rate: &RateModel,
    product: &LlrSpectrum,
    r: f64,
    n: usize,
    method: Method,
) -> Result<ExponentSandwich> {
    let deltas = measure_deltas(rate, product, n)?;
    let en = en_exact_on_product(product, r, n)?;
    let lower = e2n(rate, r + deltas.high, n, method)?.e2n - deltas.high;
    let upper = e2n(rate, r - deltas.low, n, method)?.e2n + deltas.low;
    Ok(ExponentSandwich {
        r,
        n,
        lower,
        upper,
        en_exact: en,
        deltas,
    })
}
