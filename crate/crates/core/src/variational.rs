//! The two variational forms of the power and their optimality conditions.
//!
//! Legendre form, at acceptance level `α`:
//! `β_α = max_{λ>=0} Σ_w min(Q(w), λP(w)) - λ(1 - α)`.
//!
//! CDF form, at type-I budget `ε = 1 - α`:
//! `β_{1-ε} = max_R ∫_R^∞ F(z) e^{-z} dz - e^{-R} ε`,
//! with `∫_R^∞ F(z) e^{-z} dz = F(R) e^{-R} + Σ_{z_i > R} p_i e^{-z_i}`.
//!
//! Both maxima are attained on an interval at flats of the CDF. The reported
//! optimizer is always the atom-anchored end; any value inside the interval
//! gives the same objective.

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};
use crate::np_exact::{PowerResult, Threshold};
use crate::numeric::{log_add_exp, log_sum_exp};
use crate::spectrum::{cdf, LlrSpectrum};

/// Legendre-form objective at one `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaObjective {
    pub lambda: f64,
    pub value: f64,
}

/// CDF-form objective at one `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfObjective {
    pub r: f64,
    pub value: f64,
}

/// `Σ min(Q, λP) - λ(1 - α)`.
///
/// `Q = 0` outcomes contribute `min(0, λP) = 0` and `P = 0` outcomes
/// contribute `min(Q, 0) = 0`. Evaluated as
/// `Σ_{Q/P < λ} Q + λ (P{Q/P >= λ, finite} - (1 - α))` to avoid subtracting
/// two large numbers.
pub fn objective_lambda(spectrum: &LlrSpectrum, lambda: f64, alpha_accept: f64) -> Result<LambdaObjective> {
    if !(lambda >= 0.0) {
        return Err(Error::NegativeLambda(lambda));
    }
    check_unit("alpha_accept", alpha_accept)?;
    let mut below_q = 0.0;
    let mut above_p = 0.0;
    for a in spectrum.atoms() {
        if a.ratio() < lambda {
            below_q += a.q();
        } else {
            above_p += a.p;
        }
    }
    let value = if lambda == 0.0 {
        0.0
    } else {
        below_q + lambda * (above_p - (1.0 - alpha_accept))
    };
    Ok(LambdaObjective { lambda, value })
}

/// Power from the Legendre form at the `λ*` fixed by the optimality
/// condition `P{Q/P < λ} <= α <= P{Q/P <= λ}`.
pub fn beta_variational_lambda(spectrum: &LlrSpectrum, alpha_accept: f64) -> Result<PowerResult> {
    check_unit("alpha_accept", alpha_accept)?;
    let lambda = optimal_lambda(spectrum, alpha_accept);
    let obj = objective_lambda(spectrum, lambda, alpha_accept)?;
    let beta = obj.value.max(0.0);
    Ok(PowerResult {
        beta,
        log_beta: beta.ln(),
        alpha_accept,
        threshold: Threshold::Lambda(lambda),
    })
}

/// Atom-anchored optimal `λ`: the ratio `Q/P` of the atom at which the
/// P-mass accumulated in increasing `Q/P` first reaches `α`.
pub fn optimal_lambda(spectrum: &LlrSpectrum, alpha_accept: f64) -> f64 {
    let groups = ratio_groups(spectrum);
    let (i, _) = crossing_by_ratio(&groups, alpha_accept);
    groups[i].0
}

// (ratio, P-mass) in increasing ratio, the Q = 0 block (ratio 0) first.
fn ratio_groups(spectrum: &LlrSpectrum) -> Vec<(f64, f64)> {
    let mut groups = Vec::with_capacity(spectrum.len() + 1);
    if spectrum.p_inf() > 0.0 {
        groups.push((0.0, spectrum.p_inf()));
    }
    groups.extend(spectrum.atoms().iter().rev().map(|a| (a.ratio(), a.p)));
    groups
}

fn crossing_by_ratio(groups: &[(f64, f64)], target: f64) -> (usize, f64) {
    let mut before = 0.0;
    for (i, &(_, p)) in groups.iter().enumerate() {
        let through = if i + 1 == groups.len() { 1.0 } else { before + p };
        if through >= target {
            return (i, before);
        }
        before += p;
    }
    (groups.len() - 1, before)
}

/// `P{Q/P < λ} <= α <= P{Q/P <= λ}`, from atom masses.
///
/// Masses are accumulated in increasing `Q/P`, the order used to pick
/// `λ*`; at or beyond the largest ratio the upper mass is exactly 1.
pub fn check_lambda_optimality(spectrum: &LlrSpectrum, lambda: f64, alpha_accept: f64) -> Result<bool> {
    if !(lambda >= 0.0) {
        return Err(Error::NegativeLambda(lambda));
    }
    check_unit("alpha_accept", alpha_accept)?;
    let groups = ratio_groups(spectrum);
    let last = groups.len() - 1;
    let mut strictly_below = 0.0;
    let mut at_or_below = 0.0;
    let mut acc = 0.0;
    for (i, &(ratio, p)) in groups.iter().enumerate() {
        acc = if i == last { 1.0 } else { acc + p };
        if ratio < lambda {
            strictly_below = acc;
        }
        if ratio <= lambda {
            at_or_below = acc;
        }
    }
    Ok(strictly_below <= alpha_accept && alpha_accept <= at_or_below)
}

/// `∫_R^∞ F(z) e^{-z} dz` via `F(R) e^{-R} + Σ_{z_i > R} p_i e^{-z_i}`.
///
/// Atoms exactly at `R` sit inside `F(R)`, not in the tail sum.
pub fn tail_integral(spectrum: &LlrSpectrum, r: f64) -> f64 {
    let f = cdf(spectrum);
    let k = f.rank(r);
    let tail: f64 = spectrum.atoms()[k..].iter().map(|a| a.q()).sum();
    let head = if k == 0 { 0.0 } else { f.values()[k - 1] * (-r).exp() };
    head + tail
}

/// Natural log of [`tail_integral`], finite where the linear value overflows
/// or underflows.
pub fn ln_tail_integral(spectrum: &LlrSpectrum, r: f64) -> f64 {
    let f = cdf(spectrum);
    let k = f.rank(r);
    let mut terms: Vec<f64> = spectrum.atoms()[k..].iter().map(|a| a.ln_q()).collect();
    if k > 0 {
        terms.push(f.ln_values()[k - 1] - r);
    }
    log_sum_exp(&terms)
}

/// `∫_R^∞ F(z) e^{-z} dz` integrated piece by piece over the flats of `F`.
///
/// On `[a, b)` the integrand is `F_i e^{-z}` with antiderivative
/// `-F_i e^{-z}`, so each piece is exact; the sum is built from the CDF side
/// only and serves as an independent check of [`tail_integral`].
pub fn tail_integral_quadrature(spectrum: &LlrSpectrum, r: f64) -> f64 {
    let f = cdf(spectrum);
    let jumps = f.jumps();
    let k = f.rank(r);
    let mut total = 0.0;
    let mut left = r;
    let mut level = f.evaluate(r);
    for (&right, &next) in jumps[k..].iter().zip(&f.values()[k..]) {
        // ∫_left^right level e^{-z} dz = level e^{-left} (1 - e^{-(right-left)})
        total += level * (-left).exp() * -(left - right).exp_m1();
        left = right;
        level = next;
    }
    total + level * (-left).exp()
}

/// `tail_integral(R) - e^{-R} ε`.
pub fn objective_cdf(spectrum: &LlrSpectrum, r: f64, epsilon: f64) -> Result<CdfObjective> {
    check_unit("epsilon", epsilon)?;
    Ok(CdfObjective {
        r,
        value: tail_integral(spectrum, r) - (-r).exp() * epsilon,
    })
}

/// Power `β_{1-ε}` from the CDF form at the `R*` fixed by
/// `P{L < R} <= ε <= P{L <= R}`.
///
/// `R*` is the first atom whose CDF value reaches `ε`; when `ε` exceeds
/// `1 - p_inf` no finite atom qualifies, `R* = +inf` and `β = 0`.
pub fn beta_variational_cdf(spectrum: &LlrSpectrum, epsilon: f64) -> Result<PowerResult> {
    check_unit("epsilon", epsilon)?;
    let r = optimal_r(spectrum, epsilon);
    let alpha_accept = 1.0 - epsilon;
    if r == f64::INFINITY {
        return Ok(PowerResult {
            beta: 0.0,
            log_beta: f64::NEG_INFINITY,
            alpha_accept,
            threshold: Threshold::LogLikelihood(r),
        });
    }
    let f = cdf(spectrum);
    let k = f.rank(r);
    // tail_integral(R) - e^{-R} ε regrouped as tail + e^{-R} (F(R) - ε)
    let slack = (f.values()[k - 1] - epsilon).max(0.0);
    let mut log_terms: Vec<f64> = spectrum.atoms()[k..].iter().map(|a| a.ln_q()).collect();
    if slack > 0.0 {
        log_terms.push(slack.ln() - r);
    }
    Ok(PowerResult::from_log_terms(
        &log_terms,
        alpha_accept,
        Threshold::LogLikelihood(r),
    ))
}

/// Atom-anchored optimal `R` for budget `ε` (`+inf` when `ε > 1 - p_inf`).
pub fn optimal_r(spectrum: &LlrSpectrum, epsilon: f64) -> f64 {
    let atoms = spectrum.atoms();
    let mut acc = 0.0;
    for (i, a) in atoms.iter().enumerate() {
        acc += a.p;
        let reached = if i + 1 == atoms.len() && spectrum.p_inf() == 0.0 {
            true
        } else {
            acc >= epsilon
        };
        if reached {
            return a.z;
        }
    }
    f64::INFINITY
}

/// `P{L < R} <= ε <= P{L <= R}`.
///
/// Masses are accumulated in increasing `z` as in [`optimal_r`]: at or past
/// the last atom of a spectrum without `p_inf` the upper mass is exactly 1,
/// and `R = +inf` also counts the `L = +inf` block.
pub fn check_r_optimality(spectrum: &LlrSpectrum, r: f64, epsilon: f64) -> bool {
    let f = cdf(spectrum);
    let past_last = f.rank(r) == f.jumps().len() && !f.jumps().is_empty();
    let (below, at_or_below) = if r == f64::INFINITY {
        (f.total(), 1.0)
    } else if past_last && spectrum.p_inf() == 0.0 {
        (f.left_limit(r), 1.0)
    } else {
        (f.left_limit(r), f.evaluate(r))
    };
    below <= epsilon && epsilon <= at_or_below
}

/// `Q{L > R} = Σ_{z_i > R} p_i e^{-z_i}`; `P = 0` outcomes have `L = -inf`
/// and never count.
pub fn sanity_q_tail(spectrum: &LlrSpectrum, r: f64) -> f64 {
    spectrum.atoms().iter().filter(|a| a.z > r).map(|a| a.q()).sum()
}

/// `ln Q{L > R}`.
pub fn ln_sanity_q_tail(spectrum: &LlrSpectrum, r: f64) -> f64 {
    spectrum
        .atoms()
        .iter()
        .filter(|a| a.z > r)
        .fold(f64::NEG_INFINITY, |acc, a| log_add_exp(acc, a.ln_q()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::np_exact::beta_exact;
    use crate::spectrum::{llr_spectrum, DiscretePair};

    fn spectrum_of(p: &[f64], q: &[f64]) -> LlrSpectrum {
        llr_spectrum(&DiscretePair::from_masses(p.to_vec(), q.to_vec()).unwrap())
    }

    #[test]
    fn worked_instance() {
        let s = spectrum_of(&[0.5, 0.5], &[0.9, 0.1]);
        let by_lambda = beta_variational_lambda(&s, 0.5).unwrap();
        assert!((by_lambda.beta - 0.1).abs() < 1e-15);
        assert!((by_lambda.threshold.lambda() - 0.2).abs() < 1e-15);
        let by_cdf = beta_variational_cdf(&s, 0.5).unwrap();
        assert!((by_cdf.beta - 0.1).abs() < 1e-15);
        assert!((by_cdf.threshold.log_likelihood() - (5.0f64 / 9.0).ln()).abs() < 1e-15);
        assert!(check_lambda_optimality(&s, 0.2, 0.5).unwrap());
        assert!(check_r_optimality(&s, (5.0f64 / 9.0).ln(), 0.5));
    }

    #[test]
    fn lambda_objective_edges() {
        let s = spectrum_of(&[0.5, 0.5], &[0.9, 0.1]);
        assert_eq!(objective_lambda(&s, 0.0, 0.3).unwrap().value, 0.0);
        assert!(matches!(objective_lambda(&s, -1.0, 0.3), Err(Error::NegativeLambda(_))));
        assert!(objective_lambda(&s, 1.0, 1.5).is_err());
    }

    #[test]
    fn routes_agree_with_orphans() {
        let s = spectrum_of(&[0.2, 0.3, 0.5, 0.0], &[0.0, 0.3, 0.4, 0.3]);
        for k in 0..=20 {
            let eps = k as f64 / 20.0;
            let exact = beta_exact(&s, 1.0 - eps).unwrap().beta;
            let lam = beta_variational_lambda(&s, 1.0 - eps).unwrap().beta;
            let cdf_route = beta_variational_cdf(&s, eps).unwrap();
            assert!((exact - lam).abs() < 1e-15, "eps = {eps}");
            assert!((exact - cdf_route.beta).abs() < 1e-15, "eps = {eps}");
            assert!(check_r_optimality(&s, cdf_route.threshold.log_likelihood(), eps));
        }
    }

    #[test]
    fn budget_beyond_finite_mass() {
        // p_inf = 0.2, so any ε > 0.8 rejects every finite atom.
        let s = spectrum_of(&[0.2, 0.3, 0.5], &[0.0, 0.6, 0.4]);
        let b = beta_variational_cdf(&s, 0.9).unwrap();
        assert_eq!(b.beta, 0.0);
        assert_eq!(b.threshold.log_likelihood(), f64::INFINITY);
        assert!(check_r_optimality(&s, f64::INFINITY, 0.9));
        assert!(!check_r_optimality(&s, f64::INFINITY, 0.7));
    }

    #[test]
    fn tail_identity_and_quadrature() {
        let s = spectrum_of(&[0.1, 0.2, 0.3, 0.4], &[0.4, 0.3, 0.2, 0.1]);
        for i in -40..=40 {
            let r = i as f64 * 0.05;
            let a = tail_integral(&s, r);
            let b = tail_integral_quadrature(&s, r);
            assert!((a - b).abs() <= 1e-12 * a.max(1.0), "R = {r}");
            assert!((ln_tail_integral(&s, r) - a.ln()).abs() < 1e-13);
        }
    }

    #[test]
    fn objective_equals_power_at_atom() {
        // F(R) = ε exactly at an atom: the objective reduces to Q{L > R}.
        let s = spectrum_of(&[0.25, 0.25, 0.5], &[0.5, 0.25, 0.25]);
        let r = s.atoms()[0].z;
        let obj = objective_cdf(&s, r, 0.25).unwrap().value;
        assert!((obj - sanity_q_tail(&s, r)).abs() < 1e-15);
        assert!((ln_sanity_q_tail(&s, r) - sanity_q_tail(&s, r).ln()).abs() < 1e-15);
    }
}
