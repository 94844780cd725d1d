//! Exact power via the Neyman–Pearson randomized likelihood-ratio test.
//!
//! The optimal test accepts outcomes in increasing order of `Q/P`, i.e.
//! `z = +inf` first and then finite atoms from the largest `z` down, and
//! randomizes on the atom where the accepted P-mass reaches the target.
//! Merged atoms are indivisible except through that randomization.

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Result};
use crate::numeric::log_sum_exp;
use crate::spectrum::LlrSpectrum;

/// Terms below this are summed in the log domain.
const LINEAR_FLOOR: f64 = 1e-300;

/// Threshold and randomization of an optimal test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalTest {
    /// Likelihood-ratio threshold on the `Q/P` scale; `0` when the boundary
    /// is the `Q = 0` mass.
    pub lambda: f64,
    /// Boundary value of `z = ln(P/Q)`; `+inf` when `lambda = 0`.
    pub boundary_z: f64,
    /// Probability of accepting an outcome on the boundary.
    pub delta: f64,
    pub achieved_alpha: f64,
    /// `1 - achieved_alpha`, accumulated from the rejection side.
    pub achieved_epsilon: f64,
}

/// Which quantity pins down the optimum of a power computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Threshold {
    Test(OptimalTest),
    /// Optimal `λ` of the Legendre-form objective.
    Lambda(f64),
    /// Optimal `R` of the CDF-form objective, in nats.
    LogLikelihood(f64),
}

impl Threshold {
    /// Threshold on the `Q/P` scale.
    pub fn lambda(&self) -> f64 {
        match *self {
            Threshold::Test(t) => t.lambda,
            Threshold::Lambda(l) => l,
            Threshold::LogLikelihood(r) => (-r).exp(),
        }
    }

    /// Threshold on the `z = ln(P/Q)` scale.
    pub fn log_likelihood(&self) -> f64 {
        match *self {
            Threshold::Test(t) => t.boundary_z,
            Threshold::Lambda(l) => -l.ln(),
            Threshold::LogLikelihood(r) => r,
        }
    }
}

/// Optimal power `β` and the threshold that achieves it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerResult {
    pub beta: f64,
    /// `ln β`; `-inf` when `β = 0`.
    pub log_beta: f64,
    pub alpha_accept: f64,
    pub threshold: Threshold,
}

impl PowerResult {
    pub(crate) fn from_log_terms(log_terms: &[f64], alpha_accept: f64, threshold: Threshold) -> Self {
        let (beta, log_beta) = sum_log_terms(log_terms);
        PowerResult {
            beta,
            log_beta,
            alpha_accept,
            threshold,
        }
    }
}

/// `(Σ e^{x_i}, ln Σ e^{x_i})`, linear when every term is representable.
/// The sum is a probability, so rounding past 1 is clipped.
pub(crate) fn sum_log_terms(log_terms: &[f64]) -> (f64, f64) {
    if log_terms.is_empty() {
        return (0.0, f64::NEG_INFINITY);
    }
    let (beta, log_beta) = if log_terms.iter().all(|&x| x > LINEAR_FLOOR.ln()) {
        let beta: f64 = log_terms.iter().map(|x| x.exp()).sum();
        (beta, log_sum_exp(log_terms))
    } else {
        let log_beta = log_sum_exp(log_terms);
        (log_beta.exp(), log_beta)
    };
    (beta.min(1.0), log_beta.min(0.0))
}

/// A block of P-mass sharing one value of `z`, in acceptance order.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Group {
    pub z: f64,
    pub p: f64,
    /// `ln Q`-mass; `-inf` for the `z = +inf` block.
    pub ln_q: f64,
}

/// P-mass groups in decreasing `z`, the `Q = 0` block first.
pub(crate) fn acceptance_order(spectrum: &LlrSpectrum) -> Vec<Group> {
    let mut groups = Vec::with_capacity(spectrum.len() + 1);
    if spectrum.p_inf() > 0.0 {
        groups.push(Group {
            z: f64::INFINITY,
            p: spectrum.p_inf(),
            ln_q: f64::NEG_INFINITY,
        });
    }
    groups.extend(spectrum.atoms().iter().rev().map(|a| Group {
        z: a.z,
        p: a.p,
        ln_q: a.ln_q(),
    }));
    groups
}

/// Locates the boundary group: the first whose cumulative mass reaches
/// `target`. The last group's cumulative mass is taken as exactly 1.
/// Returns `(index, mass strictly before it)`.
pub(crate) fn crossing(groups: &[Group], target: f64) -> (usize, f64) {
    let mut before = 0.0;
    for (i, g) in groups.iter().enumerate() {
        let through = if i + 1 == groups.len() { 1.0 } else { before + g.p };
        if through >= target {
            return (i, before);
        }
        before += g.p;
    }
    (groups.len().saturating_sub(1), before)
}

/// Optimal randomized test at acceptance level `alpha_accept`.
pub fn np_test(spectrum: &LlrSpectrum, alpha_accept: f64) -> Result<OptimalTest> {
    check_unit("alpha_accept", alpha_accept)?;
    let groups = acceptance_order(spectrum);
    let (i, before) = crossing(&groups, alpha_accept);
    let g = groups[i];
    let delta = ((alpha_accept - before) / g.p).clamp(0.0, 1.0);
    let achieved_alpha = before + delta * g.p;
    Ok(OptimalTest {
        lambda: (-g.z).exp(),
        boundary_z: g.z,
        delta,
        achieved_alpha,
        achieved_epsilon: 1.0 - achieved_alpha,
    })
}

/// `β_α(P, Q)`: the least Q-probability of an acceptance region whose
/// P-probability is at least `alpha_accept`.
pub fn beta_exact(spectrum: &LlrSpectrum, alpha_accept: f64) -> Result<PowerResult> {
    let test = np_test(spectrum, alpha_accept)?;
    let groups = acceptance_order(spectrum);
    let (i, _) = crossing(&groups, alpha_accept);
    let mut log_terms: Vec<f64> = groups[..i].iter().map(|g| g.ln_q).filter(|x| x.is_finite()).collect();
    if test.delta > 0.0 && groups[i].ln_q.is_finite() {
        log_terms.push(test.delta.ln() + groups[i].ln_q);
    }
    Ok(PowerResult::from_log_terms(
        &log_terms,
        alpha_accept,
        Threshold::Test(test),
    ))
}

/// `β` at type-I budget `epsilon`, i.e. `β_{1-ε}`, filling the rejection
/// region from the smallest `z` upward.
///
/// Same test as [`beta_exact`] at `alpha_accept = 1 - ε`, but `ε` never
/// passes through `1 - ε`, so budgets far below machine epsilon keep their
/// precision. Everything runs in the log domain.
pub fn beta_exact_budget(spectrum: &LlrSpectrum, epsilon: f64) -> Result<PowerResult> {
    check_unit("epsilon", epsilon)?;
    let mut groups = acceptance_order(spectrum);
    groups.reverse();
    let (i, before) = crossing(&groups, epsilon);
    let g = groups[i];
    let rejected = ((epsilon - before) / g.p).clamp(0.0, 1.0);
    let kept = 1.0 - rejected;
    let mut log_terms: Vec<f64> = groups[i + 1..]
        .iter()
        .map(|g| g.ln_q)
        .filter(|x| x.is_finite())
        .collect();
    if kept > 0.0 && g.ln_q.is_finite() {
        log_terms.push((-rejected).ln_1p() + g.ln_q);
    }
    let achieved_epsilon = before + rejected * g.p;
    let test = OptimalTest {
        lambda: (-g.z).exp(),
        boundary_z: g.z,
        delta: kept,
        achieved_alpha: 1.0 - achieved_epsilon,
        achieved_epsilon,
    };
    Ok(PowerResult::from_log_terms(
        &log_terms,
        1.0 - epsilon,
        Threshold::Test(test),
    ))
}

/// Replays a test against the spectrum: `(P-mass accepted, Q-mass accepted)`.
pub fn replay(spectrum: &LlrSpectrum, test: &OptimalTest) -> (f64, f64) {
    let mut alpha = 0.0;
    let mut beta = 0.0;
    if spectrum.p_inf() > 0.0 {
        if test.boundary_z == f64::INFINITY {
            alpha += test.delta * spectrum.p_inf();
        } else {
            alpha += spectrum.p_inf();
        }
    }
    for a in spectrum.atoms() {
        let weight = if a.z > test.boundary_z {
            1.0
        } else if a.z == test.boundary_z {
            test.delta
        } else {
            0.0
        };
        alpha += weight * a.p;
        beta += weight * a.q();
    }
    (alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{llr_spectrum, DiscretePair};

    fn spectrum_of(p: &[f64], q: &[f64]) -> LlrSpectrum {
        llr_spectrum(&DiscretePair::from_masses(p.to_vec(), q.to_vec()).unwrap())
    }

    #[test]
    fn zero_budget_accepts_nothing() {
        let s = spectrum_of(&[0.5, 0.5], &[0.9, 0.1]);
        let t = np_test(&s, 0.0).unwrap();
        assert_eq!(t.delta, 0.0);
        assert_eq!(beta_exact(&s, 0.0).unwrap().beta, 0.0);
    }

    #[test]
    fn worked_test() {
        let s = spectrum_of(&[0.5, 0.5], &[0.9, 0.1]);
        let t = np_test(&s, 0.5).unwrap();
        assert!((t.lambda - 0.2).abs() < 1e-15);
        assert_eq!(t.delta, 1.0);
        assert_eq!(t.achieved_alpha, 0.5);
        let b = beta_exact(&s, 0.5).unwrap();
        assert!((b.beta - 0.1).abs() < 1e-15);
    }

    #[test]
    fn full_acceptance() {
        let s = spectrum_of(&[0.5, 0.5, 0.0], &[0.5, 0.3, 0.2]);
        let b = beta_exact(&s, 1.0).unwrap();
        assert!((b.beta - 0.8).abs() < 1e-15);
    }

    #[test]
    fn equal_hypotheses_randomize() {
        let s = spectrum_of(&[0.25, 0.75], &[0.25, 0.75]);
        for k in 0..=20 {
            let a = k as f64 / 20.0;
            let b = beta_exact(&s, a).unwrap();
            assert!((b.beta - a).abs() < 1e-15);
        }
    }

    #[test]
    fn disjoint_supports_cost_nothing() {
        let s = spectrum_of(&[1.0, 0.0], &[0.0, 1.0]);
        for a in [0.0, 0.3, 1.0] {
            assert_eq!(beta_exact(&s, a).unwrap().beta, 0.0);
            assert_eq!(beta_exact(&s, a).unwrap().log_beta, f64::NEG_INFINITY);
        }
    }

    #[test]
    fn out_of_range_alpha_is_an_error() {
        let s = spectrum_of(&[0.5, 0.5], &[0.9, 0.1]);
        assert!(beta_exact(&s, 1.5).is_err());
        assert!(beta_exact(&s, -0.1).is_err());
        assert!(beta_exact_budget(&s, f64::NAN).is_err());
    }

    #[test]
    fn budget_route_matches_acceptance_route() {
        let s = spectrum_of(&[0.1, 0.2, 0.3, 0.4], &[0.4, 0.3, 0.2, 0.1]);
        for k in 0..=40 {
            let eps = k as f64 / 40.0;
            let a = beta_exact(&s, 1.0 - eps).unwrap().beta;
            let b = beta_exact_budget(&s, eps).unwrap().beta;
            assert!((a - b).abs() < 1e-15, "eps = {eps}: {a} vs {b}");
        }
    }

    #[test]
    fn tiny_budget_keeps_precision() {
        let s = spectrum_of(&[0.5, 0.5], &[0.5, 0.5]);
        let eps = 1e-40;
        let b = beta_exact_budget(&s, eps).unwrap();
        assert!((b.log_beta - (-eps).ln_1p()).abs() < 1e-50);
    }

    #[test]
    fn replay_reproduces_result() {
        let s = spectrum_of(&[0.1, 0.2, 0.3, 0.4, 0.0], &[0.3, 0.1, 0.2, 0.1, 0.3]);
        for k in 0..=32 {
            let a = k as f64 / 32.0;
            let r = beta_exact(&s, a).unwrap();
            let Threshold::Test(t) = r.threshold else {
                unreachable!()
            };
            let (alpha, beta) = replay(&s, &t);
            assert!((alpha - a).abs() < 1e-12);
            assert!((beta - r.beta).abs() < 1e-12);
        }
    }
}
