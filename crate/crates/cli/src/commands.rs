//! The subcommands, as functions from a distribution pair and grids to a
//! [`Table`].

use bht_core::gaussian::{berry_esseen_gap, block_model, gaussian_beta, sandwich};
use bht_core::largedev::{e2n, en_exact_on_product, measure_deltas, Method, RateModel};
use bht_core::np_exact::{beta_exact, beta_exact_budget, np_test};
use bht_core::renyi::beta_bound;
use bht_core::spectrum::{cdf, iid_product_with_cap, sup_gap};
use bht_core::variational::{
    beta_variational_cdf, beta_variational_lambda, check_lambda_optimality, check_r_optimality,
};
use bht_core::{llr_spectrum, DiscretePair, Error, LlrSpectrum};

use crate::table::{Cell, Table};
use crate::CliError;

/// Largest discrepancy between routes that `verify` accepts.
pub const VERIFY_TOLERANCE: f64 = 1e-9;
/// Slack allowed when comparing the Rényi bound to the exact log-power.
pub const DOMINANCE_TOLERANCE: f64 = 1e-9;

/// `β` at type-I budget `ε` by some route.
pub type Route = fn(&LlrSpectrum, f64) -> bht_core::Result<f64>;

/// The three power computations `verify` compares.
#[derive(Debug, Clone, Copy)]
pub struct Routes {
    pub exact: Route,
    pub lambda: Route,
    pub cdf: Route,
}

impl Routes {
    pub fn standard() -> Self {
        Routes {
            exact: |s, eps| Ok(beta_exact(s, 1.0 - eps)?.beta),
            lambda: |s, eps| Ok(beta_variational_lambda(s, 1.0 - eps)?.beta),
            cdf: |s, eps| Ok(beta_variational_cdf(s, eps)?.beta),
        }
    }
}

/// Which `E_{2,n}` evaluations `exponent` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodChoice {
    Quadrature,
    Laplace,
    Both,
}

impl MethodChoice {
    fn quadrature(self) -> bool {
        matches!(self, MethodChoice::Quadrature | MethodChoice::Both)
    }

    fn laplace(self) -> bool {
        matches!(self, MethodChoice::Laplace | MethodChoice::Both)
    }

    /// Method used for the sandwich columns.
    fn primary(self) -> Method {
        match self {
            MethodChoice::Laplace => Method::Laplace,
            _ => Method::Quadrature,
        }
    }
}

/// A table plus an optional verification failure.
#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub failure: Option<String>,
}

pub const EXACT_COLUMNS: [&str; 5] = ["epsilon", "beta", "log_beta", "lambda", "delta"];

/// Optimal power and randomized test at each `ε`.
pub fn cmd_exact(pair: &DiscretePair, epsilons: &[f64]) -> Result<Table, CliError> {
    let s = llr_spectrum(pair);
    let mut table = Table::new(&EXACT_COLUMNS);
    for &eps in epsilons {
        let alpha = 1.0 - eps;
        let power = beta_exact(&s, alpha)?;
        let test = np_test(&s, alpha)?;
        table.push(vec![
            Cell::Num(eps),
            Cell::Num(power.beta),
            Cell::Nats(power.log_beta),
            Cell::Num(test.lambda),
            Cell::Num(test.delta),
        ]);
    }
    Ok(table)
}

pub const VERIFY_COLUMNS: [&str; 8] = [
    "epsilon",
    "beta_exact",
    "beta_lambda",
    "beta_cdf",
    "discrepancy",
    "lambda_condition",
    "r_condition",
    "pass",
];

/// Runs every route at each `ε` and checks both optimality conditions.
pub fn cmd_verify(pair: &DiscretePair, epsilons: &[f64], routes: &Routes) -> Result<Report, CliError> {
    let s = llr_spectrum(pair);
    let mut table = Table::new(&VERIFY_COLUMNS);
    let mut worst = 0.0f64;
    let mut failed = Vec::new();
    for &eps in epsilons {
        let exact = (routes.exact)(&s, eps)?;
        let lambda = (routes.lambda)(&s, eps)?;
        let by_cdf = (routes.cdf)(&s, eps)?;
        let discrepancy = (exact - lambda).abs().max((exact - by_cdf).abs());
        let lambda_star = beta_variational_lambda(&s, 1.0 - eps)?.threshold.lambda();
        let r_star = beta_variational_cdf(&s, eps)?.threshold.log_likelihood();
        let lambda_ok = check_lambda_optimality(&s, lambda_star, 1.0 - eps)?;
        let r_ok = check_r_optimality(&s, r_star, eps);
        let pass = discrepancy <= VERIFY_TOLERANCE && lambda_ok && r_ok;
        worst = worst.max(discrepancy);
        if !pass {
            failed.push(eps);
        }
        table.push(vec![
            Cell::Num(eps),
            Cell::Num(exact),
            Cell::Num(lambda),
            Cell::Num(by_cdf),
            Cell::Num(discrepancy),
            Cell::Bool(lambda_ok),
            Cell::Bool(r_ok),
            Cell::Bool(pass),
        ]);
    }
    let failure = (!failed.is_empty()).then(|| {
        format!(
            "{} of {} budgets failed (max discrepancy {worst:e}, first at epsilon = {})",
            failed.len(),
            epsilons.len(),
            failed[0]
        )
    });
    Ok(Report { table, failure })
}

pub const RENYI_COLUMNS: [&str; 5] = ["r", "bound_nats", "s_star", "exact_log_beta", "dominates"];

/// Rényi upper bound on `ln β_{1-e^{-r}}` next to the exact value.
pub fn cmd_renyi(pair: &DiscretePair, rs: &[f64]) -> Result<Table, CliError> {
    let s = llr_spectrum(pair);
    let mut table = Table::new(&RENYI_COLUMNS);
    for &r in rs {
        let (bound, s_star) = beta_bound(pair, r)?;
        let exact = beta_exact_budget(&s, (-r).exp())?.log_beta;
        table.push(vec![
            Cell::Num(r),
            Cell::Nats(bound),
            Cell::Num(s_star),
            Cell::Nats(exact),
            Cell::Bool(bound >= exact - DOMINANCE_TOLERANCE),
        ]);
    }
    Ok(table)
}

pub const GAUSSIAN_COLUMNS: [&str; 11] = [
    "n",
    "epsilon",
    "beta_exact",
    "beta_gaussian",
    "lower",
    "upper",
    "be_gap",
    "sup_gap_l",
    "sup_gap_h",
    "contained",
    "degenerate",
];

/// Exact block power against the moment-matched normal surrogate and its
/// Berry–Esseen sandwich.
pub fn cmd_gaussian(pair: &DiscretePair, ns: &[usize], epsilons: &[f64], cap: usize) -> Result<Table, CliError> {
    let base = llr_spectrum(pair);
    let mut table = Table::new(&GAUSSIAN_COLUMNS);
    for &n in ns {
        let product = iid_product_with_cap(&base, n, cap)?;
        let model = block_model(&base, n)?;
        let gap = berry_esseen_gap(&base, n)?;
        let (d_l, d_h) = sup_gap(&cdf(&product), &model)?;
        for &eps in epsilons {
            let exact = beta_exact_budget(&product, eps)?.beta;
            let surrogate = gaussian_beta(&model, eps)?.beta;
            let sw = sandwich(&model, eps)?;
            table.push(vec![
                Cell::Int(n as u64),
                Cell::Num(eps),
                Cell::Num(exact),
                Cell::Num(surrogate),
                Cell::Num(sw.lower),
                Cell::Num(sw.upper),
                Cell::Num(gap),
                Cell::Num(d_l),
                Cell::Num(d_h),
                Cell::Bool(sw.contains(exact)),
                Cell::Bool(sw.lower_degenerate || sw.upper_degenerate),
            ]);
        }
    }
    Ok(table)
}

pub const EXPONENT_COLUMNS: [&str; 11] = [
    "r",
    "n",
    "en_exact",
    "e2n_quadrature",
    "e2n_laplace",
    "r_star",
    "delta_l",
    "delta_h",
    "sandwich_lower",
    "sandwich_upper",
    "status",
];

/// Exact and surrogate block exponents with measured deviation slacks.
///
/// A block length whose product spectrum exceeds `cap` atoms yields a row
/// with status `atom_explosion` and only the surrogate columns filled.
pub fn cmd_exponent(
    pair: &DiscretePair,
    rs: &[f64],
    ns: &[usize],
    method: MethodChoice,
    cap: usize,
) -> Result<Table, CliError> {
    let base = llr_spectrum(pair);
    let rate = RateModel::new(&base)?;
    let mut table = Table::new(&EXPONENT_COLUMNS);
    for &n in ns {
        let product = match iid_product_with_cap(&base, n, cap) {
            Ok(p) => Some(p),
            Err(Error::AtomExplosion { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let deltas = match &product {
            Some(p) => Some(measure_deltas(&rate, p, n)?),
            None => None,
        };
        for &r in rs {
            let quad = method
                .quadrature()
                .then(|| e2n(&rate, r, n, Method::Quadrature))
                .transpose()?;
            let laplace = method
                .laplace()
                .then(|| e2n(&rate, r, n, Method::Laplace))
                .transpose()?;
            let r_star = quad.or(laplace).map(|x| x.r_star);
            let exact = product.as_ref().map(|p| en_exact_on_product(p, r, n)).transpose()?;
            let bounds = match deltas {
                Some(d) => {
                    let lower = e2n(&rate, r + d.high, n, method.primary())?.e2n - d.high;
                    let upper = e2n(&rate, r - d.low, n, method.primary())?.e2n + d.low;
                    Some((lower, upper))
                }
                None => None,
            };
            table.push(vec![
                Cell::Num(r),
                Cell::Int(n as u64),
                Cell::nats_opt(exact),
                Cell::nats_opt(quad.map(|x| x.e2n)),
                Cell::nats_opt(laplace.map(|x| x.e2n)),
                Cell::nats_opt(r_star),
                Cell::nats_opt(deltas.map(|d| d.low)),
                Cell::nats_opt(deltas.map(|d| d.high)),
                Cell::nats_opt(bounds.map(|b| b.0)),
                Cell::nats_opt(bounds.map(|b| b.1)),
                Cell::Text(if product.is_some() { "ok" } else { "atom_explosion" }.into()),
            ]);
        }
    }
    Ok(table)
}
