//! Univariate OLS `y = alpha + beta x + e` with classical (homoskedastic)
//! inference.

mod student_t;
mod table;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use student_t::{ln_gamma, regularized_incomplete_beta, student_t_sf};
pub use table::{render_table, significance_stars, RenderedTable, TableColumn};

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionInput {
    pub y: Vec<f64>,
    pub x: Vec<f64>,
    pub labels: Vec<String>,
}

impl RegressionInput {
    pub fn new(y: Vec<f64>, x: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        let n = y.len();
        if x.len() != n || labels.len() != n {
            return Err(Error::Structural(format!(
                "regression columns differ in length: y {n}, x {}, labels {}",
                x.len(),
                labels.len()
            )));
        }
        if y.iter().chain(&x).any(|v| !v.is_finite()) {
            return Err(Error::Structural("regression input contains a non-finite value".into()));
        }
        Ok(Self { y, x, labels })
    }

    /// Unlabelled input; rows are numbered.
    pub fn unlabelled(y: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        let labels = (0..y.len()).map(|i| i.to_string()).collect();
        Self::new(y, x, labels)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub alpha: f64,
    pub beta: f64,
    pub se_alpha: f64,
    pub se_beta: f64,
    pub t_alpha: f64,
    pub t_beta: f64,
    pub p_alpha: f64,
    pub p_beta: f64,
    pub r2: f64,
    pub adj_r2: f64,
    pub resid_se: f64,
    pub f_stat: f64,
    pub n: usize,
}

impl RegressionResult {
    pub fn df_resid(&self) -> usize {
        self.n - 2
    }
}

pub fn ols_univariate(input: &RegressionInput) -> Result<RegressionResult> {
    let n = input.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!(
            "univariate OLS needs at least 3 observations, got {n}"
        )));
    }
    let nf = n as f64;
    let x_mean = input.x.iter().sum::<f64>() / nf;
    let y_mean = input.y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut sst) = (0.0, 0.0, 0.0);
    for (x, y) in input.x.iter().zip(&input.y) {
        let dx = x - x_mean;
        let dy = y - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        sst += dy * dy;
    }
    if !(sxx > 0.0) {
        return Err(Error::DegenerateRegressor("regressor is constant".into()));
    }
    let beta = sxy / sxx;
    let alpha = y_mean - beta * x_mean;
    let ssr: f64 = input
        .x
        .iter()
        .zip(&input.y)
        .map(|(x, y)| {
            let e = y - alpha - beta * x;
            e * e
        })
        .sum();
    let df = nf - 2.0;
    let resid_se = (ssr / df).sqrt();
    let se_beta = resid_se / sxx.sqrt();
    let se_alpha = resid_se * (1.0 / nf + x_mean * x_mean / sxx).sqrt();
    let t_beta = beta / se_beta;
    let t_alpha = alpha / se_alpha;
    let explained = beta * beta * sxx;
    let r2 = if sst > 0.0 { (1.0 - ssr / sst).clamp(0.0, 1.0) } else { 0.0 };
    let adj_r2 = 1.0 - (1.0 - r2) * (nf - 1.0) / df;
    let f_stat = explained / (ssr / df);
    Ok(RegressionResult {
        alpha,
        beta,
        se_alpha,
        se_beta,
        t_alpha,
        t_beta,
        p_alpha: student_t_sf(t_alpha, df),
        p_beta: student_t_sf(t_beta, df),
        r2,
        adj_r2,
        resid_se,
        f_stat,
        n,
    })
}
