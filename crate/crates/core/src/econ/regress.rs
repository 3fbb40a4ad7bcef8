//! Least-squares estimation: OLS with fixed-effect dummies and 2SLS with
//! sector-region instruments. All solves go through QR; no explicit matrix
//! inverses of the design.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{build_instruments, DerivedFirmRow, EconError};
use crate::relevance::ThemeId;

/// Standard-error flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeType {
    /// Heteroskedasticity-consistent with the n/(n−k) small-sample factor.
    #[default]
    Hc1,
    Classical,
}

/// How the sector-region average instruments are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstrumentVariant {
    /// Cell mean excluding the firm itself (singleton cells fall back to
    /// the cell mean and are flagged).
    #[default]
    LeaveOut,
    /// Plain cell mean including the firm.
    IncludeSelf,
}

/// One estimated model: which obstacles enter, whether a region score and
/// its interaction enter, controls, and fixed effects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionSpec {
    pub name: String,
    pub dependent: String,
    /// Endogenous obstacle regressors.
    pub obstacles: Vec<String>,
    pub sbs_theme: Option<ThemeId>,
    /// Which obstacle interacts with the score; required iff `sbs_theme`.
    pub interact_obstacle: Option<String>,
    pub controls: Vec<String>,
    #[serde(default = "default_true")]
    pub country_fe: bool,
    #[serde(default = "default_true")]
    pub sector_fe: bool,
    #[serde(default)]
    pub se_type: SeType,
}

fn default_true() -> bool {
    true
}

impl RegressionSpec {
    pub fn plain(name: &str, dependent: &str, obstacles: &[&str], controls: &[&str]) -> Self {
        Self {
            name: name.into(),
            dependent: dependent.into(),
            obstacles: obstacles.iter().map(|s| s.to_string()).collect(),
            sbs_theme: None,
            interact_obstacle: None,
            controls: controls.iter().map(|s| s.to_string()).collect(),
            country_fe: true,
            sector_fe: true,
            se_type: SeType::Hc1,
        }
    }

    pub fn interacted(
        name: &str,
        dependent: &str,
        obstacles: &[&str],
        theme: ThemeId,
        interact_obstacle: &str,
        controls: &[&str],
    ) -> Self {
        Self {
            sbs_theme: Some(theme),
            interact_obstacle: Some(interact_obstacle.into()),
            ..Self::plain(name, dependent, obstacles, controls)
        }
    }

    pub fn validate(&self) -> Result<(), EconError> {
        let bad = |message: String| EconError::BadSpec {
            name: self.name.clone(),
            message,
        };
        if self.obstacles.is_empty() {
            return Err(bad("at least one obstacle regressor is required".into()));
        }
        match (&self.sbs_theme, &self.interact_obstacle) {
            (Some(_), Some(obstacle)) => {
                if !self.obstacles.contains(obstacle) {
                    return Err(bad(format!(
                        "interaction obstacle '{obstacle}' is not among the obstacles"
                    )));
                }
            }
            (None, None) => {}
            _ => {
                return Err(bad(
                    "sbs_theme and interact_obstacle must be set together".into(),
                ))
            }
        }
        Ok(())
    }
}

/// One estimated coefficient with robust inference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub se: f64,
    pub t: f64,
    pub p: f64,
}

/// First-stage strength summary for one endogenous regressor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstStage {
    pub endogenous: String,
    /// Joint F of the excluded instruments.
    pub f_stat: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegressionResult {
    pub spec_name: String,
    pub dependent: String,
    pub coefficients: Vec<Coefficient>,
    pub n_obs: usize,
    pub first_stages: Vec<FirstStage>,
    pub country_fe: bool,
    pub sector_fe: bool,
    #[serde(skip)]
    pub residuals: Vec<f64>,
    pub singleton_cells: usize,
}

impl RegressionResult {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }
}

/// Design matrix in display order, with endogenous columns marked.
struct Design {
    y: DVector<f64>,
    x: DMatrix<f64>,
    names: Vec<String>,
    endog_idx: Vec<usize>,
}

fn column(rows: &[DerivedFirmRow], field: &str) -> Result<DVector<f64>, EconError> {
    let vals: Vec<f64> = rows
        .iter()
        .map(|r| r.value(field).ok_or_else(|| EconError::UnknownField(field.to_string())))
        .collect::<Result<_, _>>()?;
    Ok(DVector::from_vec(vals))
}

fn build_design(rows: &[DerivedFirmRow], spec: &RegressionSpec) -> Result<Design, EconError> {
    spec.validate()?;
    if rows.is_empty() {
        return Err(EconError::NoRows);
    }
    let n = rows.len();
    let mut names: Vec<String> = Vec::new();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    let mut endog_idx: Vec<usize> = Vec::new();

    names.push("const".into());
    cols.push(DVector::from_element(n, 1.0));

    for obstacle in &spec.obstacles {
        endog_idx.push(cols.len());
        names.push(obstacle.clone());
        cols.push(column(rows, obstacle)?);
    }

    if let (Some(theme), Some(obstacle)) = (spec.sbs_theme, spec.interact_obstacle.as_ref()) {
        let sbs_field = format!("sbs_{theme}");
        let sbs = column(rows, &sbs_field)?;
        names.push(sbs_field.clone());
        cols.push(sbs.clone());

        let x = column(rows, obstacle)?;
        endog_idx.push(cols.len());
        names.push(format!("{obstacle}_x_{sbs_field}"));
        cols.push(x.component_mul(&sbs));
    }

    for control in &spec.controls {
        names.push(control.clone());
        cols.push(column(rows, control)?);
    }

    if spec.country_fe {
        append_dummies(rows, |r| r.firm.country.as_str(), "country", &mut names, &mut cols);
    }
    if spec.sector_fe {
        append_dummies(rows, |r| r.firm.sector.as_str(), "sector", &mut names, &mut cols);
    }

    let y = column(rows, &spec.dependent)?;
    let x = DMatrix::from_columns(&cols);
    Ok(Design {
        y,
        x,
        names,
        endog_idx,
    })
}

/// One 0/1 dummy per category except the first (sorted), absorbing levels.
fn append_dummies<'a, F: Fn(&'a DerivedFirmRow) -> &'a str>(
    rows: &'a [DerivedFirmRow],
    key: F,
    prefix: &str,
    names: &mut Vec<String>,
    cols: &mut Vec<DVector<f64>>,
) {
    let mut levels: Vec<&str> = rows.iter().map(|r| key(r)).collect();
    levels.sort_unstable();
    levels.dedup();
    for level in levels.iter().skip(1) {
        names.push(format!("{prefix}={level}"));
        cols.push(DVector::from_iterator(
            rows.len(),
            rows.iter().map(|r| if key(r) == *level { 1.0 } else { 0.0 }),
        ));
    }
}

/// Least squares via thin QR. Fails (naming columns) when the design is
/// rank deficient.
fn lstsq(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    names: &[String],
) -> Result<(DVector<f64>, DMatrix<f64>), EconError> {
    let n = x.nrows();
    let k = x.ncols();
    if n < k {
        return Err(EconError::RankDeficient(format!(
            "{k} columns but only {n} rows"
        )));
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let max_diag = (0..k).map(|i| r[(i, i)].abs()).fold(0.0f64, f64::max);
    let tol = max_diag * 1e-10;
    let collinear: Vec<&str> = (0..k)
        .filter(|&i| r[(i, i)].abs() <= tol)
        .map(|i| names[i].as_str())
        .collect();
    if max_diag == 0.0 || !collinear.is_empty() {
        return Err(EconError::RankDeficient(collinear.join(", ")));
    }
    let qtb = qr.q().transpose() * y;
    let beta = r
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| EconError::RankDeficient("triangular solve failed".into()))?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| EconError::RankDeficient("triangular solve failed".into()))?;
    // (X'X)^{-1} = R^{-1} R^{-T}
    let bread = &r_inv * r_inv.transpose();
    Ok((beta, bread))
}

/// Inference on a solved system. `x_cov` is the design the covariance is
/// built from (the projected design under 2SLS); `residuals` come from the
/// original regressors.
fn inference(
    names: &[String],
    beta: &DVector<f64>,
    bread: &DMatrix<f64>,
    x_cov: &DMatrix<f64>,
    residuals: &DVector<f64>,
    se_type: SeType,
) -> Vec<Coefficient> {
    let n = x_cov.nrows();
    let k = x_cov.ncols();
    let df = n.saturating_sub(k);

    let cov = match se_type {
        SeType::Classical => {
            let sigma2 = if df > 0 {
                residuals.dot(residuals) / df as f64
            } else {
                0.0
            };
            bread * sigma2
        }
        SeType::Hc1 => {
            let mut xe = x_cov.clone();
            for i in 0..n {
                let e = residuals[i];
                for j in 0..k {
                    xe[(i, j)] *= e;
                }
            }
            let meat = xe.transpose() * &xe;
            let factor = if df > 0 { n as f64 / df as f64 } else { 0.0 };
            bread * meat * bread * factor
        }
    };

    let t_dist = if df > 0 {
        StudentsT::new(0.0, 1.0, df as f64).ok()
    } else {
        None
    };
    names
        .iter()
        .zip(beta.iter())
        .enumerate()
        .map(|(j, (name, &estimate))| {
            let se = cov[(j, j)].max(0.0).sqrt();
            let (t, p) = if se > 0.0 {
                let t = estimate / se;
                let p = t_dist
                    .as_ref()
                    .map_or(f64::NAN, |d| 2.0 * (1.0 - d.cdf(t.abs())));
                (t, p)
            } else if estimate == 0.0 {
                (0.0, 1.0)
            } else {
                (f64::INFINITY, 0.0)
            };
            Coefficient {
                name: name.clone(),
                estimate,
                se,
                t,
                p,
            }
        })
        .collect()
}

/// OLS on an explicit design matrix.
pub fn fit_ols_matrix(
    y: &DVector<f64>,
    x: &DMatrix<f64>,
    names: &[String],
    se_type: SeType,
) -> Result<RegressionResult, EconError> {
    let (beta, bread) = lstsq(x, y, names)?;
    let residuals = y - x * &beta;
    let coefficients = inference(names, &beta, &bread, x, &residuals, se_type);
    Ok(RegressionResult {
        spec_name: String::new(),
        dependent: String::new(),
        coefficients,
        n_obs: y.len(),
        first_stages: Vec::new(),
        country_fe: false,
        sector_fe: false,
        residuals: residuals.iter().copied().collect(),
        singleton_cells: 0,
    })
}

/// OLS with fixed-effect dummies, also the fitting engine inside the 2SLS
/// stages. Obstacles are treated as ordinary regressors here.
pub fn fit_ols_fe(rows: &[DerivedFirmRow], spec: &RegressionSpec) -> Result<RegressionResult, EconError> {
    let design = build_design(rows, spec)?;
    let mut result = fit_ols_matrix(&design.y, &design.x, &design.names, spec.se_type)?;
    result.spec_name = spec.name.clone();
    result.dependent = spec.dependent.clone();
    result.country_fe = spec.country_fe;
    result.sector_fe = spec.sector_fe;
    Ok(result)
}

/// 2SLS on explicit matrices. `endog_idx` marks the columns of `x` that are
/// endogenous; `z` holds the excluded instruments.
///
/// First stage regresses each endogenous column on all exogenous columns
/// plus `z`; the second stage replaces endogenous columns with their fitted
/// values. Standard errors use structural residuals from the original
/// columns with the projected-design bread (textbook 2SLS covariance).
pub fn fit_2sls_matrix(
    y: &DVector<f64>,
    x: &DMatrix<f64>,
    names: &[String],
    endog_idx: &[usize],
    z: &DMatrix<f64>,
    se_type: SeType,
) -> Result<RegressionResult, EconError> {
    let n = x.nrows();
    let m = z.ncols();
    if m < endog_idx.len() {
        return Err(EconError::UnderIdentified {
            instruments: m,
            endogenous: endog_idx.len(),
        });
    }

    // Exogenous columns of x.
    let exog_idx: Vec<usize> = (0..x.ncols()).filter(|i| !endog_idx.contains(i)).collect();
    let mut w_cols: Vec<DVector<f64>> = exog_idx.iter().map(|&i| x.column(i).into_owned()).collect();
    for j in 0..m {
        w_cols.push(z.column(j).into_owned());
    }
    let w = DMatrix::from_columns(&w_cols);
    let w_names: Vec<String> = exog_idx
        .iter()
        .map(|&i| names[i].clone())
        .chain((0..m).map(|j| format!("z{j}")))
        .collect();

    let exog_only = DMatrix::from_columns(
        &exog_idx
            .iter()
            .map(|&i| x.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    let exog_names: Vec<String> = exog_idx.iter().map(|&i| names[i].clone()).collect();

    let mut x_hat = x.clone();
    let mut first_stages = Vec::with_capacity(endog_idx.len());
    for &e in endog_idx {
        let target = x.column(e).into_owned();
        let (gamma, _) = lstsq(&w, &target, &w_names)?;
        let fitted = &w * &gamma;
        let resid = &target - &fitted;
        let rss_u: f64 = resid.dot(&resid);

        // Restricted model: exogenous columns only.
        let rss_r = if exog_only.ncols() > 0 {
            let (g_r, _) = lstsq(&exog_only, &target, &exog_names)?;
            let r = &target - &exog_only * g_r;
            r.dot(&r)
        } else {
            let mean = target.mean();
            target.iter().map(|v| (v - mean) * (v - mean)).sum()
        };
        let df_u = n.saturating_sub(w.ncols());
        let f_stat = if rss_u > 0.0 && df_u > 0 {
            ((rss_r - rss_u) / m as f64) / (rss_u / df_u as f64)
        } else {
            f64::INFINITY
        };
        let mean = target.mean();
        let tss: f64 = target.iter().map(|v| (v - mean) * (v - mean)).sum();
        first_stages.push(FirstStage {
            endogenous: names[e].clone(),
            f_stat,
            r_squared: if tss > 0.0 { 1.0 - rss_u / tss } else { 0.0 },
        });
        x_hat.set_column(e, &fitted);
    }

    let (beta, bread) = lstsq(&x_hat, y, names)?;
    // Structural residuals from the ORIGINAL endogenous columns.
    let residuals = y - x * &beta;
    let coefficients = inference(names, &beta, &bread, &x_hat, &residuals, se_type);
    Ok(RegressionResult {
        spec_name: String::new(),
        dependent: String::new(),
        coefficients,
        n_obs: n,
        first_stages,
        country_fe: false,
        sector_fe: false,
        residuals: residuals.iter().copied().collect(),
        singleton_cells: 0,
    })
}

/// 2SLS over firm rows with sector-region average instruments.
pub fn fit_2sls(
    rows: &[DerivedFirmRow],
    spec: &RegressionSpec,
    variant: InstrumentVariant,
) -> Result<RegressionResult, EconError> {
    let design = build_design(rows, spec)?;
    let instruments = build_instruments(rows, spec, variant)?;
    let z_cols: Vec<DVector<f64>> = instruments
        .columns
        .iter()
        .map(|(_, col)| DVector::from_vec(col.clone()))
        .collect();
    let z = DMatrix::from_columns(&z_cols);
    let mut result = fit_2sls_matrix(
        &design.y,
        &design.x,
        &design.names,
        &design.endog_idx,
        &z,
        spec.se_type,
    )?;
    result.spec_name = spec.name.clone();
    result.dependent = spec.dependent.clone();
    result.country_fe = spec.country_fe;
    result.sector_fe = spec.sector_fe;
    result.singleton_cells = instruments.singleton_warnings;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econ::tests::firm;
    use crate::econ::derive_controls;

    fn vecs_to_matrix(cols: &[Vec<f64>]) -> DMatrix<f64> {
        let dcols: Vec<DVector<f64>> = cols.iter().map(|c| DVector::from_vec(c.clone())).collect();
        DMatrix::from_columns(&dcols)
    }

    #[test]
    fn constant_model_recovers_intercept() {
        let n = 12;
        let y = DVector::from_element(n, 3.0);
        let x = vecs_to_matrix(&[vec![1.0; n], (0..n).map(|i| i as f64).collect()]);
        let names = vec!["const".to_string(), "x".to_string()];
        let res = fit_ols_matrix(&y, &x, &names, SeType::Hc1).unwrap();
        assert!((res.coefficients[0].estimate - 3.0).abs() < 1e-12);
        assert!(res.coefficients[1].estimate.abs() < 1e-12);
        // Exact fit: robust SEs vanish up to rounding.
        assert!(res.coefficients[0].se < 1e-10);
        assert!(res.coefficients[1].se < 1e-10);
    }

    #[test]
    fn all_zero_dependent_gives_zero_everything() {
        let n = 10;
        let y = DVector::from_element(n, 0.0);
        let x = vecs_to_matrix(&[vec![1.0; n], (0..n).map(|i| (i * i) as f64).collect()]);
        let names = vec!["const".to_string(), "x".to_string()];
        let res = fit_ols_matrix(&y, &x, &names, SeType::Hc1).unwrap();
        for c in &res.coefficients {
            assert_eq!(c.estimate, 0.0);
            assert_eq!(c.se, 0.0);
            assert_eq!(c.p, 1.0);
        }
    }

    #[test]
    fn textbook_six_points_match_normal_equations() {
        // y = 1 + 2x fitted to six points with an outlier pattern; the
        // expected values below come from solving (X'X)^{-1} X'y directly
        // with exact arithmetic outside this crate.
        let x_vals = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let y_vals = [1.0, 2.9, 5.2, 7.1, 8.9, 11.2];
        let y = DVector::from_row_slice(&y_vals);
        let x = vecs_to_matrix(&[vec![1.0; 6], x_vals.to_vec()]);
        let names = vec!["const".to_string(), "x".to_string()];
        let res = fit_ols_matrix(&y, &x, &names, SeType::Classical).unwrap();
        // Normal equations: n=6, Σx=15, Σx²=55, Σy=36.3, Σxy=126.2
        // slope = (6·126.2 − 15·36.3) / (6·55 − 225) = 212.7/105
        // intercept = (36.3 − slope·15)/6
        let slope = 212.7 / 105.0;
        let intercept = (36.3 - slope * 15.0) / 6.0;
        assert!((res.coefficients[1].estimate - slope).abs() < 1e-10);
        assert!((res.coefficients[0].estimate - intercept).abs() < 1e-10);
    }

    #[test]
    fn rank_deficiency_names_offending_column() {
        let n = 8;
        let base: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let copy = base.clone();
        let y = DVector::from_element(n, 1.0);
        let x = vecs_to_matrix(&[vec![1.0; n], base, copy]);
        let names = vec!["const".to_string(), "x".to_string(), "x_copy".to_string()];
        match fit_ols_matrix(&y, &x, &names, SeType::Hc1) {
            Err(EconError::RankDeficient(cols)) => assert!(cols.contains("x_copy"), "{cols}"),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn two_sls_collapses_to_ols_with_self_instruments() {
        // Deterministic synthetic data with two regressors.
        let n = 60;
        let x1: Vec<f64> = (0..n).map(|i| ((i * 13 % 17) as f64) / 3.0).collect();
        let x2: Vec<f64> = (0..n).map(|i| ((i * 7 % 11) as f64) - 4.0).collect();
        let y_vals: Vec<f64> = (0..n)
            .map(|i| 2.0 + 1.5 * x1[i] - 0.7 * x2[i] + ((i * 29 % 13) as f64) / 7.0)
            .collect();
        let y = DVector::from_vec(y_vals);
        let x = vecs_to_matrix(&[vec![1.0; n], x1.clone(), x2.clone()]);
        let names = vec!["const".to_string(), "x1".to_string(), "x2".to_string()];
        let z = vecs_to_matrix(&[x1, x2]);
        let ols = fit_ols_matrix(&y, &x, &names, SeType::Hc1).unwrap();
        let tsls = fit_2sls_matrix(&y, &x, &names, &[1, 2], &z, SeType::Hc1).unwrap();
        for (a, b) in ols.coefficients.iter().zip(&tsls.coefficients) {
            assert!(
                (a.estimate - b.estimate).abs() < 1e-8,
                "{}: {} vs {}",
                a.name,
                a.estimate,
                b.estimate
            );
        }
    }

    #[test]
    fn under_identified_model_is_fatal() {
        let n = 20;
        let x1: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let x2: Vec<f64> = (0..n).map(|i| (i * i) as f64).collect();
        let y = DVector::from_element(n, 1.0);
        let x = vecs_to_matrix(&[vec![1.0; n], x1.clone(), x2]);
        let names = vec!["const".to_string(), "x1".to_string(), "x2".to_string()];
        let z = vecs_to_matrix(&[x1]);
        assert!(matches!(
            fit_2sls_matrix(&y, &x, &names, &[1, 2], &z, SeType::Hc1),
            Err(EconError::UnderIdentified {
                instruments: 1,
                endogenous: 2
            })
        ));
    }

    #[test]
    fn dummy_fe_equals_within_demeaned_slopes() {
        // Two groups with different intercepts, one regressor.
        let n = 40;
        let group: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let x_raw: Vec<f64> = (0..n).map(|i| ((i * 31 % 23) as f64) / 5.0).collect();
        let y_raw: Vec<f64> = (0..n)
            .map(|i| {
                let g_eff = if group[i] == 0 { 1.0 } else { 5.0 };
                g_eff + 2.5 * x_raw[i] + ((i * 17 % 7) as f64) / 10.0
            })
            .collect();

        // Dummy-variable OLS.
        let dummy: Vec<f64> = group.iter().map(|&g| g as f64).collect();
        let y = DVector::from_vec(y_raw.clone());
        let x = vecs_to_matrix(&[vec![1.0; n], x_raw.clone(), dummy]);
        let names = vec!["const".to_string(), "x".to_string(), "g1".to_string()];
        let full = fit_ols_matrix(&y, &x, &names, SeType::Classical).unwrap();

        // Within-group demeaning oracle.
        let mut sums = [(0.0f64, 0.0f64, 0usize); 2];
        for i in 0..n {
            let g = group[i];
            sums[g].0 += x_raw[i];
            sums[g].1 += y_raw[i];
            sums[g].2 += 1;
        }
        let means: Vec<(f64, f64)> = sums
            .iter()
            .map(|&(sx, sy, c)| (sx / c as f64, sy / c as f64))
            .collect();
        let xd: Vec<f64> = (0..n).map(|i| x_raw[i] - means[group[i]].0).collect();
        let yd: Vec<f64> = (0..n).map(|i| y_raw[i] - means[group[i]].1).collect();
        let slope = xd.iter().zip(&yd).map(|(a, b)| a * b).sum::<f64>()
            / xd.iter().map(|a| a * a).sum::<f64>();

        let fitted_slope = full.coefficient("x").unwrap().estimate;
        assert!(
            (fitted_slope - slope).abs() < 1e-8,
            "dummy {fitted_slope} vs within {slope}"
        );
    }

    #[test]
    fn row_level_pipeline_estimates_interaction_model() {
        // 3 countries × 2 sectors × several regions; planted linear signal.
        let mut firms = Vec::new();
        let countries = ["KEN", "NGA", "MAR"];
        let sectors = ["mfg", "services"];
        let mut k = 0usize;
        for c in 0..3 {
            for s in 0..2 {
                for r in 0..2 {
                    for f in 0..4 {
                        let mut rec = firm(
                            &format!("f{k}"),
                            countries[c],
                            &format!("{}_{r}", countries[c].to_lowercase()),
                            sectors[s],
                            3 + (k % 9) as u32,
                            8 + (k * 13 % 120) as u32,
                            ((k * 7) % 60) as f64,
                        );
                        rec.corruption = ((k + f) % 5 + 1) as u8;
                        rec.crime_disorder = ((k * 3 + f) % 5 + 1) as u8;
                        firms.push(rec);
                        k += 1;
                    }
                }
            }
        }
        let mut rows = derive_controls(&firms).unwrap().rows;
        for row in rows.iter_mut() {
            let v = (row.firm.region_id.bytes().map(u64::from).sum::<u64>() % 4) as f64 * 0.3;
            row.sbs.insert(ThemeId::Justice, v);
        }
        let spec = RegressionSpec::interacted(
            "m2",
            "foreign_ownership",
            &["crime_disorder", "corruption"],
            ThemeId::Justice,
            "corruption",
            &["age", "size_medium", "size_large", "agglomeration", "physical_infra", "financial_infra"],
        );
        let res = fit_2sls(&rows, &spec, InstrumentVariant::LeaveOut).unwrap();
        assert_eq!(res.n_obs, rows.len());
        assert_eq!(res.first_stages.len(), 3);
        assert!(res.coefficient("corruption_x_sbs_justice").is_some());
        assert!(res.coefficient("sbs_justice").is_some());
        assert!(res.coefficient("country=NGA").is_some());
        for c in &res.coefficients {
            assert!(c.se.is_finite(), "{}: se {}", c.name, c.se);
        }
    }
}
