//! Report rendering: regression tables with significance stars and the
//! descriptive tables (variables, per-country, per-region).

use super::{CountryStat, EconError, RegionStat, RegressionResult, VarStat};

/// Significance stars at the 0.01 / 0.05 / 0.1 thresholds.
pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

fn is_fe_dummy(name: &str) -> bool {
    name.starts_with("country=") || name.starts_with("sector=")
}

/// Rendered regression table: aligned text plus a CSV twin.
#[derive(Debug, Clone)]
pub struct RenderedTable {
    pub text: String,
    pub csv: String,
}

/// Render models as columns and regressors as rows. Coefficients carry
/// stars, standard errors sit in parentheses beneath, fixed effects render
/// as YES/NO rows, and the observation count closes the table. Fixed-effect
/// dummy coefficients themselves are absorbed into the YES/NO rows.
pub fn render_regression_table(results: &[RegressionResult]) -> Result<RenderedTable, EconError> {
    if results.is_empty() {
        return Err(EconError::NoRows);
    }
    let dependent = &results[0].dependent;

    // Regressor rows in first-appearance order across models.
    let mut rows: Vec<String> = Vec::new();
    for r in results {
        for c in &r.coefficients {
            if !is_fe_dummy(&c.name) && !rows.contains(&c.name) {
                rows.push(c.name.clone());
            }
        }
    }

    let cell = |r: &RegressionResult, name: &str| -> (String, String) {
        match r.coefficient(name) {
            Some(c) => (
                format!("{:.3}{}", c.estimate, stars(c.p)),
                format!("({:.3})", c.se),
            ),
            None => (String::new(), String::new()),
        }
    };

    let headers: Vec<String> = results.iter().map(|r| r.spec_name.clone()).collect();
    let width = rows
        .iter()
        .map(|r| r.len())
        .chain(std::iter::once("Observations".len()))
        .max()
        .unwrap_or(12)
        + 2;
    let col_w = headers
        .iter()
        .map(|h| h.len())
        .max()
        .unwrap_or(8)
        .max(14)
        + 2;

    let mut text = String::new();
    text.push_str(&format!("Dependent variable: {dependent}\n"));
    text.push_str(&format!("{:width$}", ""));
    for h in &headers {
        text.push_str(&format!("{h:>col_w$}"));
    }
    text.push('\n');
    text.push_str(&"-".repeat(width + col_w * headers.len()));
    text.push('\n');
    for row in &rows {
        let mut est_line = format!("{row:width$}");
        let mut se_line = format!("{:width$}", "");
        for r in results {
            let (est, se) = cell(r, row);
            est_line.push_str(&format!("{est:>col_w$}"));
            se_line.push_str(&format!("{se:>col_w$}"));
        }
        text.push_str(&est_line);
        text.push('\n');
        text.push_str(&se_line);
        text.push('\n');
    }
    text.push_str(&"-".repeat(width + col_w * headers.len()));
    text.push('\n');
    let mut obs_line = format!("{:width$}", "Observations");
    let mut cfe_line = format!("{:width$}", "Country FE");
    let mut sfe_line = format!("{:width$}", "Sector FE");
    for r in results {
        obs_line.push_str(&format!("{:>col_w$}", r.n_obs));
        cfe_line.push_str(&format!("{:>col_w$}", if r.country_fe { "YES" } else { "NO" }));
        sfe_line.push_str(&format!("{:>col_w$}", if r.sector_fe { "YES" } else { "NO" }));
    }
    text.push_str(&obs_line);
    text.push('\n');
    text.push_str(&cfe_line);
    text.push('\n');
    text.push_str(&sfe_line);
    text.push('\n');
    text.push_str("Robust standard errors in parentheses. *** p<0.01, ** p<0.05, * p<0.1\n");

    // CSV twin: one row per regressor, one column per model.
    let mut csv = String::new();
    csv.push_str("regressor");
    for h in &headers {
        csv.push(',');
        csv.push_str(&csv_escape(h));
    }
    csv.push('\n');
    for row in &rows {
        csv.push_str(&csv_escape(row));
        for r in results {
            let (est, se) = cell(r, row);
            let combined = if est.is_empty() {
                String::new()
            } else {
                format!("{est} {se}")
            };
            csv.push(',');
            csv.push_str(&csv_escape(&combined));
        }
        csv.push('\n');
    }
    for (label, f) in [
        ("observations", &(|r: &RegressionResult| r.n_obs.to_string()) as &dyn Fn(&RegressionResult) -> String),
        ("country_fe", &|r| if r.country_fe { "YES".into() } else { "NO".into() }),
        ("sector_fe", &|r| if r.sector_fe { "YES".into() } else { "NO".into() }),
    ] {
        csv.push_str(label);
        for r in results {
            csv.push(',');
            csv.push_str(&f(r));
        }
        csv.push('\n');
    }

    Ok(RenderedTable { text, csv })
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// The three descriptive tables.
#[derive(Debug, Clone)]
pub struct DescribeTables {
    pub variables: Vec<VarStat>,
    pub countries: Vec<CountryStat>,
    pub regions: Vec<RegionStat>,
}

/// Render the descriptive tables as text plus per-table CSV strings
/// (variables, countries, regions), all 3-decimal.
pub fn render_describe(tables: &DescribeTables) -> (String, [String; 3]) {
    let mut var_csv = String::from("variable,obs,mean,std_dev,min,max\n");
    for v in &tables.variables {
        var_csv.push_str(&format!(
            "{},{},{:.3},{:.3},{:.3},{:.3}\n",
            v.variable, v.obs, v.mean, v.std_dev, v.min, v.max
        ));
    }
    let mut country_csv = String::from("country,n_firms,mean_fdi\n");
    for c in &tables.countries {
        country_csv.push_str(&format!("{},{},{:.3}\n", c.country, c.n_firms, c.mean_fdi));
    }
    let mut region_csv = String::from("region_id,n_firms\n");
    for r in &tables.regions {
        region_csv.push_str(&format!("{},{}\n", r.region_id, r.n_firms));
    }

    let mut text = String::new();
    text.push_str(&format!(
        "{:<22}{:>8}{:>12}{:>12}{:>12}{:>12}\n",
        "Variable", "Obs", "Mean", "Std. Dev.", "Min", "Max"
    ));
    for v in &tables.variables {
        text.push_str(&format!(
            "{:<22}{:>8}{:>12.3}{:>12.3}{:>12.3}{:>12.3}\n",
            v.variable, v.obs, v.mean, v.std_dev, v.min, v.max
        ));
    }
    text.push('\n');
    text.push_str(&format!(
        "{:<28}{:>20}{:>28}\n",
        "Country", "Total no. of firms", "FDI ownership (average)"
    ));
    for c in &tables.countries {
        text.push_str(&format!(
            "{:<28}{:>20}{:>28.3}\n",
            c.country, c.n_firms, c.mean_fdi
        ));
    }
    text.push('\n');
    text.push_str(&format!("{:<28}{:>20}\n", "Region", "Total no. of Firms"));
    for r in &tables.regions {
        text.push_str(&format!("{:<28}{:>20}\n", r.region_id, r.n_firms));
    }

    (text, [var_csv, country_csv, region_csv])
}
