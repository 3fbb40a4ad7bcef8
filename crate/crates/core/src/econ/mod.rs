//! Firm-level variable construction and estimation.
//!
//! Survey rows carry business-obstacle perceptions (coded 0–5), firm
//! controls, and the foreign-ownership share. This module derives the
//! regression variables (log age, size dummies, agglomeration, an
//! infrastructure index), joins region scores, builds sector-region
//! leave-out instruments, and estimates the models by OLS or 2SLS with
//! fixed effects and robust standard errors.

mod pca;
mod regress;
mod tables;
mod ttest;

pub use pca::{pca_first_component, PcaResult};
pub use tables::stars;
pub use regress::{
    fit_2sls, fit_ols_fe, Coefficient, FirstStage, InstrumentVariant, RegressionResult,
    RegressionSpec, SeType,
};
pub use tables::{render_describe, render_regression_table, DescribeTables};
pub use ttest::{welch_ttest, TTest};

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::relevance::ThemeId;
use crate::sbs::SbsScore;

/// One region-theme score as joined onto firm rows (normally the shifted
/// value from the score file).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionScore {
    pub region_id: String,
    pub theme_id: ThemeId,
    pub value: f64,
}

impl From<&SbsScore> for RegionScore {
    fn from(s: &SbsScore) -> Self {
        Self {
            region_id: s.region_id.clone(),
            theme_id: s.theme_id,
            value: s.sbs_shifted,
        }
    }
}

#[derive(Debug, Error)]
pub enum EconError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("unrecognized obstacle answer: '{0}'")]
    UnknownAnswer(String),
    #[error("column '{0}' has zero variance")]
    ZeroVariance(String),
    #[error("pca needs at least 3 complete rows, got {0}")]
    TooFewRows(usize),
    #[error("design matrix is rank deficient; collinear columns: {0}")]
    RankDeficient(String),
    #[error("under-identified model: {instruments} instruments for {endogenous} endogenous regressors")]
    UnderIdentified { instruments: usize, endogenous: usize },
    #[error("t-test groups need at least 2 values, got {0}")]
    GroupTooSmall(usize),
    #[error("invalid regression spec '{name}': {message}")]
    BadSpec { name: String, message: String },
    #[error("no rows available for estimation")]
    NoRows,
    #[error("unknown field '{0}'")]
    UnknownField(String),
}

/// The obstacle fields every survey row carries, in schema order.
pub const OBSTACLE_FIELDS: [&str; 10] = [
    "corruption",
    "crime_disorder",
    "business_license",
    "labor_regulation",
    "lack_education",
    "access_to_land",
    "access_to_finance",
    "transport",
    "telecom",
    "electricity",
];

/// One survey row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirmRecord {
    pub firm_id: String,
    pub country: String,
    pub region_id: String,
    pub sector: String,
    pub survey_year: i32,
    pub years_established: u32,
    pub employees: u32,
    /// Percent of foreign capital, in [0, 100].
    pub foreign_ownership: f64,
    pub corruption: u8,
    pub crime_disorder: u8,
    pub business_license: u8,
    pub labor_regulation: u8,
    pub lack_education: u8,
    pub access_to_land: u8,
    pub access_to_finance: u8,
    pub transport: u8,
    pub telecom: u8,
    pub electricity: u8,
    pub has_email_web: bool,
}

impl FirmRecord {
    pub fn obstacle(&self, field: &str) -> Option<u8> {
        match field {
            "corruption" => Some(self.corruption),
            "crime_disorder" => Some(self.crime_disorder),
            "business_license" => Some(self.business_license),
            "labor_regulation" => Some(self.labor_regulation),
            "lack_education" => Some(self.lack_education),
            "access_to_land" => Some(self.access_to_land),
            "access_to_finance" => Some(self.access_to_finance),
            "transport" => Some(self.transport),
            "telecom" => Some(self.telecom),
            "electricity" => Some(self.electricity),
            _ => None,
        }
    }
}

/// Encode a survey answer as the 0–5 obstacle scale: 1 = no obstacle up to
/// 5 = very severe; "does not apply" and "don't know" map to 0. Integer
/// strings 0–5 pass through.
pub fn encode_obstacle(answer: &str) -> Result<u8, EconError> {
    let a = answer.trim().to_lowercase();
    match a.as_str() {
        "no obstacle" => Ok(1),
        "minor obstacle" => Ok(2),
        "moderate obstacle" => Ok(3),
        "major obstacle" => Ok(4),
        "very severe obstacle" => Ok(5),
        "does not apply" | "does not apply (spontaneous)" => Ok(0),
        "don't know" | "don't know (spontaneous)" | "dont know" => Ok(0),
        _ => match a.parse::<u8>() {
            Ok(code) if code <= 5 => Ok(code),
            _ => Err(EconError::UnknownAnswer(answer.to_string())),
        },
    }
}

/// Why a firm row was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FirmRejection {
    pub line: usize,
    pub firm_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct FirmLoad {
    pub firms: Vec<FirmRecord>,
    pub rejections: Vec<FirmRejection>,
}

#[derive(Debug, Deserialize)]
struct RawFirmRow {
    firm_id: String,
    country: String,
    region_id: String,
    sector: String,
    survey_year: i32,
    years_established: u32,
    employees: u32,
    foreign_ownership: f64,
    corruption: String,
    crime_disorder: String,
    business_license: String,
    labor_regulation: String,
    lack_education: String,
    access_to_land: String,
    access_to_finance: String,
    transport: String,
    telecom: String,
    electricity: String,
    has_email_web: String,
}

/// Load firm rows from CSV. Obstacle cells may hold either 0–5 codes or the
/// survey answer strings; both go through [`encode_obstacle`]. Invalid rows
/// are rejected individually.
pub fn load_firms(path: &Path) -> Result<FirmLoad, EconError> {
    let mut reader = csv::Reader::from_path(path).map_err(|source| EconError::Csv {
        path: path.display().to_string(),
        source,
    })?;
    let mut load = FirmLoad::default();
    for (idx, row) in reader.deserialize::<RawFirmRow>().enumerate() {
        let line = idx + 2;
        let raw = match row {
            Ok(r) => r,
            Err(e) => {
                load.rejections.push(FirmRejection {
                    line,
                    firm_id: String::new(),
                    reason: format!("parse: {e}"),
                });
                continue;
            }
        };
        match convert_row(&raw) {
            Ok(rec) => load.firms.push(rec),
            Err(reason) => load.rejections.push(FirmRejection {
                line,
                firm_id: raw.firm_id.clone(),
                reason,
            }),
        }
    }
    Ok(load)
}

fn convert_row(raw: &RawFirmRow) -> Result<FirmRecord, String> {
    if !(0.0..=100.0).contains(&raw.foreign_ownership) {
        return Err(format!(
            "foreign_ownership {} outside [0, 100]",
            raw.foreign_ownership
        ));
    }
    let code = |field: &str, value: &str| {
        encode_obstacle(value).map_err(|_| format!("{field}: unrecognized answer '{value}'"))
    };
    let has_email_web = match raw.has_email_web.trim().to_lowercase().as_str() {
        "true" | "1" | "yes" => true,
        "false" | "0" | "no" => false,
        other => return Err(format!("has_email_web: expected boolean, got '{other}'")),
    };
    Ok(FirmRecord {
        firm_id: raw.firm_id.clone(),
        country: raw.country.clone(),
        region_id: raw.region_id.clone(),
        sector: raw.sector.clone(),
        survey_year: raw.survey_year,
        years_established: raw.years_established,
        employees: raw.employees,
        foreign_ownership: raw.foreign_ownership,
        corruption: code("corruption", &raw.corruption)?,
        crime_disorder: code("crime_disorder", &raw.crime_disorder)?,
        business_license: code("business_license", &raw.business_license)?,
        labor_regulation: code("labor_regulation", &raw.labor_regulation)?,
        lack_education: code("lack_education", &raw.lack_education)?,
        access_to_land: code("access_to_land", &raw.access_to_land)?,
        access_to_finance: code("access_to_finance", &raw.access_to_finance)?,
        transport: code("transport", &raw.transport)?,
        telecom: code("telecom", &raw.telecom)?,
        electricity: code("electricity", &raw.electricity)?,
        has_email_web,
    })
}

/// A firm row with derived regression variables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedFirmRow {
    pub firm: FirmRecord,
    /// `ln(years_established)`.
    pub age: f64,
    pub size_medium: f64,
    pub size_large: f64,
    /// Foreign firms in this row's (region, sector) cell, self included.
    pub agglomeration: f64,
    /// First principal component of telecom/transport/has_email_web.
    pub physical_infra: f64,
    /// The access-to-finance obstacle code.
    pub financial_infra: f64,
    /// Region scores joined by region id, one per theme.
    pub sbs: BTreeMap<ThemeId, f64>,
}

impl DerivedFirmRow {
    /// Resolve a regression field by name. SBS columns are `sbs_<theme>`.
    pub fn value(&self, field: &str) -> Option<f64> {
        if let Some(code) = self.firm.obstacle(field) {
            return Some(code as f64);
        }
        match field {
            "foreign_ownership" => Some(self.firm.foreign_ownership),
            "age" => Some(self.age),
            "size_medium" => Some(self.size_medium),
            "size_large" => Some(self.size_large),
            "agglomeration" => Some(self.agglomeration),
            "physical_infra" => Some(self.physical_infra),
            "financial_infra" => Some(self.financial_infra),
            "has_email_web" => Some(if self.firm.has_email_web { 1.0 } else { 0.0 }),
            _ => field
                .strip_prefix("sbs_")
                .and_then(|t| t.parse::<ThemeId>().ok())
                .and_then(|t| self.sbs.get(&t).copied()),
        }
    }
}

/// Output of [`derive_controls`]: derived rows, per-row rejections, and the
/// infrastructure index loadings for provenance.
#[derive(Debug, Clone)]
pub struct DeriveOutput {
    pub rows: Vec<DerivedFirmRow>,
    pub rejections: Vec<FirmRejection>,
    /// Absent only under [`derive_controls_lenient`] when the index cannot
    /// be computed.
    pub pca: Option<PcaResult>,
}

/// Derive regression variables for every valid firm row.
///
/// Rows with `years_established` of 0 are rejected (log of zero). Size
/// thresholds: small 0–19 employees, medium 20–99, large 100 or more.
/// Agglomeration counts foreign-owned firms per (region, sector) cell over
/// the accepted rows. The physical-infrastructure index is the first
/// principal component of the standardized telecom obstacle, transport
/// obstacle, and email/web dummy.
pub fn derive_controls(firms: &[FirmRecord]) -> Result<DeriveOutput, EconError> {
    derive_impl(firms, true)
}

/// Like [`derive_controls`], but tolerates an uncomputable infrastructure
/// index (too few rows or a constant indicator): `physical_infra` becomes
/// NaN and is skipped by descriptive tabulations.
pub fn derive_controls_lenient(firms: &[FirmRecord]) -> Result<DeriveOutput, EconError> {
    derive_impl(firms, false)
}

fn derive_impl(firms: &[FirmRecord], strict_pca: bool) -> Result<DeriveOutput, EconError> {
    let mut rejections = Vec::new();
    let kept: Vec<&FirmRecord> = firms
        .iter()
        .enumerate()
        .filter_map(|(i, f)| {
            if f.years_established == 0 {
                rejections.push(FirmRejection {
                    line: i + 1,
                    firm_id: f.firm_id.clone(),
                    reason: "years_established is 0; age undefined".into(),
                });
                None
            } else {
                Some(f)
            }
        })
        .collect();
    if kept.is_empty() {
        return Err(EconError::NoRows);
    }

    let mut foreign_per_cell: BTreeMap<(&str, &str), f64> = BTreeMap::new();
    for f in &kept {
        if f.foreign_ownership > 0.0 {
            *foreign_per_cell
                .entry((f.region_id.as_str(), f.sector.as_str()))
                .or_insert(0.0) += 1.0;
        }
    }

    let telecom: Vec<f64> = kept.iter().map(|f| f.telecom as f64).collect();
    let transport: Vec<f64> = kept.iter().map(|f| f.transport as f64).collect();
    let email: Vec<f64> = kept
        .iter()
        .map(|f| if f.has_email_web { 1.0 } else { 0.0 })
        .collect();
    let pca = match pca_first_component(
        &[telecom, transport, email],
        ["telecom", "transport", "has_email_web"],
    ) {
        Ok(p) => Some(p),
        Err(e) if strict_pca => return Err(e),
        Err(_) => None,
    };

    let rows = kept
        .iter()
        .enumerate()
        .map(|(i, f)| DerivedFirmRow {
            firm: (*f).clone(),
            age: (f.years_established as f64).ln(),
            size_medium: if (20..=99).contains(&f.employees) { 1.0 } else { 0.0 },
            size_large: if f.employees >= 100 { 1.0 } else { 0.0 },
            agglomeration: foreign_per_cell
                .get(&(f.region_id.as_str(), f.sector.as_str()))
                .copied()
                .unwrap_or(0.0),
            physical_infra: pca.as_ref().map_or(f64::NAN, |p| p.scores[i]),
            financial_infra: f.access_to_finance as f64,
            sbs: BTreeMap::new(),
        })
        .collect();
    Ok(DeriveOutput {
        rows,
        rejections,
        pca,
    })
}

/// Result of joining region scores onto firm rows.
#[derive(Debug, Clone, Default, Serialize)]
pub struct JoinReport {
    pub matched_rows: usize,
    /// Rows dropped because their region has no score, per region.
    pub dropped_by_region: BTreeMap<String, usize>,
}

/// Join region scores onto firm rows by region id (listwise: a row is kept
/// only when every theme has a score for its region).
pub fn join_scores(rows: Vec<DerivedFirmRow>, scores: &[RegionScore]) -> (Vec<DerivedFirmRow>, JoinReport) {
    let mut by_region: BTreeMap<&str, BTreeMap<ThemeId, f64>> = BTreeMap::new();
    let mut themes: BTreeSet<ThemeId> = BTreeSet::new();
    for s in scores {
        themes.insert(s.theme_id);
        by_region
            .entry(s.region_id.as_str())
            .or_default()
            .insert(s.theme_id, s.value);
    }
    let mut report = JoinReport::default();
    let mut kept = Vec::with_capacity(rows.len());
    for mut row in rows {
        match by_region.get(row.firm.region_id.as_str()) {
            Some(vals) if themes.iter().all(|t| vals.contains_key(t)) => {
                row.sbs = vals.clone();
                report.matched_rows += 1;
                kept.push(row);
            }
            _ => {
                *report
                    .dropped_by_region
                    .entry(row.firm.region_id.clone())
                    .or_insert(0) += 1;
            }
        }
    }
    (kept, report)
}

/// Fill scores where available without dropping rows (descriptive use).
pub fn fill_scores(rows: &mut [DerivedFirmRow], scores: &[RegionScore]) {
    let mut by_region: BTreeMap<&str, BTreeMap<ThemeId, f64>> = BTreeMap::new();
    for s in scores {
        by_region
            .entry(s.region_id.as_str())
            .or_default()
            .insert(s.theme_id, s.value);
    }
    for row in rows {
        if let Some(vals) = by_region.get(row.firm.region_id.as_str()) {
            row.sbs = vals.clone();
        }
    }
}

/// Instrument columns for one model plus singleton-cell diagnostics.
#[derive(Debug, Clone)]
pub struct InstrumentSet {
    /// Instrument name → per-row values, aligned with the input rows.
    pub columns: Vec<(String, Vec<f64>)>,
    /// Rows living in singleton (sector, region) cells.
    pub flagged_rows: Vec<usize>,
    pub singleton_warnings: usize,
}

/// Build sector-region average instruments for every endogenous regressor.
///
/// Under [`InstrumentVariant::LeaveOut`] a firm's instrument is the mean of
/// the obstacle over its (sector, region) cell excluding the firm itself.
/// A singleton cell falls back to the cell mean including self (numerically
/// the firm's own value); such rows are flagged and counted, never silently
/// treated as leave-out. The interaction instrument is the leave-out mean
/// times the row's region score.
pub fn build_instruments(
    rows: &[DerivedFirmRow],
    spec: &RegressionSpec,
    variant: InstrumentVariant,
) -> Result<InstrumentSet, EconError> {
    let mut cells: BTreeMap<(&str, &str), Vec<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        cells
            .entry((r.firm.sector.as_str(), r.firm.region_id.as_str()))
            .or_default()
            .push(i);
    }
    let mut flagged: BTreeSet<usize> = BTreeSet::new();
    let mut singleton_warnings = 0usize;
    for members in cells.values() {
        if members.len() < 2 {
            singleton_warnings += 1;
            flagged.extend(members.iter().copied());
        }
    }

    let mut columns = Vec::new();
    for obstacle in &spec.obstacles {
        let values: Vec<f64> = rows
            .iter()
            .map(|r| {
                r.value(obstacle)
                    .ok_or_else(|| EconError::UnknownField(obstacle.clone()))
            })
            .collect::<Result<_, _>>()?;
        let mut col = vec![0.0f64; rows.len()];
        for members in cells.values() {
            let sum: f64 = members.iter().map(|&i| values[i]).sum();
            let n = members.len() as f64;
            for &i in members {
                col[i] = match variant {
                    InstrumentVariant::LeaveOut if members.len() >= 2 => {
                        (sum - values[i]) / (n - 1.0)
                    }
                    // Singleton cell or include-self variant: cell mean.
                    _ => sum / n,
                };
            }
        }
        columns.push((format!("iv_{obstacle}"), col));
    }

    if let (Some(theme), Some(obstacle)) = (spec.sbs_theme, spec.interact_obstacle.as_ref()) {
        let base = columns
            .iter()
            .find(|(name, _)| name == &format!("iv_{obstacle}"))
            .ok_or_else(|| EconError::BadSpec {
                name: spec.name.clone(),
                message: format!("interaction obstacle '{obstacle}' is not in the obstacle list"),
            })?
            .1
            .clone();
        let sbs_field = format!("sbs_{theme}");
        let col: Vec<f64> = rows
            .iter()
            .zip(base)
            .map(|(r, iv)| {
                r.value(&sbs_field)
                    .map(|s| iv * s)
                    .ok_or_else(|| EconError::UnknownField(sbs_field.clone()))
            })
            .collect::<Result<_, _>>()?;
        columns.push((format!("iv_{obstacle}_x_{sbs_field}"), col));
    }

    Ok(InstrumentSet {
        columns,
        flagged_rows: flagged.into_iter().collect(),
        singleton_warnings,
    })
}

/// Descriptive statistics of one variable across rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarStat {
    pub variable: String,
    pub obs: usize,
    pub mean: f64,
    /// Sample standard deviation.
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
}

/// Per-country firm counts with mean foreign ownership.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountryStat {
    pub country: String,
    pub n_firms: usize,
    pub mean_fdi: f64,
}

/// Per-region firm counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionStat {
    pub region_id: String,
    pub n_firms: usize,
}

fn var_stat(variable: &str, values: &[f64]) -> VarStat {
    let obs = values.len();
    let mean = values.iter().sum::<f64>() / obs as f64;
    let std_dev = if obs > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (obs - 1) as f64).sqrt()
    } else {
        0.0
    };
    VarStat {
        variable: variable.to_string(),
        obs,
        mean,
        std_dev,
        min: values.iter().cloned().fold(f64::INFINITY, f64::min),
        max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// The variable roster for the descriptive table, in report order.
pub fn describe_variables(rows: &[DerivedFirmRow]) -> Result<Vec<VarStat>, EconError> {
    if rows.is_empty() {
        return Err(EconError::NoRows);
    }
    let mut fields: Vec<String> = vec![
        "foreign_ownership".into(),
        "corruption".into(),
        "crime_disorder".into(),
        "business_license".into(),
        "labor_regulation".into(),
        "lack_education".into(),
        "access_to_land".into(),
        "age".into(),
        "size_medium".into(),
        "size_large".into(),
        "agglomeration".into(),
        "physical_infra".into(),
        "financial_infra".into(),
    ];
    for theme in ThemeId::ALL {
        if rows.iter().any(|r| r.sbs.contains_key(&theme)) {
            fields.push(format!("sbs_{theme}"));
        }
    }
    let mut stats = Vec::with_capacity(fields.len());
    for field in &fields {
        let values: Vec<f64> = rows
            .iter()
            .filter_map(|r| r.value(field))
            .filter(|v| v.is_finite())
            .collect();
        if !values.is_empty() {
            stats.push(var_stat(field, &values));
        }
    }
    Ok(stats)
}

/// Per-country and per-region tabulations.
pub fn describe_groups(rows: &[DerivedFirmRow]) -> (Vec<CountryStat>, Vec<RegionStat>) {
    let mut by_country: BTreeMap<&str, (usize, f64)> = BTreeMap::new();
    let mut by_region: BTreeMap<&str, usize> = BTreeMap::new();
    for r in rows {
        let e = by_country.entry(r.firm.country.as_str()).or_insert((0, 0.0));
        e.0 += 1;
        e.1 += r.firm.foreign_ownership;
        *by_region.entry(r.firm.region_id.as_str()).or_insert(0) += 1;
    }
    let countries = by_country
        .into_iter()
        .map(|(country, (n, sum))| CountryStat {
            country: country.to_string(),
            n_firms: n,
            mean_fdi: sum / n as f64,
        })
        .collect();
    let regions = by_region
        .into_iter()
        .map(|(region_id, n_firms)| RegionStat {
            region_id: region_id.to_string(),
            n_firms,
        })
        .collect();
    (countries, regions)
}
