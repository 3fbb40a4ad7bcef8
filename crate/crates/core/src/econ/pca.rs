//! First principal component of the three infrastructure indicators.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use super::EconError;

/// First principal component: loadings on the standardized columns and the
/// per-row scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcaResult {
    pub loadings: [f64; 3],
    pub scores: Vec<f64>,
    /// Share of total variance carried by the first component.
    pub explained: f64,
}

/// First eigenvector of the 3×3 correlation matrix of the given columns.
///
/// Columns are standardized to mean 0, sample sd 1. The sign is fixed so the
/// second column's loading (the transport obstacle in the infrastructure
/// index) is nonnegative; on an exact tie the first nonzero loading is made
/// positive. A correlation matrix that is exactly the identity has no
/// preferred direction; the loadings are then pinned to (1, 0, 0).
pub fn pca_first_component(
    columns: &[Vec<f64>; 3],
    names: [&str; 3],
) -> Result<PcaResult, EconError> {
    let n = columns[0].len();
    if n < 3 {
        return Err(EconError::TooFewRows(n));
    }
    assert!(columns.iter().all(|c| c.len() == n), "ragged columns");

    let mut standardized: Vec<Vec<f64>> = Vec::with_capacity(3);
    for (col, name) in columns.iter().zip(names) {
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        if var <= 0.0 {
            return Err(EconError::ZeroVariance(name.to_string()));
        }
        let sd = var.sqrt();
        standardized.push(col.iter().map(|v| (v - mean) / sd).collect());
    }

    let mut corr = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let dot: f64 = standardized[i]
                .iter()
                .zip(&standardized[j])
                .map(|(a, b)| a * b)
                .sum();
            corr[(i, j)] = dot / (n - 1) as f64;
        }
    }

    let identity_like = (corr - Matrix3::identity()).abs().max() <= 1e-12;
    let (mut loadings, explained) = if identity_like {
        (Vector3::new(1.0, 0.0, 0.0), 1.0 / 3.0)
    } else {
        let eigen = corr.symmetric_eigen();
        let mut top = 0;
        for k in 1..3 {
            if eigen.eigenvalues[k] > eigen.eigenvalues[top] {
                top = k;
            }
        }
        (
            eigen.eigenvectors.column(top).into_owned(),
            eigen.eigenvalues[top] / eigen.eigenvalues.sum(),
        )
    };

    if loadings[1] < 0.0 {
        loadings = -loadings;
    } else if loadings[1] == 0.0 {
        if let Some(first) = loadings.iter().find(|v| **v != 0.0) {
            if *first < 0.0 {
                loadings = -loadings;
            }
        }
    }

    let scores: Vec<f64> = (0..n)
        .map(|r| {
            loadings[0] * standardized[0][r]
                + loadings[1] * standardized[1][r]
                + loadings[2] * standardized[2][r]
        })
        .collect();
    Ok(PcaResult {
        loadings: [loadings[0], loadings[1], loadings[2]],
        scores,
        explained,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn correlated_pair_loads_symmetrically() {
        // Columns 0 and 1 perfectly correlated; the +--+ pattern is exactly
        // uncorrelated with a linear trend, so column 2 stands alone.
        let base: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let twice: Vec<f64> = base.iter().map(|v| 2.0 * v + 1.0).collect();
        let pattern = [1.0, -1.0, -1.0, 1.0];
        let indep: Vec<f64> = (0..12).map(|i| pattern[i % 4]).collect();
        let res = pca_first_component(&[base, twice, indep], ["a", "b", "c"]).unwrap();
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        assert!((res.loadings[0].abs() - inv_sqrt2).abs() < 1e-9);
        assert!((res.loadings[1].abs() - inv_sqrt2).abs() < 1e-9);
        assert!(res.loadings[2].abs() < 1e-9);
        assert!(res.loadings[1] > 0.0);
    }

    #[test]
    fn identity_correlation_pins_first_axis() {
        // Orthogonal standardized columns: sample correlations exactly 0.
        let a = vec![1.0, 1.0, -1.0, -1.0];
        let b = vec![1.0, -1.0, 1.0, -1.0];
        let c = vec![1.0, -1.0, -1.0, 1.0];
        let res = pca_first_component(&[a, b, c], ["a", "b", "c"]).unwrap();
        assert_eq!(res.loadings, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_variance_column_is_fatal_with_name() {
        let a = vec![1.0, 2.0, 3.0, 4.0];
        let b = vec![2.0, 2.0, 2.0, 2.0];
        let c = vec![1.0, 0.0, 1.0, 0.0];
        match pca_first_component(&[a, b, c], ["telecom", "transport", "has_email_web"]) {
            Err(EconError::ZeroVariance(name)) => assert_eq!(name, "transport"),
            other => panic!("expected zero-variance error, got {other:?}"),
        }
    }

    #[test]
    fn too_few_rows_is_fatal() {
        let a = vec![1.0, 2.0];
        let b = vec![2.0, 1.0];
        let c = vec![0.0, 1.0];
        assert!(matches!(
            pca_first_component(&[a, b, c], ["a", "b", "c"]),
            Err(EconError::TooFewRows(2))
        ));
    }

    #[test]
    fn loadings_are_unit_norm_and_scores_centered() {
        let a: Vec<f64> = (0..50).map(|i| (i as f64 * 0.7).sin() + i as f64 * 0.01).collect();
        let b: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).cos() * 2.0).collect();
        let c: Vec<f64> = (0..50).map(|i| a[i] * 0.5 + (i as f64 * 1.3).sin()).collect();
        let res = pca_first_component(&[a, b, c], ["a", "b", "c"]).unwrap();
        let norm: f64 = res.loadings.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        let mean: f64 = res.scores.iter().sum::<f64>() / res.scores.len() as f64;
        assert!(mean.abs() < 1e-9);
    }

    #[test]
    fn loadings_match_power_iteration_oracle() {
        // Deterministic pseudo-random 50×3 fixture.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut cols = [Vec::new(), Vec::new(), Vec::new()];
        for _ in 0..50 {
            let x = next();
            let y = next();
            let z = next();
            cols[0].push(x + 0.5 * y);
            cols[1].push(y);
            cols[2].push(0.3 * x + z);
        }
        let res = pca_first_component(&cols, ["a", "b", "c"]).unwrap();

        // Oracle: power iteration on the correlation matrix.
        let n = 50usize;
        let mut std_cols: Vec<Vec<f64>> = Vec::new();
        for col in &cols {
            let mean = col.iter().sum::<f64>() / n as f64;
            let sd = (col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (n - 1) as f64)
                .sqrt();
            std_cols.push(col.iter().map(|v| (v - mean) / sd).collect());
        }
        let mut corr = [[0.0f64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                corr[i][j] = std_cols[i]
                    .iter()
                    .zip(&std_cols[j])
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    / (n - 1) as f64;
            }
        }
        let mut v = [1.0f64, 1.0, 1.0];
        for _ in 0..10_000 {
            let mut w = [0.0f64; 3];
            for i in 0..3 {
                for j in 0..3 {
                    w[i] += corr[i][j] * v[j];
                }
            }
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            v = [w[0] / norm, w[1] / norm, w[2] / norm];
        }
        // Align signs before comparing.
        let sign = if v[1] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..3 {
            assert!(
                (res.loadings[i] - sign * v[i]).abs() < 1e-8,
                "loading {i}: {} vs oracle {}",
                res.loadings[i],
                sign * v[i]
            );
        }
    }
}
