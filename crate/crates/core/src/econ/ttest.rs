//! Welch's unequal-variance t-test.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::EconError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TTest {
    pub t: f64,
    /// Welch–Satterthwaite degrees of freedom.
    pub df: f64,
    /// Two-sided p-value.
    pub p: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    pub n_a: usize,
    pub n_b: usize,
}

/// Welch's t statistic for two independent samples with the
/// Welch–Satterthwaite degrees of freedom and a two-sided p-value.
/// Each group needs at least two values. Two groups with equal means and
/// zero variance yield t = 0, p = 1.
pub fn welch_ttest(group_a: &[f64], group_b: &[f64]) -> Result<TTest, EconError> {
    let n_a = group_a.len();
    let n_b = group_b.len();
    if n_a < 2 || n_b < 2 {
        return Err(EconError::GroupTooSmall(n_a.min(n_b)));
    }
    let mean = |g: &[f64]| g.iter().sum::<f64>() / g.len() as f64;
    let var = |g: &[f64], m: f64| {
        g.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (g.len() - 1) as f64
    };
    let mean_a = mean(group_a);
    let mean_b = mean(group_b);
    let va = var(group_a, mean_a) / n_a as f64;
    let vb = var(group_b, mean_b) / n_b as f64;
    let pooled = va + vb;

    let (t, df, p) = if pooled == 0.0 {
        if mean_a == mean_b {
            (0.0, (n_a + n_b - 2) as f64, 1.0)
        } else {
            (
                f64::INFINITY * (mean_a - mean_b).signum(),
                (n_a + n_b - 2) as f64,
                0.0,
            )
        }
    } else {
        let t = (mean_a - mean_b) / pooled.sqrt();
        let df = pooled * pooled
            / (va * va / (n_a - 1) as f64 + vb * vb / (n_b - 1) as f64);
        let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
        let p = 2.0 * (1.0 - dist.cdf(t.abs()));
        (t, df, p)
    };
    Ok(TTest {
        t,
        df,
        p,
        mean_a,
        mean_b,
        n_a,
        n_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_groups_are_indistinguishable() {
        let res = welch_ttest(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(res.t, 0.0);
        assert_eq!(res.p, 1.0);
    }

    #[test]
    fn closed_form_example() {
        // Sample variances 1 and 4: t = -2 / sqrt(1/3 + 4/3)
        let res = welch_ttest(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap();
        let expected = -2.0 / (5.0f64 / 3.0).sqrt();
        assert!((res.t - expected).abs() < 1e-12);
        assert!((res.t - (-1.549)).abs() < 1e-3);
        assert!(res.p > 0.0 && res.p < 1.0);
    }

    #[test]
    fn swapping_groups_negates_t_and_keeps_p() {
        let a = [3.0, 1.0, 4.0, 1.5];
        let b = [2.0, 7.0, 1.0];
        let ab = welch_ttest(&a, &b).unwrap();
        let ba = welch_ttest(&b, &a).unwrap();
        assert!((ab.t + ba.t).abs() < 1e-12);
        assert!((ab.p - ba.p).abs() < 1e-12);
        assert!((ab.df - ba.df).abs() < 1e-12);
    }

    #[test]
    fn small_groups_are_fatal() {
        assert!(matches!(
            welch_ttest(&[1.0], &[1.0, 2.0]),
            Err(EconError::GroupTooSmall(1))
        ));
    }

    #[test]
    fn constant_groups_with_gap_are_infinitely_separated() {
        let res = welch_ttest(&[1.0, 1.0], &[2.0, 2.0]).unwrap();
        assert!(res.t.is_infinite() && res.t < 0.0);
        assert_eq!(res.p, 0.0);
    }
}
