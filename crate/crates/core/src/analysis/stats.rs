use statrs::distribution::{ContinuousCDF, Normal};

use crate::{Error, Result};

/// Average (mid) ranks, 1-based.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    (sxx > 0.0 && syy > 0.0).then(|| (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation: Pearson correlation of midranks.
pub fn spearman_rho(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(Error::InsufficientSamples {
            required: 2,
            actual: a.len(),
        });
    }
    pearson(&midranks(a), &midranks(b)).ok_or(Error::ConstantVector)
}

/// Outcome of comparing a result column against a reference column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Better,
    Similar,
    Worse,
}

impl Verdict {
    pub fn symbol(self) -> &'static str {
        match self {
            Verdict::Better => "+",
            Verdict::Similar => "≈",
            Verdict::Worse => "−",
        }
    }
}

/// Two-sided Wilcoxon rank-sum test result for sample `a` against `b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankSumTest {
    /// Sum of `a`'s midranks in the pooled sample.
    pub rank_sum: f64,
    pub p_value: f64,
    /// `true` when `a`'s rank sum exceeds its null expectation.
    pub a_greater: bool,
}

const EXACT_LIMIT: usize = 8;

/// Wilcoxon rank-sum test with midranks for ties. Exact permutation
/// distribution when both samples have at most 8 values, otherwise the
/// tie-corrected normal approximation.
pub fn rank_sum_test(a: &[f64], b: &[f64]) -> Result<RankSumTest> {
    let (n1, n2) = (a.len(), b.len());
    if n1 == 0 || n2 == 0 {
        return Err(Error::InsufficientSamples {
            required: 1,
            actual: n1.min(n2),
        });
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let w: f64 = ranks[..n1].iter().sum();
    let n = (n1 + n2) as f64;
    let expected = n1 as f64 * (n + 1.0) / 2.0;
    let p_value = if n1 <= EXACT_LIMIT && n2 <= EXACT_LIMIT {
        exact_p(&ranks, n1, (w - expected).abs())
    } else {
        let ties = tie_term(&pooled);
        let var = n1 as f64 * n2 as f64 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
        if var <= 0.0 {
            1.0
        } else {
            let z = (w - expected) / var.sqrt();
            let normal = Normal::new(0.0, 1.0).expect("standard normal");
            (2.0 * (1.0 - normal.cdf(z.abs()))).min(1.0)
        }
    };
    Ok(RankSumTest {
        rank_sum: w,
        p_value,
        a_greater: w > expected,
    })
}

fn tie_term(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut i = 0;
    while i < v.len() {
        let mut j = i + 1;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        total += t * t * t - t;
        i = j;
    }
    total
}

/// Fraction of all `C(N, n1)` rank subsets whose sum deviates from the null
/// mean at least as much as observed.
fn exact_p(ranks: &[f64], n1: usize, observed_dev: f64) -> f64 {
    let n = ranks.len();
    let expected = n1 as f64 * (n as f64 + 1.0) / 2.0;
    let mut hits = 0u64;
    let mut total = 0u64;
    let mut idx: Vec<usize> = (0..n1).collect();
    loop {
        let s: f64 = idx.iter().map(|&i| ranks[i]).sum();
        total += 1;
        if (s - expected).abs() >= observed_dev - 1e-9 {
            hits += 1;
        }
        // Next combination in lexicographic order.
        let mut k = n1;
        loop {
            if k == 0 {
                return hits as f64 / total as f64;
            }
            k -= 1;
            if idx[k] < n - n1 + k {
                break;
            }
        }
        idx[k] += 1;
        for m in k + 1..n1 {
            idx[m] = idx[m - 1] + 1;
        }
    }
}

/// Minimum runs per group for a verdict.
pub const MIN_RUNS: usize = 5;

/// Significance level of [`compare_cells`].
pub const ALPHA: f64 = 0.05;

/// Wilcoxon rank-sum verdict of `a` against `b` at the 5% level.
pub fn compare_cells(a: &[f64], b: &[f64]) -> Result<Verdict> {
    let short = a.len().min(b.len());
    if short < MIN_RUNS {
        return Err(Error::InsufficientSamples {
            required: MIN_RUNS,
            actual: short,
        });
    }
    let test = rank_sum_test(a, b)?;
    Ok(if test.p_value >= ALPHA {
        Verdict::Similar
    } else if test.a_greater {
        Verdict::Better
    } else {
        Verdict::Worse
    })
}

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample variance (n − 1 denominator); zero for fewer than two values.
pub fn sample_variance(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_examples() {
        let a = [3.0, 1.0, 4.0, 1.5, 9.0];
        assert_eq!(spearman_rho(&a, &a).unwrap(), 1.0);
        let rev: Vec<f64> = a.iter().map(|x| -x).collect();
        assert_eq!(spearman_rho(&a, &rev).unwrap(), -1.0);
        // Ranks (1,2,3) vs (1,3,2): Σd² = 2, ρ = 1 − 6·2 / (3·8) = 0.5.
        assert!((spearman_rho(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn spearman_errors() {
        assert_eq!(spearman_rho(&[1.0, 2.0], &[1.0]), Err(Error::LengthMismatch(2, 1)));
        assert_eq!(spearman_rho(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::ConstantVector));
        assert!(spearman_rho(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn spearman_with_ties_uses_midranks() {
        // Midranks: a → (1.5, 1.5, 3, 4), b → (1, 2, 3, 4).
        // Pearson by hand: mean 2.5; dx = (-1,-1,.5,1.5), dy = (-1.5,-.5,.5,1.5);
        // Σdxdy = 1.5+.5+.25+2.25 = 4.5; Σdx² = 4.5; Σdy² = 5 → 4.5/√22.5.
        let rho = spearman_rho(&[2.0, 2.0, 5.0, 7.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((rho - 4.5 / 22.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn midrank_example() {
        assert_eq!(midranks(&[10.0, 20.0, 10.0, 5.0]), vec![2.5, 4.0, 2.5, 1.0]);
    }

    #[test]
    fn verdict_examples() {
        let same = [0.8, 0.81, 0.79, 0.8, 0.82];
        assert_eq!(compare_cells(&same, &same).unwrap(), Verdict::Similar);
        let hi = [0.9; 10];
        let lo = [0.1; 10];
        assert_eq!(compare_cells(&hi, &lo).unwrap(), Verdict::Better);
        assert_eq!(compare_cells(&lo, &hi).unwrap(), Verdict::Worse);
        assert!(compare_cells(&hi[..4], &lo).is_err());
    }

    // Reference values from scipy.stats.mannwhitneyu (two-sided), which uses the
    // same statistic: U = W − n1(n1+1)/2.
    #[test]
    fn exact_small_sample_p_values() {
        // method="exact": U = 21, p = 0.09523809523809523.
        let a = [1.83, 1.5, 1.62, 2.48, 1.68];
        let b = [0.878, 0.647, 0.598, 2.05, 1.06];
        let t = rank_sum_test(&a, &b).unwrap();
        assert_eq!(t.rank_sum - 15.0, 21.0);
        assert!((t.p_value - 0.09523809523809523).abs() < 1e-12, "{}", t.p_value);

        // Fully separated 5 vs 5: p = 2 / C(10, 5).
        let t = rank_sum_test(&[6.0, 7.0, 8.0, 9.0, 10.0], &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert!((t.p_value - 2.0 / 252.0).abs() < 1e-15);
    }

    #[test]
    fn exact_enumeration_matches_brute_force() {
        // Independent oracle: enumerate subsets as bitmasks.
        let a = [0.3, 0.5, 0.5, 0.9, 0.1, 0.7];
        let b = [0.2, 0.5, 0.6, 0.4, 0.8];
        let pooled: Vec<f64> = a.iter().chain(&b).copied().collect();
        let r = midranks(&pooled);
        let n = pooled.len();
        let e = a.len() as f64 * (n as f64 + 1.0) / 2.0;
        let obs = (r[..a.len()].iter().sum::<f64>() - e).abs();
        let (mut hit, mut tot) = (0u32, 0u32);
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != a.len() {
                continue;
            }
            let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| r[i]).sum();
            tot += 1;
            if (s - e).abs() >= obs - 1e-9 {
                hit += 1;
            }
        }
        let t = rank_sum_test(&a, &b).unwrap();
        assert_eq!(t.p_value, hit as f64 / tot as f64);
    }

    #[test]
    fn normal_approximation_p_value() {
        // scipy.stats.mannwhitneyu(a, b, use_continuity=False, method="asymptotic")
        // gives U = 91, p = 0.0019245079425841969; ties present (0.5 and 0.7 twice).
        let a = [0.9, 0.8, 0.85, 0.7, 0.95, 0.6, 0.75, 0.88, 0.5, 0.92];
        let b = [0.4, 0.5, 0.65, 0.3, 0.7, 0.55, 0.45, 0.62, 0.35, 0.58];
        let t = rank_sum_test(&a, &b).unwrap();
        assert!(t.a_greater);
        assert_eq!(t.rank_sum - 55.0, 91.0);
        assert!((t.p_value - 0.0019245079425841969).abs() < 1e-12, "{}", t.p_value);
    }

    #[test]
    fn variance_helpers() {
        assert_eq!(mean(&[1.0, 2.0, 3.0]), 2.0);
        assert_eq!(sample_variance(&[1.0, 2.0, 3.0]), 1.0);
        assert_eq!(sample_variance(&[5.0]), 0.0);
    }
}
