//! Variation and selection operators on genomes in `[0, 1]^d`.

use rand::Rng as _;

use super::Genome;
use crate::rng::Rng;

/// SBX spread factor for a uniform draw `u` in `[0, 1)`.
pub fn sbx_beta(u: f64, eta: f64) -> f64 {
    let e = 1.0 / (eta + 1.0);
    if u <= 0.5 {
        (2.0 * u).powf(e)
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(e)
    }
}

/// One SBX gene pair before clamping. The children's midpoint equals the parents'.
pub fn sbx_pair(x1: f64, x2: f64, beta: f64) -> (f64, f64) {
    (
        0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2),
        0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2),
    )
}

/// Simulated binary crossover. Each gene crosses with probability 1/2 and the
/// children swap sides with probability 1/2; results are clamped to `[0, 1]`.
/// Genes on which the parents agree are copied unchanged.
pub fn sbx_crossover(p1: &Genome, p2: &Genome, eta: f64, rng: &mut Rng) -> (Genome, Genome) {
    assert_eq!(p1.len(), p2.len(), "parents must have equal dimension");
    let mut c1 = p1.clone();
    let mut c2 = p2.clone();
    for j in 0..p1.len() {
        let cross = rng.gen_bool(0.5);
        let u: f64 = rng.gen();
        let swap = rng.gen_bool(0.5);
        if !cross || (p1.0[j] - p2.0[j]).abs() <= 1e-14 {
            continue;
        }
        let (a, b) = sbx_pair(p1.0[j], p2.0[j], sbx_beta(u, eta));
        let (a, b) = if swap { (b, a) } else { (a, b) };
        c1.0[j] = a.clamp(0.0, 1.0);
        c2.0[j] = b.clamp(0.0, 1.0);
    }
    (c1, c2)
}

/// Bounded polynomial mutation of a single key in `[0, 1]`.
///
/// A key at 0 can only move up and a key at 1 only down.
pub fn pm_gene(y: f64, u: f64, eta: f64) -> f64 {
    let m = eta + 1.0;
    let dq = if u < 0.5 {
        let xy = 1.0 - y;
        let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(m);
        val.powf(1.0 / m) - 1.0
    } else {
        let xy = y;
        let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(m);
        1.0 - val.powf(1.0 / m)
    };
    (y + dq).clamp(0.0, 1.0)
}

/// Polynomial mutation: each gene mutates independently with probability `prob`.
pub fn pm_mutation(g: &Genome, eta: f64, prob: f64, rng: &mut Rng) -> Genome {
    let mut out = g.clone();
    for k in &mut out.0 {
        if rng.gen_bool(prob) {
            let u: f64 = rng.gen();
            *k = pm_gene(*k, u, eta);
        }
    }
    out
}

/// Binary tournament on `costs` (lower wins, lower index on ties).
pub fn tournament(costs: &[f64], rng: &mut Rng) -> usize {
    let n = costs.len();
    if n == 1 {
        return 0;
    }
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    if costs[b] < costs[a] {
        b
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn identical_parents_give_identical_children() {
        let mut r = rng::seeded(1);
        let p = Genome(vec![0.1, 0.7, 0.0, 1.0]);
        for _ in 0..100 {
            let (a, b) = sbx_crossover(&p, &p, 15.0, &mut r);
            assert_eq!(a, p);
            assert_eq!(b, p);
        }
    }

    #[test]
    fn midpoint_preserved_before_clamping() {
        let mut r = rng::seeded(2);
        for _ in 0..1000 {
            let (x1, x2): (f64, f64) = (r.gen(), r.gen());
            let (c1, c2) = sbx_pair(x1, x2, sbx_beta(r.gen(), 15.0));
            assert!(((c1 + c2) / 2.0 - (x1 + x2) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn children_stay_in_unit_box() {
        let mut r = rng::seeded(3);
        for _ in 0..500 {
            let p1 = Genome::random(6, &mut r);
            let p2 = Genome::random(6, &mut r);
            let (a, b) = sbx_crossover(&p1, &p2, 0.5, &mut r);
            assert!(a.0.iter().chain(&b.0).all(|k| (0.0..=1.0).contains(k)));
        }
    }

    /// Spread factor CDF of SBX: `0.5 b^(η+1)` below 1, `1 - 0.5 b^-(η+1)` above.
    fn beta_cdf(b: f64, eta: f64) -> f64 {
        if b <= 1.0 {
            0.5 * b.powf(eta + 1.0)
        } else {
            1.0 - 0.5 * b.powf(-(eta + 1.0))
        }
    }

    #[test]
    fn spread_matches_reference_distribution() {
        // Parents far from the bounds so clamping never triggers.
        let eta = 15.0;
        let (x1, x2) = (0.45, 0.55);
        let p1 = Genome(vec![x1]);
        let p2 = Genome(vec![x2]);
        let mut r = rng::seeded(4);
        let mut betas = Vec::new();
        while betas.len() < 10_000 {
            let (a, b) = sbx_crossover(&p1, &p2, eta, &mut r);
            if a.0[0] == x1 && b.0[0] == x2 {
                continue; // gene not crossed
            }
            betas.push((b.0[0] - a.0[0]).abs() / (x2 - x1));
        }
        betas.sort_by(f64::total_cmp);
        let n = betas.len() as f64;
        let ks = betas
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let f = beta_cdf(b, eta);
                (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        // 1% critical value of the one-sample KS statistic.
        assert!(ks < 1.63 / n.sqrt(), "KS distance {ks}");
        let near = betas.iter().filter(|&&b| (0.8..1.25).contains(&b)).count() as f64 / n;
        assert!(near > 0.9, "fraction near parents {near}");
    }

    #[test]
    fn zero_probability_leaves_genome_unchanged() {
        let mut r = rng::seeded(5);
        let g = Genome::random(10, &mut r);
        assert_eq!(pm_mutation(&g, 15.0, 0.0, &mut r), g);
    }

    #[test]
    fn boundary_keys_move_inward() {
        let mut r = rng::seeded(6);
        for _ in 0..1000 {
            let u: f64 = r.gen();
            assert!(pm_gene(0.0, u, 15.0) >= 0.0);
            assert!(pm_gene(1.0, u, 15.0) <= 1.0);
        }
        assert!(pm_gene(0.0, 0.9, 15.0) > 0.0);
        assert!(pm_gene(1.0, 0.1, 15.0) < 1.0);
        assert_eq!(pm_gene(0.0, 0.2, 15.0), 0.0);
        assert_eq!(pm_gene(1.0, 0.8, 15.0), 1.0);
    }

    #[test]
    fn perturbation_shrinks_with_eta() {
        let mut r = rng::seeded(7);
        let mean_step = |eta: f64, r: &mut Rng| -> f64 {
            (0..20_000)
                .map(|_| {
                    let y: f64 = r.gen();
                    (pm_gene(y, r.gen(), eta) - y).abs()
                })
                .sum::<f64>()
                / 20_000.0
        };
        let wide = mean_step(15.0, &mut r);
        let narrow = mean_step(100.0, &mut r);
        assert!(narrow < 0.5 * wide, "eta=15: {wide}, eta=100: {narrow}");
    }

    #[test]
    fn tournament_prefers_lower_cost() {
        let mut r = rng::seeded(8);
        let costs = [0.9, 0.1, 0.5];
        let mut wins = [0; 3];
        for _ in 0..3000 {
            wins[tournament(&costs, &mut r)] += 1;
        }
        // Index 1 wins every pairing it takes part in: 2/3 of draws.
        assert!(wins[1] > 1800 && wins[0] == 0, "{wins:?}");
        assert_eq!(tournament(&[3.0], &mut r), 0);
        assert_eq!(tournament(&[1.0, 1.0], &mut r), 0);
    }
}
