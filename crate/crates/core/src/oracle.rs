//! Independent reference computations used by the self-check and tests.
//!
//! Nothing here calls into the closed forms it is meant to check: zero
//! crossings come from scanning and bisection, k-means optima from
//! exhaustive enumeration of partitions.

/// Every sign change of `f` on `(lo, hi)`, located by scanning `steps`
/// equal intervals and bisecting each bracket down to machine precision.
pub fn sign_changes(f: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let h = (hi - lo) / steps as f64;
    let mut roots = Vec::new();
    let mut prev_x = lo + h * 1e-3;
    let mut prev_f = f(prev_x);
    for i in 1..=steps {
        let x = if i == steps { hi - h * 1e-3 } else { lo + h * i as f64 };
        let fx = f(x);
        if fx == 0.0 {
            continue;
        }
        if prev_f != 0.0 && (prev_f < 0.0) != (fx < 0.0) {
            roots.push(bisect(&f, prev_x, x));
        }
        prev_x = x;
        prev_f = fx;
    }
    roots
}

pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa_neg = f(a) < 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == fa_neg {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Minimum within-cluster sum of squares over every partition of `points`
/// into at most `k` groups. Exponential; meant for about ten points.
pub fn optimal_partition_inertia(points: &[Vec<f64>], k: usize) -> f64 {
    fn sse(points: &[Vec<f64>], members: &[usize]) -> f64 {
        if members.is_empty() {
            return 0.0;
        }
        let dim = points[members[0]].len();
        let n = members.len() as f64;
        let mut mean = vec![0.0; dim];
        for &m in members {
            for (acc, v) in mean.iter_mut().zip(&points[m]) {
                *acc += v;
            }
        }
        for v in &mut mean {
            *v /= n;
        }
        members
            .iter()
            .map(|&m| points[m].iter().zip(&mean).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
            .sum()
    }

    fn recurse(points: &[Vec<f64>], k: usize, labels: &mut Vec<usize>, used: usize, best: &mut f64) {
        if labels.len() == points.len() {
            let total: f64 = (0..used)
                .map(|g| {
                    let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == g).collect();
                    sse(points, &members)
                })
                .sum();
            if total < *best {
                *best = total;
            }
            return;
        }
        // restricted growth strings: each partition is visited once
        for g in 0..(used + 1).min(k) {
            labels.push(g);
            recurse(points, k, labels, used.max(g + 1), best);
            labels.pop();
        }
    }

    let mut best = f64::INFINITY;
    recurse(points, k, &mut Vec::with_capacity(points.len()), 0, &mut best);
    best
}

/// Kolmogorov–Smirnov statistic of `samples` against Uniform[lo, hi].
pub fn ks_uniform_statistic(samples: &[f64], lo: f64, hi: f64) -> f64 {
    let mut sorted: Vec<f64> = samples.iter().map(|x| ((x - lo) / (hi - lo)).clamp(0.0, 1.0)).collect();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let above = (i + 1) as f64 / n - u;
            let below = u - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic one-sample KS critical value `sqrt(-ln(α/2)/2) / sqrt(n)`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}
