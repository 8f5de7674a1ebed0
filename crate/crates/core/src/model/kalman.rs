/// Posterior means and variances of a scalar chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedChain {
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

/// Rauch-Tung-Striebel smoother for the scalar random walk
///
/// ```text
/// x[0] ~ N(init_mean, init_var)
/// x[t] = x[t-1] + N(0, step_var)
/// y[t] = x[t] + N(0, obs_var[t])
/// ```
///
/// An infinite observation variance marks a missing observation.
pub fn smooth_random_walk(
    obs: &[f64],
    obs_var: &[f64],
    step_var: f64,
    init_mean: f64,
    init_var: f64,
) -> SmoothedChain {
    let n = obs.len();
    debug_assert_eq!(n, obs_var.len());
    let mut filt_mean = Vec::with_capacity(n);
    let mut filt_var = Vec::with_capacity(n);
    let mut pred_var = Vec::with_capacity(n);

    let (mut m, mut p) = (init_mean, init_var);
    for t in 0..n {
        if t > 0 {
            p += step_var;
        }
        pred_var.push(p);
        let r = obs_var[t];
        if r.is_finite() {
            let gain = p / (p + r);
            m += gain * (obs[t] - m);
            p *= 1.0 - gain;
        }
        filt_mean.push(m);
        filt_var.push(p);
    }

    let mut means = filt_mean.clone();
    let mut variances = filt_var.clone();
    for t in (0..n.saturating_sub(1)).rev() {
        let next_pred = pred_var[t + 1];
        let j = if next_pred > 0.0 { filt_var[t] / next_pred } else { 1.0 };
        means[t] = filt_mean[t] + j * (means[t + 1] - filt_mean[t]);
        variances[t] = filt_var[t] + j * j * (variances[t + 1] - next_pred);
    }
    SmoothedChain { means, variances }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense Gaussian posterior for the same model, solved directly.
    fn brute_force_means(obs: &[f64], r: &[f64], q: f64, m0: f64, p0: f64) -> Vec<f64> {
        let n = obs.len();
        // precision matrix and linear term of the log posterior
        let mut prec = vec![vec![0.0; n]; n];
        let mut lin = vec![0.0; n];
        prec[0][0] += 1.0 / p0;
        lin[0] += m0 / p0;
        for t in 1..n {
            prec[t][t] += 1.0 / q;
            prec[t - 1][t - 1] += 1.0 / q;
            prec[t][t - 1] -= 1.0 / q;
            prec[t - 1][t] -= 1.0 / q;
        }
        for t in 0..n {
            prec[t][t] += 1.0 / r[t];
            lin[t] += obs[t] / r[t];
        }
        // Gaussian elimination
        for i in 0..n {
            let piv = prec[i][i];
            for j in i + 1..n {
                let f = prec[j][i] / piv;
                for c in i..n {
                    prec[j][c] -= f * prec[i][c];
                }
                lin[j] -= f * lin[i];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|c| prec[i][c] * x[c]).sum();
            x[i] = (lin[i] - s) / prec[i][i];
        }
        x
    }

    #[test]
    fn matches_dense_posterior() {
        let obs = [1.0, 1.4, 0.7, 2.0, 1.1];
        let r = [0.5, 0.2, 1.0, 0.3, 0.8];
        let s = smooth_random_walk(&obs, &r, 0.1, 0.0, 10.0);
        let dense = brute_force_means(&obs, &r, 0.1, 0.0, 10.0);
        for (a, b) in s.means.iter().zip(dense) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn single_observation_is_precision_weighted() {
        let s = smooth_random_walk(&[4.0], &[1.0], 0.1, 0.0, 1.0);
        assert!((s.means[0] - 2.0).abs() < 1e-15);
        assert!((s.variances[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tiny_step_variance_flattens_chain() {
        let obs = [0.0, 1.0, 0.0, 1.0];
        let s = smooth_random_walk(&obs, &[1.0; 4], 1e-10, 0.0, 100.0);
        for m in &s.means {
            assert!((m - s.means[0]).abs() < 1e-6);
        }
    }

    #[test]
    fn missing_observations_interpolate() {
        let s = smooth_random_walk(&[0.0, 0.0, 2.0], &[1e-9, f64::INFINITY, 1e-9], 1.0, 0.0, 100.0);
        assert!((s.means[1] - 1.0).abs() < 1e-6);
    }
}
