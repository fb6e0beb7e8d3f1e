use alloc::vec::Vec;

/// Euclidean projection of `v` onto `{w : ‖w‖₁ ≤ tau}`.
///
/// Soft-thresholds at the level found by sorting magnitudes; returns `v`
/// itself when it already lies in the ball.
pub fn project_l1_ball(v: &[f64], tau: f64) -> Vec<f64> {
    let norm: f64 = v.iter().map(|x| x.abs()).sum();
    if norm <= tau {
        return v.to_vec();
    }
    if tau <= 0.0 {
        return alloc::vec![0.0; v.len()];
    }
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &m) in mags.iter().enumerate() {
        cumsum += m;
        let t = (cumsum - tau) / (k + 1) as f64;
        if m > t {
            theta = t;
        } else {
            break;
        }
    }
    v.iter()
        .map(|&x| x.signum() * (x.abs() - theta).max(0.0))
        .collect()
}
