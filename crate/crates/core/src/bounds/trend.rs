//! Shape statistics for comparing a residual curve with its bound.

/// `log₁₀ v_k − log₁₀ v_{k+1}` over consecutive positive entries.
pub fn log_decrements(values: &[f64]) -> Vec<f64> {
    values
        .windows(2)
        .take_while(|w| w[0] > 0.0 && w[1] > 0.0)
        .map(|w| w[0].log10() - w[1].log10())
        .collect()
}

/// `log₁₀ v_{k+1} − 2 log₁₀ v_k + log₁₀ v_{k−1}`; negative values mean the
/// curve bends downward on a log scale.
pub fn log_second_differences(values: &[f64]) -> Vec<f64> {
    let logs: Vec<f64> = values
        .iter()
        .take_while(|&&v| v > 0.0)
        .map(|v| v.log10())
        .collect();
    logs.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect()
}

/// Kendall's tau-b between two equally long samples; `None` when either
/// sample is constant or shorter than two.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len().min(y.len());
    let (mut concordant, mut discordant) = (0i64, 0i64);
    let (mut ties_x, mut ties_y) = (0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            match (dx == 0.0, dy == 0.0) {
                (true, true) => {}
                (true, false) => ties_x += 1,
                (false, true) => ties_y += 1,
                (false, false) => {
                    if (dx > 0.0) == (dy > 0.0) {
                        concordant += 1;
                    } else {
                        discordant += 1;
                    }
                }
            }
        }
    }
    let base = concordant + discordant;
    let denom = (((base + ties_x) * (base + ties_y)) as f64).sqrt();
    if denom == 0.0 {
        None
    } else {
        Some((concordant - discordant) as f64 / denom)
    }
}
