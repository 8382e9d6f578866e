/// Metropolis acceptance `min(1, e^{-β ΔE})`.
#[inline]
pub fn metropolis_flip_prob(delta_e: f64, beta: f64) -> f64 {
    if delta_e <= 0.0 {
        1.0
    } else {
        (-beta * delta_e).exp()
    }
}

/// Replica-exchange acceptance `min(1, e^{Δβ ΔE})` with `Δβ = β_a - β_b`
/// and `ΔE = E_a - E_b`.
#[inline]
pub fn swap_accept_prob(delta_beta: f64, delta_e: f64) -> f64 {
    let x = delta_beta * delta_e;
    if x >= 0.0 {
        1.0
    } else {
        x.exp()
    }
}
