//! Success probabilities, time-to-solution curves, exponential first-passage
//! fits and exponential scaling fits.

pub mod bootstrap;
pub mod curve;
pub mod empirical;
pub mod exponential;
pub mod posterior;
pub mod quantile;
pub mod scaling;
pub mod tts;

/// Serde for values on `[−∞, +∞]` minus NaN where only `+∞` occurs as a
/// non-finite value: written as `null`, read back as `+∞`.
pub mod ext_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

pub use bootstrap::{bootstrap_tts, BootstrapEstimate, DEFAULT_RESAMPLES};
pub use curve::{opt_tts, tts_curve, OptTts, TtsCurve, TtsPoint};
pub use empirical::{success_counts_at, FirstPassageEmpirical};
pub use exponential::{exponential_tau, ExponentialFit};
pub use posterior::SuccessPosterior;
pub use quantile::{quantile, quantile_sorted};
pub use scaling::{scaling_fit, ScalingFit, ScalingPoint, WindowPolicy};
pub use tts::{repetitions, tts_point, TARGET_PROBABILITY};
