//! Receiver DSP: Gardner timing recovery, symbol-rate decimation, Volterra
//! nonlinear equalization, prior-aware decisions, demapping and BER.

mod decision;
mod timing;
mod volterra;

pub use decision::{
    count_ber, decide, decide_and_demap, estimate_level_stats, map_thresholds, map_thresholds_with, BerCount,
    DecisionRule, LevelStats, SigmaModel,
};
pub use timing::{
    downsample_to_1sps, gardner_error, timing_recover, timing_recover_with, Interpolator, TimingConfig, TimingRecovery,
};
pub use volterra::{
    equalize, feature_count, train_volterra, volterra_features, Equalized, TrainMethod, TrainSpec, TrainedVolterra,
    VolterraModel,
};
