//! Deterministic inputs shared by the engine benchmarks.

use ecsent_core::two_branch::TwoBranchDescriptor;
use ecsent_core::{BranchState, C64};

/// `|a>^{(x)N} - |-a>^{(x)N}`, unnormalized.
pub fn ecs_pm(alpha: f64, modes: usize) -> BranchState {
    let a = C64::new(alpha, 0.0);
    BranchState::new(modes, vec![(C64::new(1.0, 0.0), vec![a; modes]), (C64::new(-1.0, 0.0), vec![-a; modes])])
        .expect("two branches on at least one mode")
}

/// Descriptors spread over coefficient phases and overlap magnitudes.
pub fn descriptors(count: usize) -> Vec<TwoBranchDescriptor> {
    (0..count)
        .map(|k| {
            let t = k as f64 + 1.0;
            let mu = C64::from_polar(1.0 + (0.3 * t).sin().abs(), 0.7 * t);
            let nu = C64::from_polar(0.5 + (0.11 * t).cos().abs(), -1.3 * t);
            let p1 = C64::from_polar(0.95 * (0.17 * t).sin().abs(), 2.1 * t);
            let p2 = C64::from_polar(0.95 * (0.23 * t).cos().abs(), 0.4 * t);
            TwoBranchDescriptor::new(mu, nu, p1, p2).expect("finite descriptor")
        })
        .collect()
}
