//! Shared fixtures for the kernel benchmarks.

use tdosc_core::{System, SystemSpec, TimeProfile};

/// Modulated-stiffness system over a multi-period span.
pub fn modulated_system(t_end: f64) -> System {
    let spec = SystemSpec::new(
        TimeProfile::constant(0.0),
        TimeProfile::sinusoidal(0.5, 0.1, 1.0, 0.0),
        0.0,
    )
    .unwrap();
    System::prepare(spec, t_end).unwrap()
}

/// Caldirola-Kanai system (exponential gauge).
pub fn ck_system(t_end: f64) -> System {
    let spec = SystemSpec::new(
        TimeProfile::linear(0.5, 0.0),
        TimeProfile::constant(0.5),
        0.0,
    )
    .unwrap();
    System::prepare(spec, t_end).unwrap()
}
