//! Named verification checks over a full system.
//!
//! Each check compares a numerically applied identity against its algebraic
//! prediction and reports `(name, residual, threshold, pass)`. The CLI
//! `verify` subcommand serializes these records; the acceptance tests rerun
//! the same machinery at their own pinned tolerances.

use num_complex::Complex64;

use crate::aux::{default_ic, wronskian_scan_tm};
use crate::error::Result;
use crate::operators::{
    casimir_residual, commutator_check, ladder_action_residual, number_eigen_residual,
    schrodinger_residual, squeeze_eigen_check, CommutatorPair, LadderDirection,
};
use crate::profile::SystemSpec;
use crate::propagator::{propagate_against_analytic, PropagatorConfig};
use crate::states::{self, StateLabel};
use crate::system::System;
use crate::wave::{inner_product, l2_distance, Frame};

/// One named check outcome.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRecord {
    fn new(name: impl Into<String>, residual: f64, threshold: f64) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            residual,
            threshold,
            pass: residual.is_finite() && residual <= threshold,
        }
    }
}

/// Options for [`run_verification`].
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// TM end time; defaults to three natural periods past `t0`.
    pub t_end: Option<f64>,
    /// Include the (slower) Crank-Nicolson oracle comparison.
    pub with_oracle: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            t_end: None,
            with_oracle: true,
        }
    }
}

const FRAMES: [Frame; 3] = [Frame::To, Frame::Tm, Frame::Tq];

/// Worst nodewise defect of `i xi = phi3 xi_dot - (1/2) phi3_dot xi`.
fn closure_residual(aux: &crate::aux::AuxSolution) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..aux.node_count() {
        let (_, xi, xi_dot, _) = aux.node(i);
        let phi3 = 2.0 * xi.norm_sqr();
        let phi3_dot = 4.0 * (xi_dot * xi.conj()).re;
        worst = worst.max((Complex64::i() * xi - (phi3 * xi_dot - 0.5 * phi3_dot * xi)).norm());
    }
    worst
}

/// Run the identity suite for `spec` and return one record per check.
pub fn run_verification(spec: &SystemSpec, options: &VerifyOptions) -> Result<Vec<CheckRecord>> {
    let probe_end = (spec.t0 + 1.0).min(spec.domain().1);
    let probe = System::prepare(spec.clone(), probe_end)?;
    let period = probe.natural_period();
    let explicit_span = options.t_end.is_some();
    let mut t_end = options.t_end.unwrap_or(spec.t0 + 3.0 * period);
    let (dom_lo, dom_hi) = spec.domain();
    t_end = t_end.min(dom_hi);
    if !(t_end > spec.t0 && t_end <= dom_hi && spec.t0 >= dom_lo) {
        return Err(crate::error::Error::Invalid {
            what: "verification span",
            why: format!("t_end = {t_end} incompatible with domain [{dom_lo}, {dom_hi}]"),
        });
    }
    // Exponentially growing solutions push the cancellation floor of the
    // absolute 1e-9 identities past budget on long spans; shrink a
    // defaulted span until the health indicators clear it comfortably.
    // An explicit span is used verbatim and fails honestly instead.
    let system = loop {
        let can_shrink = !explicit_span && t_end > spec.t0 + 0.2 * period;
        match System::prepare(spec.clone(), t_end) {
            Ok(s) => {
                let health = s.aux.max_wronskian_drift().max(closure_residual(&s.aux));
                if health > 5e-10 && can_shrink {
                    t_end = spec.t0 + 0.5 * (t_end - spec.t0);
                } else {
                    break s;
                }
            }
            Err(e) if can_shrink && e.is_numerical() => {
                t_end = spec.t0 + 0.5 * (t_end - spec.t0);
            }
            Err(e) => return Err(e),
        }
    };
    let probe_omega0 = system.omega0();
    let mut checks = Vec::new();

    // Auxiliary solution health.
    checks.push(CheckRecord::new(
        "wronskian_drift_to_clock",
        system.aux.max_wronskian_drift(),
        1e-9,
    ));
    match wronskian_scan_tm(spec, t_end, &default_ic(spec.g2_at_t(spec.t0)?)) {
        Ok(scan) => checks.push(CheckRecord::new(
            "wronskian_drift_tm_clock",
            scan.max_drift,
            1e-9,
        )),
        // The scan monitors and fails on drift; record the violation as a
        // failed check instead of aborting the report.
        Err(crate::error::Error::Accuracy { value, .. }) => {
            checks.push(CheckRecord::new("wronskian_drift_tm_clock", value, 1e-9))
        }
        Err(e) => return Err(e),
    }

    // Closure identity i xi = phi3 xi_dot - (1/2) phi3_dot xi at every node.
    checks.push(CheckRecord::new(
        "oscillator_closure_identity",
        closure_residual(&system.aux),
        1e-9,
    ));

    // Time-map roundtrip, in the contract direction forward(inverse(y)) = y:
    // the t'-space identity stays well-conditioned even where the map
    // saturates and t-space resolution is lost to quantization.
    let (t_lo, t_hi) = system.map.t_range();
    let span = t_hi - t_lo;
    let (tp_lo, tp_hi) = system.map.tprime_range();
    let tp_span = tp_hi - tp_lo;
    let mut roundtrip: f64 = 0.0;
    for k in 0..200 {
        let y = tp_lo + tp_span * (k as f64 * 0.618_033_988_749_894_9).fract();
        let again = system.map.forward(system.map.inverse(y)?)?;
        roundtrip = roundtrip.max((again - y).abs());
    }
    checks.push(CheckRecord::new(
        "timemap_roundtrip",
        roundtrip,
        1e-10 * tp_span.max(1.0),
    ));

    // Representative evaluation times, taken as a fraction of each frame's
    // own clock span (the image of a TM time can sit arbitrarily deep in a
    // saturating TO clock), and capped where the packet scale has doubled:
    // ballistic spreading grows the chirp-resolution product past a fixed
    // grid budget. Time-stencil widths scale with the local frequency of
    // each check point.
    let mut tp_check = tp_lo + 0.4 * tp_span;
    {
        let w0 = system.aux.phi(tp_lo)?.phi3.sqrt();
        for k in 1..=128 {
            let tau = tp_lo + (tp_check - tp_lo) * k as f64 / 128.0;
            if system.aux.phi(tau)?.phi3.sqrt() > 2.0 * w0 {
                tp_check = tau;
                break;
            }
        }
    }
    let mut t_tm = t_lo + 0.4 * span;
    {
        let w0 = system.aux.hatted(&system.map, t_lo)?.phi.phi3.sqrt();
        for k in 1..=128 {
            let tau = t_lo + (t_tm - t_lo) * k as f64 / 128.0;
            if system.aux.hatted(&system.map, tau)?.phi.phi3.sqrt() > 2.0 * w0 {
                t_tm = tau;
                break;
            }
        }
    }
    let frame_time = |frame: Frame| -> f64 {
        match frame {
            Frame::To => tp_check,
            _ => t_tm,
        }
    };
    let omega0 = probe_omega0;
    let omega_loc = {
        let g2 = spec.g2_of_tprime(&system.map, tp_check)?;
        if g2 > 0.0 {
            (2.0 * g2).sqrt().max(omega0)
        } else {
            omega0
        }
    };
    let frame_delta = |frame: Frame, factor: f64| -> f64 {
        match frame {
            Frame::To => factor * 2.0 * std::f64::consts::PI / omega_loc,
            _ => factor * period,
        }
    };
    let grid_n = 4097;

    // Representation identities.
    for frame in FRAMES {
        let t = frame_time(frame);
        let delta = frame_delta(frame, 1e-5);
        let grid = states::auto_grid(&system, frame, &StateLabel::Number { n: 5 }, t, grid_n)?;
        checks.push(CheckRecord::new(
            format!("annihilation_{frame}"),
            ladder_action_residual(&system, frame, LadderDirection::Lower, 0, t, grid)?,
            1e-6,
        ));
        let mut worst: f64 = 0.0;
        for n in 0..=4 {
            worst = worst.max(ladder_action_residual(
                &system,
                frame,
                LadderDirection::Raise,
                n,
                t,
                grid,
            )?);
            if n > 0 {
                worst = worst.max(ladder_action_residual(
                    &system,
                    frame,
                    LadderDirection::Lower,
                    n,
                    t,
                    grid,
                )?);
            }
        }
        checks.push(CheckRecord::new(
            format!("ladder_action_{frame}"),
            worst,
            1e-5,
        ));
        let mut worst: f64 = 0.0;
        for n in [0usize, 3] {
            worst = worst.max(number_eigen_residual(&system, frame, n, t, grid, delta)?);
        }
        checks.push(CheckRecord::new(
            format!("number_eigenvalue_{frame}"),
            worst,
            1e-5,
        ));
        checks.push(CheckRecord::new(
            format!("casimir_{frame}"),
            casimir_residual(&system, frame, 2, t, grid, delta)?,
            1e-5,
        ));
    }

    // Commutator closure on a displaced probe, TO and TQ frames.
    for frame in [Frame::To, Frame::Tq] {
        let t = frame_time(frame);
        let delta = frame_delta(frame, 1e-5);
        let label = StateLabel::Coherent { x0: 0.9, p0: -0.4 };
        let grid = states::auto_grid(&system, frame, &label, t, grid_n)?;
        let generator = |tau: f64| states::state(&system, frame, &label, tau, grid);
        checks.push(CheckRecord::new(
            format!("commutator_lower_raise_{frame}"),
            commutator_check(
                &system,
                frame,
                CommutatorPair::LowerRaise,
                generator,
                t,
                delta,
            )?,
            1e-5,
        ));
        let worst = commutator_check(
            &system,
            frame,
            CommutatorPair::NumberRaise,
            generator,
            t,
            delta,
        )?
        .max(commutator_check(
            &system,
            frame,
            CommutatorPair::NumberLower,
            generator,
            t,
            delta,
        )?);
        checks.push(CheckRecord::new(
            format!("commutator_number_{frame}"),
            worst,
            1e-4,
        ));
    }

    // Schrodinger residuals for all state kinds in all frames.
    let labels = [
        StateLabel::Number { n: 2 },
        StateLabel::Coherent { x0: 1.0, p0: 0.5 },
        StateLabel::Squeezed {
            x0: 1.0,
            p0: 0.5,
            r: 0.5,
            theta: std::f64::consts::FRAC_PI_3,
        },
    ];
    // Local frequencies can exceed the origin frequency; keep the temporal
    // stencil error well below the spatial one.
    for frame in FRAMES {
        let t = frame_time(frame);
        let delta_res = frame_delta(frame, 1e-6);
        let mut worst: f64 = 0.0;
        for label in &labels {
            let grid = states::auto_grid(&system, frame, label, t, grid_n)?;
            worst = worst.max(schrodinger_residual(
                &system, frame, label, t, grid, delta_res,
            )?);
        }
        checks.push(CheckRecord::new(
            format!("schrodinger_residual_{frame}"),
            worst,
            1e-5,
        ));
    }

    // Squeezed-state eigenvalue equation.
    {
        let t = frame_time(Frame::To);
        let label = StateLabel::Squeezed {
            x0: 1.0,
            p0: 0.5,
            r: 0.5,
            theta: std::f64::consts::FRAC_PI_3,
        };
        let grid = states::auto_grid(&system, Frame::To, &label, t, grid_n)?;
        let worst = squeeze_eigen_check(&system, Frame::To, 1.0, 0.5, 0.0, 0.0, t, grid)?.max(
            squeeze_eigen_check(
                &system,
                Frame::To,
                1.0,
                0.5,
                0.5,
                std::f64::consts::FRAC_PI_3,
                t,
                grid,
            )?,
        );
        checks.push(CheckRecord::new("squeeze_eigen_equation", worst, 1e-5));
    }

    // Structure of the Gaussian coefficients.
    {
        let t = frame_time(Frame::To);
        let mut im_residue: f64 = 0.0;
        let mut xplus_defect: f64 = 0.0;
        let base = states::gaussian_params(
            &system,
            Frame::To,
            &StateLabel::Coherent { x0: 1.0, p0: 0.5 },
            t,
        )?;
        for r in [0.0, 0.5, 1.0] {
            for theta in [0.0, 1.1, 2.7] {
                let p = states::gaussian_params(
                    &system,
                    Frame::To,
                    &StateLabel::Squeezed {
                        x0: 1.0,
                        p0: 0.5,
                        r,
                        theta,
                    },
                    t,
                )?;
                im_residue = im_residue.max(p.im_residue);
                xplus_defect = xplus_defect.max((p.x_plus - base.x_plus).abs());
            }
        }
        checks.push(CheckRecord::new("coefficient_reality", im_residue, 1e-10));
        checks.push(CheckRecord::new(
            "xplus_squeeze_invariance",
            xplus_defect,
            1e-10,
        ));

        let label = StateLabel::Squeezed {
            x0: 1.0,
            p0: 0.5,
            r: 0.5,
            theta: 1.1,
        };
        let eps = frame_delta(Frame::To, 1e-5);
        let qm = states::gaussian_params(&system, Frame::To, &label, t - eps)?.q;
        let qp = states::gaussian_params(&system, Frame::To, &label, t + eps)?.q;
        let p = states::gaussian_params(&system, Frame::To, &label, t)?;
        checks.push(CheckRecord::new(
            "r_equals_q_dot",
            ((qp - qm) / (2.0 * eps) - p.r).abs(),
            1e-6,
        ));
    }

    // Normalization, orthogonality, coherent overlap.
    {
        let t = frame_time(Frame::To);
        let grid = states::auto_grid(&system, Frame::To, &StateLabel::Number { n: 4 }, t, 2049)?;
        let mut norm_defect: f64 = 0.0;
        let mut ortho: f64 = 0.0;
        let mut waves = Vec::new();
        for n in 0..=4 {
            let w = states::number_state(&system, Frame::To, n, t, grid)?;
            norm_defect = norm_defect.max((w.norm() - 1.0).abs());
            waves.push(w);
        }
        for m in 0..waves.len() {
            for n in 0..m {
                ortho = ortho.max(inner_product(&waves[m], &waves[n])?.norm());
            }
        }
        checks.push(CheckRecord::new(
            "number_state_normalization",
            norm_defect,
            1e-8,
        ));
        checks.push(CheckRecord::new("number_state_orthogonality", ortho, 1e-8));

        let t0p = system.t0_prime();
        let grid0 = states::auto_grid(
            &system,
            Frame::To,
            &StateLabel::Coherent { x0: 1.0, p0: 0.5 },
            t0p,
            2049,
        )?;
        let alpha = states::alpha_from_phase_space(&system, Frame::To, 1.0, 0.5)?;
        let coherent = states::coherent_state(&system, Frame::To, 1.0, 0.5, t0p, grid0)?;
        let ground = states::number_state(&system, Frame::To, 0, t0p, grid0)?;
        let overlap = inner_product(&coherent, &ground)?.norm();
        checks.push(CheckRecord::new(
            "coherent_ground_overlap",
            (overlap - (-0.5 * alpha.norm_sqr()).exp()).abs(),
            1e-6,
        ));
    }

    // TQ dilation route against the direct formula.
    {
        let t = frame_time(Frame::Tq);
        let label = StateLabel::Squeezed {
            x0: 0.8,
            p0: 0.3,
            r: 0.5,
            theta: 0.7,
        };
        let grid = states::auto_grid(&system, Frame::Tq, &label, t, grid_n)?;
        let dilated = states::state(&system, Frame::Tq, &label, t, grid)?;
        let direct = states::tq_state_direct(&system, &label, t, grid)?;
        checks.push(CheckRecord::new(
            "tq_dilation_vs_direct",
            l2_distance(&dilated, &direct)?,
            1e-9,
        ));
    }

    // Short Crank-Nicolson oracle comparison. The horizon is budgeted:
    // strong width drift or stiffness growth blows up the second-order
    // spatial error at the fixed point count, so the run is cut where the
    // packet leaves its initial scale.
    if options.with_oracle {
        let label = StateLabel::Coherent { x0: 1.0, p0: 0.5 };
        let t0p = system.t0_prime();
        let full = (t0p + period).min(system.map.tprime_range().1);
        let w0 = {
            let p = states::gaussian_params(&system, Frame::To, &label, t0p)?;
            (2.0 * p.q).sqrt()
        };
        let g2_ref = spec
            .g2_of_tprime(&system.map, t0p)?
            .abs()
            .max(0.5 * omega0 * omega0);
        let mut horizon = full;
        let samples = 256;
        for k in 1..=samples {
            let tau = t0p + (full - t0p) * k as f64 / samples as f64;
            let p = states::gaussian_params(&system, Frame::To, &label, tau)?;
            let w = (2.0 * p.q).sqrt();
            let g2 = spec.g2_of_tprime(&system.map, tau)?.abs();
            if !(0.8 * w0..=1.25 * w0).contains(&w) || g2 > 4.0 * g2_ref {
                horizon = tau.max(t0p + 0.05 * period);
                break;
            }
        }
        let grid = crate::propagator::grid_covering_span(
            &system,
            Frame::To,
            &label,
            (t0p, horizon),
            2049,
        )?;
        let dt = (2e-4_f64).min(0.08 * grid.dx());
        let cfg = PropagatorConfig::new(Frame::To, grid, dt, horizon);
        let cmp = propagate_against_analytic(&system, &cfg, &label, t0p)?;
        checks.push(CheckRecord::new("crank_nicolson_oracle", cmp.l2, 1e-4));
        checks.push(CheckRecord::new(
            "crank_nicolson_norm_drift",
            cmp.norm_drift,
            1e-8,
        ));
    }

    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::TimeProfile;

    #[test]
    fn harmonic_suite_passes_every_check() {
        let spec =
            SystemSpec::new(TimeProfile::constant(0.0), TimeProfile::constant(0.5), 0.0).unwrap();
        let checks = run_verification(&spec, &VerifyOptions::default()).unwrap();
        assert!(checks.len() > 20);
        for c in &checks {
            assert!(
                c.pass,
                "check {} failed: {:.3e} > {:.3e}",
                c.name, c.residual, c.threshold
            );
        }
    }

    #[test]
    fn free_particle_suite_passes_every_check() {
        let spec =
            SystemSpec::new(TimeProfile::constant(0.0), TimeProfile::constant(0.0), 0.0).unwrap();
        let checks = run_verification(&spec, &VerifyOptions::default()).unwrap();
        for c in &checks {
            assert!(
                c.pass,
                "check {} failed: {:.3e} > {:.3e}",
                c.name, c.residual, c.threshold
            );
        }
    }

    #[test]
    fn inverted_potential_suite_passes_at_moderate_span() {
        let spec =
            SystemSpec::new(TimeProfile::constant(0.0), TimeProfile::constant(-0.3), 0.0).unwrap();
        let options = VerifyOptions {
            t_end: Some(3.0),
            with_oracle: true,
        };
        let checks = run_verification(&spec, &options).unwrap();
        for c in &checks {
            assert!(
                c.pass,
                "check {} failed: {:.3e} > {:.3e}",
                c.name, c.residual, c.threshold
            );
        }
    }

    #[test]
    fn caldirola_kanai_suite_passes_identity_checks() {
        let spec = SystemSpec::new(
            TimeProfile::linear(0.5, 0.0),
            TimeProfile::constant(0.5),
            0.0,
        )
        .unwrap();
        let options = VerifyOptions {
            t_end: Some(2.5),
            with_oracle: true,
        };
        let checks = run_verification(&spec, &options).unwrap();
        for c in &checks {
            assert!(
                c.pass,
                "check {} failed: {:.3e} > {:.3e}",
                c.name, c.residual, c.threshold
            );
        }
    }
}
