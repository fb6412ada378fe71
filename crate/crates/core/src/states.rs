//! Exact number, coherent, and squeezed state wavefunctions in all frames.
//!
//! Every state here is one instance of a single Gaussian template
//!
//! ```text
//! psi(x) = norm * root * H_n(x / sqrt(2Q))
//!          * exp(-(x - X+)^2 / 4Q)
//!          * exp(i [ (R/4Q) x^2 + (X-/2Q)(x - X+/2) ])
//! ```
//!
//! with frame- and label-specific coefficients built from the auxiliary
//! solution. TO and TM differ only by the clock composition; TQ values are
//! produced by the dilation `Phi(x,t) = e^{-nu/2} Theta(x e^{-nu}, t)`, and
//! a direct evaluation from the scaled coefficients is kept as an
//! independent cross-check of that unitary map.
//!
//! Quartic roots such as `(conj(xi)/xi)^{1/4}` are multivalued; they are
//! evaluated from the unwrapped phase carried by the auxiliary solution,
//! never from principal-branch powers.

use num_complex::Complex64;

use crate::aux::PhiValues;
use crate::error::{Error, Result};
use crate::numerics::hermite;
use crate::system::System;
use crate::wave::{Frame, SpatialGrid, WaveSample};

/// Phase-space label of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateLabel {
    Number {
        n: usize,
    },
    Coherent {
        x0: f64,
        p0: f64,
    },
    Squeezed {
        x0: f64,
        p0: f64,
        r: f64,
        theta: f64,
    },
}

impl StateLabel {
    pub fn validate(&self) -> Result<()> {
        if let StateLabel::Squeezed { r, .. } = self {
            if *r < 0.0 || !r.is_finite() {
                return Err(Error::Invalid {
                    what: "state label",
                    why: format!("squeeze modulus must be >= 0, got {r}"),
                });
            }
        }
        Ok(())
    }

    fn hermite_order(&self) -> usize {
        match self {
            StateLabel::Number { n } => *n,
            _ => 0,
        }
    }

    fn squeeze(&self) -> (f64, f64) {
        match self {
            StateLabel::Squeezed { r, theta, .. } => (*r, *theta),
            _ => (0.0, 0.0),
        }
    }

    fn phase_space(&self) -> Option<(f64, f64)> {
        match self {
            StateLabel::Number { .. } => None,
            StateLabel::Coherent { x0, p0 } => Some((*x0, *p0)),
            StateLabel::Squeezed { x0, p0, .. } => Some((*x0, *p0)),
        }
    }
}

/// Canonical Gaussian coefficients shared by all state/frame combinations.
#[derive(Debug, Clone, Copy)]
pub struct GaussianParams {
    pub frame: Frame,
    pub time: f64,
    /// Squared-width scale; `2Q = phi_3` at zero squeeze.
    pub q: f64,
    /// Its TO-clock time derivative (`R = dQ/dt'` composed with the clock).
    pub r: f64,
    /// Packet center.
    pub x_plus: f64,
    /// Momentum-like phase shift.
    pub x_minus: f64,
    /// Unit-modulus quartic-root prefactor, from the unwrapped phase.
    pub phase_root: Complex64,
    /// Real positive normalization, `(2 pi Q)^{-1/4} (2^n n!)^{-1/2}`.
    pub norm: f64,
    /// Hermite order (zero for coherent and squeezed states).
    pub n: usize,
    /// Largest imaginary part discarded when realizing Q, R, X+, X-, Y-.
    pub im_residue: f64,
}

impl GaussianParams {
    /// Evaluate the Gaussian template at `x`.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        let u = x / (2.0 * self.q).sqrt();
        let herm = hermite(self.n, u);
        let gauss = (-(x - self.x_plus) * (x - self.x_plus) / (4.0 * self.q)).exp();
        let phase = self.r / (4.0 * self.q) * x * x
            + self.x_minus / (2.0 * self.q) * (x - 0.5 * self.x_plus);
        self.phase_root * (self.norm * herm * gauss) * Complex64::from_polar(1.0, phase)
    }
}

/// Frame-resolved auxiliary data at one time.
struct FrameData {
    xi: Complex64,
    theta: f64,
    phi: PhiValues,
    /// nu(t) for TM/TQ clocks, 0 in the TO frame.
    nu: f64,
}

fn frame_data(system: &System, frame: Frame, t: f64) -> Result<FrameData> {
    match frame {
        Frame::To => {
            let s = system.aux.sample(t)?;
            Ok(FrameData {
                xi: s.xi,
                theta: s.theta,
                phi: system.aux.phi(t)?,
                nu: 0.0,
            })
        }
        Frame::Tm | Frame::Tq => {
            let hat = system.aux.hatted(&system.map, t)?;
            Ok(FrameData {
                xi: hat.xi,
                theta: hat.theta,
                phi: hat.phi,
                nu: system.spec.nu_at(t)?,
            })
        }
    }
}

/// Coherent amplitude `alpha = i (G_P^0 p0 - G_X^0 x0)` per frame.
///
/// TO and TM share the initial auxiliary values; the TQ column carries the
/// `e^{+-nu(t0)}` dilation factors (which vanish in the default gauge where
/// `nu(t0) = 0`).
pub fn alpha_from_phase_space(
    system: &System,
    frame: Frame,
    x0: f64,
    p0: f64,
) -> Result<Complex64> {
    let origin = system.aux.sample(system.t0_prime())?;
    let (gp0, gx0) = match frame {
        Frame::To | Frame::Tm => (origin.xi, origin.xi_dot),
        Frame::Tq => {
            let nu0 = system.spec.nu_at(system.spec.t0)?;
            (origin.xi * nu0.exp(), origin.xi_dot * (-nu0).exp())
        }
    };
    Ok(Complex64::i() * (gp0 * p0 - gx0 * x0))
}

/// Build the Gaussian coefficients for `label` in `frame` at time `t`.
///
/// For the TQ frame the returned coefficients are the scaled (direct)
/// ones: `Q -> e^{2 nu} Q`, `X+- -> e^{nu} X+-`, `R` unchanged.
pub fn gaussian_params(
    system: &System,
    frame: Frame,
    label: &StateLabel,
    t: f64,
) -> Result<GaussianParams> {
    let mut p = tm_style_params(system, frame, label, t)?;
    if frame == Frame::Tq {
        apply_tq_scaling(&mut p, system.spec.nu_at(t)?);
    }
    Ok(p)
}

/// Coefficients before the TQ dilation scaling (the composition values that
/// enter `Theta`-hat). For TO/TM these are the final coefficients.
fn tm_style_params(
    system: &System,
    frame: Frame,
    label: &StateLabel,
    t: f64,
) -> Result<GaussianParams> {
    label.validate()?;
    let data = frame_data(system, frame, t)?;
    let (r_sq, theta_z) = label.squeeze();
    let n = label.hermite_order();
    let (cosh2r, sinh2r) = ((2.0 * r_sq).cosh(), (2.0 * r_sq).sinh());
    let e_minus_itheta = Complex64::from_polar(1.0, -theta_z);

    // Q and R as the explicit conjugate-pair sums; their imaginary parts
    // must cancel and the residue is recorded before truncation.
    let q_c = 0.5
        * (data.phi.phi3 * cosh2r
            + (data.phi.phi1 * e_minus_itheta + data.phi.phi2 * e_minus_itheta.conj()) * sinh2r);
    let r_c = 0.5
        * (data.phi.phi3_dot * cosh2r
            + (data.phi.phi1_dot * e_minus_itheta
                + data.phi.phi1_dot.conj() * e_minus_itheta.conj())
                * sinh2r);
    let mut im_residue = q_c.im.abs().max(r_c.im.abs());

    let (x_plus, x_minus) = match label.phase_space() {
        None => (0.0, 0.0),
        Some((x0, p0)) => {
            let alpha = alpha_from_phase_space(system, frame, x0, p0)?;
            // The TQ center/shift use Xi_P = xi-hat e^{nu}; the scaling is
            // applied afterwards, so alpha pairs with the hatted xi here.
            let xp_c = alpha * data.xi.conj() + alpha.conj() * data.xi;
            let xm_c =
                Complex64::new(0.0, -1.0) * (alpha * data.xi.conj() - alpha.conj() * data.xi);
            let y_c = Complex64::new(0.0, -1.0)
                * (alpha * data.xi * e_minus_itheta
                    - alpha.conj() * data.xi.conj() * e_minus_itheta.conj());
            im_residue = im_residue
                .max(xp_c.im.abs())
                .max(xm_c.im.abs())
                .max(y_c.im.abs());
            (xp_c.re, xm_c.re * cosh2r + y_c.re * sinh2r)
        }
    };

    if im_residue > 1e-10 {
        return Err(Error::Accuracy {
            what: "Gaussian coefficient reality",
            value: im_residue,
            limit: 1e-10,
        });
    }
    let q = q_c.re;
    if !(q > 0.0) {
        return Err(Error::Invalid {
            what: "Gaussian width",
            why: format!("Q = {q} must be positive (Wronskian guarantees it)"),
        });
    }

    // Continuous phase of (xi + e^{i theta} tanh r conj(xi)): the unwrapped
    // theta of xi plus a principal correction that never crosses a branch
    // because |tanh r| < 1.
    let chi = match label {
        StateLabel::Number { n } => (*n as f64 + 0.5) * data.theta,
        _ => {
            let w = Complex64::new(1.0, 0.0)
                + r_sq.tanh() * e_minus_itheta.conj() * (data.xi.conj() / data.xi);
            0.5 * (data.theta + w.arg())
        }
    };

    let norm_fact: f64 = (0..n).fold(1.0, |acc, k| acc * 2.0 * (k + 1) as f64);
    Ok(GaussianParams {
        frame,
        time: t,
        q,
        r: r_c.re,
        x_plus,
        x_minus,
        phase_root: Complex64::from_polar(1.0, -chi),
        norm: (2.0 * std::f64::consts::PI * q).powf(-0.25) / norm_fact.sqrt(),
        n,
        im_residue,
    })
}

fn apply_tq_scaling(p: &mut GaussianParams, nu: f64) {
    p.q *= (2.0 * nu).exp();
    p.x_plus *= nu.exp();
    p.x_minus *= nu.exp();
    p.norm = (2.0 * std::f64::consts::PI * p.q).powf(-0.25)
        / (0..p.n)
            .fold(1.0, |acc, k| acc * 2.0 * (k + 1) as f64)
            .sqrt();
}

/// Evaluate `label` in `frame` at time `t` on `grid`.
///
/// TQ states go through the dilation of the TM state (the unitary map
/// `e^{i nu D}` realized as an exact rescaling of the analytic evaluation).
pub fn state(
    system: &System,
    frame: Frame,
    label: &StateLabel,
    t: f64,
    grid: SpatialGrid,
) -> Result<WaveSample> {
    let values = match frame {
        Frame::To | Frame::Tm => {
            let p = gaussian_params(system, frame, label, t)?;
            grid.points().map(|x| p.evaluate(x)).collect()
        }
        Frame::Tq => {
            let p = tm_style_params(system, frame, label, t)?;
            let nu = system.spec.nu_at(t)?;
            let scale = (-0.5 * nu).exp();
            grid.points()
                .map(|x| scale * p.evaluate(x * (-nu).exp()))
                .collect()
        }
    };
    WaveSample::new(frame, t, grid, values)
}

/// Direct TQ evaluation from the scaled coefficients (cross-check of the
/// dilation route).
pub fn tq_state_direct(
    system: &System,
    label: &StateLabel,
    t: f64,
    grid: SpatialGrid,
) -> Result<WaveSample> {
    let p = gaussian_params(system, Frame::Tq, label, t)?;
    WaveSample::new(
        Frame::Tq,
        t,
        grid,
        grid.points().map(|x| p.evaluate(x)).collect(),
    )
}

/// Number state wavefunction.
pub fn number_state(
    system: &System,
    frame: Frame,
    n: usize,
    t: f64,
    grid: SpatialGrid,
) -> Result<WaveSample> {
    state(system, frame, &StateLabel::Number { n }, t, grid)
}

/// Coherent state with phase-space data `(x0, p0)`.
pub fn coherent_state(
    system: &System,
    frame: Frame,
    x0: f64,
    p0: f64,
    t: f64,
    grid: SpatialGrid,
) -> Result<WaveSample> {
    state(system, frame, &StateLabel::Coherent { x0, p0 }, t, grid)
}

/// Squeezed state with `z = r e^{i theta}`.
#[allow(clippy::too_many_arguments)]
pub fn squeezed_state(
    system: &System,
    frame: Frame,
    x0: f64,
    p0: f64,
    r: f64,
    theta: f64,
    t: f64,
    grid: SpatialGrid,
) -> Result<WaveSample> {
    state(
        system,
        frame,
        &StateLabel::Squeezed { x0, p0, r, theta },
        t,
        grid,
    )
}

/// Resample a TM wave into the TQ frame: `e^{-nu/2} Theta(x e^{-nu}, t)`.
///
/// Uses 6-point local Lagrange interpolation on the uniform source grid;
/// rescaled abscissae must stay inside it.
pub fn dilation_transform(wave: &WaveSample, nu_at_t: f64) -> Result<WaveSample> {
    if wave.frame != Frame::Tm {
        return Err(Error::Invalid {
            what: "dilation input",
            why: format!("expected a TM-frame sample, got {}", wave.frame),
        });
    }
    let scale = (-nu_at_t).exp();
    let amp = (-0.5 * nu_at_t).exp();
    let (xmin, xmax) = wave.grid.bounds();
    let n = wave.grid.len();
    let dx = wave.grid.dx();
    let mut values = Vec::with_capacity(n);
    for x in wave.grid.points() {
        let xs = x * scale;
        if xs < xmin - 1e-12 || xs > xmax + 1e-12 {
            return Err(Error::Coverage(format!(
                "rescaled abscissa {xs} exits the source grid [{xmin}, {xmax}]"
            )));
        }
        let pos = (xs - xmin) / dx;
        let nearest = pos.round() as usize;
        let val = if (pos - nearest as f64).abs() < 1e-12 && nearest < n {
            wave.values[nearest.min(n - 1)]
        } else {
            // 6-point Lagrange stencil clamped to the grid interior.
            let i0 = (pos.floor() as isize - 2).clamp(0, n as isize - 6) as usize;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..6 {
                let xj = i0 + j;
                let mut w = 1.0;
                for k in 0..6 {
                    if k != j {
                        let xk = i0 + k;
                        w *= (pos - xk as f64) / (xj as f64 - xk as f64);
                    }
                }
                acc += w * wave.values[xj];
            }
            acc
        };
        values.push(amp * val);
    }
    WaveSample::new(Frame::Tq, wave.time, wave.grid, values)
}

/// Independent closed form for the constant-frequency oscillator
/// squeezed state (used as a reference in the verification suite).
///
/// Conventions: `t0 = 0`, `xi = (2 omega)^{-1/2} e^{i omega t}`,
/// `alpha` from `(x0, p0)`, `z = r e^{i theta}`.
#[allow(clippy::too_many_arguments)]
pub fn appendix_reference_state(
    omega: f64,
    x0: f64,
    p0: f64,
    r: f64,
    theta: f64,
    x: f64,
    t: f64,
) -> Complex64 {
    let (c2, s2) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let a = c2 + (2.0 * omega * t - theta).cos() * s2;
    let center = p0 / omega * (omega * t).sin() + x0 * (omega * t).cos();
    // Continuous quartic root: factor e^{i omega t} out of the denominator;
    // the leftover arg stays principal because sinh r < cosh r.
    let leftover =
        Complex64::new(r.cosh(), 0.0) + Complex64::from_polar(r.sinh(), -(2.0 * omega * t - theta));
    let chi = omega * t + leftover.arg();
    let root = Complex64::from_polar(1.0, -0.5 * chi);

    let width = (omega / std::f64::consts::PI).powf(0.25) * a.powf(-0.25);
    let gauss = (-0.5 * omega * (x - center) * (x - center) / a).exp();
    let quad_phase = -0.5 * omega * x * x * (2.0 * omega * t - theta).sin() * s2 / a;
    let drift = p0 / omega * ((omega * t).cos() * c2 + (omega * t - theta).cos() * s2)
        - x0 * ((omega * t).sin() * c2 - (omega * t - theta).sin() * s2);
    let lin_phase = omega * (x - 0.5 * center) / a * drift;
    width * gauss * root * Complex64::from_polar(1.0, quad_phase + lin_phase)
}

/// Grid sized to hold the state: the classical turning radius of the
/// Hermite order plus a five-sigma tail, on the larger of the two width
/// scales so both squeeze senses are covered.
pub fn auto_grid(
    system: &System,
    frame: Frame,
    label: &StateLabel,
    t: f64,
    n_points: usize,
) -> Result<SpatialGrid> {
    let p = gaussian_params(system, frame, label, t)?;
    let data = frame_data(system, frame, t)?;
    let phi3_frame = match frame {
        Frame::Tq => data.phi.phi3 * (2.0 * data.nu).exp(),
        _ => data.phi.phi3,
    };
    let sigma = (2.0 * p.q).sqrt().max(phi3_frame.sqrt());
    let extent = sigma * (((2 * p.n + 1) as f64).sqrt() + 5.0);
    SpatialGrid::new(p.x_plus - extent, p.x_plus + extent, n_points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{SystemSpec, TimeProfile};
    use crate::wave::{inner_product, l2_distance};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn harmonic_system(t_end: f64) -> System {
        let spec =
            SystemSpec::new(TimeProfile::constant(0.0), TimeProfile::constant(0.5), 0.0).unwrap();
        System::prepare(spec, t_end).unwrap()
    }

    fn modulated_system(t_end: f64) -> System {
        let spec = SystemSpec::new(
            TimeProfile::constant(0.0),
            TimeProfile::sinusoidal(0.5, 0.1, 1.0, 0.0),
            0.0,
        )
        .unwrap();
        System::prepare(spec, t_end).unwrap()
    }

    fn ck_system(t_end: f64) -> System {
        let spec = SystemSpec::new(
            TimeProfile::linear(0.5, 0.0),
            TimeProfile::constant(0.5),
            0.0,
        )
        .unwrap();
        System::prepare(spec, t_end).unwrap()
    }

    #[test]
    fn alpha_vanishes_at_the_origin_of_phase_space() {
        let sys = harmonic_system(1.0);
        for frame in [Frame::To, Frame::Tm, Frame::Tq] {
            assert_eq!(
                alpha_from_phase_space(&sys, frame, 0.0, 0.0).unwrap(),
                Complex64::new(0.0, 0.0)
            );
        }
    }

    #[test]
    fn alpha_matches_standard_coherent_amplitude() {
        // omega = 1: alpha = (x0 + i p0) / sqrt(2).
        let sys = harmonic_system(1.0);
        let alpha = alpha_from_phase_space(&sys, Frame::To, 1.0, 0.5).unwrap();
        let expected = Complex64::new(1.0, 0.5) / 2.0f64.sqrt();
        assert!((alpha - expected).norm() < 1e-12);
    }

    #[test]
    fn frames_share_alpha_when_nu_vanishes() {
        let sys = modulated_system(2.0);
        let a = alpha_from_phase_space(&sys, Frame::To, 0.7, -0.3).unwrap();
        for frame in [Frame::Tm, Frame::Tq] {
            let b = alpha_from_phase_space(&sys, frame, 0.7, -0.3).unwrap();
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn ground_state_is_the_unit_gaussian_at_t_zero() {
        let sys = harmonic_system(1.0);
        let grid = SpatialGrid::new(-8.0, 8.0, 257).unwrap();
        let w = number_state(&sys, Frame::To, 0, 0.0, grid).unwrap();
        for (i, x) in grid.points().enumerate() {
            let expected = PI.powf(-0.25) * (-0.5 * x * x).exp();
            assert!(
                (w.values[i] - Complex64::new(expected, 0.0)).norm() < 1e-12,
                "defect at x = {x}"
            );
        }
        assert_relative_eq!(w.values[128].re, PI.powf(-0.25), epsilon = 1e-12);
    }

    #[test]
    fn ground_state_evolves_by_a_global_phase() {
        let sys = harmonic_system(7.0);
        let grid = SpatialGrid::new(-8.0, 8.0, 257).unwrap();
        let w0 = number_state(&sys, Frame::To, 0, 0.0, grid).unwrap();
        for tp in [0.9, PI, 5.5] {
            let wt = number_state(&sys, Frame::To, 0, tp, grid).unwrap();
            let phase = Complex64::from_polar(1.0, -0.5 * tp);
            let mut worst: f64 = 0.0;
            for i in 0..grid.len() {
                worst = worst.max((wt.values[i] - phase * w0.values[i]).norm());
            }
            assert!(worst < 1e-10, "phase defect {worst} at t' = {tp}");
        }
    }

    #[test]
    fn number_states_are_orthonormal_for_modulated_profile() {
        let sys = modulated_system(8.0);
        let label = StateLabel::Number { n: 3 };
        let grid = auto_grid(&sys, Frame::To, &label, 5.0, 1025).unwrap();
        let w3 = number_state(&sys, Frame::To, 3, 5.0, grid).unwrap();
        let w1 = number_state(&sys, Frame::To, 1, 5.0, grid).unwrap();
        assert!((w3.norm() - 1.0).abs() < 1e-8);
        assert!(inner_product(&w3, &w1).unwrap().norm() < 1e-8);
    }

    #[test]
    fn coherent_state_at_origin_reduces_to_ground_state() {
        let sys = modulated_system(4.0);
        let grid = SpatialGrid::new(-9.0, 9.0, 513).unwrap();
        let c = coherent_state(&sys, Frame::To, 0.0, 0.0, 2.0, grid).unwrap();
        let n0 = number_state(&sys, Frame::To, 0, 2.0, grid).unwrap();
        assert!(l2_distance(&c, &n0).unwrap() < 1e-12);
    }

    #[test]
    fn coherent_center_follows_the_classical_trajectory() {
        let sys = harmonic_system(8.0);
        let (x0, p0) = (1.0, 0.5);
        for t in [0.0, 0.7, 2.4, 6.0] {
            let p = gaussian_params(&sys, Frame::To, &StateLabel::Coherent { x0, p0 }, t).unwrap();
            let expected = p0 * t.sin() + x0 * t.cos();
            assert!(
                (p.x_plus - expected).abs() < 1e-10,
                "center defect at t = {t}"
            );
        }
    }

    #[test]
    fn squeezed_with_zero_modulus_equals_coherent() {
        let sys = modulated_system(6.0);
        let grid = SpatialGrid::new(-10.0, 10.0, 513).unwrap();
        for frame in [Frame::To, Frame::Tm, Frame::Tq] {
            let s = squeezed_state(&sys, frame, 0.8, -0.4, 0.0, 1.1, 3.0, grid).unwrap();
            let c = coherent_state(&sys, frame, 0.8, -0.4, 3.0, grid).unwrap();
            assert!(l2_distance(&s, &c).unwrap() < 1e-12);
        }
    }

    #[test]
    fn squeezed_state_matches_appendix_closed_form() {
        let sys = harmonic_system(4.0);
        let (x0, p0, r, theta) = (1.0, 0.5, 0.5, PI / 3.0);
        let grid = SpatialGrid::new(-9.0, 9.0, 1025).unwrap();
        for t in [0.0, PI / 4.0, PI] {
            let w = squeezed_state(&sys, Frame::To, x0, p0, r, theta, t, grid).unwrap();
            let mut worst: f64 = 0.0;
            for (i, x) in grid.points().enumerate() {
                let reference = appendix_reference_state(1.0, x0, p0, r, theta, x, t);
                worst = worst.max((w.values[i] - reference).norm());
            }
            assert!(worst < 1e-10, "appendix mismatch {worst:.2e} at t = {t}");
        }
    }

    #[test]
    fn appendix_reduction_at_zero_time_and_angle() {
        // (omega / pi s^2)^{1/4} e^{-omega (x-x0)^2 / 2 s^2} e^{i p0 x} e^{-i p0 x0 / 2}.
        let (x0, p0, r) = (1.0, 0.5, 0.8f64);
        let s2 = (2.0 * r).exp();
        for x in [-1.5, 0.0, 0.4, 2.2] {
            let got = appendix_reference_state(1.0, x0, p0, r, 0.0, x, 0.0);
            let expected = (1.0 / (PI * s2)).powf(0.25)
                * (-0.5 * (x - x0) * (x - x0) / s2).exp()
                * Complex64::from_polar(1.0, p0 * x - 0.5 * p0 * x0);
            assert!((got - expected).norm() < 1e-12, "defect at x = {x}");
        }
    }

    #[test]
    fn appendix_reference_mean_position_is_classical() {
        let (omega, x0, p0, r, theta) = (1.0, 1.0, 0.5, 0.6, 0.9);
        let grid = SpatialGrid::new(-12.0, 12.0, 2049).unwrap();
        for t in [0.4, 1.9] {
            let values: Vec<Complex64> = grid
                .points()
                .map(|x| appendix_reference_state(omega, x0, p0, r, theta, x, t))
                .collect();
            let w = WaveSample::new(Frame::To, t, grid, values).unwrap();
            let weighted: Vec<Complex64> = w
                .values
                .iter()
                .zip(grid.points())
                .map(|(v, x)| v.conj() * v * x)
                .collect();
            let mean = crate::numerics::integrate_samples(&weighted, grid.dx()).re;
            let classical = p0 / omega * (omega * t).sin() + x0 * (omega * t).cos();
            assert!((mean - classical).abs() < 1e-8, "mean defect at t = {t}");
        }
    }

    #[test]
    fn dilation_with_zero_nu_is_identity() {
        let sys = harmonic_system(2.0);
        let grid = SpatialGrid::new(-8.0, 8.0, 257).unwrap();
        let w = number_state(&sys, Frame::Tm, 2, 1.0, grid).unwrap();
        let d = dilation_transform(&w, 0.0).unwrap();
        for i in 0..grid.len() {
            assert!((d.values[i] - w.values[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn dilation_of_gaussian_matches_closed_form() {
        // nu = ln 2 maps pi^{-1/4} e^{-x^2/2} to 2^{-1/2} pi^{-1/4} e^{-x^2/8}.
        let grid = SpatialGrid::new(-14.0, 14.0, 1025).unwrap();
        let values: Vec<Complex64> = grid
            .points()
            .map(|x| Complex64::new(PI.powf(-0.25) * (-0.5 * x * x).exp(), 0.0))
            .collect();
        let w = WaveSample::new(Frame::Tm, 0.0, grid, values).unwrap();
        let nu = 2.0f64.ln();
        let d = dilation_transform(&w, nu).unwrap();
        assert!((d.norm() - 1.0).abs() < 1e-9);
        for (i, x) in grid.points().enumerate() {
            let expected = 0.5f64.sqrt() * PI.powf(-0.25) * (-x * x / 8.0).exp();
            assert!(
                (d.values[i] - Complex64::new(expected, 0.0)).norm() < 1e-9,
                "dilation defect at x = {x}"
            );
        }
    }

    #[test]
    fn tq_direct_formula_agrees_with_dilation_route() {
        let sys = ck_system(3.0);
        let grid = SpatialGrid::new(-10.0, 10.0, 513).unwrap();
        let labels = [
            StateLabel::Number { n: 2 },
            StateLabel::Coherent { x0: 0.8, p0: -0.2 },
            StateLabel::Squeezed {
                x0: 0.5,
                p0: 0.3,
                r: 0.6,
                theta: 0.7,
            },
        ];
        for label in labels {
            let via_dilation = state(&sys, Frame::Tq, &label, 1.0, grid).unwrap();
            let direct = tq_state_direct(&sys, &label, 1.0, grid).unwrap();
            let d = l2_distance(&via_dilation, &direct).unwrap();
            assert!(d < 1e-9, "TQ route disagreement {d:.2e} for {label:?}");
        }
    }

    #[test]
    fn x_plus_is_independent_of_the_squeeze() {
        let sys = modulated_system(6.0);
        let base = gaussian_params(
            &sys,
            Frame::To,
            &StateLabel::Coherent { x0: 1.1, p0: -0.6 },
            3.3,
        )
        .unwrap();
        for r in [0.0, 0.4, 1.0] {
            for theta in [0.0, 1.0, 2.0 * PI - 0.3] {
                let p = gaussian_params(
                    &sys,
                    Frame::To,
                    &StateLabel::Squeezed {
                        x0: 1.1,
                        p0: -0.6,
                        r,
                        theta,
                    },
                    3.3,
                )
                .unwrap();
                assert!((p.x_plus - base.x_plus).abs() < 1e-10);
                assert!(p.q > 0.0);
                assert!(p.im_residue <= 1e-10);
            }
        }
    }

    #[test]
    fn r_coefficient_is_the_time_derivative_of_q() {
        let sys = modulated_system(8.0);
        let label = StateLabel::Squeezed {
            x0: 0.4,
            p0: 0.9,
            r: 0.7,
            theta: 1.3,
        };
        let eps = 1e-5;
        for t in [1.0, 4.0, 7.0] {
            let qm = gaussian_params(&sys, Frame::To, &label, t - eps).unwrap().q;
            let qp = gaussian_params(&sys, Frame::To, &label, t + eps).unwrap().q;
            let p = gaussian_params(&sys, Frame::To, &label, t).unwrap();
            assert!(
                ((qp - qm) / (2.0 * eps) - p.r).abs() < 1e-6,
                "R defect at t = {t}"
            );
        }
    }

    #[test]
    fn zero_nu_makes_all_frames_identical() {
        let sys = modulated_system(5.0);
        let grid = SpatialGrid::new(-9.0, 9.0, 257).unwrap();
        let label = StateLabel::Squeezed {
            x0: 0.6,
            p0: -0.2,
            r: 0.5,
            theta: 0.4,
        };
        let to = state(&sys, Frame::To, &label, 2.0, grid).unwrap();
        let tm = state(&sys, Frame::Tm, &label, 2.0, grid).unwrap();
        let tq = state(&sys, Frame::Tq, &label, 2.0, grid).unwrap();
        assert!(l2_distance(&to, &tm).unwrap() < 1e-12);
        assert!(l2_distance(&to, &tq).unwrap() < 1e-12);
    }

    #[test]
    fn all_state_kinds_are_normalized_in_every_frame() {
        let sys = ck_system(3.0);
        let labels = [
            StateLabel::Number { n: 3 },
            StateLabel::Coherent { x0: 1.0, p0: 0.5 },
            StateLabel::Squeezed {
                x0: 1.0,
                p0: 0.5,
                r: 0.8,
                theta: 1.1,
            },
        ];
        for frame in [Frame::To, Frame::Tm, Frame::Tq] {
            let t = if frame == Frame::To { 0.5 } else { 1.0 };
            for label in &labels {
                let grid = auto_grid(&sys, frame, label, t, 1025).unwrap();
                let w = state(&sys, frame, label, t, grid).unwrap();
                assert!(
                    (w.norm() - 1.0).abs() < 1e-8,
                    "norm defect {:.2e} for {frame}/{label:?}",
                    (w.norm() - 1.0).abs()
                );
            }
        }
    }

    #[test]
    fn number_states_orthonormal_up_to_n_eight() {
        let sys = modulated_system(6.0);
        let grid = auto_grid(&sys, Frame::To, &StateLabel::Number { n: 8 }, 3.0, 2049).unwrap();
        let waves: Vec<_> = (0..=8)
            .map(|n| number_state(&sys, Frame::To, n, 3.0, grid).unwrap())
            .collect();
        for (m, wm) in waves.iter().enumerate() {
            assert!((wm.norm() - 1.0).abs() < 1e-8, "norm defect at n = {m}");
            for wn in waves.iter().take(m) {
                let overlap = inner_product(wm, wn).unwrap().norm();
                assert!(overlap < 1e-8, "overlap {overlap:.2e}");
            }
        }
    }

    #[test]
    fn tq_alpha_carries_the_gauge_factors_at_the_origin() {
        // nu(t0) = 0.3: Xi_P^0 = xi^0 e^{0.3}, Xi_X^0 = xi_dot^0 e^{-0.3}.
        let spec = SystemSpec::new(
            TimeProfile::linear(0.5, 0.3),
            TimeProfile::constant(0.5),
            0.0,
        )
        .unwrap();
        let sys = System::prepare(spec, 2.0).unwrap();
        let origin = sys.aux.sample(sys.t0_prime()).unwrap();
        let (x0, p0) = (0.7, -0.4);
        let expected = Complex64::i()
            * (origin.xi * (0.3f64).exp() * p0 - origin.xi_dot * (-0.3f64).exp() * x0);
        let alpha = alpha_from_phase_space(&sys, Frame::Tq, x0, p0).unwrap();
        assert!((alpha - expected).norm() < 1e-13);
        // The dilation and direct TQ routes stay consistent off-gauge.
        let grid = SpatialGrid::new(-12.0, 12.0, 513).unwrap();
        let label = StateLabel::Coherent { x0, p0 };
        let a = state(&sys, Frame::Tq, &label, 0.9, grid).unwrap();
        let b = tq_state_direct(&sys, &label, 0.9, grid).unwrap();
        assert!(l2_distance(&a, &b).unwrap() < 1e-12);
    }

    #[test]
    fn negative_squeeze_modulus_is_rejected() {
        let label = StateLabel::Squeezed {
            x0: 0.0,
            p0: 0.0,
            r: -0.1,
            theta: 0.0,
        };
        assert!(label.validate().is_err());
    }
}
