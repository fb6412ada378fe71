//! Symmetry operators as finite-difference operators on wave samples.
//!
//! Each frame carries an oscillator algebra {M, J+, J-, I} with
//! `[M, J+-] = +-J+-` and `[J-, J+] = I`. The ladder operators are
//! first-order in `x` with coefficients built from the auxiliary solution;
//! the number operator involves `i d/dt`, realized with a centered stencil
//! over a [`WaveTriplet`]. Time derivatives of analytic states are always
//! taken by evaluating the closed form at `t +- delta`, never by
//! differentiating solver output, so spatial stencil error stays isolated.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::{self, StateLabel};
use crate::system::System;
use crate::wave::{deriv1, deriv2, l2_distance, Frame, SpatialGrid, WaveSample};

/// Raising or lowering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderDirection {
    Lower,
    Raise,
}

/// Coefficients `(c_p, c_x)` of a ladder operator `J = i (c_p P - c_x X)`.
#[derive(Debug, Clone, Copy)]
pub struct LadderCoeffs {
    pub c_p: Complex64,
    pub c_x: Complex64,
}

/// Real coefficients of a number-type operator
/// `M = c_t (i d/dt) + c_d D + c_x2 X^2` with `D = -i x d/dx - i/2`.
#[derive(Debug, Clone, Copy)]
pub struct NumberCoeffs {
    pub c_t: f64,
    pub c_d: f64,
    pub c_x2: f64,
}

/// Frame-resolved operator ingredients at one time.
#[derive(Debug, Clone, Copy)]
pub struct OperatorCoefficients {
    pub frame: Frame,
    pub time: f64,
    /// `xi`-like momentum coefficient (`xi`, `xi`-hat, or `Xi_P`).
    pub g_p: Complex64,
    /// `xi_dot`-like position coefficient (`xi_dot`, hatted, or `Xi_X`).
    pub g_x: Complex64,
    pub number: NumberCoeffs,
}

/// Build the frame's operator coefficients at time `t`.
pub fn operator_coefficients(
    system: &System,
    frame: Frame,
    t: f64,
) -> Result<OperatorCoefficients> {
    let (g_p, g_x, number) = match frame {
        Frame::To => {
            let s = system.aux.sample(t)?;
            let phi = system.aux.phi(t)?;
            let g2 = system.spec.g2_of_tprime(&system.map, t)?;
            let phi3_ddot = -4.0 * g2 * phi.phi3 + 4.0 * s.xi_dot.norm_sqr();
            (
                s.xi,
                s.xi_dot,
                NumberCoeffs {
                    c_t: phi.phi3,
                    c_d: -0.5 * phi.phi3_dot,
                    c_x2: 0.25 * phi3_ddot,
                },
            )
        }
        Frame::Tm => {
            let hat = system.aux.hatted(&system.map, t)?;
            let nu = system.spec.nu_at(t)?;
            let h2 = system.spec.h2_at(t)?;
            let phi3_ddot =
                -4.0 * h2 * (4.0 * nu).exp() * hat.phi.phi3 + 4.0 * hat.xi_dot.norm_sqr();
            (
                hat.xi,
                hat.xi_dot,
                NumberCoeffs {
                    c_t: hat.phi.phi3 * (2.0 * nu).exp(),
                    c_d: -0.5 * hat.phi.phi3_dot,
                    c_x2: 0.25 * phi3_ddot,
                },
            )
        }
        Frame::Tq => {
            let hat = system.aux.hatted(&system.map, t)?;
            let nu = system.spec.nu_at(t)?;
            let h2 = system.spec.h2_at(t)?;
            let h = system.spec.h_drift(t)?;
            let c_t = hat.phi.phi3 * (2.0 * nu).exp();
            let phi3_ddot =
                -4.0 * h2 * (4.0 * nu).exp() * hat.phi.phi3 + 4.0 * hat.xi_dot.norm_sqr();
            (
                hat.xi * nu.exp(),
                hat.xi_dot * (-nu).exp(),
                NumberCoeffs {
                    c_t,
                    // M_1 = C_T T - C_D D - C_X2 X^2 folded into the generic signs.
                    c_d: 0.5 * h * c_t - 0.5 * hat.phi.phi3_dot,
                    c_x2: 0.25 * phi3_ddot * (-2.0 * nu).exp(),
                },
            )
        }
    };
    Ok(OperatorCoefficients {
        frame,
        time: t,
        g_p,
        g_x,
        number,
    })
}

fn ladder_coeffs(coeffs: &OperatorCoefficients, dir: LadderDirection) -> LadderCoeffs {
    match dir {
        LadderDirection::Lower => LadderCoeffs {
            c_p: coeffs.g_p,
            c_x: coeffs.g_x,
        },
        LadderDirection::Raise => LadderCoeffs {
            c_p: -coeffs.g_p.conj(),
            c_x: -coeffs.g_x.conj(),
        },
    }
}

fn check_frame(wave: &WaveSample, frame: Frame) -> Result<()> {
    if wave.frame != frame {
        return Err(Error::Invalid {
            what: "operator application",
            why: format!("wave is in frame {}, operator in {}", wave.frame, frame),
        });
    }
    Ok(())
}

/// Apply `J+-` to a wave sample with a 4th-order first-derivative stencil.
pub fn apply_ladder(
    system: &System,
    frame: Frame,
    dir: LadderDirection,
    wave: &WaveSample,
) -> Result<WaveSample> {
    check_frame(wave, frame)?;
    let coeffs = operator_coefficients(system, frame, wave.time)?;
    let lc = ladder_coeffs(&coeffs, dir);
    let dpsi = deriv1(&wave.values, wave.grid.dx());
    let values = wave
        .grid
        .points()
        .enumerate()
        .map(|(i, x)| lc.c_p * dpsi[i] - Complex64::i() * lc.c_x * x * wave.values[i])
        .collect();
    WaveSample::new(frame, wave.time, wave.grid, values)
}

/// Three samples of one state at `t - delta, t, t + delta`.
#[derive(Debug, Clone)]
pub struct WaveTriplet {
    pub minus: WaveSample,
    pub center: WaveSample,
    pub plus: WaveSample,
    pub delta: f64,
}

impl WaveTriplet {
    pub fn new(minus: WaveSample, center: WaveSample, plus: WaveSample) -> Result<WaveTriplet> {
        if minus.grid != center.grid || plus.grid != center.grid {
            return Err(Error::GridMismatch("triplet grids differ".into()));
        }
        if minus.frame != center.frame || plus.frame != center.frame {
            return Err(Error::Invalid {
                what: "wave triplet",
                why: "frames differ".into(),
            });
        }
        let d1 = center.time - minus.time;
        let d2 = plus.time - center.time;
        if !(d1 > 0.0) || (d1 - d2).abs() > 1e-12 * d1.max(d2) {
            return Err(Error::Invalid {
                what: "wave triplet",
                why: format!("non-uniform time offsets {d1} vs {d2}"),
            });
        }
        Ok(WaveTriplet {
            delta: d1,
            minus,
            center,
            plus,
        })
    }

    /// Build from a state generator (a closure evaluating the state at any time).
    pub fn from_generator<G>(generator: G, t: f64, delta: f64) -> Result<WaveTriplet>
    where
        G: Fn(f64) -> Result<WaveSample>,
    {
        WaveTriplet::new(generator(t - delta)?, generator(t)?, generator(t + delta)?)
    }

    /// Centered time derivative on the shared grid.
    pub fn time_derivative(&self) -> Vec<Complex64> {
        self.plus
            .values
            .iter()
            .zip(self.minus.values.iter())
            .map(|(p, m)| (p - m) / (2.0 * self.delta))
            .collect()
    }
}

/// Apply the frame's number operator `M` at the triplet's center time.
pub fn apply_number_operator(
    system: &System,
    frame: Frame,
    triplet: &WaveTriplet,
) -> Result<WaveSample> {
    check_frame(&triplet.center, frame)?;
    let coeffs = operator_coefficients(system, frame, triplet.center.time)?;
    let nc = coeffs.number;
    let psi = &triplet.center.values;
    let dpsi_dt = triplet.time_derivative();
    let dpsi_dx = deriv1(psi, triplet.center.grid.dx());
    let i = Complex64::i();
    let values = triplet
        .center
        .grid
        .points()
        .enumerate()
        .map(|(k, x)| {
            nc.c_t * i * dpsi_dt[k]
                + nc.c_d * (-i * x * dpsi_dx[k] - 0.5 * i * psi[k])
                + nc.c_x2 * x * x * psi[k]
        })
        .collect();
    WaveSample::new(frame, triplet.center.time, triplet.center.grid, values)
}

/// Apply the Casimir `C = J+ J- - M` at the triplet's center time.
pub fn apply_casimir(system: &System, frame: Frame, triplet: &WaveTriplet) -> Result<WaveSample> {
    let lowered = apply_ladder(system, frame, LadderDirection::Lower, &triplet.center)?;
    let raised = apply_ladder(system, frame, LadderDirection::Raise, &lowered)?;
    let m = apply_number_operator(system, frame, triplet)?;
    let values = raised
        .values
        .iter()
        .zip(m.values.iter())
        .map(|(a, b)| a - b)
        .collect();
    WaveSample::new(frame, triplet.center.time, triplet.center.grid, values)
}

/// The frame's Schrodinger operator applied to an analytic state, as a
/// relative L2 residual. Vanishes to discretization order for exact states.
pub fn schrodinger_residual(
    system: &System,
    frame: Frame,
    label: &StateLabel,
    t: f64,
    grid: SpatialGrid,
    delta_t: f64,
) -> Result<f64> {
    let triplet = WaveTriplet::from_generator(
        |tau| states::state(system, frame, label, tau, grid),
        t,
        delta_t,
    )?;
    let psi = &triplet.center.values;
    let dpsi_dt = triplet.time_derivative();
    let dx = grid.dx();
    let d2 = deriv2(psi, dx);
    let i = Complex64::i();
    let residual_values: Vec<Complex64> = match frame {
        Frame::To => {
            let g2 = system.spec.g2_of_tprime(&system.map, t)?;
            grid.points()
                .enumerate()
                .map(|(k, x)| d2[k] + 2.0 * i * dpsi_dt[k] - 2.0 * g2 * x * x * psi[k])
                .collect()
        }
        Frame::Tm => {
            let nu = system.spec.nu_at(t)?;
            let h2 = system.spec.h2_at(t)?;
            let kin = (-2.0 * nu).exp();
            let pot = 2.0 * h2 * (2.0 * nu).exp();
            grid.points()
                .enumerate()
                .map(|(k, x)| kin * d2[k] + 2.0 * i * dpsi_dt[k] - pot * x * x * psi[k])
                .collect()
        }
        Frame::Tq => {
            let h2 = system.spec.h2_at(t)?;
            let h = system.spec.h_drift(t)?;
            let d1 = deriv1(psi, dx);
            grid.points()
                .enumerate()
                .map(|(k, x)| {
                    d2[k] + 2.0 * i * dpsi_dt[k] + h * (-i * x * d1[k] - 0.5 * i * psi[k])
                        - 2.0 * h2 * x * x * psi[k]
                })
                .collect()
        }
    };
    let s = WaveSample::new(frame, t, grid, residual_values)?;
    Ok(s.norm() / triplet.center.norm())
}

/// Which commutator identity to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommutatorPair {
    /// `[J-, J+] = I`.
    LowerRaise,
    /// `[M, J+] = +J+`.
    NumberRaise,
    /// `[M, J-] = -J-`.
    NumberLower,
}

/// Relative residual of a commutator identity applied to a probe state.
///
/// The probe is supplied as a generator so nested `M` applications can
/// sample it at shifted times.
pub fn commutator_check<G>(
    system: &System,
    frame: Frame,
    pair: CommutatorPair,
    generator: G,
    t: f64,
    delta: f64,
) -> Result<f64>
where
    G: Fn(f64) -> Result<WaveSample>,
{
    let psi = generator(t)?;
    let norm = psi.norm();
    match pair {
        CommutatorPair::LowerRaise => {
            let jp = apply_ladder(system, frame, LadderDirection::Raise, &psi)?;
            let jmjp = apply_ladder(system, frame, LadderDirection::Lower, &jp)?;
            let jm = apply_ladder(system, frame, LadderDirection::Lower, &psi)?;
            let jpjm = apply_ladder(system, frame, LadderDirection::Raise, &jm)?;
            let values: Vec<Complex64> = (0..psi.values.len())
                .map(|k| jmjp.values[k] - jpjm.values[k] - psi.values[k])
                .collect();
            let r = WaveSample::new(frame, t, psi.grid, values)?;
            Ok(r.norm() / norm)
        }
        CommutatorPair::NumberRaise | CommutatorPair::NumberLower => {
            let dir = if pair == CommutatorPair::NumberRaise {
                LadderDirection::Raise
            } else {
                LadderDirection::Lower
            };
            let sign = if pair == CommutatorPair::NumberRaise {
                1.0
            } else {
                -1.0
            };
            // M (J psi): the ladder is applied at each triplet time.
            let ladder_gen = |tau: f64| -> Result<WaveSample> {
                apply_ladder(system, frame, dir, &generator(tau)?)
            };
            let j_triplet = WaveTriplet::from_generator(ladder_gen, t, delta)?;
            let m_j = apply_number_operator(system, frame, &j_triplet)?;
            // J (M psi).
            let psi_triplet = WaveTriplet::from_generator(&generator, t, delta)?;
            let m_psi = apply_number_operator(system, frame, &psi_triplet)?;
            let j_m = apply_ladder(system, frame, dir, &m_psi)?;
            // Expected +-J psi.
            let j_psi = apply_ladder(system, frame, dir, &psi)?;
            let values: Vec<Complex64> = (0..psi.values.len())
                .map(|k| m_j.values[k] - j_m.values[k] - sign * j_psi.values[k])
                .collect();
            let r = WaveSample::new(frame, t, psi.grid, values)?;
            Ok(r.norm() / norm)
        }
    }
}

/// Residual of the squeezed-state eigenvalue equation
/// `(J- - gamma+ J+) psi = (alpha - gamma+ conj(alpha)) psi`
/// with `gamma+ = e^{i theta} tanh r`.
#[allow(clippy::too_many_arguments)]
pub fn squeeze_eigen_check(
    system: &System,
    frame: Frame,
    x0: f64,
    p0: f64,
    r: f64,
    theta: f64,
    t: f64,
    grid: SpatialGrid,
) -> Result<f64> {
    let label = StateLabel::Squeezed { x0, p0, r, theta };
    let psi = states::state(system, frame, &label, t, grid)?;
    let gamma = Complex64::from_polar(r.tanh(), theta);
    let alpha = states::alpha_from_phase_space(system, frame, x0, p0)?;
    let eigenvalue = alpha - gamma * alpha.conj();
    let jm = apply_ladder(system, frame, LadderDirection::Lower, &psi)?;
    let jp = apply_ladder(system, frame, LadderDirection::Raise, &psi)?;
    let values: Vec<Complex64> = (0..psi.values.len())
        .map(|k| jm.values[k] - gamma * jp.values[k] - eigenvalue * psi.values[k])
        .collect();
    let res = WaveSample::new(frame, t, grid, values)?;
    Ok(res.norm() / psi.norm())
}

/// Relative distance between `J+- psi_n` and its expected ladder image.
pub fn ladder_action_residual(
    system: &System,
    frame: Frame,
    dir: LadderDirection,
    n: usize,
    t: f64,
    grid: SpatialGrid,
) -> Result<f64> {
    let psi_n = states::number_state(system, frame, n, t, grid)?;
    let applied = apply_ladder(system, frame, dir, &psi_n)?;
    let expected = match dir {
        LadderDirection::Raise => {
            let target = states::number_state(system, frame, n + 1, t, grid)?;
            target.scaled(Complex64::new(((n + 1) as f64).sqrt(), 0.0))
        }
        LadderDirection::Lower => {
            if n == 0 {
                // Annihilation: the residual is the norm itself.
                return Ok(applied.norm());
            }
            let target = states::number_state(system, frame, n - 1, t, grid)?;
            target.scaled(Complex64::new((n as f64).sqrt(), 0.0))
        }
    };
    Ok(l2_distance(&applied, &expected)? / expected.norm())
}

/// Relative error of `M psi_n = (n + 1/2) psi_n`.
pub fn number_eigen_residual(
    system: &System,
    frame: Frame,
    n: usize,
    t: f64,
    grid: SpatialGrid,
    delta: f64,
) -> Result<f64> {
    let triplet = WaveTriplet::from_generator(
        |tau| states::number_state(system, frame, n, tau, grid),
        t,
        delta,
    )?;
    let m = apply_number_operator(system, frame, &triplet)?;
    let expected = triplet.center.scaled(Complex64::new(n as f64 + 0.5, 0.0));
    Ok(l2_distance(&m, &expected)? / expected.norm())
}

/// Relative error of `C psi_n = -1/2 psi_n`.
pub fn casimir_residual(
    system: &System,
    frame: Frame,
    n: usize,
    t: f64,
    grid: SpatialGrid,
    delta: f64,
) -> Result<f64> {
    let triplet = WaveTriplet::from_generator(
        |tau| states::number_state(system, frame, n, tau, grid),
        t,
        delta,
    )?;
    let c = apply_casimir(system, frame, &triplet)?;
    let expected = triplet.center.scaled(Complex64::new(-0.5, 0.0));
    Ok(l2_distance(&c, &expected)? / expected.norm())
}
