//! Complex auxiliary equation `xi'' + 2 g2(t') xi = 0`.
//!
//! The solution `xi` (normalized by the Wronskian condition
//! `xi conj(xi') - xi' conj(xi) = -i`) generates every symmetry coefficient:
//! phi_1 = xi^2, phi_2 = conj(xi)^2, phi_3 = 2 |xi|^2, and their hatted
//! compositions with the TM clock. Only `xi` itself is integrated; its
//! conjugate partner is taken as the complex conjugate, which is exact
//! because `g2` is real.
//!
//! The Wronskian is monitored at every accepted node and the solve fails on
//! drift instead of renormalizing: silent rescaling would desynchronize
//! `xi` and `xi_dot` and mask integrator misconfiguration.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{
    integrate_dopri5_scaled, locate_panel, wrap_angle, OdeOptions, QuinticPanel,
};
use crate::profile::SystemSpec;
use crate::timemap::TimeMap;

/// Hard bound on `|W + i|` at every node of a solve.
pub const WRONSKIAN_TOL: f64 = 1e-9;

/// Default node-density cap: at least this many panels per unit span.
pub const DEFAULT_AUX_NODES: usize = 2048;

/// Initial data `(xi(t0'), xi_dot(t0'))` subject to the Wronskian condition.
#[derive(Debug, Clone, Copy)]
pub struct AuxInitialConditions {
    pub xi0: Complex64,
    pub xi_dot0: Complex64,
}

impl AuxInitialConditions {
    /// `|W + i|` of the initial data.
    pub fn wronskian_defect(&self) -> f64 {
        wronskian_defect(self.xi0, self.xi_dot0)
    }

    pub fn validate(&self) -> Result<()> {
        let defect = self.wronskian_defect();
        if defect > 1e-12 {
            return Err(Error::Invalid {
                what: "auxiliary initial conditions",
                why: format!("Wronskian defect {defect:.3e} exceeds 1e-12"),
            });
        }
        Ok(())
    }
}

/// Error scales for the real-pair layout `[Re xi, Im xi, Re xi', Im xi']`:
/// both members of a complex pair share the pair-modulus scale.
fn complex_pair_scale(opts: &OdeOptions) -> impl Fn(&[f64; 4], &[f64; 4]) -> [f64; 4] {
    let atol = opts.atol;
    let rtol = opts.rtol;
    move |a: &[f64; 4], b: &[f64; 4]| {
        let m0 = a[0].hypot(a[1]).max(b[0].hypot(b[1]));
        let m1 = a[2].hypot(a[3]).max(b[2].hypot(b[3]));
        let s0 = atol + rtol * m0;
        let s1 = atol + rtol * m1;
        [s0, s0, s1, s1]
    }
}

/// `|W + i|` where `W = xi conj(xi_dot) - xi_dot conj(xi)`.
pub fn wronskian_defect(xi: Complex64, xi_dot: Complex64) -> f64 {
    // W is purely imaginary by construction; compare its imaginary part to -1.
    (2.0 * (xi * xi_dot.conj()).im + 1.0).abs()
}

/// Instantaneous-frequency matching at the initial time.
///
/// For `g2(t0') > 0` this reproduces `xi = (2 w)^{-1/2} e^{i w t'}` with
/// `w = sqrt(2 g2)`; otherwise it falls back to `w = 1`. Either way the
/// Wronskian condition holds exactly.
pub fn default_ic(g2_at_t0: f64) -> AuxInitialConditions {
    let omega0 = if g2_at_t0 > 0.0 {
        (2.0 * g2_at_t0).sqrt()
    } else {
        1.0
    };
    let xi0 = Complex64::new(1.0 / (2.0 * omega0).sqrt(), 0.0);
    AuxInitialConditions {
        xi0,
        xi_dot0: Complex64::new(0.0, omega0) * xi0,
    }
}

/// One interpolated sample of the auxiliary solution.
#[derive(Debug, Clone, Copy)]
pub struct AuxSample {
    pub xi: Complex64,
    /// d xi / dt' (always the TO-clock derivative, also under composition).
    pub xi_dot: Complex64,
    /// Continuous (unwrapped) argument of `xi`.
    pub theta: f64,
}

/// The phi coefficient functions at one time.
#[derive(Debug, Clone, Copy)]
pub struct PhiValues {
    pub phi1: Complex64,
    pub phi2: Complex64,
    pub phi3: f64,
    pub phi1_dot: Complex64,
    pub phi3_dot: f64,
}

impl PhiValues {
    fn from_sample(s: &AuxSample) -> PhiValues {
        let phi1 = s.xi * s.xi;
        PhiValues {
            phi1,
            phi2: phi1.conj(),
            phi3: 2.0 * s.xi.norm_sqr(),
            phi1_dot: 2.0 * s.xi * s.xi_dot,
            phi3_dot: 4.0 * (s.xi_dot * s.xi.conj()).re,
        }
    }
}

/// Hatted (TM-clock) values: the TO quantities composed with `t'(t)`.
#[derive(Debug, Clone, Copy)]
pub struct HattedValues {
    pub tprime: f64,
    pub xi: Complex64,
    /// `(d xi / dt') o t'(t)` -- not the TM-time derivative of `xi` hat.
    pub xi_dot: Complex64,
    pub theta: f64,
    pub phi: PhiValues,
}

/// Dense solution of the auxiliary equation on a TO-clock interval.
#[derive(Debug, Clone)]
pub struct AuxSolution {
    tprime_nodes: Vec<f64>,
    xi: Vec<Complex64>,
    xi_dot: Vec<Complex64>,
    xi_ddot: Vec<Complex64>,
    theta: Vec<f64>,
    max_wronskian_drift: f64,
}

/// Solve the auxiliary equation on `span` in the TO clock.
///
/// Adaptive Dormand-Prince 5(4) on the first-order complex system, with the
/// step size capped so the stored nodes are at least as dense as `n_nodes`
/// uniform panels. Nodes are the accepted integrator steps; each carries
/// value, derivative, and second derivative for quintic dense evaluation.
pub fn solve_xi<G>(
    g2: G,
    span: (f64, f64),
    ic: &AuxInitialConditions,
    n_nodes: usize,
) -> Result<AuxSolution>
where
    G: Fn(f64) -> f64,
{
    ic.validate()?;
    if n_nodes < 2 {
        return Err(Error::Invalid {
            what: "auxiliary solve",
            why: format!("need n_nodes >= 2, got {n_nodes}"),
        });
    }
    let (a, b) = span;
    let width = b - a;
    if !(width > 0.0) {
        return Err(Error::Invalid {
            what: "auxiliary solve span",
            why: format!("need increasing span, got [{a}, {b}]"),
        });
    }
    let opts = OdeOptions {
        h_max: width / (n_nodes - 1) as f64,
        ..OdeOptions::default()
    };

    let mut sol = AuxSolution {
        tprime_nodes: vec![a],
        xi: vec![ic.xi0],
        xi_dot: vec![ic.xi_dot0],
        xi_ddot: vec![-2.0 * g2(a) * ic.xi0],
        theta: vec![ic.xi0.arg()],
        max_wronskian_drift: ic.wronskian_defect(),
    };

    let y0 = [ic.xi0.re, ic.xi0.im, ic.xi_dot0.re, ic.xi_dot0.im];
    let non_finite_g2 = std::cell::Cell::new(false);
    integrate_dopri5_scaled(
        |t, y: &[f64; 4]| {
            let g = g2(t);
            if !g.is_finite() {
                non_finite_g2.set(true);
            }
            [y[2], y[3], -2.0 * g * y[0], -2.0 * g * y[1]]
        },
        span,
        y0,
        &opts,
        complex_pair_scale(&opts),
        |step| {
            if non_finite_g2.get() {
                return Err(Error::Invalid {
                    what: "auxiliary stiffness",
                    why: format!("non-finite g2 inside [{}, {}]", step.t0, step.t1),
                });
            }
            let xi = Complex64::new(step.y1[0], step.y1[1]);
            let xi_dot = Complex64::new(step.y1[2], step.y1[3]);
            let drift = wronskian_defect(xi, xi_dot);
            if drift > WRONSKIAN_TOL {
                return Err(Error::Accuracy {
                    what: "Wronskian drift",
                    value: drift,
                    limit: WRONSKIAN_TOL,
                });
            }
            sol.max_wronskian_drift = sol.max_wronskian_drift.max(drift);
            let prev_xi = *sol.xi.last().unwrap();
            let jump = wrap_angle(xi.arg() - prev_xi.arg());
            if jump.abs() >= 3.0 {
                return Err(Error::Sampling(format!(
                    "phase advanced by {jump:.3} rad across one node at t' = {}",
                    step.t1
                )));
            }
            sol.tprime_nodes.push(step.t1);
            sol.xi.push(xi);
            sol.xi_dot.push(xi_dot);
            sol.xi_ddot.push(Complex64::new(step.dy1[2], step.dy1[3]));
            let theta = sol.theta.last().unwrap() + jump;
            sol.theta.push(theta);
            Ok(())
        },
    )?;
    Ok(sol)
}

/// Solve for a full system: `g2(t')` built from the spec through the map.
pub fn solve_for_system(
    spec: &SystemSpec,
    map: &TimeMap,
    ic: &AuxInitialConditions,
    n_nodes: usize,
) -> Result<AuxSolution> {
    let (a, b) = map.tprime_range();
    solve_xi(
        |tp| spec.g2_of_tprime(map, tp).unwrap_or(f64::NAN),
        (a, b),
        ic,
        n_nodes,
    )
}

impl AuxSolution {
    pub fn span(&self) -> (f64, f64) {
        (self.tprime_nodes[0], *self.tprime_nodes.last().unwrap())
    }

    pub fn node_count(&self) -> usize {
        self.tprime_nodes.len()
    }

    pub fn tprime_nodes(&self) -> &[f64] {
        &self.tprime_nodes
    }

    /// Largest `|W + i|` observed across all nodes of the solve.
    pub fn max_wronskian_drift(&self) -> f64 {
        self.max_wronskian_drift
    }

    /// Stored values at node `i`: `(t', xi, xi_dot, theta)`.
    pub fn node(&self, i: usize) -> (f64, Complex64, Complex64, f64) {
        (
            self.tprime_nodes[i],
            self.xi[i],
            self.xi_dot[i],
            self.theta[i],
        )
    }

    fn check_span(&self, tprime: f64) -> Result<f64> {
        let (lo, hi) = self.span();
        let tol = 1e-9 * (hi - lo).max(1.0);
        if !(tprime >= lo - tol && tprime <= hi + tol) {
            return Err(Error::OutOfDomain {
                what: "auxiliary solution",
                t: tprime,
                lo,
                hi,
            });
        }
        Ok(tprime.clamp(lo, hi))
    }

    /// Interpolated `(xi, xi_dot, theta)` at `tprime`.
    pub fn sample(&self, tprime: f64) -> Result<AuxSample> {
        let tprime = self.check_span(tprime)?;
        let i = locate_panel(&self.tprime_nodes, tprime);
        if tprime == self.tprime_nodes[i] {
            return Ok(AuxSample {
                xi: self.xi[i],
                xi_dot: self.xi_dot[i],
                theta: self.theta[i],
            });
        }
        let panel = QuinticPanel {
            t0: self.tprime_nodes[i],
            h: self.tprime_nodes[i + 1] - self.tprime_nodes[i],
            y0: self.xi[i],
            d0: self.xi_dot[i],
            dd0: self.xi_ddot[i],
            y1: self.xi[i + 1],
            d1: self.xi_dot[i + 1],
            dd1: self.xi_ddot[i + 1],
        };
        let xi = panel.value(tprime);
        let xi_dot = panel.derivative(tprime);
        let theta = self.theta[i] + wrap_angle(xi.arg() - self.xi[i].arg());
        Ok(AuxSample { xi, xi_dot, theta })
    }

    /// phi_1, phi_2, phi_3 and their first derivatives at `tprime`.
    pub fn phi(&self, tprime: f64) -> Result<PhiValues> {
        Ok(PhiValues::from_sample(&self.sample(tprime)?))
    }

    /// TM-clock composition of all auxiliary quantities at TM time `t`.
    ///
    /// `xi_dot` keeps its TO-clock meaning: the TM-time derivative of the
    /// composition is `e^{-2 nu(t)}` times this value.
    pub fn hatted(&self, map: &TimeMap, t: f64) -> Result<HattedValues> {
        let tprime = map.forward(t)?;
        let s = self.sample(tprime)?;
        Ok(HattedValues {
            tprime,
            xi: s.xi,
            xi_dot: s.xi_dot,
            theta: s.theta,
            phi: PhiValues::from_sample(&s),
        })
    }
}

/// Result of a long-span Wronskian conservation scan.
#[derive(Debug, Clone, Copy)]
pub struct WronskianScan {
    pub max_drift: f64,
    pub nodes: usize,
    pub t_span: (f64, f64),
}

/// Integrate the auxiliary system in the TM clock and monitor the Wronskian.
///
/// The composed variables `(u, v) = (xi o t', xi_dot o t')` obey
/// `du/dt = e^{-2 nu} v`, `dv/dt = -2 h2 e^{2 nu} u`, which stays
/// well-conditioned even where the TO clock can no longer be resolved in
/// f64 (strong exponential gauges over many periods).
pub fn wronskian_scan_tm(
    spec: &SystemSpec,
    t_end: f64,
    ic: &AuxInitialConditions,
) -> Result<WronskianScan> {
    ic.validate()?;
    if !(t_end > spec.t0) {
        return Err(Error::Invalid {
            what: "wronskian scan span",
            why: format!("need t_end > t0 = {}", spec.t0),
        });
    }
    let y0 = [ic.xi0.re, ic.xi0.im, ic.xi_dot0.re, ic.xi_dot0.im];
    let mut max_drift = ic.wronskian_defect();
    let mut nodes = 1usize;
    let opts = OdeOptions::default();
    integrate_dopri5_scaled(
        |t, y: &[f64; 4]| {
            let rate = (-2.0 * spec.nu_at(t).unwrap_or(f64::NAN)).exp();
            let stiff = 2.0
                * spec.h2_at(t).unwrap_or(f64::NAN)
                * (2.0 * spec.nu_at(t).unwrap_or(f64::NAN)).exp();
            [rate * y[2], rate * y[3], -stiff * y[0], -stiff * y[1]]
        },
        (spec.t0, t_end),
        y0,
        &opts,
        complex_pair_scale(&opts),
        |step| {
            let u = Complex64::new(step.y1[0], step.y1[1]);
            let v = Complex64::new(step.y1[2], step.y1[3]);
            let drift = wronskian_defect(u, v);
            if drift > WRONSKIAN_TOL {
                return Err(Error::Accuracy {
                    what: "Wronskian drift (TM clock)",
                    value: drift,
                    limit: WRONSKIAN_TOL,
                });
            }
            max_drift = max_drift.max(drift);
            nodes += 1;
            Ok(())
        },
    )?;
    Ok(WronskianScan {
        max_drift,
        nodes,
        t_span: (spec.t0, t_end),
    })
}
