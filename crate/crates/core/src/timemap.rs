//! Monotone time reparametrization between the TM and TO frames.
//!
//! `t'(t) = t0' + int_{t0}^t e^{-2 nu(s)} ds`, with the default gauge
//! `t0' = t0`. The integrand is strictly positive, so the map is strictly
//! increasing and invertible wherever it can be resolved in f64.

use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre_5, locate_panel};
use crate::profile::{SystemSpec, TimeProfile};

/// Default node count for [`build_time_map`].
pub const DEFAULT_MAP_NODES: usize = 2048;

/// Forward/inverse evaluation of the clock change `t <-> t'`.
#[derive(Debug, Clone)]
pub struct TimeMap {
    t_nodes: Vec<f64>,
    tprime_nodes: Vec<f64>,
    nu: TimeProfile,
}

/// Build the map on `[spec.t0, t_end]` with `n_nodes` panels boundaries.
///
/// Each panel is integrated by 5-point Gauss-Legendre quadrature; forward
/// evaluation re-integrates from the nearest node, so accuracy inside a
/// panel matches the node accuracy.
pub fn build_time_map(spec: &SystemSpec, t_end: f64, n_nodes: usize) -> Result<TimeMap> {
    if !(t_end > spec.t0) {
        return Err(Error::Invalid {
            what: "time map span",
            why: format!("need t_end > t0, got t0 = {}, t_end = {t_end}", spec.t0),
        });
    }
    if n_nodes < 2 {
        return Err(Error::Invalid {
            what: "time map nodes",
            why: format!("need at least 2 nodes, got {n_nodes}"),
        });
    }
    let (lo, hi) = spec.domain();
    if spec.t0 < lo || t_end > hi {
        return Err(Error::OutOfDomain {
            what: "time map span",
            t: t_end,
            lo,
            hi,
        });
    }
    let mut t_nodes = Vec::with_capacity(n_nodes);
    let mut tprime_nodes = Vec::with_capacity(n_nodes);
    let h = (t_end - spec.t0) / (n_nodes - 1) as f64;
    let mut tprime = spec.t0;
    t_nodes.push(spec.t0);
    tprime_nodes.push(tprime);
    for i in 1..n_nodes {
        let a = spec.t0 + (i - 1) as f64 * h;
        let b = if i == n_nodes - 1 {
            t_end
        } else {
            spec.t0 + i as f64 * h
        };
        let mut bad = None;
        let panel = gauss_legendre_5(
            |s| match spec.nu_at(s) {
                Ok(nu) if nu.is_finite() => (-2.0 * nu).exp(),
                _ => {
                    bad = Some(s);
                    f64::NAN
                }
            },
            a,
            b,
        );
        if let Some(s) = bad {
            return Err(Error::Invalid {
                what: "time map integrand",
                why: format!("non-finite nu at t = {s}"),
            });
        }
        tprime += panel;
        if tprime <= *tprime_nodes.last().unwrap() {
            return Err(Error::Invalid {
                what: "time map",
                why: format!(
                    "t' nodes degenerate near t = {b}: e^(-2 nu) too small to resolve in f64"
                ),
            });
        }
        t_nodes.push(b);
        tprime_nodes.push(tprime);
    }
    Ok(TimeMap {
        t_nodes,
        tprime_nodes,
        nu: spec.nu.clone(),
    })
}

impl TimeMap {
    /// Covered TM-time interval.
    pub fn t_range(&self) -> (f64, f64) {
        (self.t_nodes[0], *self.t_nodes.last().unwrap())
    }

    /// Covered TO-time interval.
    pub fn tprime_range(&self) -> (f64, f64) {
        (self.tprime_nodes[0], *self.tprime_nodes.last().unwrap())
    }

    /// `dt'/dt = e^{-2 nu(t)}`.
    pub fn rate(&self, t: f64) -> Result<f64> {
        Ok((-2.0 * self.nu.eval(t)?).exp())
    }

    /// Stored `(t, t')` node pairs.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t_nodes
            .iter()
            .copied()
            .zip(self.tprime_nodes.iter().copied())
    }

    fn clamp_range(t: f64, lo: f64, hi: f64, what: &'static str) -> Result<f64> {
        let tol = 1e-9 * (hi - lo).max(1.0);
        if !(t >= lo - tol && t <= hi + tol) {
            return Err(Error::OutOfDomain { what, t, lo, hi });
        }
        Ok(t.clamp(lo, hi))
    }

    /// `t'(t)`.
    pub fn forward(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.t_range();
        let t = Self::clamp_range(t, lo, hi, "time map forward")?;
        let i = locate_panel(&self.t_nodes, t);
        let base = self.t_nodes[i];
        if t == base {
            return Ok(self.tprime_nodes[i]);
        }
        let nu = &self.nu;
        Ok(self.tprime_nodes[i]
            + gauss_legendre_5(|s| (-2.0 * nu.eval(s).unwrap_or(f64::NAN)).exp(), base, t))
    }

    /// `t(t')` by safeguarded Newton iteration on the quadrature integrand.
    ///
    /// The residual is formed in panel-local coordinates: the offsets
    /// `t' - node` and the sub-panel quadrature increment are both small,
    /// so their difference keeps full relative precision even where the
    /// map saturates and `t'` values crowd together (strong gauges).
    pub fn inverse(&self, tprime: f64) -> Result<f64> {
        let (plo, phi) = self.tprime_range();
        let tprime = Self::clamp_range(tprime, plo, phi, "time map inverse")?;
        let i = locate_panel(&self.tprime_nodes, tprime);
        let (mut lo, mut hi) = (self.t_nodes[i], self.t_nodes[i + 1]);
        let (flo, fhi) = (self.tprime_nodes[i], self.tprime_nodes[i + 1]);
        if tprime == flo {
            return Ok(lo);
        }
        if tprime == fhi {
            return Ok(hi);
        }
        let base_t = lo;
        // Exact for neighboring node values (both near the same magnitude).
        let target = tprime - flo;
        let nu = &self.nu;
        let local = |t: f64| -> f64 {
            gauss_legendre_5(|s| (-2.0 * nu.eval(s).unwrap_or(f64::NAN)).exp(), base_t, t)
        };
        // Linear seed inside the bracketing panel.
        let mut t = lo + (hi - lo) * target / (fhi - flo);
        let span = self.t_range().1 - self.t_range().0;
        let tol = 5e-14 * span.max(1.0);
        for _ in 0..80 {
            let f = local(t) - target;
            if !f.is_finite() {
                return Err(Error::Invalid {
                    what: "time map inverse",
                    why: format!("non-finite integrand near t = {t}"),
                });
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let step = f / self.rate(t)?;
            let mut t_new = t - step;
            if !(t_new > lo && t_new < hi) {
                t_new = 0.5 * (lo + hi);
            }
            if (t_new - t).abs() <= tol {
                return Ok(t_new);
            }
            t = t_new;
        }
        Ok(t)
    }
}
