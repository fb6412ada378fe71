//! Spatial grids, sampled wavefunctions, and discrete calculus on them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_samples, integrate_samples_real, quadrature_weights};

/// The three related Schrodinger pictures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// Time-dependent oscillator: unit mass, stiffness `g2(t')`.
    To,
    /// Time-dependent mass: `(1/2) e^{-2 nu} P^2 + h2 e^{2 nu} X^2`.
    Tm,
    /// Time-dependent quadratic: TM plus the dilation drift `-(1/2) h D`.
    Tq,
}

impl std::fmt::Display for Frame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Frame::To => "to",
            Frame::Tm => "tm",
            Frame::Tq => "tq",
        })
    }
}

/// Uniform spatial grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    xmin: f64,
    xmax: f64,
    n: usize,
}

impl SpatialGrid {
    pub fn new(xmin: f64, xmax: f64, n: usize) -> Result<SpatialGrid> {
        if !(xmax > xmin) || !xmin.is_finite() || !xmax.is_finite() {
            return Err(Error::Invalid {
                what: "spatial grid",
                why: format!("need finite xmin < xmax, got [{xmin}, {xmax}]"),
            });
        }
        if n < 64 {
            return Err(Error::Invalid {
                what: "spatial grid",
                why: format!("need at least 64 nodes, got {n}"),
            });
        }
        Ok(SpatialGrid { xmin, xmax, n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        (self.xmax - self.xmin) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.xmin + i as f64 * self.dx()
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.xmin, self.xmax)
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }
}

/// Complex wavefunction values on a grid at one time, tagged with its frame.
///
/// `time` is `t'` for TO samples and `t` for TM/TQ samples.
#[derive(Debug, Clone)]
pub struct WaveSample {
    pub frame: Frame,
    pub time: f64,
    pub grid: SpatialGrid,
    pub values: Vec<Complex64>,
}

impl WaveSample {
    pub fn new(frame: Frame, time: f64, grid: SpatialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values on a {}-node grid",
                values.len(),
                grid.len()
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::Invalid {
                what: "wave sample",
                why: "non-finite amplitude".into(),
            });
        }
        Ok(WaveSample {
            frame,
            time,
            grid,
            values,
        })
    }

    /// L2 norm by composite quadrature.
    pub fn norm(&self) -> f64 {
        let density: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        integrate_samples_real(&density, self.grid.dx())
            .max(0.0)
            .sqrt()
    }

    /// `|1 - ||psi||^2|`; grids that truncate the state show up here.
    pub fn coverage_defect(&self) -> f64 {
        let n = self.norm();
        (1.0 - n * n).abs()
    }

    /// Largest amplitude magnitude on the two boundary nodes.
    pub fn edge_magnitude(&self) -> f64 {
        self.values[0]
            .norm()
            .max(self.values[self.values.len() - 1].norm())
    }

    pub fn scaled(&self, factor: Complex64) -> WaveSample {
        WaveSample {
            frame: self.frame,
            time: self.time,
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

fn check_same_grid(a: &WaveSample, b: &WaveSample) -> Result<()> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch(format!(
            "grids differ: {:?} vs {:?}",
            a.grid, b.grid
        )));
    }
    Ok(())
}

/// `<a|b> = int conj(a) b dx` by composite quadrature.
pub fn inner_product(a: &WaveSample, b: &WaveSample) -> Result<Complex64> {
    check_same_grid(a, b)?;
    let integrand: Vec<Complex64> = a
        .values
        .iter()
        .zip(b.values.iter())
        .map(|(x, y)| x.conj() * y)
        .collect();
    Ok(integrate_samples(&integrand, a.grid.dx()))
}

/// Raw L2 distance `||a - b||`.
pub fn l2_distance(a: &WaveSample, b: &WaveSample) -> Result<f64> {
    check_same_grid(a, b)?;
    let w = quadrature_weights(a.values.len(), a.grid.dx());
    let mut acc = 0.0;
    for ((wa, wb), wi) in a.values.iter().zip(b.values.iter()).zip(w.iter()) {
        acc += wi * (wa - wb).norm_sqr();
    }
    Ok(acc.max(0.0).sqrt())
}

/// Global-phase-insensitive distance `min_phi ||a - e^{i phi} b||`.
pub fn phase_aligned_distance(a: &WaveSample, b: &WaveSample) -> Result<f64> {
    let na = a.norm();
    let nb = b.norm();
    let overlap = inner_product(a, b)?.norm();
    Ok((na * na + nb * nb - 2.0 * overlap).max(0.0).sqrt())
}

/// Relative L2 residual `||a - b|| / ||b||`.
pub fn relative_l2(a: &WaveSample, b: &WaveSample) -> Result<f64> {
    Ok(l2_distance(a, b)? / b.norm())
}

/// 4th-order first derivative: centered in the interior, one-sided closures
/// at the two boundary nodes on each side.
pub fn deriv1(values: &[Complex64], dx: f64) -> Vec<Complex64> {
    let n = values.len();
    debug_assert!(n >= 5);
    let f = values;
    let mut out = Vec::with_capacity(n);
    out.push((-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * dx));
    out.push((-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * dx));
    for i in 2..n - 2 {
        out.push((f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * dx));
    }
    out.push(
        (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5])
            / (12.0 * dx),
    );
    out.push(
        (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5])
            / (12.0 * dx),
    );
    out
}

/// 4th-order second derivative with one-sided boundary closures.
pub fn deriv2(values: &[Complex64], dx: f64) -> Vec<Complex64> {
    let n = values.len();
    debug_assert!(n >= 6);
    let f = values;
    let h2 = dx * dx;
    // Fornberg forward coefficients at offsets 0 and 1 of a 6-point stencil.
    const EDGE0: [f64; 6] = [
        15.0 / 4.0,
        -77.0 / 6.0,
        107.0 / 6.0,
        -13.0,
        61.0 / 12.0,
        -5.0 / 6.0,
    ];
    const EDGE1: [f64; 6] = [
        5.0 / 6.0,
        -5.0 / 4.0,
        -1.0 / 3.0,
        7.0 / 6.0,
        -1.0 / 2.0,
        1.0 / 12.0,
    ];
    let apply_front = |c: &[f64; 6]| -> Complex64 {
        c.iter()
            .enumerate()
            .map(|(j, w)| *w * f[j])
            .sum::<Complex64>()
            / h2
    };
    let apply_back = |c: &[f64; 6]| -> Complex64 {
        c.iter()
            .enumerate()
            .map(|(j, w)| *w * f[n - 1 - j])
            .sum::<Complex64>()
            / h2
    };
    let mut out = Vec::with_capacity(n);
    out.push(apply_front(&EDGE0));
    out.push(apply_front(&EDGE1));
    for i in 2..n - 2 {
        out.push(
            (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / (12.0 * h2),
        );
    }
    out.push(apply_back(&EDGE1));
    out.push(apply_back(&EDGE0));
    out
}
