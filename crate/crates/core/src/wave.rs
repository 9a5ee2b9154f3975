//! Time extension of edge functions, d'Alembert operators `C(tau)` and wave
//! propagation on the metric graph.
//!
//! The extension `F~(xy, t)` of a sampled function is defined for all real
//! `t` by stepping one unit at a time through the vertices: past the head `y`
//! the wave splits into the edges at `y` with weights `2 c(yv) / m0(y)` minus
//! the reflected part, and symmetrically before the tail. Shifts by `tau` are
//! index shifts on the sample grid, so `tau` must be a multiple of `1/N`.

use num_complex::Complex64;

use crate::edge_function::SampledEdgeFunction;
use crate::error::{Error, Result};
use crate::network::{DirEdge, Network};

/// Default step (in grid units) of the time difference used by the wave
/// residual.
pub const WAVE_STEPS: usize = 16;

/// Converts `tau` to a whole number of grid steps `tau * N`.
pub fn grid_steps(tau: f64, n: usize) -> Result<i64> {
    let steps = tau * n as f64;
    let rounded = steps.round();
    if !tau.is_finite() || (steps - rounded).abs() > 1e-9 * rounded.abs().max(1.0) {
        return Err(Error::UnalignedTau(tau));
    }
    Ok(rounded as i64)
}

/// A function on the edge grid that may jump at interior nodes: `left[e][k]`
/// and `right[e][k]` are the limits from below and above at `t_k`. At the edge
/// ends only the inward limit is meaningful.
#[derive(Debug, Clone)]
pub(crate) struct Sided {
    n: usize,
    left: Vec<Vec<Complex64>>,
    right: Vec<Vec<Complex64>>,
}

impl Sided {
    pub(crate) fn from_samples(f: &SampledEdgeFunction<'_>) -> Self {
        Sided {
            n: f.grid_size(),
            left: f.values().to_vec(),
            right: f.values().to_vec(),
        }
    }

    fn zeros(edges: usize, n: usize) -> Self {
        let z = vec![vec![Complex64::new(0.0, 0.0); n + 1]; edges];
        Sided {
            n,
            left: z.clone(),
            right: z,
        }
    }

    /// `self += w * other`.
    fn add_scaled(&mut self, other: &Sided, w: Complex64) {
        for (a, b) in self.left.iter_mut().zip(&other.left) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y * w);
        }
        for (a, b) in self.right.iter_mut().zip(&other.right) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y * w);
        }
    }

    /// One value per node: the inward limit at the edge ends, the midpoint of
    /// the two limits inside.
    pub(crate) fn collapse<'a>(&self, net: &'a Network) -> Result<SampledEdgeFunction<'a>> {
        let n = self.n;
        let values = self
            .left
            .iter()
            .zip(&self.right)
            .map(|(l, r)| {
                (0..=n)
                    .map(|k| match k {
                        0 => r[0],
                        k if k == n => l[n],
                        k => (l[k] + r[k]) * 0.5,
                    })
                    .collect()
            })
            .collect();
        SampledEdgeFunction::from_values(net, n, values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Samples of `F~` on every canonical edge at `t_k = k/N`,
/// `k = -T N ..= (T+1) N`, kept as left and right limits since `F~` jumps at
/// integer times whenever `F` is discontinuous at a vertex. The reversed
/// orientation is read through `F~(yx, t) = F~(xy, 1 - t)`, which swaps the
/// sides.
#[derive(Debug, Clone)]
pub struct Extension<'a> {
    net: &'a Network,
    n: usize,
    horizon: usize,
    left: Vec<Vec<Complex64>>,
    right: Vec<Vec<Complex64>>,
    /// Midpoints of the two limits, for single-valued output at interior nodes.
    mid: Vec<Vec<Complex64>>,
}

impl<'a> Extension<'a> {
    pub fn new(net: &'a Network, f: &SampledEdgeFunction<'a>, horizon: usize) -> Result<Self> {
        Self::from_sided(net, &Sided::from_samples(f), horizon)
    }

    pub(crate) fn from_sided(net: &'a Network, f: &Sided, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Domain("extension horizon must be >= 1".into()));
        }
        let n = f.n;
        let offset = horizon * n;
        let len = (2 * horizon + 1) * n + 1;
        let mut left = vec![vec![Complex64::new(0.0, 0.0); len]; net.num_edges()];
        let mut right = left.clone();
        for e in 0..net.num_edges() {
            left[e][offset + 1..=offset + n].copy_from_slice(&f.left[e][1..=n]);
            right[e][offset..offset + n].copy_from_slice(&f.right[e][..n]);
        }
        let mut ext = Extension {
            net,
            n,
            horizon,
            left,
            right,
            mid: Vec::new(),
        };
        let (ni, hi) = (n as i64, horizon as i64);
        for m in 1..=hi {
            // limits from below at t > 1 follow the forward rule from t = 1
            // exclusive, limits from above from t = 1 inclusive; mirrored for
            // the backward rule at t <= 0
            let plan = [
                (Side::Left, m * ni + 1, true),
                (Side::Right, m * ni, true),
                (Side::Left, -m * ni + 1, false),
                (Side::Right, -m * ni, false),
            ];
            let mut fresh = Vec::with_capacity(plan.len());
            for &(side, start, forward) in &plan {
                let mut block = Vec::with_capacity(net.num_edges());
                for (e, edge) in net.edges().iter().enumerate() {
                    let d = DirEdge {
                        edge: e,
                        forward: true,
                    };
                    let vals: Vec<Complex64> = (start..start + ni)
                        .map(|k| {
                            if forward {
                                // F~(xy, t) = 2/m0(y) sum_v c(yv) F~(yv, t-1) - F~(yx, t-1)
                                ext.outflow(side, edge.v, k - ni) * 2.0 - ext.get(side, d.reversed(), k - ni)
                            } else {
                                // F~(xy, t) = 2/m0(x) sum_u c(ux) F~(ux, t+1) - F~(yx, t+1)
                                ext.inflow(side, edge.u, k + ni) * 2.0 - ext.get(side, d.reversed(), k + ni)
                            }
                        })
                        .collect();
                    block.push(vals);
                }
                fresh.push(block);
            }
            for (&(side, start, _), block) in plan.iter().zip(fresh) {
                let at = ext.slot(start);
                for (e, vals) in block.into_iter().enumerate() {
                    let row = match side {
                        Side::Left => &mut ext.left[e],
                        Side::Right => &mut ext.right[e],
                    };
                    row[at..at + n].copy_from_slice(&vals);
                }
            }
        }
        ext.mid = ext
            .left
            .iter()
            .zip(&ext.right)
            .map(|(l, r)| l.iter().zip(r).map(|(a, b)| (a + b) * 0.5).collect())
            .collect();
        Ok(ext)
    }

    fn slot(&self, k: i64) -> usize {
        (k + (self.horizon * self.n) as i64) as usize
    }

    fn get(&self, side: Side, d: DirEdge, k: i64) -> Complex64 {
        let (side, k) = if d.forward {
            (side, k)
        } else {
            let flipped = match side {
                Side::Left => Side::Right,
                Side::Right => Side::Left,
            };
            (flipped, self.n as i64 - k)
        };
        match side {
            Side::Left => self.left[d.edge][self.slot(k)],
            Side::Right => self.right[d.edge][self.slot(k)],
        }
    }

    /// `(1/m0(y)) sum_v c(yv) F~(yv, t_k)`.
    fn outflow(&self, side: Side, y: usize, k: i64) -> Complex64 {
        let sum: Complex64 = self
            .net
            .neighbors(y)
            .iter()
            .map(|&(_, e)| self.get(side, self.net.leaving(y, e), k) * self.net.edge(e).c)
            .sum();
        sum / self.net.measure(y)
    }

    /// `(1/m0(x)) sum_u c(ux) F~(ux, t_k)`.
    fn inflow(&self, side: Side, x: usize, k: i64) -> Complex64 {
        let sum: Complex64 = self
            .net
            .neighbors(x)
            .iter()
            .map(|&(_, e)| self.get(side, self.net.leaving(x, e).reversed(), k) * self.net.edge(e).c)
            .sum();
        sum / self.net.measure(x)
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Smallest and largest stored node index.
    pub fn node_range(&self) -> (i64, i64) {
        let (n, h) = (self.n as i64, self.horizon as i64);
        (-h * n, (h + 1) * n)
    }

    /// Limit of `F~(d, t)` as `t` increases to `k/N`; `k > -T N`.
    pub fn left_limit(&self, d: DirEdge, k: i64) -> Complex64 {
        self.get(Side::Left, d, k)
    }

    /// Limit of `F~(d, t)` as `t` decreases to `k/N`; `k < (T+1) N`.
    pub fn right_limit(&self, d: DirEdge, k: i64) -> Complex64 {
        self.get(Side::Right, d, k)
    }

    /// `F~(d, k/N)`: the midpoint of the one-sided limits, or the only one
    /// available at the ends of the stored range.
    pub fn at(&self, d: DirEdge, k: i64) -> Complex64 {
        let (lo, hi) = self.node_range();
        let lo = if d.forward { lo } else { self.n as i64 - hi };
        let hi = if d.forward {
            hi
        } else {
            self.n as i64 - self.node_range().0
        };
        if k == lo {
            self.right_limit(d, k)
        } else if k == hi {
            self.left_limit(d, k)
        } else {
            (self.left_limit(d, k) + self.right_limit(d, k)) * 0.5
        }
    }

    fn check_steps(&self, steps: i64) -> Result<()> {
        if steps.unsigned_abs() as usize > self.horizon * self.n {
            return Err(Error::BeyondHorizon {
                tau: steps as f64 / self.n as f64,
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    fn sided_map(&self, value: impl Fn(&[Complex64], usize) -> Complex64) -> Sided {
        let n = self.n;
        let base = self.slot(0);
        let mut out = Sided::zeros(self.net.num_edges(), n);
        for e in 0..self.net.num_edges() {
            for k in 1..=n {
                out.left[e][k] = value(&self.left[e], base + k);
            }
            for k in 0..n {
                out.right[e][k] = value(&self.right[e], base + k);
            }
            out.left[e][0] = out.right[e][0];
            out.right[e][n] = out.left[e][n];
        }
        out
    }

    /// Same as `sided_map(value).collapse()` in one pass.
    fn collapsed_map(
        &self,
        value: impl Fn(&[Complex64], usize) -> Complex64,
    ) -> Result<SampledEdgeFunction<'a>> {
        let n = self.n;
        let base = self.slot(0);
        let values = (0..self.net.num_edges())
            .map(|e| {
                let mut row = Vec::with_capacity(n + 1);
                row.push(value(&self.right[e], base));
                row.extend((1..n).map(|k| value(&self.mid[e], base + k)));
                row.push(value(&self.left[e], base + n));
                row
            })
            .collect();
        SampledEdgeFunction::from_values(self.net, n, values)
    }

    /// `F^tau(xy, t) = F~(xy, t + tau)` with `tau = steps / N`.
    pub fn shifted(&self, steps: i64) -> Result<SampledEdgeFunction<'a>> {
        self.check_steps(steps)?;
        let s = steps as isize;
        self.collapsed_map(|row, i| row[(i as isize + s) as usize])
    }

    pub(crate) fn dalembert_sided(&self, steps: i64) -> Result<Sided> {
        self.check_steps(steps)?;
        let j = steps.unsigned_abs() as usize;
        Ok(self.sided_map(|row, i| (row[i + j] + row[i - j]) * 0.5))
    }

    /// `C(tau) F` with `tau = steps / N`.
    pub fn dalembert_steps(&self, steps: i64) -> Result<SampledEdgeFunction<'a>> {
        self.check_steps(steps)?;
        let j = steps.unsigned_abs() as usize;
        self.collapsed_map(|row, i| (row[i + j] + row[i - j]) * 0.5)
    }

    /// `C(tau) F`; `tau` must be a multiple of `1/N` within the horizon.
    pub fn dalembert(&self, tau: f64) -> Result<SampledEdgeFunction<'a>> {
        self.dalembert_steps(grid_steps(tau, self.n)?)
    }
}

/// Extension of `f` up to horizon `T`.
pub fn extend<'a>(net: &'a Network, f: &SampledEdgeFunction<'a>, horizon: usize) -> Result<Extension<'a>> {
    Extension::new(net, f, horizon)
}

fn horizon_for(steps: i64, n: usize) -> usize {
    (steps.unsigned_abs() as usize).div_ceil(n).max(1)
}

/// `C(tau) F = (F~(., t + tau) + F~(., t - tau)) / 2`.
pub fn dalembert<'a>(
    net: &'a Network,
    f: &SampledEdgeFunction<'a>,
    tau: f64,
) -> Result<SampledEdgeFunction<'a>> {
    let steps = grid_steps(tau, f.grid_size())?;
    Extension::new(net, f, horizon_for(steps, f.grid_size()))?.dalembert_steps(steps)
}

/// `G(tau) = C(tau) F0 + int_0^tau C(s) F1 ds`, the integral by the
/// trapezoid rule on the grid `s = j/N`.
pub fn wave_solution<'a>(
    net: &'a Network,
    f0: &SampledEdgeFunction<'a>,
    f1: &SampledEdgeFunction<'a>,
    tau: f64,
) -> Result<SampledEdgeFunction<'a>> {
    let n = f0.grid_size();
    if f1.grid_size() != n {
        return Err(Error::Mismatch(format!(
            "grid sizes {} and {}",
            n,
            f1.grid_size()
        )));
    }
    let steps = grid_steps(tau, n)?;
    let horizon = horizon_for(steps, n);
    let start = Extension::new(net, f0, horizon)?.dalembert_steps(steps)?;
    let velocity = Extension::new(net, f1, horizon)?;
    let mut acc = Sided::zeros(net.num_edges(), n);
    let h = steps.signum() as f64 / n as f64;
    let last = steps.abs();
    for j in 0..=last {
        let w = if j == 0 || j == last { 0.5 * h } else { h };
        acc.add_scaled(&velocity.dalembert_sided(j)?, Complex64::new(w, 0.0));
    }
    start.combine(
        Complex64::new(1.0, 0.0),
        &acc.collapse(net)?,
        Complex64::new(1.0, 0.0),
    )
}

/// Normalized defects of the functional equations satisfied by `C(tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    /// `C(tau+1) + C(tau-1) = 2 C(1) C(tau)`.
    pub cc2: f64,
    /// `C(2 tau) + 1 = 2 C(tau)^2`.
    pub half_angle: f64,
    /// Central-difference defect of the wave equation.
    pub wave: f64,
}

fn relative(defect: &SampledEdgeFunction<'_>, scale: f64) -> f64 {
    let d = defect.norm();
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}

pub fn cc2_residual<'a>(net: &'a Network, f: &SampledEdgeFunction<'a>, tau: f64) -> Result<f64> {
    let n = f.grid_size();
    let steps = grid_steps(tau, n)?;
    let ni = n as i64;
    let one = Complex64::new(1.0, 0.0);
    let ext = Extension::new(net, f, horizon_for(steps.abs() + ni, n))?;
    let mut defect = ext.dalembert_sided(steps + ni)?;
    defect.add_scaled(&ext.dalembert_sided(steps - ni)?, one);
    let inner = ext.dalembert_sided(steps)?;
    defect.add_scaled(
        &Extension::from_sided(net, &inner, 1)?.dalembert_sided(ni)?,
        -one * 2.0,
    );
    Ok(relative(&defect.collapse(net)?, f.norm()))
}

/// Requires `0 <= tau <= 1/2`.
pub fn half_angle_residual<'a>(net: &'a Network, f: &SampledEdgeFunction<'a>, tau: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&tau) {
        return Err(Error::Domain(format!(
            "half-angle identity needs tau in [0, 1/2], got {tau}"
        )));
    }
    let n = f.grid_size();
    let steps = grid_steps(tau, n)?;
    let one = Complex64::new(1.0, 0.0);
    let ext = Extension::new(net, f, 1)?;
    let mut defect = ext.dalembert_sided(2 * steps)?;
    defect.add_scaled(&Sided::from_samples(f), one);
    let once = ext.dalembert_sided(steps)?;
    let twice = Extension::from_sided(net, &once, 1)?.dalembert_sided(steps)?;
    defect.add_scaled(&twice, -one * 2.0);
    Ok(relative(&defect.collapse(net)?, f.norm()))
}

/// `|| d^2/dtau^2 C(tau)F - d^2/dt^2 C(tau)F || / ||F||`, the time derivative
/// by a central difference with step `dtau_steps / N`, the space derivative
/// by the second-order grid stencil (one-sided at the edge ends).
pub fn wave_residual<'a>(
    net: &'a Network,
    f: &SampledEdgeFunction<'a>,
    tau: f64,
    dtau_steps: usize,
) -> Result<f64> {
    let n = f.grid_size();
    if n < 4 {
        return Err(Error::InvalidGrid(n));
    }
    let steps = grid_steps(tau, n)?;
    let ds = dtau_steps as i64;
    if ds == 0 {
        return Err(Error::Domain("time step must be positive".into()));
    }
    let ext = Extension::new(net, f, horizon_for(steps.abs() + ds, n))?;
    let (prev, cur, next) = (
        ext.dalembert_steps(steps - ds)?,
        ext.dalembert_steps(steps)?,
        ext.dalembert_steps(steps + ds)?,
    );
    let dt = ds as f64 / n as f64;
    let h = 1.0 / n as f64;
    let values = (0..net.num_edges())
        .map(|e| {
            let g = cur.edge(e);
            (0..=n)
                .map(|k| {
                    let time = (next.edge(e)[k] - g[k] * 2.0 + prev.edge(e)[k]) / (dt * dt);
                    let space = if k == 0 {
                        g[0] * 2.0 - g[1] * 5.0 + g[2] * 4.0 - g[3]
                    } else if k == n {
                        g[n] * 2.0 - g[n - 1] * 5.0 + g[n - 2] * 4.0 - g[n - 3]
                    } else {
                        g[k + 1] - g[k] * 2.0 + g[k - 1]
                    } / (h * h);
                    time - space
                })
                .collect()
        })
        .collect();
    let defect = SampledEdgeFunction::from_values(net, n, values)?;
    Ok(relative(&defect, f.norm()))
}

/// All three identity defects at `tau`; `tau` must lie in `[0, 1/2]` for the
/// half-angle identity.
pub fn identity_residuals<'a>(
    net: &'a Network,
    f: &SampledEdgeFunction<'a>,
    tau: f64,
) -> Result<IdentityResiduals> {
    Ok(IdentityResiduals {
        half_angle: half_angle_residual(net, f, tau)?,
        cc2: cc2_residual(net, f, tau)?,
        wave: wave_residual(net, f, tau, WAVE_STEPS)?,
    })
}

/// Wave trace CSV: `tau,edge_u,edge_v,k,re,im`, one block per `tau`.
pub fn write_wave_csv<W: std::io::Write>(
    mut w: W,
    frames: &[(f64, SampledEdgeFunction<'_>)],
) -> std::io::Result<()> {
    writeln!(w, "tau,edge_u,edge_v,k,re,im")?;
    for (tau, g) in frames {
        let net = g.network();
        for (e, edge) in net.edges().iter().enumerate() {
            let (u, v) = (net.vertex_id(edge.u), net.vertex_id(edge.v));
            for (k, val) in g.edge(e).iter().enumerate() {
                writeln!(w, "{tau:.12e},{u},{v},{k},{:.12e},{:.12e}", val.re, val.im)?;
            }
        }
    }
    Ok(())
}
