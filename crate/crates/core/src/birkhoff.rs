//! Leading-order solutions of iε da/dt = A(t) a for Hermitian A(t) with
//! simple spectrum:
//!
//! a(t) = Σ_j α_j e^{−iΦ_j(t)/ε} e^{iγ_j(t)} u_j(t),
//! Φ_j = ∫λ_j, γ_j = ∫ i⟨u_j|u̇_j⟩, α_j = ⟨u_j(t₀)|a(t₀)⟩.
//!
//! Branches are labelled by their rank in the sorted spectrum, which is
//! continuous while the gaps stay open. Eigenvectors carry a
//! reference-component gauge; γ_j is built from overlaps of neighbouring
//! eigenvectors, so gauge changes between nodes drop out of e^{iγ_j}u_j.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::export::{num, Table};
use crate::ode::{dp45, OdeOptions};
use crate::specfun::quadrature::adaptive_abs;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest dimension handled with dense output.
pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BirkhoffOptions {
    /// smallest admissible gap relative to ‖A‖
    pub crossing_tol: f64,
    /// admissible |A − A†| relative to max(‖A‖, 1)
    pub hermitian_tol: f64,
    /// neighbouring eigenvectors must overlap at least this much, else the
    /// interval is bisected
    pub min_overlap: f64,
    pub max_refine: u32,
    /// relative tolerance of the dynamic-phase quadrature
    pub phase_tol: f64,
}

impl Default for BirkhoffOptions {
    fn default() -> Self {
        Self { crossing_tol: 1e-8, hermitian_tol: 1e-12, min_overlap: 0.99, max_refine: 30, phase_tol: 1e-13 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapReport {
    pub min_gap: f64,
    pub time: f64,
    /// spectral radius of A at that time
    pub norm: f64,
    /// sorted-branch indices of the closest pair
    pub lower: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BirkhoffSolution {
    pub epsilon: f64,
    pub times: Vec<f64>,
    /// λ_j(t_i), ascending in j
    pub eigenvalues: Vec<Vec<f64>>,
    /// columns u_j(t_i)
    #[serde(skip)]
    pub vectors: Vec<CMatrix>,
    /// Φ_j(t_i) = ∫_{t₀}^{t_i} λ_j
    pub dynamic: Vec<Vec<f64>>,
    /// γ_j(t_i)
    pub geometric: Vec<Vec<f64>>,
    pub alpha: Vec<Complex64>,
    pub amplitudes: Vec<Vec<Complex64>>,
    pub gap: GapReport,
}

struct Decomp {
    values: Vec<f64>,
    vectors: CMatrix,
    norm: f64,
}

fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

fn spectral(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let e = hermitian_part(a).symmetric_eigen();
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&x, &y| e.eigenvalues[x].total_cmp(&e.eigenvalues[y]));
    let values = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(a.nrows(), idx.len(), |r, c| e.eigenvectors[(r, idx[c])]);
    (values, vectors)
}

fn decompose(a: &CMatrix, t: f64, opts: &BirkhoffOptions) -> Result<Decomp> {
    if a.nrows() != a.ncols() {
        return Err(Error::invalid(format!("A({t}) is not square")));
    }
    let dev = (a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (values, vectors) = spectral(a);
    let norm = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if dev > opts.hermitian_tol * norm.max(1.0) {
        return Err(Error::NonHermitian { time: t, deviation: dev });
    }
    Ok(Decomp { values, vectors, norm })
}

fn min_gap(d: &Decomp) -> (f64, usize) {
    d.values
        .windows(2)
        .enumerate()
        .map(|(i, w)| (w[1] - w[0], i))
        .fold((f64::INFINITY, 0), |acc, x| if x.0 < acc.0 { x } else { acc })
}

fn column(m: &CMatrix, j: usize) -> CVector {
    m.column(j).into_owned()
}

fn dot(a: &CVector, b: &CVector) -> Complex64 {
    a.dotc(b)
}

/// Makes component `r` real and positive.
fn gauge(u: &mut CVector, r: usize) {
    let z = u[r];
    if z.norm() > 0.0 {
        *u *= z.conj() / z.norm();
    }
}

fn pick_reference(u: &CVector) -> usize {
    u.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).map_or(0, |x| x.0)
}

struct Walker<'a, F: Fn(f64) -> CMatrix> {
    a: &'a F,
    opts: &'a BirkhoffOptions,
    gap: GapReport,
}

impl<F: Fn(f64) -> CMatrix> Walker<'_, F> {
    fn vector_at(&mut self, t: f64, j: usize, r: usize) -> Result<CVector> {
        let d = decompose(&(self.a)(t), t, self.opts)?;
        self.note_gap(&d, t)?;
        let mut u = column(&d.vectors, j);
        gauge(&mut u, r);
        Ok(u)
    }

    fn note_gap(&mut self, d: &Decomp, t: f64) -> Result<()> {
        if d.values.len() < 2 {
            return Ok(());
        }
        let (g, i) = min_gap(d);
        if g < self.gap.min_gap {
            self.gap = GapReport { min_gap: g, time: t, norm: d.norm, lower: i };
        }
        if g <= self.opts.crossing_tol * d.norm {
            return Err(Error::Crossing { gap: g, time: t });
        }
        Ok(())
    }

    /// γ(b) − γ(a) for branch j from eigenvectors at a, (a+b)/2, b.
    #[allow(clippy::too_many_arguments)]
    fn segment(
        &mut self,
        ta: f64,
        ua: &CVector,
        um: &CVector,
        tb: f64,
        ub: &CVector,
        j: usize,
        r: usize,
        depth: u32,
    ) -> Result<f64> {
        let full = dot(ua, ub);
        let o1 = dot(ua, um);
        let o2 = dot(um, ub);
        let worst = full.norm().min(o1.norm()).min(o2.norm());
        if worst < self.opts.min_overlap {
            if depth >= self.opts.max_refine {
                return Err(Error::Continuation { time: ta });
            }
            let tm = 0.5 * (ta + tb);
            let q1 = self.vector_at(0.5 * (ta + tm), j, r)?;
            let q3 = self.vector_at(0.5 * (tm + tb), j, r)?;
            return Ok(self.segment(ta, ua, &q1, tm, um, j, r, depth + 1)?
                + self.segment(tm, um, &q3, tb, ub, j, r, depth + 1)?);
        }
        let half = o1.arg() + o2.arg();
        let mut whole = full.arg();
        whole += 2.0 * PI * ((half - whole) / (2.0 * PI)).round();
        // arg is odd under a ↔ b, so the local error is O(h³) and one
        // Richardson step leaves O(h⁵)
        Ok(-(4.0 * half - whole) / 3.0)
    }
}

fn check_inputs(dim: usize, epsilon: f64, a0: &[Complex64], times: &[f64]) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::invalid(format!("dimension {dim} outside 1..={MAX_DIM}")));
    }
    if a0.len() != dim {
        return Err(Error::invalid(format!("initial vector has length {}, A is {dim}x{dim}", a0.len())));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::invalid(format!("epsilon must be > 0, got {epsilon}")));
    }
    if times.len() < 2 || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("time grid must have ≥ 2 strictly increasing points"));
    }
    Ok(())
}

/// Leading-order solution on `times` with initial amplitudes `a0` at
/// `times[0]`.
pub fn birkhoff_solve<F>(
    a: F,
    epsilon: f64,
    a0: &[Complex64],
    times: &[f64],
    opts: &BirkhoffOptions,
) -> Result<BirkhoffSolution>
where
    F: Fn(f64) -> CMatrix + Sync,
{
    let t0 = *times.first().ok_or_else(|| Error::invalid("empty time grid"))?;
    let dim = a(t0).nrows();
    check_inputs(dim, epsilon, a0, times)?;
    let m = times.len() - 1;

    // nodes and midpoints decompose independently
    let points: Vec<f64> = (0..=2 * m)
        .map(|i| if i % 2 == 0 { times[i / 2] } else { 0.5 * (times[i / 2] + times[i / 2 + 1]) })
        .collect();
    let decs = points.par_iter().map(|&t| decompose(&a(t), t, opts)).collect::<Result<Vec<_>>>()?;

    // Φ increments per interval by adaptive quadrature of each branch
    let dphi = (0..m)
        .into_par_iter()
        .map(|i| {
            let (ta, tb) = (times[i], times[i + 1]);
            let scale = decs[2 * i].norm.max(decs[2 * i + 2].norm).max(1e-300);
            (0..dim)
                .map(|j| {
                    adaptive_abs(
                        |t| spectral(&a(t)).0[j],
                        ta,
                        tb,
                        opts.phase_tol,
                        1e-15 * scale * (tb - ta),
                    )
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut walker = Walker {
        a: &a,
        opts,
        gap: GapReport { min_gap: f64::INFINITY, time: times[0], norm: decs[0].norm, lower: 0 },
    };
    for (d, &t) in decs.iter().zip(&points) {
        walker.note_gap(d, t)?;
    }

    let mut refs: Vec<usize> = (0..dim).map(|j| pick_reference(&column(&decs[0].vectors, j))).collect();
    let mut cur: Vec<CVector> = (0..dim)
        .map(|j| {
            let mut u = column(&decs[0].vectors, j);
            gauge(&mut u, refs[j]);
            u
        })
        .collect();
    let mut vectors = vec![CMatrix::from_columns(&cur)];
    let mut geometric = vec![vec![0.0; dim]];
    let mut dynamic = vec![vec![0.0; dim]];
    for i in 0..m {
        let mut next = Vec::with_capacity(dim);
        let mut g = geometric[i].clone();
        for j in 0..dim {
            let mut um = column(&decs[2 * i + 1].vectors, j);
            let mut ub = column(&decs[2 * i + 2].vectors, j);
            gauge(&mut um, refs[j]);
            gauge(&mut ub, refs[j]);
            g[j] += walker.segment(times[i], &cur[j], &um, times[i + 1], &ub, j, refs[j], 0)?;
            if ub[refs[j]].norm() < 0.1 {
                // the reference component is fading; move to the largest one
                // and keep e^{iγ}u continuous across the gauge change
                let before = ub.clone();
                refs[j] = pick_reference(&ub);
                gauge(&mut ub, refs[j]);
                g[j] -= dot(&before, &ub).arg();
            }
            next.push(ub);
        }
        let d: Vec<f64> = dynamic[i].iter().zip(&dphi[i]).map(|(p, q)| p + q).collect();
        dynamic.push(d);
        geometric.push(g);
        vectors.push(CMatrix::from_columns(&next));
        cur = next;
    }
    let gap = walker.gap;

    let a0v = CVector::from_column_slice(a0);
    let alpha: Vec<Complex64> = (0..dim).map(|j| dot(&column(&vectors[0], j), &a0v)).collect();
    let amplitudes = (0..=m)
        .map(|i| {
            let mut acc = CVector::zeros(dim);
            for j in 0..dim {
                let ph = Complex64::from_polar(1.0, -dynamic[i][j] / epsilon + geometric[i][j]);
                acc += column(&vectors[i], j) * (alpha[j] * ph);
            }
            acc.iter().copied().collect()
        })
        .collect();
    let eigenvalues = (0..=m).map(|i| decs[2 * i].values.clone()).collect();
    Ok(BirkhoffSolution {
        epsilon,
        times: times.to_vec(),
        eigenvalues,
        vectors,
        dynamic,
        geometric,
        alpha,
        amplitudes,
        gap,
    })
}

/// Direct adaptive integration of iε da/dt = A(t)a, output on `times`.
pub fn direct_integrate<F>(a: F, epsilon: f64, a0: &[Complex64], times: &[f64], tol: f64) -> Result<Vec<Vec<Complex64>>>
where
    F: Fn(f64) -> CMatrix,
{
    let t0 = *times.first().ok_or_else(|| Error::invalid("empty time grid"))?;
    let dim = a(t0).nrows();
    check_inputs(dim, epsilon, a0, times)?;
    let scale = Complex64::new(0.0, -1.0 / epsilon);
    let opts = OdeOptions { rtol: tol, atol: tol * 0.1, ..OdeOptions::default() };
    let (ys, _) = dp45(
        |t, y, dy| {
            let m = a(t);
            for r in 0..dim {
                let mut s = Complex64::new(0.0, 0.0);
                for c in 0..dim {
                    s += m[(r, c)] * y[c];
                }
                dy[r] = scale * s;
            }
        },
        a0,
        times,
        opts,
    )?;
    Ok(ys)
}

/// max_t ‖x(t) − y(t)‖.
#[must_use]
pub fn max_deviation(x: &[Vec<Complex64>], y: &[Vec<Complex64>]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(u, v)| u.iter().zip(v).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// A(t) = diag(0, 2, 4, …) + Σ_m H_m cos(ν_m t + φ_m) with seeded random
/// Hermitian H_m of entry size `coupling`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomHermitianFamily {
    pub diag: Vec<f64>,
    pub modes: Vec<(CMatrix, f64, f64)>,
}

impl RandomHermitianFamily {
    #[must_use]
    pub fn new(dim: usize, seed: u64, coupling: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let diag = (0..dim).map(|i| 2.0 * i as f64).collect();
        let modes = (0..3)
            .map(|_| {
                let mut h = CMatrix::zeros(dim, dim);
                for r in 0..dim {
                    h[(r, r)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0) * coupling;
                    for c in r + 1..dim {
                        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * coupling;
                        h[(r, c)] = z;
                        h[(c, r)] = z.conj();
                    }
                }
                (h, rng.gen_range(0.5..1.5), rng.gen_range(0.0..2.0 * PI))
            })
            .collect();
        Self { diag, modes }
    }

    #[must_use]
    pub fn eval(&self, t: f64) -> CMatrix {
        let n = self.diag.len();
        let mut m = CMatrix::from_diagonal(&CVector::from_iterator(n, self.diag.iter().map(|&d| Complex64::new(d, 0.0))));
        for (h, nu, ph) in &self.modes {
            m += h * Complex64::new((nu * t + ph).cos(), 0.0);
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergencePoint {
    pub epsilon: f64,
    pub error: f64,
}

/// Birkhoff vs direct error for each ε.
pub fn convergence_sweep<F>(
    a: F,
    epsilons: &[f64],
    a0: &[Complex64],
    times: &[f64],
    opts: &BirkhoffOptions,
) -> Result<Vec<ConvergencePoint>>
where
    F: Fn(f64) -> CMatrix + Sync,
{
    epsilons
        .par_iter()
        .map(|&eps| {
            let b = birkhoff_solve(&a, eps, a0, times, opts)?;
            let d = direct_integrate(&a, eps, a0, times, 1e-12)?;
            Ok(ConvergencePoint { epsilon: eps, error: max_deviation(&b.amplitudes, &d) })
        })
        .collect()
}

/// Least-squares slope of log(error) against log(ε).
#[must_use]
pub fn fitted_order(points: &[ConvergencePoint]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.epsilon.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.error.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

impl BirkhoffSolution {
    /// t, Re/Im a_k, λ_j, Φ_j, γ_j.
    #[must_use]
    pub fn table(&self) -> Table {
        let dim = self.alpha.len();
        let mut cols = vec!["t".to_string()];
        for k in 0..dim {
            cols.push(format!("re_a{k}"));
            cols.push(format!("im_a{k}"));
        }
        for j in 0..dim {
            cols.push(format!("lambda{j}"));
            cols.push(format!("dynamic{j}"));
            cols.push(format!("geometric{j}"));
        }
        let mut t = Table::new(&cols);
        for i in 0..self.times.len() {
            let mut row = vec![num(self.times[i])];
            for z in &self.amplitudes[i] {
                row.push(num(z.re));
                row.push(num(z.im));
            }
            for j in 0..dim {
                row.push(num(self.eigenvalues[i][j]));
                row.push(num(self.dynamic[i][j]));
                row.push(num(self.geometric[i][j]));
            }
            t.push(row);
        }
        t
    }
}
