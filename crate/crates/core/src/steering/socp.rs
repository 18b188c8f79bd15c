//! Primal–dual interior-point method for linear programs over products of
//! second-order cones,
//!
//! ```text
//!   minimize cᵀx  subject to  Ax = b,  x ∈ K = K_1 × … × K_r,
//!   maximize bᵀy  subject to  Aᵀy + z = c,  z ∈ K,
//! ```
//!
//! where each K_k = {(t, v) : t ≥ ‖v‖}. A one-dimensional block is the
//! nonnegative half-line. Nesterov–Todd scaling with a Mehrotra
//! predictor–corrector; the normal equations are dense (m is small) and the
//! constraint columns are sparse per block.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};

/// A cone block with its slice of the constraint matrix and objective.
#[derive(Clone, Debug)]
pub struct ConeBlock {
    pub dim: usize,
    /// Nonzeros of the block's columns as (row, column-within-block, value).
    pub entries: Vec<(usize, usize, f64)>,
    pub c: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ConeProgram {
    pub rows: usize,
    pub b: Vec<f64>,
    pub blocks: Vec<ConeBlock>,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Target for primal/dual residuals and the duality gap.
    pub tolerance: f64,
    /// Looser level accepted when the iteration budget runs out.
    pub acceptable: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 120,
            tolerance: 1e-10,
            acceptable: 1e-6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConeSolution {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub z: Vec<Vec<f64>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub residual: f64,
    pub iterations: usize,
}

const REFINEMENT_STEPS: usize = 2;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn det(v: &[f64]) -> f64 {
    v[0] * v[0] - dot(&v[1..], &v[1..])
}

/// Jordan product u ∘ v = (uᵀv, u0 v1 + v0 u1).
fn jordan(u: &[f64], v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(u.len());
    out.push(dot(u, v));
    for i in 1..u.len() {
        out.push(u[0] * v[i] + v[0] * u[i]);
    }
    out
}

/// Solves λ ∘ d = r for d.
fn jordan_solve(l: &[f64], r: &[f64]) -> Vec<f64> {
    let d0 = (l[0] * r[0] - dot(&l[1..], &r[1..])) / det(l);
    let mut out = vec![d0];
    for i in 1..l.len() {
        out.push((r[i] - d0 * l[i]) / l[0]);
    }
    out
}

/// Largest α with v + α·dv in the cone (∞ if unbounded).
fn max_step(v: &[f64], dv: &[f64]) -> f64 {
    if v.len() == 1 {
        return if dv[0] < 0.0 {
            -v[0] / dv[0]
        } else {
            f64::INFINITY
        };
    }
    // det(v + α dv) = aα² + 2bα + c, c > 0; first positive root
    let a = det(dv);
    let b = v[0] * dv[0] - dot(&v[1..], &dv[1..]);
    let c = det(v);
    let scale = a.abs().max(b.abs()).max(c.abs());
    if a.abs() <= 1e-15 * scale {
        return if b < 0.0 {
            -c / (2.0 * b)
        } else {
            f64::INFINITY
        };
    }
    let disc = b * b - a * c;
    if disc < 0.0 {
        return f64::INFINITY;
    }
    let sq = disc.sqrt();
    // stable roots of aα² + 2bα + c
    let q = -(b + b.signum() * sq);
    let (r1, r2) = if q != 0.0 {
        (q / a, c / q)
    } else {
        (-b / a, -b / a)
    };
    [r1, r2]
        .into_iter()
        .filter(|&r| r > 0.0)
        .fold(f64::INFINITY, f64::min)
}

/// Nesterov–Todd scaling W = θ·W̄ for one block.
#[derive(Clone, Debug)]
struct Scaling {
    theta: f64,
    w: Vec<f64>,
}

impl Scaling {
    fn new(x: &[f64], z: &[f64]) -> Self {
        let (dx, dz) = (det(x).sqrt(), det(z).sqrt());
        let xb: Vec<f64> = x.iter().map(|v| v / dx).collect();
        let zb: Vec<f64> = z.iter().map(|v| v / dz).collect();
        let gamma = ((1.0 + dot(&xb, &zb)) / 2.0).sqrt();
        let mut w = Vec::with_capacity(x.len());
        w.push((xb[0] + zb[0]) / (2.0 * gamma));
        for i in 1..x.len() {
            w.push((xb[i] - zb[i]) / (2.0 * gamma));
        }
        Self {
            theta: (dx / dz).sqrt(),
            w,
        }
    }

    fn bar(&self, v: &[f64]) -> Vec<f64> {
        let w = &self.w;
        let w1v1 = dot(&w[1..], &v[1..]);
        let mut out = vec![w[0] * v[0] + w1v1];
        let k = v[0] + w1v1 / (1.0 + w[0]);
        for i in 1..v.len() {
            out.push(v[i] + k * w[i]);
        }
        out
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.bar(v).into_iter().map(|x| self.theta * x).collect()
    }

    fn apply_inv(&self, v: &[f64]) -> Vec<f64> {
        let flip = |u: &[f64]| -> Vec<f64> {
            u.iter()
                .enumerate()
                .map(|(i, &x)| if i == 0 { x } else { -x })
                .collect()
        };
        flip(&self.bar(&flip(v)))
            .into_iter()
            .map(|x| x / self.theta)
            .collect()
    }

    /// W² = θ²(2wwᵀ − J) as a dense matrix.
    fn squared(&self) -> Vec<Vec<f64>> {
        let n = self.w.len();
        let t2 = self.theta * self.theta;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let jij = if i != j {
                            0.0
                        } else if i == 0 {
                            1.0
                        } else {
                            -1.0
                        };
                        t2 * (2.0 * self.w[i] * self.w[j] - jij)
                    })
                    .collect()
            })
            .collect()
    }

    fn apply_sq(&self, v: &[f64]) -> Vec<f64> {
        let t2 = self.theta * self.theta;
        let wv = dot(&self.w, v);
        v.iter()
            .enumerate()
            .map(|(i, &x)| t2 * (2.0 * self.w[i] * wv - if i == 0 { x } else { -x }))
            .collect()
    }
}

impl ConeProgram {
    pub fn validate(&self) -> Result<()> {
        if self.b.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("b of length {}", self.rows),
                got: self.b.len().to_string(),
            });
        }
        for blk in &self.blocks {
            if blk.dim == 0 || blk.c.len() != blk.dim {
                return Err(Error::DimensionMismatch {
                    expected: format!("c of length {}", blk.dim),
                    got: blk.c.len().to_string(),
                });
            }
            if blk
                .entries
                .iter()
                .any(|&(r, col, v)| r >= self.rows || col >= blk.dim || !v.is_finite())
            {
                return Err(Error::InvalidParams("constraint entry out of range".into()));
            }
        }
        Ok(())
    }

    /// y ← y + A x
    fn mul_a(&self, x: &[Vec<f64>], out: &mut [f64]) {
        for (blk, xk) in self.blocks.iter().zip(x) {
            for &(r, col, v) in &blk.entries {
                out[r] += v * xk[col];
            }
        }
    }

    fn mul_at(&self, y: &[f64]) -> Vec<Vec<f64>> {
        self.blocks
            .iter()
            .map(|blk| {
                let mut out = vec![0.0; blk.dim];
                for &(r, col, v) in &blk.entries {
                    out[col] += v * y[r];
                }
                out
            })
            .collect()
    }

    pub fn solve(&self, opts: SolverOptions) -> Result<ConeSolution> {
        self.validate()?;
        let m = self.rows;
        let nu = self.blocks.len() as f64;
        let unit = |d: usize| -> Vec<f64> {
            let mut e = vec![0.0; d];
            e[0] = 1.0;
            e
        };
        let mut x: Vec<Vec<f64>> = self.blocks.iter().map(|b| unit(b.dim)).collect();
        let mut z = x.clone();
        let mut y = vec![0.0; m];
        let b_norm = dot(&self.b, &self.b).sqrt().max(1.0);
        let c_norm = self
            .blocks
            .iter()
            .map(|b| dot(&b.c, &b.c))
            .sum::<f64>()
            .sqrt()
            .max(1.0);

        let mut last = (f64::INFINITY, f64::INFINITY);
        for iter in 0..=opts.max_iterations {
            // residuals
            let mut ax = vec![0.0; m];
            self.mul_a(&x, &mut ax);
            let r_p: Vec<f64> = self.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let aty = self.mul_at(&y);
            let r_d: Vec<Vec<f64>> = self
                .blocks
                .iter()
                .zip(&aty)
                .zip(&z)
                .map(|((blk, at), zk)| (0..blk.dim).map(|i| blk.c[i] - at[i] - zk[i]).collect())
                .collect();
            let pres = dot(&r_p, &r_p).sqrt() / b_norm;
            let dres = r_d.iter().map(|v| dot(v, v)).sum::<f64>().sqrt() / c_norm;
            let gap: f64 = x.iter().zip(&z).map(|(a, b)| dot(a, b)).sum();
            let residual = pres.max(dres);
            last = (gap, residual);

            let done = residual <= opts.tolerance && gap <= opts.tolerance;
            let out_of_budget = iter == opts.max_iterations;
            if done || (out_of_budget && residual <= opts.acceptable && gap <= opts.acceptable) {
                let pobj = self
                    .blocks
                    .iter()
                    .zip(&x)
                    .map(|(b, xk)| dot(&b.c, xk))
                    .sum();
                let dobj = dot(&self.b, &y);
                return Ok(ConeSolution {
                    x,
                    y,
                    z,
                    primal_objective: pobj,
                    dual_objective: dobj,
                    gap,
                    residual,
                    iterations: iter,
                });
            }
            if out_of_budget {
                break;
            }

            let scalings: Vec<Scaling> = x
                .iter()
                .zip(&z)
                .map(|(xk, zk)| Scaling::new(xk, zk))
                .collect();
            let lambda: Vec<Vec<f64>> =
                scalings.iter().zip(&z).map(|(s, zk)| s.apply(zk)).collect();

            // normal equations M = Σ A_k W_k² A_kᵀ
            let mut mm = DMatrix::<f64>::zeros(m, m);
            for (blk, s) in self.blocks.iter().zip(&scalings) {
                let w2 = s.squared();
                for &(r1, c1, v1) in &blk.entries {
                    for &(r2, c2, v2) in &blk.entries {
                        mm[(r1, r2)] += v1 * v2 * w2[c1][c2];
                    }
                }
            }
            let acceptable = residual <= opts.acceptable && gap <= opts.acceptable;
            let finish =
                |x: Vec<Vec<f64>>, y: Vec<f64>, z: Vec<Vec<f64>>| -> Result<ConeSolution> {
                    if !acceptable {
                        return Err(Error::SolverStalled {
                            iterations: iter,
                            gap,
                            residual,
                        });
                    }
                    let pobj = self
                        .blocks
                        .iter()
                        .zip(&x)
                        .map(|(b, xk)| dot(&b.c, xk))
                        .sum();
                    let dobj = dot(&self.b, &y);
                    Ok(ConeSolution {
                        x,
                        y,
                        z,
                        primal_objective: pobj,
                        dual_objective: dobj,
                        gap,
                        residual,
                        iterations: iter,
                    })
                };
            let Some(chol) = factor(mm) else {
                return finish(x, y, z);
            };

            let newton = |r_c: &[Vec<f64>]| -> (Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>) {
                let d: Vec<Vec<f64>> = lambda
                    .iter()
                    .zip(r_c)
                    .map(|(l, r)| jordan_solve(l, r))
                    .collect();
                let t: Vec<Vec<f64>> = scalings
                    .iter()
                    .zip(&d)
                    .zip(&r_d)
                    .map(|((s, dk), rk)| {
                        let wd = s.apply(dk);
                        let w2r = s.apply_sq(rk);
                        wd.iter().zip(&w2r).map(|(a, b)| b - a).collect()
                    })
                    .collect();
                let mut rhs = r_p.clone();
                self.mul_a(&t, &mut rhs);
                let mut dy: Vec<f64> = chol
                    .solve(&DVector::from_vec(rhs))
                    .iter()
                    .copied()
                    .collect();
                let directions = |dy: &[f64]| {
                    let atdy = self.mul_at(dy);
                    let dz: Vec<Vec<f64>> = r_d
                        .iter()
                        .zip(&atdy)
                        .map(|(r, a)| r.iter().zip(a).map(|(p, q)| p - q).collect())
                        .collect();
                    let dx: Vec<Vec<f64>> = scalings
                        .iter()
                        .zip(&d)
                        .zip(&dz)
                        .map(|((s, dk), dzk)| {
                            let wd = s.apply(dk);
                            let w2dz = s.apply_sq(dzk);
                            wd.iter().zip(&w2dz).map(|(a, b)| a - b).collect()
                        })
                        .collect();
                    (dx, dz)
                };
                let (mut dx, mut dz) = directions(&dy);
                // iterative refinement of A·Δx = r_p
                for _ in 0..REFINEMENT_STEPS {
                    let mut adx = vec![0.0; m];
                    self.mul_a(&dx, &mut adx);
                    let res: Vec<f64> = r_p.iter().zip(&adx).map(|(a, b)| a - b).collect();
                    let corr = chol.solve(&DVector::from_vec(res));
                    for (a, b) in dy.iter_mut().zip(corr.iter()) {
                        *a += b;
                    }
                    (dx, dz) = directions(&dy);
                }
                (dx, dy, dz)
            };
            let step = |dx: &[Vec<f64>], dz: &[Vec<f64>]| -> f64 {
                let mut a = f64::INFINITY;
                for k in 0..x.len() {
                    a = a.min(max_step(&x[k], &dx[k])).min(max_step(&z[k], &dz[k]));
                }
                a
            };

            let mu = gap / nu;
            let r_aff: Vec<Vec<f64>> = lambda
                .iter()
                .map(|l| jordan(l, l).into_iter().map(|v| -v).collect())
                .collect();
            let (dx_a, _, dz_a) = newton(&r_aff);
            let alpha_a = step(&dx_a, &dz_a).min(1.0);
            let gap_aff: f64 = (0..x.len())
                .map(|k| {
                    let xa: Vec<f64> = x[k]
                        .iter()
                        .zip(&dx_a[k])
                        .map(|(a, b)| a + alpha_a * b)
                        .collect();
                    let za: Vec<f64> = z[k]
                        .iter()
                        .zip(&dz_a[k])
                        .map(|(a, b)| a + alpha_a * b)
                        .collect();
                    dot(&xa, &za)
                })
                .sum();
            let mut sigma = (gap_aff / gap).clamp(0.0, 1.0).powi(3);
            // keep μ from outrunning the infeasibility
            if residual > opts.tolerance && gap < residual {
                sigma = sigma.max((0.1 * residual / gap).min(1.0));
            }

            let r_c: Vec<Vec<f64>> = (0..x.len())
                .map(|k| {
                    let s = &scalings[k];
                    let second = jordan(&s.apply_inv(&dx_a[k]), &s.apply(&dz_a[k]));
                    let ll = jordan(&lambda[k], &lambda[k]);
                    (0..ll.len())
                        .map(|i| if i == 0 { sigma * mu } else { 0.0 } - ll[i] - second[i])
                        .collect()
                })
                .collect();
            let (dx, dy, dz) = newton(&r_c);
            let alpha = (0.99 * step(&dx, &dz)).min(1.0);
            if !(alpha > 1e-14) {
                return finish(x, y, z);
            }
            for k in 0..x.len() {
                for i in 0..x[k].len() {
                    x[k][i] += alpha * dx[k][i];
                    z[k][i] += alpha * dz[k][i];
                }
            }
            for (yi, d) in y.iter_mut().zip(&dy) {
                *yi += alpha * d;
            }
        }
        Err(Error::SolverStalled {
            iterations: opts.max_iterations,
            gap: last.0,
            residual: last.1,
        })
    }
}

fn factor(mm: DMatrix<f64>) -> Option<Cholesky<f64, nalgebra::Dyn>> {
    let scale = (0..mm.nrows())
        .map(|i| mm[(i, i)].abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    if let Some(c) = Cholesky::new(mm.clone()) {
        return Some(c);
    }
    for reg in [1e-14, 1e-12, 1e-10] {
        let mut r = mm.clone();
        for i in 0..r.nrows() {
            r[(i, i)] += reg * scale;
        }
        if let Some(c) = Cholesky::new(r) {
            return Some(c);
        }
    }
    None
}
