//! Exact maximization of a two-outcome steering functional over all
//! deterministic strategies, without enumerating them.
//!
//! With F_x = f0_x·I + f_x·σ⃗ and F_B = b0·I + b·σ⃗, a strategy that answers 0
//! on the set S has the bound operator F_B + Σ_{x∈S} F_x whose top eigenvalue is
//! c_S + ‖v_S‖. Maximizing over S equals maximizing
//!
//! ```text
//!   g(s) = b0 + b·s + Σ_x max(0, f0_x + f_x·s)
//! ```
//!
//! over unit vectors s. The sets S(s) = {x : f0_x + f_x·s > 0} are constant on
//! the cells of the arrangement of circles f0_x + f_x·s = 0, so every optimum is
//! met at a vertex of the arrangement or on a circle without vertices.

use std::collections::HashSet;

/// Circles tied at a point beyond this count are not all split.
const MAX_TIED: usize = 12;
const REL_TIE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub(super) struct PauliFunctional {
    pub f0: Vec<f64>,
    pub f: Vec<[f64; 3]>,
    pub b0: f64,
    pub b: [f64; 3],
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn normalized(a: [f64; 3]) -> [f64; 3] {
    let n = norm(&a);
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Some unit vector orthogonal to `a`.
fn orthogonal(a: &[f64; 3]) -> [f64; 3] {
    let e = if a[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    normalized(cross(a, &e))
}

impl PauliFunctional {
    pub fn settings(&self) -> usize {
        self.f0.len()
    }

    /// Top eigenvalue of F_B + Σ_{x∈S} F_x, with `in_s[x]` marking S.
    pub fn value(&self, in_s: &[bool]) -> f64 {
        let mut c = self.b0;
        let mut v = self.b;
        for x in (0..self.settings()).filter(|&x| in_s[x]) {
            c += self.f0[x];
            for k in 0..3 {
                v[k] += self.f[x][k];
            }
        }
        c + norm(&v)
    }

    fn tie_tol(&self, x: usize) -> f64 {
        REL_TIE_TOL * (self.f0[x].abs() + norm(&self.f[x])) + f64::MIN_POSITIVE
    }

    /// Indices whose zero set meets the sphere in a circle.
    fn circles(&self) -> Vec<usize> {
        (0..self.settings())
            .filter(|&x| {
                let r = norm(&self.f[x]);
                r > self.tie_tol(x) && self.f0[x].abs() <= r + self.tie_tol(x)
            })
            .collect()
    }

    /// Points on the circle of x and on the circle of y.
    fn vertices(&self, x: usize, y: usize) -> Vec<[f64; 3]> {
        let (a, b) = (&self.f[x], &self.f[y]);
        let n = cross(a, b);
        let det = dot(&n, &n);
        if det <= 1e-24 * dot(a, a) * dot(b, b) {
            return Vec::new();
        }
        let (ab, aa, bb) = (dot(a, b), dot(a, a), dot(b, b));
        let (ra, rb) = (-self.f0[x], -self.f0[y]);
        let alpha = (bb * ra - ab * rb) / det;
        let beta = (aa * rb - ab * ra) / det;
        let s0 = [
            alpha * a[0] + beta * b[0],
            alpha * a[1] + beta * b[1],
            alpha * a[2] + beta * b[2],
        ];
        let r2 = 1.0 - dot(&s0, &s0);
        if r2 < -1e-9 {
            return Vec::new();
        }
        let t = r2.max(0.0).sqrt() / det.sqrt();
        [1.0, -1.0]
            .iter()
            .map(|sg| {
                normalized([
                    s0[0] + sg * t * n[0],
                    s0[1] + sg * t * n[1],
                    s0[2] + sg * t * n[2],
                ])
            })
            .collect()
    }

    /// A point on the circle of x.
    fn point_on_circle(&self, x: usize) -> [f64; 3] {
        let f = &self.f[x];
        let ff = dot(f, f);
        let s0 = [
            -self.f0[x] * f[0] / ff,
            -self.f0[x] * f[1] / ff,
            -self.f0[x] * f[2] / ff,
        ];
        let r = (1.0 - dot(&s0, &s0)).max(0.0).sqrt();
        let u = orthogonal(f);
        normalized([s0[0] + r * u[0], s0[1] + r * u[1], s0[2] + r * u[2]])
    }

    /// Every S(s) near `p`, splitting both ways on the circles through `p`.
    fn sets_at(&self, p: &[f64; 3], forced: &[usize], out: &mut HashSet<Vec<bool>>) {
        let n = self.settings();
        let mut base = vec![false; n];
        let mut tied: Vec<usize> = forced.to_vec();
        for x in 0..n {
            let v = self.f0[x] + dot(&self.f[x], p);
            if forced.contains(&x) {
                continue;
            }
            if v.abs() <= self.tie_tol(x) && tied.len() < MAX_TIED {
                tied.push(x);
            } else {
                base[x] = v > 0.0;
            }
        }
        for mask in 0u32..(1 << tied.len()) {
            let mut s = base.clone();
            for (k, &x) in tied.iter().enumerate() {
                s[x] = mask >> k & 1 == 1;
            }
            out.insert(s);
        }
    }

    /// Answer sets containing a maximizer of [`Self::value`]; each is a valid strategy.
    pub fn candidate_sets(&self) -> Vec<Vec<bool>> {
        let circles = self.circles();
        let mut out = HashSet::new();
        self.sets_at(&[0.0, 0.0, 1.0], &[], &mut out);
        for (i, &x) in circles.iter().enumerate() {
            self.sets_at(&self.point_on_circle(x), &[x], &mut out);
            for &y in &circles[i + 1..] {
                for p in self.vertices(x, y) {
                    self.sets_at(&p, &[x, y], &mut out);
                }
            }
        }
        let mut sets: Vec<Vec<bool>> = out.into_iter().collect();
        sets.sort();
        sets
    }

    /// Maximum of [`Self::value`] over all 2^n answer sets.
    pub fn max_value(&self) -> f64 {
        self.candidate_sets()
            .iter()
            .map(|s| self.value(s))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v3(rng: &mut ChaCha8Rng) -> [f64; 3] {
        [0; 3].map(|_| rng.gen_range(-1.0..1.0))
    }

    fn random_functional(rng: &mut ChaCha8Rng, n: usize) -> PauliFunctional {
        PauliFunctional {
            f0: (0..n).map(|_| rng.gen_range(-0.6..0.6)).collect(),
            f: (0..n).map(|_| v3(rng)).collect(),
            b0: rng.gen_range(-1.0..1.0),
            b: v3(rng),
        }
    }

    fn brute_force(p: &PauliFunctional) -> f64 {
        let n = p.settings();
        (0u32..1 << n)
            .map(|m| p.value(&(0..n).map(|x| m >> x & 1 == 1).collect::<Vec<_>>()))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=11 {
            for _ in 0..4 {
                let p = random_functional(&mut rng, n);
                let exact = brute_force(&p);
                assert!((p.max_value() - exact).abs() < 1e-12, "n = {n}");
            }
        }
    }

    #[test]
    fn concurrent_circles_are_split() {
        // three great circles through the poles
        let p = PauliFunctional {
            f0: vec![0.0; 3],
            f: vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]],
            b0: -0.5,
            b: [0.0, 0.0, 0.2],
        };
        assert!((p.max_value() - brute_force(&p)).abs() < 1e-12);
    }
}
