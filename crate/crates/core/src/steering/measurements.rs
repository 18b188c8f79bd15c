use crate::error::{Error, Result};
use crate::linalg::{pauli, ComplexMatrix};

/// Projective qubit measurements given by unit Bloch vectors; outcome 0 is
/// the projector (I + v·σ)/2.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSet {
    axes: Vec<[f64; 3]>,
}

const UNIT_TOL: f64 = 1e-12;

impl MeasurementSet {
    pub fn new(axes: Vec<[f64; 3]>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidMeasurement(
                "at least one setting is required".into(),
            ));
        }
        for (i, v) in axes.iter().enumerate() {
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if (n - 1.0).abs() > UNIT_TOL || !n.is_finite() {
                return Err(Error::InvalidMeasurement(format!("axis {i} has norm {n}")));
            }
        }
        Ok(Self { axes })
    }

    /// Normalizes the given directions first.
    pub fn from_directions(dirs: &[[f64; 3]]) -> Result<Self> {
        let axes = dirs
            .iter()
            .map(|v| {
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                [v[0] / n, v[1] / n, v[2] / n]
            })
            .collect();
        Self::new(axes)
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    pub fn axes(&self) -> &[[f64; 3]] {
        &self.axes
    }

    /// `[A_{0|x}, A_{1|x}]`
    pub fn projectors(&self, x: usize) -> [ComplexMatrix; 2] {
        let v = self.axes[x];
        let [sx, sy, sz] = pauli();
        let n_sigma = &(&sx.scale_real(v[0]) + &sy.scale_real(v[1])) + &sz.scale_real(v[2]);
        let id = ComplexMatrix::identity(2);
        [
            (&id + &n_sigma).scale_real(0.5),
            (&id - &n_sigma).scale_real(0.5),
        ]
    }

    /// Union of two sets, dropping axes parallel to one already present.
    pub fn union(&self, other: &Self) -> Self {
        let mut axes = self.axes.clone();
        for v in &other.axes {
            if !axes.iter().any(|w| (dot(v, w).abs() - 1.0).abs() < 1e-9) {
                axes.push(*v);
            }
        }
        Self { axes }
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// One axis per antipodal vertex pair, keeping the first vertex in enumeration order.
fn axes_from_vertices(vertices: &[[f64; 3]]) -> MeasurementSet {
    let mut axes: Vec<[f64; 3]> = Vec::new();
    for v in vertices {
        let n = dot(v, v).sqrt();
        let u = [v[0] / n, v[1] / n, v[2] / n];
        if !axes.iter().any(|w| (dot(&u, w).abs() - 1.0).abs() < 1e-9) {
            axes.push(u);
        }
    }
    MeasurementSet { axes }
}

const SIGNS: [(f64, f64); 4] = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];

/// Ten axes through the vertices of the regular dodecahedron with vertices
/// (±1, ±1, ±1), (0, ±1/φ, ±φ), (±1/φ, ±φ, 0), (±φ, 0, ±1/φ).
pub fn dodecahedron_measurements() -> MeasurementSet {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices = Vec::with_capacity(20);
    for a in [1.0, -1.0] {
        for (b, c) in SIGNS {
            vertices.push([a, b, c]);
        }
    }
    for (a, b) in SIGNS {
        vertices.push([0.0, a / phi, b * phi]);
        vertices.push([a / phi, b * phi, 0.0]);
        vertices.push([a * phi, 0.0, b / phi]);
    }
    axes_from_vertices(&vertices)
}

/// Six axes through the vertices of the icosahedron (0, ±1, ±φ) and cyclic permutations.
pub fn icosahedron_measurements() -> MeasurementSet {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices = Vec::with_capacity(12);
    for (a, b) in SIGNS {
        vertices.push([0.0, a, b * phi]);
        vertices.push([a, b * phi, 0.0]);
        vertices.push([a * phi, 0.0, b]);
    }
    axes_from_vertices(&vertices)
}

/// `m` points spread over the sphere along a Fibonacci spiral, from the north pole down.
pub(crate) fn fibonacci_sphere(m: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (1.0 + 5f64.sqrt());
    (0..m)
        .map(|i| {
            let t = i as f64 + 0.5;
            let z = 1.0 - 2.0 * t / m as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * t;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// `n` axes on the upper half of a 2n-point Fibonacci spiral, so no two are antipodal.
pub fn spiral_measurements(n: usize) -> Result<MeasurementSet> {
    let mut axes = fibonacci_sphere(2 * n);
    axes.truncate(n);
    MeasurementSet::from_directions(&axes)
}

/// The Pauli axes x, y, z.
pub fn octahedron_measurements() -> MeasurementSet {
    MeasurementSet {
        axes: vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dodecahedron_shape() {
        let m = dodecahedron_measurements();
        assert_eq!(m.len(), 10);
        let mut projectors = 0;
        for x in 0..m.len() {
            let v = m.axes()[x];
            assert!((dot(&v, &v) - 1.0).abs() < 1e-12);
            let [p0, p1] = m.projectors(x);
            assert!((&p0 + &p1).approx_eq(&ComplexMatrix::identity(2), 1e-15));
            projectors += 2;
            for y in 0..x {
                assert!(dot(&v, &m.axes()[y]).abs() < 1.0 - 1e-6);
            }
        }
        assert_eq!(projectors, 20);
    }

    #[test]
    fn every_dodecahedron_axis_has_three_nearest_neighbours_at_the_same_angle() {
        // vertex-to-vertex angles of the dodecahedron take few distinct values
        let m = dodecahedron_measurements();
        let mut cosines: Vec<f64> = Vec::new();
        for x in 0..10 {
            for y in 0..x {
                let c = dot(&m.axes()[x], &m.axes()[y]).abs();
                if !cosines.iter().any(|d| (d - c).abs() < 1e-9) {
                    cosines.push(c);
                }
            }
        }
        assert_eq!(cosines.len(), 2, "{cosines:?}");
    }

    #[test]
    fn icosahedron_and_octahedron() {
        assert_eq!(icosahedron_measurements().len(), 6);
        assert_eq!(octahedron_measurements().len(), 3);
        assert_eq!(
            dodecahedron_measurements()
                .union(&octahedron_measurements())
                .len(),
            13
        );
    }

    #[test]
    fn spiral_axes_are_distinct() {
        let m = spiral_measurements(30).unwrap();
        assert_eq!(m.len(), 30);
        for x in 0..30 {
            assert!(m.axes()[x][2] > 0.0);
            for y in 0..x {
                assert!(dot(&m.axes()[x], &m.axes()[y]).abs() < 1.0 - 1e-3);
            }
        }
        assert!(spiral_measurements(0).is_err());
    }

    #[test]
    fn non_unit_axis_rejected() {
        assert!(matches!(
            MeasurementSet::new(vec![[1.0, 1.0, 0.0]]),
            Err(Error::InvalidMeasurement(_))
        ));
        assert!(MeasurementSet::new(vec![]).is_err());
    }
}
