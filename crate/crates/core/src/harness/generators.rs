//! Seeded point-cloud generators.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::Point4;

/// `n` points uniformly distributed in the unit tesseract.
pub fn uniform_tesseract(n: usize, seed: u64) -> Vec<Point4> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Point4::new(rng.gen(), rng.gen(), rng.gen(), rng.gen()))
        .collect()
}

/// `n` quasi-uniform unit vectors on a generalized (Fibonacci) spiral.
pub fn sphere_spiral(n: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Uniformly distributed random rotation (from a random unit quaternion).
fn random_rotation(rng: &mut impl Rng) -> Matrix3<f64> {
    let (u1, u2, u3): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let q = nalgebra::Quaternion::new(
        b * (2.0 * PI * u3).cos(),
        a * (2.0 * PI * u2).sin(),
        a * (2.0 * PI * u2).cos(),
        b * (2.0 * PI * u3).sin(),
    );
    *nalgebra::UnitQuaternion::from_quaternion(q)
        .to_rotation_matrix()
        .matrix()
}

/// Boundary and cap samples of the hypercylinder `B³(R) × [0, L]`.
///
/// Every time level `t_k = k·L/K` (`K = ⌈L / h_time⌉`) carries
/// `⌈4πR² / h_sphere²⌉` spiral points on the sphere of radius `R`, rotated
/// by a random rotation per level so neighboring levels do not align. Both
/// caps also get the nodes of a cubic grid of spacing `h_sphere` lying at
/// least `h_sphere / 2` inside the sphere.
pub fn hypercylinder_points(
    radius: f64,
    length: f64,
    h_sphere: f64,
    h_time: f64,
    seed: u64,
) -> Vec<Point4> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_sphere = ((4.0 * PI * radius * radius) / (h_sphere * h_sphere))
        .ceil()
        .max(4.0) as usize;
    let n_levels = (length / h_time).ceil().max(1.0) as usize;
    let base = sphere_spiral(n_sphere);
    let mut points = Vec::new();
    for k in 0..=n_levels {
        let t = length * k as f64 / n_levels as f64;
        let rot = random_rotation(&mut rng);
        for u in &base {
            let v = rot * Vector3::new(u[0], u[1], u[2]);
            // Renormalize so rounding in the rotation never leaves the sphere.
            let v = v / v.norm() * radius;
            points.push(Point4::new(v.x, v.y, v.z, t));
        }
    }
    let m = (radius / h_sphere).floor() as i64;
    let inner = radius - 0.5 * h_sphere;
    for t in [0.0, length] {
        for i in -m..=m {
            for j in -m..=m {
                for k in -m..=m {
                    let p = [i, j, k].map(|c| c as f64 * h_sphere);
                    if p.iter().map(|c| c * c).sum::<f64>() <= inner * inner {
                        points.push(Point4::new(p[0], p[1], p[2], t));
                    }
                }
            }
        }
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spiral_points_are_unit() {
        for p in sphere_spiral(100) {
            assert!((p.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn generators_are_seeded() {
        assert_eq!(uniform_tesseract(10, 3), uniform_tesseract(10, 3));
        assert_ne!(uniform_tesseract(10, 3), uniform_tesseract(10, 4));
        assert_eq!(
            hypercylinder_points(1.0, 4.0, 0.5, 0.5, 1),
            hypercylinder_points(1.0, 4.0, 0.5, 0.5, 1)
        );
    }
}
