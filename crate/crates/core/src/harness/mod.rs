//! File formats, point generators and the study runners behind the CLI.

pub mod generators;
pub mod io;
pub mod studies;

pub use generators::{hypercylinder_points, sphere_spiral, uniform_tesseract};
pub use io::{
    read_mesh_file, read_p4m, read_p4m_points, read_points_csv, read_points_file, write_p4m,
    write_tet3,
};
pub use studies::{
    convergence_study, hypercylinder_hypervolume, predicate_exact_trial, predicate_study,
    quality_study, roughness_study, ConvergenceReport, PredicateRow, QualityRow, SpacingExponent,
    StudyConfig,
};

use crate::geometry::Point4;

/// Oblique projection `(x, y, z) + t·(1, 1, 1)/√3`.
pub fn project_to_3d(v: Point4) -> [f64; 3] {
    let e = v.t / 3f64.sqrt();
    [v.x + e, v.y + e, v.z + e]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_examples() {
        assert_eq!(project_to_3d(Point4::ORIGIN), [0.0; 3]);
        assert_eq!(
            project_to_3d(Point4::new(1.0, 2.0, 3.0, 0.0)),
            [1.0, 2.0, 3.0]
        );
        let s = 1.0 / 3f64.sqrt();
        assert_eq!(project_to_3d(Point4::new(0.0, 0.0, 0.0, 1.0)), [s, s, s]);
    }
}
