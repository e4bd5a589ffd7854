//! The bounding tesseract and its three published subdivisions into 22, 23
//! or 24 pentatopes.
//!
//! Tuples are stored exactly as tabulated (1-based corner numbers); some are
//! negatively oriented and are reoriented when a mesh is built.
//!
//! The 22- and 23-pentatope tables index [`TESSERACT_CORNERS`]. The
//! 24-pentatope table only partitions the tesseract when its corners are
//! numbered in binary order (`k - 1 = x + 2y + 4z + 8t`, see
//! [`BINARY_CORNERS`]); under the other numbering its cells overlap.

use crate::error::{Error, Result};
use crate::geometry::Point4;
use crate::mesh::Mesh4;

pub const TESSERACT_CORNERS: [[f64; 4]; 16] = [
    [0.0, 0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [1.0, 0.0, 1.0, 0.0],
    [1.0, 1.0, 1.0, 0.0],
    [0.0, 1.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0, 1.0],
    [1.0, 1.0, 0.0, 1.0],
    [0.0, 1.0, 0.0, 1.0],
    [0.0, 0.0, 1.0, 1.0],
    [1.0, 0.0, 1.0, 1.0],
    [1.0, 1.0, 1.0, 1.0],
    [0.0, 1.0, 1.0, 1.0],
];

/// Corner `k` has binary digits `k - 1 = x + 2y + 4z + 8t`. Differs from
/// [`TESSERACT_CORNERS`] by swapping corners 3↔4, 7↔8, 11↔12 and 15↔16.
pub const BINARY_CORNERS: [[f64; 4]; 16] = {
    let mut c = [[0.0; 4]; 16];
    let mut k = 0;
    while k < 16 {
        c[k] = [
            (k & 1) as f64,
            ((k >> 1) & 1) as f64,
            ((k >> 2) & 1) as f64,
            ((k >> 3) & 1) as f64,
        ];
        k += 1;
    }
    c
};

/// Uniform subdivision (all 24 pentatopes have hypervolume 1/24).
const TABLE_24: [[u8; 5]; 24] = [
    [1, 2, 3, 5, 9],
    [2, 3, 4, 5, 9],
    [2, 4, 5, 6, 9],
    [3, 4, 5, 7, 9],
    [4, 5, 6, 7, 9],
    [4, 6, 7, 8, 9],
    [2, 4, 6, 9, 10],
    [4, 6, 8, 9, 10],
    [3, 4, 7, 9, 11],
    [4, 7, 8, 9, 11],
    [4, 8, 9, 10, 11],
    [4, 8, 10, 11, 12],
    [5, 6, 7, 9, 13],
    [6, 7, 8, 9, 13],
    [6, 8, 9, 10, 13],
    [7, 8, 9, 11, 13],
    [8, 9, 10, 11, 13],
    [8, 10, 11, 12, 13],
    [6, 8, 10, 13, 14],
    [8, 10, 12, 13, 14],
    [7, 8, 11, 13, 15],
    [8, 11, 12, 13, 15],
    [8, 12, 13, 14, 15],
    [8, 12, 14, 15, 16],
];

const TABLE_22: [[u8; 5]; 22] = [
    [1, 2, 4, 5, 13],
    [1, 2, 4, 9, 13],
    [2, 11, 13, 14, 15],
    [2, 7, 11, 13, 15],
    [2, 4, 5, 7, 13],
    [2, 4, 9, 11, 13],
    [4, 7, 11, 13, 15],
    [4, 7, 13, 15, 16],
    [2, 3, 7, 11, 13],
    [4, 11, 13, 15, 16],
    [2, 7, 13, 14, 15],
    [2, 3, 4, 7, 13],
    [2, 3, 4, 11, 13],
    [3, 4, 7, 11, 13],
    [4, 5, 7, 8, 13],
    [4, 7, 8, 13, 16],
    [4, 9, 11, 12, 13],
    [4, 11, 12, 13, 16],
    [2, 5, 6, 7, 13],
    [2, 6, 7, 13, 14],
    [2, 9, 10, 11, 13],
    [2, 10, 11, 13, 14],
];

const TABLE_23: [[u8; 5]; 23] = [
    [1, 3, 4, 6, 9],
    [1, 6, 8, 9, 13],
    [3, 7, 8, 13, 15],
    [1, 4, 6, 8, 9],
    [3, 6, 7, 8, 13],
    [3, 6, 7, 13, 15],
    [3, 4, 6, 8, 9],
    [3, 6, 8, 9, 13],
    [3, 10, 11, 13, 15],
    [1, 2, 3, 6, 10],
    [3, 8, 9, 11, 13],
    [3, 6, 10, 13, 15],
    [1, 3, 6, 9, 10],
    [3, 6, 9, 10, 13],
    [8, 11, 12, 13, 15],
    [3, 4, 8, 9, 11],
    [3, 9, 10, 11, 13],
    [6, 10, 13, 14, 15],
    [4, 8, 9, 11, 12],
    [8, 9, 11, 12, 13],
    [8, 12, 13, 15, 16],
    [1, 5, 6, 8, 13],
    [3, 8, 11, 13, 15],
];

/// Corner coordinates plus one index table, 1-based as printed.
#[derive(Clone, Debug, PartialEq)]
pub struct SubdivisionTable {
    pub n_b: usize,
    pub corners: [Point4; 16],
    pub tuples: Vec<[u8; 5]>,
}

impl SubdivisionTable {
    /// Corner coordinates of a 1-based tuple.
    pub fn tuple_points(&self, t: &[u8; 5]) -> [Point4; 5] {
        t.map(|i| self.corners[i as usize - 1])
    }
}

pub fn subdivision_table(n_b: usize) -> Result<SubdivisionTable> {
    let (tuples, corners): (Vec<[u8; 5]>, _) = match n_b {
        22 => (TABLE_22.to_vec(), TESSERACT_CORNERS),
        23 => (TABLE_23.to_vec(), TESSERACT_CORNERS),
        24 => (TABLE_24.to_vec(), BINARY_CORNERS),
        other => return Err(Error::UnsupportedSubdivision(other)),
    };
    Ok(SubdivisionTable {
        n_b,
        corners: corners.map(Point4::from_array),
        tuples,
    })
}

/// Axis-aligned box in space-time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox4 {
    pub min: Point4,
    pub max: Point4,
    pub margin: f64,
}

impl BoundingBox4 {
    /// Tight box of `points` inflated by `margin` on every side.
    pub fn around(points: &[Point4], margin: f64) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput)?;
        let mut lo = first.to_array();
        let mut hi = lo;
        for p in points {
            if !p.is_finite() {
                return Err(Error::Degenerate(format!("non-finite point {p:?}")));
            }
            for (i, c) in p.to_array().into_iter().enumerate() {
                lo[i] = lo[i].min(c);
                hi[i] = hi[i].max(c);
            }
        }
        Ok(BoundingBox4 {
            min: Point4::from_array(lo.map(|c| c - margin)),
            max: Point4::from_array(hi.map(|c| c + margin)),
            margin,
        })
    }

    pub fn diagonal(&self) -> f64 {
        self.max.distance(self.min)
    }

    /// Affine image of a unit-tesseract point.
    pub fn map_unit(&self, u: Point4) -> Point4 {
        let (a, b, c) = (self.min.to_array(), self.max.to_array(), u.to_array());
        Point4::from_array(std::array::from_fn(|i| a[i] + c[i] * (b[i] - a[i])))
    }

    pub fn contains_strictly(&self, p: Point4) -> bool {
        let (a, b, c) = (self.min.to_array(), self.max.to_array(), p.to_array());
        (0..4).all(|i| a[i] < c[i] && c[i] < b[i])
    }
}

/// Diagonal of the tight bounding box of `points` (0 for a single point).
pub fn cloud_diagonal(points: &[Point4]) -> f64 {
    BoundingBox4::around(points, 0.0)
        .map(|b| b.diagonal())
        .unwrap_or(0.0)
}

/// Subdivided super tesseract covering `points` inflated by `margin`; the
/// sixteen corners are flagged as super-vertices.
pub fn build_bounding_mesh(points: &[Point4], n_b: usize, margin: f64) -> Result<Mesh4> {
    if !(margin > 0.0) {
        return Err(Error::Degenerate(format!(
            "margin must be positive, got {margin}"
        )));
    }
    let bbox = BoundingBox4::around(points, margin)?;
    let table = subdivision_table(n_b)?;
    let mut mesh = Mesh4::new();
    for c in table.corners {
        mesh.add_vertex(bbox.map_unit(c), true);
    }
    for t in &table.tuples {
        mesh.add_element(t.map(|i| (i - 1) as u32))?;
    }
    Ok(mesh)
}
