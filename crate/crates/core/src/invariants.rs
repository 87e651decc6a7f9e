//! Rotation- and translation-invariant descriptors of a four-point fragment.
//!
//! Canonical order of the 15 values:
//!
//! | index | value |
//! |-------|-------|
//! | 0 | signed volume |
//! | 1 | tetrahedron perimeter (sum of the six edges) |
//! | 2..=7 | edges v1v2, v1v3, v1v4, v2v3, v2v4, v3v4 |
//! | 8 | sum of vertex distances from the centroid |
//! | 9, 10 | area, perimeter of triangle (v1, v2, v3) |
//! | 11, 12 | area, perimeter of triangle (v1, v3, v4) |
//! | 13, 14 | area, perimeter of triangle (v1, v2, v4) |

use nalgebra::Vector3;

use crate::lpr::Tetrapeptide;

pub const GI_COUNT: usize = 15;

pub const GI_LABELS: [&str; GI_COUNT] = [
    "signed_volume",
    "perimeter",
    "edge_12",
    "edge_13",
    "edge_14",
    "edge_23",
    "edge_24",
    "edge_34",
    "centroid_dist_sum",
    "area_123",
    "perim_123",
    "area_134",
    "perim_134",
    "area_124",
    "perim_124",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GiVector(pub [f64; GI_COUNT]);

impl GiVector {
    pub fn signed_volume(&self) -> f64 {
        self.0[0]
    }

    pub fn perimeter(&self) -> f64 {
        self.0[1]
    }

    pub fn edges(&self) -> &[f64] {
        &self.0[2..8]
    }

    pub fn centroid_distance_sum(&self) -> f64 {
        self.0[8]
    }

    /// `(area, perimeter)` of the triangles (1,2,3), (1,3,4), (1,2,4).
    pub fn triangles(&self) -> [(f64, f64); 3] {
        [
            (self.0[9], self.0[10]),
            (self.0[11], self.0[12]),
            (self.0[13], self.0[14]),
        ]
    }
}

/// `((v2 - v1) x (v3 - v1)) . (v4 - v1) / 6`; positive for a right-handed
/// arrangement.
pub fn signed_volume(
    v1: &Vector3<f64>,
    v2: &Vector3<f64>,
    v3: &Vector3<f64>,
    v4: &Vector3<f64>,
) -> f64 {
    (v2 - v1).cross(&(v3 - v1)).dot(&(v4 - v1)) / 6.0
}

/// Sum of Euclidean distances from each vertex to the centroid.
pub fn centroid_distance_sum(vertices: &[Vector3<f64>; 4]) -> f64 {
    let centroid = vertices.iter().sum::<Vector3<f64>>() / 4.0;
    vertices.iter().map(|v| (v - centroid).norm()).sum()
}

fn triangle(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> (f64, f64) {
    let area = (b - a).cross(&(c - a)).norm() / 2.0;
    let perimeter = (b - a).norm() + (c - a).norm() + (c - b).norm();
    (area, perimeter)
}

pub fn invariants_of(vertices: &[Vector3<f64>; 4]) -> GiVector {
    let [v1, v2, v3, v4] = vertices;
    let edges = [
        (v2 - v1).norm(),
        (v3 - v1).norm(),
        (v4 - v1).norm(),
        (v3 - v2).norm(),
        (v4 - v2).norm(),
        (v4 - v3).norm(),
    ];
    let (a123, p123) = triangle(v1, v2, v3);
    let (a134, p134) = triangle(v1, v3, v4);
    let (a124, p124) = triangle(v1, v2, v4);
    GiVector([
        signed_volume(v1, v2, v3, v4),
        edges.iter().sum(),
        edges[0],
        edges[1],
        edges[2],
        edges[3],
        edges[4],
        edges[5],
        centroid_distance_sum(vertices),
        a123,
        p123,
        a134,
        p134,
        a124,
        p124,
    ])
}

pub fn compute_invariants(t: &Tetrapeptide) -> GiVector {
    invariants_of(&t.vertices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(x: f64, y: f64, z: f64) -> Vector3<f64> {
        Vector3::new(x, y, z)
    }

    fn unit_corner() -> [Vector3<f64>; 4] {
        [v(0., 0., 0.), v(1., 0., 0.), v(0., 1., 0.), v(0., 0., 1.)]
    }

    #[test]
    fn volume_sign() {
        let [a, b, c, d] = unit_corner();
        assert_abs_diff_eq!(signed_volume(&a, &b, &c, &d), 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(signed_volume(&a, &b, &d, &c), -1.0 / 6.0, epsilon = 1e-15);
        let flat = signed_volume(&a, &b, &c, &v(3.0, -2.0, 0.0));
        assert_eq!(flat, 0.0);
    }

    #[test]
    fn centroid_sums() {
        let same = [v(1., 2., 3.); 4];
        assert_eq!(centroid_distance_sum(&same), 0.0);
        // |(-1/4,-1/4,-1/4)| + 3 |(3/4,-1/4,-1/4)|
        let expected = (3.0f64 / 16.0).sqrt() + 3.0 * (11.0f64 / 16.0).sqrt();
        assert_abs_diff_eq!(centroid_distance_sum(&unit_corner()), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 2.920481, epsilon = 1e-6);
    }

    #[test]
    fn collinear_points() {
        let g = invariants_of(&[v(0., 0., 0.), v(1., 1., 1.), v(2., 2., 2.), v(4., 4., 4.)]);
        assert_eq!(g.signed_volume(), 0.0);
        for (area, perim) in g.triangles() {
            assert_abs_diff_eq!(area, 0.0, epsilon = 1e-12);
            assert!(perim > 0.0);
        }
        assert!(g.edges().iter().all(|&e| e > 0.0));
    }

    #[test]
    fn perimeter_is_sum_of_edges() {
        let g = invariants_of(&[v(0.3, -1., 2.), v(3.1, 0.2, 1.7), v(4.0, 3.3, 0.1), v(6.5, 2.0, -1.2)]);
        let sum: f64 = g.edges().iter().sum();
        assert_abs_diff_eq!(g.perimeter(), sum, epsilon = 1e-9);
        assert!(g.0[1..].iter().all(|&x| x >= 0.0));
    }
}
