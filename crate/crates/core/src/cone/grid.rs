//! Finite direction grids on the sphere.
//!
//! Directions are the integer points on the surface of the cube
//! `‖v‖∞ = m` with `m = ⌈resolution / 8⌉`. In the plane that gives
//! `8m` directions (64 for resolution 64), in space `(2m+1)³ − (2m−1)³`
//! (98 for resolution 16). Integer coordinates keep every direction exact,
//! and the axes and diagonals are always present.

use crate::poly::{qi, rational_to_f64, Rational};

pub fn cube_radius(resolution: usize) -> i64 {
    resolution.div_ceil(8).max(1) as i64
}

/// Grid directions in lexicographic order of their integer coordinates.
pub fn sphere_grid(n: usize, resolution: usize) -> Vec<Vec<Rational>> {
    let m = cube_radius(resolution);
    let mut out = Vec::new();
    let mut v = vec![-m; n];
    if n == 0 {
        return out;
    }
    loop {
        if v.iter().any(|c| c.abs() == m) {
            out.push(v.iter().map(|&c| qi(c)).collect());
        }
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if v[i] < m {
                v[i] += 1;
                break;
            }
            v[i] = -m;
        }
    }
}

pub fn unit(y: &[Rational]) -> Vec<f64> {
    let v: Vec<f64> = y.iter().map(rational_to_f64).collect();
    let l = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if l == 0.0 {
        return v;
    }
    v.into_iter().map(|c| c / l).collect()
}

/// Angle in radians between two nonzero directions.
pub fn angle(a: &[Rational], b: &[Rational]) -> f64 {
    let (u, v) = (unit(a), unit(b));
    let c: f64 = u.iter().zip(&v).map(|(x, y)| x * y).sum();
    c.clamp(-1.0, 1.0).acos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(sphere_grid(2, 64).len(), 64);
        assert_eq!(sphere_grid(2, 16).len(), 16);
        assert_eq!(sphere_grid(3, 16).len(), 98);
        assert_eq!(sphere_grid(1, 16).len(), 2);
        assert_eq!(sphere_grid(2, 1).len(), 8);
    }

    #[test]
    fn symmetric_and_distinct_rays() {
        let g = sphere_grid(3, 16);
        for v in &g {
            let neg: Vec<Rational> = v.iter().map(|c| -c).collect();
            assert!(g.contains(&neg));
        }
        for (i, a) in g.iter().enumerate() {
            for b in &g[i + 1..] {
                assert!(angle(a, b) > 1e-9);
            }
        }
    }
}
