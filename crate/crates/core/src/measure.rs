//! Finite measures discretised as weighted point sets.
//!
//! Every weight is strictly positive, so the support of a [`DiscreteMeasure`]
//! is its whole point list and `‖f‖_{L²} = 0` forces `f` to vanish at every node.

use std::collections::HashSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::io;
use crate::kernel::{validate_points, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        validate_points(&points)?;
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidMeasure(format!(
                "weight {w} is not strictly positive"
            )));
        }
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            let key: Vec<u64> = p.coords().iter().map(|c| (c + 0.0).to_bits()).collect();
            if !seen.insert(key) {
                return Err(Error::InvalidMeasure(format!(
                    "duplicate point {:?}",
                    p.coords()
                )));
            }
        }
        Ok(DiscreteMeasure { points, weights })
    }

    /// Midpoint tensor grid over the box `[low, high]` with equal weights.
    pub fn uniform_grid(
        low: &Point,
        high: &Point,
        steps: &[usize],
        total_mass: f64,
    ) -> Result<Self> {
        let n = low.dim();
        if high.dim() != n || steps.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if high.dim() != n {
                    high.dim()
                } else {
                    steps.len()
                },
            });
        }
        check_box(low, high)?;
        if steps.contains(&0) {
            return Err(Error::InvalidMeasure(
                "every axis needs at least one step".into(),
            ));
        }
        check_mass(total_mass)?;

        let axes: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let (a, b) = (low.coords()[k], high.coords()[k]);
                let h = (b - a) / steps[k] as f64;
                (0..steps[k]).map(|i| a + (i as f64 + 0.5) * h).collect()
            })
            .collect();
        let count: usize = steps.iter().product();
        let mut points = Vec::with_capacity(count);
        let mut index = vec![0usize; n];
        for _ in 0..count {
            points.push(Point::new((0..n).map(|k| axes[k][index[k]]).collect())?);
            for k in (0..n).rev() {
                index[k] += 1;
                if index[k] < steps[k] {
                    break;
                }
                index[k] = 0;
            }
        }
        let w = total_mass / count as f64;
        DiscreteMeasure::new(points, vec![w; count])
    }

    /// `count` independent uniform samples in the box, equal weights, seeded.
    pub fn monte_carlo(
        low: &Point,
        high: &Point,
        count: usize,
        total_mass: f64,
        seed: u64,
    ) -> Result<Self> {
        if high.dim() != low.dim() {
            return Err(Error::DimensionMismatch {
                expected: low.dim(),
                found: high.dim(),
            });
        }
        check_box(low, high)?;
        check_mass(total_mass)?;
        if count == 0 {
            return Err(Error::InvalidMeasure(
                "sample count must be positive".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..count)
            .map(|_| {
                Point::new(
                    low.coords()
                        .iter()
                        .zip(high.coords())
                        .map(|(a, b)| rng.gen_range(*a..*b))
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteMeasure::new(points, vec![total_mass / count as f64; count])
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn check_len(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: values.len(),
            });
        }
        Ok(())
    }

    /// `Σ w_i f(x_i)`.
    pub fn integrate(&self, f: &[f64]) -> Result<f64> {
        self.check_len(f)?;
        Ok(self.weights.iter().zip(f).map(|(w, v)| w * v).sum())
    }

    /// `Σ w_i f(x_i) g(x_i)`.
    pub fn l2_inner(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        self.check_len(f)?;
        self.check_len(g)?;
        Ok(self
            .weights
            .iter()
            .zip(f.iter().zip(g))
            .map(|(w, (a, b))| w * a * b)
            .sum())
    }

    pub fn l2_norm(&self, f: &[f64]) -> Result<f64> {
        Ok(self.l2_inner(f, f)?.max(0.0).sqrt())
    }

    /// Coordinates followed by the weight, one node per row.
    pub fn to_csv(&self) -> String {
        let rows: Vec<Vec<f64>> = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| p.coords().iter().copied().chain([*w]).collect())
            .collect();
        io::rows_to_csv(rows.iter())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let rows = io::read_rows(path)?;
        let width = rows.first().map_or(0, Vec::len);
        if width < 2 {
            return Err(Error::Csv {
                path: path.to_path_buf(),
                line: 1,
                reason: "a measure row needs at least one coordinate and a weight".into(),
            });
        }
        let mut points = Vec::with_capacity(rows.len());
        let mut weights = Vec::with_capacity(rows.len());
        for (i, mut row) in rows.into_iter().enumerate() {
            if row.len() != width {
                return Err(Error::Csv {
                    path: path.to_path_buf(),
                    line: i + 1,
                    reason: format!("expected {width} columns, found {}", row.len()),
                });
            }
            weights.push(row.pop().expect("width checked"));
            points.push(Point::new(row)?);
        }
        DiscreteMeasure::new(points, weights)
    }
}

fn check_box(low: &Point, high: &Point) -> Result<()> {
    if low.coords().iter().zip(high.coords()).any(|(a, b)| a >= b) {
        return Err(Error::InvalidMeasure("box is empty along some axis".into()));
    }
    Ok(())
}

fn check_mass(total_mass: f64) -> Result<()> {
    if !(total_mass > 0.0 && total_mass.is_finite()) {
        return Err(Error::InvalidMeasure(format!(
            "total mass must be positive, got {total_mass}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert, proptest};
    use rand::Rng;

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn grid_examples() {
        let mu = DiscreteMeasure::uniform_grid(&p(&[-1.0]), &p(&[1.0]), &[4], 2.0).unwrap();
        assert_eq!(mu.len(), 4);
        assert!(mu.weights().iter().all(|&w| w == 0.5));
        let coords: Vec<f64> = mu.points().iter().map(|x| x.coords()[0]).collect();
        assert_eq!(coords, vec![-0.75, -0.25, 0.25, 0.75]);

        let mu2 =
            DiscreteMeasure::uniform_grid(&p(&[0.0, 0.0]), &p(&[1.0, 2.0]), &[3, 3], 1.0).unwrap();
        assert_eq!(mu2.len(), 9);
        assert!((mu2.integrate(&[1.0; 9]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_errors() {
        assert!(DiscreteMeasure::uniform_grid(&p(&[1.0]), &p(&[1.0]), &[4], 1.0).is_err());
        assert!(DiscreteMeasure::uniform_grid(&p(&[0.0]), &p(&[1.0]), &[0], 1.0).is_err());
        assert!(DiscreteMeasure::uniform_grid(&p(&[0.0]), &p(&[1.0]), &[3], 0.0).is_err());
    }

    #[test]
    fn rejects_bad_weights_and_duplicates() {
        let pts = vec![p(&[0.0]), p(&[1.0])];
        assert!(DiscreteMeasure::new(pts.clone(), vec![1.0, 0.0]).is_err());
        assert!(DiscreteMeasure::new(pts.clone(), vec![1.0]).is_err());
        assert!(DiscreteMeasure::new(vec![p(&[0.5]), p(&[0.5])], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn integrate_examples() {
        let mu = DiscreteMeasure::new(vec![p(&[0.0]), p(&[1.0]), p(&[2.0])], vec![0.2, 0.3, 0.5])
            .unwrap();
        assert!((mu.integrate(&[1.0, 1.0, 1.0]).unwrap() - mu.total_mass()).abs() < 1e-15);
        assert_eq!(mu.integrate(&[0.0, 1.0, 0.0]).unwrap(), 0.3);
        assert!(mu.integrate(&[1.0]).is_err());
        assert_eq!(
            mu.l2_inner(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap(),
            0.0
        );

        let grid = DiscreteMeasure::uniform_grid(&p(&[-1.0]), &p(&[1.0]), &[10], 1.0).unwrap();
        let x: Vec<f64> = grid.points().iter().map(|q| q.coords()[0]).collect();
        assert!(grid.integrate(&x).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let a =
            DiscreteMeasure::monte_carlo(&p(&[0.0, 0.0]), &p(&[1.0, 1.0]), 20, 3.0, 42).unwrap();
        let b =
            DiscreteMeasure::monte_carlo(&p(&[0.0, 0.0]), &p(&[1.0, 1.0]), 20, 3.0, 42).unwrap();
        assert_eq!(a, b);
        assert!((a.total_mass() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mu.csv");
        let mu =
            DiscreteMeasure::monte_carlo(&p(&[-1.0, 0.0]), &p(&[1.0, 3.0]), 15, 0.7, 9).unwrap();
        io::write_atomic(&path, mu.to_csv().as_bytes()).unwrap();
        let back = DiscreteMeasure::read_csv(&path).unwrap();
        assert_eq!(back, mu);
    }

    proptest! {
        #[test]
        fn integration_is_linear_and_monotone(
            weights in proptest::collection::vec(0.01f64..2.0, 1..12),
            seed in any::<u64>(),
            a in -3.0f64..3.0,
        ) {
            let m = weights.len();
            let pts = (0..m).map(|i| p(&[i as f64])).collect();
            let mu = DiscreteMeasure::new(pts, weights).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let g: Vec<f64> = f.iter().map(|x| x + rng.gen_range(0.0..1.0)).collect();
            let combo: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + y).collect();
            let lhs = mu.integrate(&combo).unwrap();
            let rhs = a * mu.integrate(&f).unwrap() + mu.integrate(&g).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12);
            prop_assert!(mu.integrate(&f).unwrap() <= mu.integrate(&g).unwrap());
            prop_assert!(mu.l2_inner(&f, &f).unwrap() >= 0.0);
            // Zero L² norm only for the zero function.
            if f.iter().any(|x| *x != 0.0) {
                prop_assert!(mu.l2_inner(&f, &f).unwrap() > 0.0);
            }
        }
    }
}
