//! Finite metric spaces with exact rational distances.

use num::Zero;

use crate::error::{Error, Result};
use crate::rational::Rat;
use crate::subset::MAX_POINTS;

/// A symmetric rational distance matrix with zero diagonal.
///
/// `semi` is true when some pair of distinct points is at distance zero
/// (a semimetric); strict metrics have `semi == false`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMetric {
    points: Vec<String>,
    dist: Vec<Rat>, // row-major n*n
    semi: bool,
}

pub(crate) fn check_labels(points: &[String]) -> Result<()> {
    if points.len() > MAX_POINTS {
        return Err(Error::TooManyPoints {
            n: points.len(),
            max: MAX_POINTS,
        });
    }
    for (i, p) in points.iter().enumerate() {
        if points[..i].contains(p) {
            return Err(Error::DuplicateLabel(p.clone()));
        }
    }
    Ok(())
}

impl FiniteMetric {
    /// Validates symmetry, zero diagonal, nonnegativity and the triangle
    /// inequality. Zero distances between distinct points are accepted and
    /// flag the result as a semimetric.
    pub fn new(points: Vec<String>, rows: Vec<Vec<Rat>>) -> Result<Self> {
        check_labels(&points)?;
        let n = points.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::BadMatrixShape);
        }
        let mut dist = Vec::with_capacity(n * n);
        for row in &rows {
            dist.extend(row.iter().cloned());
        }
        let m = FiniteMetric {
            points,
            dist,
            semi: false,
        };
        let mut semi = false;
        for i in 0..n {
            if !m.d(i, i).is_zero() {
                return Err(Error::NonzeroDiagonal(m.points[i].clone()));
            }
            for j in 0..n {
                if m.d(i, j) != m.d(j, i) {
                    return Err(Error::AsymmetricMetric(
                        m.points[i].clone(),
                        m.points[j].clone(),
                    ));
                }
                if m.d(i, j) < &Rat::zero() {
                    return Err(Error::NegativeDistance(
                        m.points[i].clone(),
                        m.points[j].clone(),
                    ));
                }
                if i != j && m.d(i, j).is_zero() {
                    semi = true;
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let lhs = m.d(x, z);
                    let rhs = m.d(x, y) + m.d(y, z);
                    if *lhs > rhs {
                        return Err(Error::MetricTriangleViolation {
                            x: m.points[x].clone(),
                            y: m.points[y].clone(),
                            z: m.points[z].clone(),
                            lhs: lhs.clone(),
                            rhs_a: m.d(x, y).clone(),
                            rhs_b: m.d(y, z).clone(),
                        });
                    }
                }
            }
        }
        Ok(FiniteMetric { semi, ..m })
    }

    /// Rejects semimetrics (zero distance between distinct points).
    pub fn new_strict(points: Vec<String>, rows: Vec<Vec<Rat>>) -> Result<Self> {
        let m = Self::new(points, rows)?;
        if m.semi {
            for i in 0..m.len() {
                for j in i + 1..m.len() {
                    if m.d(i, j).is_zero() {
                        return Err(Error::ZeroDistance(
                            m.points[i].clone(),
                            m.points[j].clone(),
                        ));
                    }
                }
            }
        }
        Ok(m)
    }

    pub(crate) fn from_parts_unchecked(points: Vec<String>, dist: Vec<Rat>) -> Self {
        let n = points.len();
        let mut semi = false;
        for i in 0..n {
            for j in i + 1..n {
                if dist[i * n + j].is_zero() {
                    semi = true;
                }
            }
        }
        FiniteMetric { points, dist, semi }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn is_semimetric(&self) -> bool {
        self.semi
    }

    pub fn d(&self, i: usize, j: usize) -> &Rat {
        &self.dist[i * self.points.len() + j]
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        let n = self.points.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.d(i, j).clone()).collect())
            .collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }
}
