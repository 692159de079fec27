use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

/// Coordinates `(q_1, …, q_a, x_1, …, x_l)` on `Tᵃ × Rˡ`.
///
/// Line coordinates are named `p1, …` on a cotangent bundle and `z` for
/// the contactization direction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Space {
    angles: usize,
    names: Vec<String>,
}

impl Space {
    pub fn torus(n: usize) -> Self {
        Space {
            angles: n,
            names: (1..=n).map(|i| format!("q{i}")).collect(),
        }
    }

    /// `T*Tⁿ` with coordinates `q1..qn, p1..pn`.
    pub fn cotangent(n: usize) -> Self {
        let mut s = Self::torus(n);
        s.names.extend((1..=n).map(|i| format!("p{i}")));
        s
    }

    pub fn with_names(angles: usize, names: Vec<String>) -> Self {
        assert!(names.len() >= angles);
        Space { angles, names }
    }

    /// The product with one more line coordinate.
    pub fn with_line(&self, name: &str) -> Self {
        let mut s = self.clone();
        s.names.push(name.to_string());
        s
    }

    pub fn angles(&self) -> usize {
        self.angles
    }

    pub fn lines(&self) -> usize {
        self.names.len() - self.angles
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_cotangent(&self) -> bool {
        self.lines() == self.angles
    }
}

/// A tensor grid on `Tᵃ × [−b, b]ˡ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub per_circle: usize,
    pub per_line: usize,
    pub line_box: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            per_circle: 32,
            per_line: 9,
            line_box: 4.0,
        }
    }
}

impl Grid {
    pub fn coarse() -> Self {
        Grid {
            per_circle: 12,
            per_line: 5,
            line_box: 4.0,
        }
    }

    pub fn num_points(&self, space: &Space) -> usize {
        self.per_circle.pow(space.angles() as u32) * self.per_line.pow(space.lines() as u32)
    }

    /// Coordinates of the i-th point in row-major order.
    pub fn point(&self, space: &Space, mut i: usize) -> Vec<f64> {
        let mut x = vec![0.0; space.dim()];
        for (d, xd) in x.iter_mut().enumerate().rev() {
            if d < space.angles() {
                let k = i % self.per_circle;
                i /= self.per_circle;
                *xd = TAU * k as f64 / self.per_circle as f64;
            } else {
                let k = i % self.per_line;
                i /= self.per_line;
                *xd = if self.per_line == 1 {
                    0.0
                } else {
                    -self.line_box + 2.0 * self.line_box * k as f64 / (self.per_line - 1) as f64
                };
            }
        }
        x
    }

    pub fn points(&self, space: &Space) -> Vec<Vec<f64>> {
        (0..self.num_points(space)).map(|i| self.point(space, i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_layout() {
        let s = Space::cotangent(1);
        let g = Grid {
            per_circle: 4,
            per_line: 3,
            line_box: 2.0,
        };
        let pts = g.points(&s);
        assert_eq!(pts.len(), 12);
        assert_eq!(pts[0], vec![0.0, -2.0]);
        assert_eq!(pts[1], vec![0.0, 0.0]);
        assert_eq!(pts[5][0], TAU / 4.0);
        assert_eq!(pts[5][1], 2.0);
    }

    #[test]
    fn names() {
        let s = Space::cotangent(2).with_line("z");
        assert_eq!(s.names(), &["q1", "q2", "p1", "p2", "z"]);
        assert_eq!(s.index_of("z"), Some(4));
        assert_eq!(s.lines(), 3);
    }
}
