//! Gauss rules from Jacobi matrices.
//!
//! The nodes are the eigenvalues of the Jacobi matrix and the weights are the
//! squared first components of its normalized eigenvectors. Only the first
//! row of the eigenvector matrix is ever accumulated.

use crate::error::{Error, Result};
use crate::export::CsvTable;
use crate::orthopoly::JacobiMatrix;

/// Maximum QL sweeps spent on any one eigenvalue.
pub const MAX_SWEEPS: usize = 50;

/// Eigenvalues (ascending) and the first component of each eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalEigen {
    pub eigenvalues: Vec<f64>,
    pub first_components: Vec<f64>,
}

/// Implicit-shift QL with Wilkinson shifts on the symmetric tridiagonal
/// matrix with `diagonal` and `off_diagonal` (`off_diagonal[i]` couples rows
/// `i` and `i+1`). Zero off-diagonals are allowed here.
pub fn symmetric_tridiagonal_eigen(
    diagonal: &[f64],
    off_diagonal: &[f64],
) -> Result<TridiagonalEigen> {
    let n = diagonal.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty tridiagonal matrix".into()));
    }
    if off_diagonal.len() + 1 != n {
        return Err(Error::LengthMismatch {
            expected: n - 1,
            actual: off_diagonal.len(),
        });
    }
    let mut d = diagonal.to_vec();
    let mut e = off_diagonal.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::Convergence { index: l });
            }

            // Wilkinson shift from the leading 2x2 block.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    Ok(TridiagonalEigen {
        eigenvalues: order.iter().map(|&i| d[i]).collect(),
        first_components: order.iter().map(|&i| z[i].abs()).collect(),
    })
}

/// Eigen-decomposition of a Jacobi matrix.
pub fn tridiag_eigen(jacobi: &JacobiMatrix) -> Result<TridiagonalEigen> {
    symmetric_tridiagonal_eigen(jacobi.alphas(), jacobi.betas())
}

/// Nodes and positive weights of a Gauss rule for a probability measure.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Validates strictly increasing nodes and positive weights.
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: nodes.len(),
                actual: weights.len(),
            });
        }
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("quadrature rule has no nodes".into()));
        }
        if nodes.windows(2).any(|p| !(p[0] < p[1])) {
            return Err(Error::InvalidArgument("nodes must be strictly increasing".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidArgument("weights must be positive".into()));
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ ν_j values[j]`.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: values.len(),
            });
        }
        Ok(self.weights.iter().zip(values).map(|(w, v)| w * v).sum())
    }

    /// Applies the rule to a function of one variable.
    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(u, w)| w * f(*u))
            .sum()
    }

    /// `lambda,nu` table.
    pub fn to_csv(&self) -> CsvTable {
        let mut table = CsvTable::new(&["lambda", "nu"]);
        for (u, w) in self.nodes.iter().zip(&self.weights) {
            table.push(&[*u, *w]);
        }
        table
    }
}

/// Free-function form of [`QuadratureRule::integrate`].
pub fn integrate(rule: &QuadratureRule, values: &[f64]) -> Result<f64> {
    rule.integrate(values)
}

/// Gauss rule with `d+1` nodes from a Jacobi matrix of degree `d`.
pub fn gauss_rule(jacobi: &JacobiMatrix) -> Result<QuadratureRule> {
    let eig = tridiag_eigen(jacobi)?;
    // Jacobi matrices with positive off-diagonals have simple spectra.
    assert!(
        eig.eigenvalues.windows(2).all(|p| p[0] < p[1]),
        "Jacobi matrix produced repeated eigenvalues"
    );
    let scale = jacobi.beta0() * jacobi.beta0();
    let mut weights: Vec<f64> = eig
        .first_components
        .iter()
        .map(|z| scale * z * z)
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    QuadratureRule::new(eig.eigenvalues, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre_jacobi(d: usize) -> JacobiMatrix {
        let betas = (1..=d)
            .map(|k| k as f64 / ((4 * k * k - 1) as f64).sqrt())
            .collect();
        JacobiMatrix::new(vec![0.0; d + 1], betas, 1.0).unwrap()
    }

    #[test]
    fn one_by_one() {
        let eig = symmetric_tridiagonal_eigen(&[0.3], &[]).unwrap();
        assert_eq!(eig.eigenvalues, vec![0.3]);
        assert_eq!(eig.first_components, vec![1.0]);
    }

    #[test]
    fn two_by_two() {
        let b = 1.0 / 3f64.sqrt();
        let eig = symmetric_tridiagonal_eigen(&[0.0, 0.0], &[b]).unwrap();
        assert!((eig.eigenvalues[0] + b).abs() < 1e-15);
        assert!((eig.eigenvalues[1] - b).abs() < 1e-15);
        for z in &eig.first_components {
            assert!((z - 0.5f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonal_input() {
        let eig = symmetric_tridiagonal_eigen(&[3.0, -1.0, 2.0], &[0.0, 0.0]).unwrap();
        assert_eq!(eig.eigenvalues, vec![-1.0, 2.0, 3.0]);
        assert_eq!(eig.first_components, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn matches_characteristic_polynomial_roots() {
        // Dense check: reconstruct T from Q row 0 is not possible, so verify
        // det(T - λI) = 0 through the Sturm recurrence at each eigenvalue.
        let diag = [1.0, -2.0, 0.5, 3.0, 0.0];
        let off = [0.7, 1.1, 0.2, 0.9];
        let eig = symmetric_tridiagonal_eigen(&diag, &off).unwrap();
        for &lam in &eig.eigenvalues {
            let mut p_prev = 1.0;
            let mut p = diag[0] - lam;
            for i in 1..diag.len() {
                let next = (diag[i] - lam) * p - off[i - 1] * off[i - 1] * p_prev;
                p_prev = p;
                p = next;
            }
            assert!(p.abs() < 1e-10, "residual {p}");
        }
        let total: f64 = eig.first_components.iter().map(|z| z * z).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_small() {
        let rule = gauss_rule(&legendre_jacobi(0)).unwrap();
        assert_eq!(rule.nodes(), &[0.0]);
        assert_eq!(rule.weights(), &[1.0]);

        let rule = gauss_rule(&legendre_jacobi(1)).unwrap();
        let b = 1.0 / 3f64.sqrt();
        assert!((rule.nodes()[0] + b).abs() < 1e-15 && (rule.nodes()[1] - b).abs() < 1e-15);
        assert!((rule.weights()[0] - 0.5).abs() < 1e-15);

        let rule = gauss_rule(&legendre_jacobi(5)).unwrap();
        assert!((rule.integrate(&[1.0; 6]).unwrap() - 1.0).abs() < 1e-15);
        assert!(rule.integrate(rule.nodes()).unwrap().abs() < 1e-12);
        let sq: Vec<f64> = rule.nodes().iter().map(|u| u * u).collect();
        assert!((rule.integrate(&sq).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn integrate_checks_length() {
        let rule = gauss_rule(&legendre_jacobi(2)).unwrap();
        assert_eq!(
            integrate(&rule, &[1.0, 2.0]),
            Err(Error::LengthMismatch { expected: 3, actual: 2 })
        );
    }

    #[test]
    fn interlacing() {
        for d in 1..12 {
            let a = gauss_rule(&legendre_jacobi(d - 1)).unwrap();
            let b = gauss_rule(&legendre_jacobi(d)).unwrap();
            for (i, x) in a.nodes().iter().enumerate() {
                assert!(b.nodes()[i] < *x && *x < b.nodes()[i + 1]);
            }
        }
    }

    #[test]
    fn rule_validation() {
        assert!(QuadratureRule::new(vec![0.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(QuadratureRule::new(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(QuadratureRule::new(vec![0.0], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn csv_header() {
        let rule = gauss_rule(&legendre_jacobi(1)).unwrap();
        assert!(rule.to_csv().render().starts_with("lambda,nu\n"));
    }
}
